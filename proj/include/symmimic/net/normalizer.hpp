#pragma once

#include "symmimic/core/error.hpp"
#include "symmimic/core/json_util.hpp"
#include "symmimic/core/math.hpp"

namespace symmimic {

/// Per-dimension running mean/variance (Chan's parallel Welford merge).
/// normalize() returns clip((x - mean) / sqrt(var + eps), +-clip).
class RunningNorm {
 public:
  RunningNorm() = default;
  explicit RunningNorm(int dim, double epsilon = 1e-8, double clip = 10.0)
      : mean_(VecX::Zero(dim)), var_(VecX::Ones(dim)), epsilon_(epsilon), clip_(clip) {}

  int dim() const { return static_cast<int>(mean_.size()); }
  double count() const { return count_; }
  const VecX& mean() const { return mean_; }
  const VecX& var() const { return var_; }
  bool frozen() const { return frozen_; }
  void set_frozen(bool f) { frozen_ = f; }

  /// Folds a batch (dim x B) into the statistics.
  void update(const MatX& batch) {
    if (frozen_ || batch.cols() == 0) return;
    if (batch.rows() != dim()) throw ValidationError("normalizer dimension mismatch");
    const double n = static_cast<double>(batch.cols());
    const VecX bmean = batch.rowwise().mean();
    const VecX bvar = (batch.colwise() - bmean).array().square().rowwise().mean();
    if (count_ == 0.0) {
      mean_ = bmean;
      var_ = bvar;
      count_ = n;
      return;
    }
    const double total = count_ + n;
    const VecX delta = bmean - mean_;
    const VecX m2 = var_ * count_ + bvar * n + delta.cwiseProduct(delta) * (count_ * n / total);
    mean_ += delta * (n / total);
    var_ = m2 / total;
    count_ = total;
  }

  MatX normalize(const MatX& batch) const {
    if (batch.rows() != dim()) throw ValidationError("normalizer dimension mismatch");
    const VecX inv = (var_.array() + epsilon_).rsqrt().matrix();
    MatX out = (batch.colwise() - mean_).array().colwise() * inv.array();
    return out.cwiseMax(-clip_).cwiseMin(clip_);
  }
  VecX normalize_one(const VecX& x) const { return normalize(MatX(x)).col(0); }

  Json to_json() const {
    return {{"mean", vec_to_json(mean_)}, {"var", vec_to_json(var_)}, {"count", count_},
            {"epsilon", epsilon_},        {"clip", clip_},            {"frozen", frozen_}};
  }
  static RunningNorm from_json(const Json& j) {
    check_keys(j, {"mean", "var", "count", "epsilon", "clip", "frozen"}, "normalizer");
    RunningNorm n;
    n.mean_ = vec_from_json(j.at("mean"));
    n.var_ = vec_from_json(j.at("var"));
    n.count_ = j.at("count").get<double>();
    read_opt(j, "epsilon", n.epsilon_);
    read_opt(j, "clip", n.clip_);
    read_opt(j, "frozen", n.frozen_);
    if (n.mean_.size() != n.var_.size() || (n.var_.array() < 0.0).any())
      throw DataError("normalizer state is inconsistent");
    return n;
  }

 private:
  VecX mean_, var_;
  double count_ = 0.0;
  double epsilon_ = 1e-8;
  double clip_ = 10.0;
  bool frozen_ = false;
};

}  // namespace symmimic
