#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "symmimic/core/error.hpp"
#include "symmimic/core/json_util.hpp"
#include "symmimic/core/math.hpp"
#include "symmimic/core/rng.hpp"

// Fully connected network with a flat parameter vector. Batches are stored one
// sample per column.

namespace symmimic {

enum class Activation { kElu, kTanh, kRelu, kIdentity };

inline Activation activation_from_string(const std::string& s) {
  if (s == "elu") return Activation::kElu;
  if (s == "tanh") return Activation::kTanh;
  if (s == "relu") return Activation::kRelu;
  if (s == "identity") return Activation::kIdentity;
  throw ConfigError("unknown activation '" + s + "' (elu, tanh, relu, identity)");
}

struct MlpSpec {
  int input = 1;
  std::vector<int> hidden = {256, 128, 64};  // may be empty: a single linear layer
  int output = 1;
  std::string activation = "elu";
  std::uint64_t seed = 0;
  double output_gain = 1.0;  // scales the initial weights of the last layer
};

inline void validate(const MlpSpec& s) {
  if (s.input < 1 || s.output < 1) throw ConfigError("network input and output dims must be >= 1");
  for (int h : s.hidden)
    if (h < 1) throw ConfigError("network hidden dims must be >= 1");
  activation_from_string(s.activation);
  if (!(s.output_gain >= 0.0)) throw ConfigError("network output_gain must be >= 0");
}

inline Json to_json(const MlpSpec& s) {
  return {{"input", s.input},   {"hidden", s.hidden}, {"output", s.output}, {"activation", s.activation},
          {"seed", s.seed},     {"output_gain", s.output_gain}};
}

inline MlpSpec mlp_spec_from_json(const Json& j) {
  check_keys(j, {"input", "hidden", "output", "activation", "seed", "output_gain"}, "network");
  MlpSpec s;
  read_opt(j, "input", s.input);
  read_opt(j, "hidden", s.hidden);
  read_opt(j, "output", s.output);
  read_opt(j, "activation", s.activation);
  read_opt(j, "seed", s.seed);
  read_opt(j, "output_gain", s.output_gain);
  validate(s);
  return s;
}

/// Activations kept by forward() for backward().
struct MlpCache {
  std::vector<MatX> inputs;  // input of each layer
  std::vector<MatX> pre;     // pre-activation of each hidden layer
};

class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(const MlpSpec& spec) : spec_(spec), act_(activation_from_string(spec.activation)) {
    validate(spec);
    std::vector<int> dims = {spec.input};
    dims.insert(dims.end(), spec.hidden.begin(), spec.hidden.end());
    dims.push_back(spec.output);
    int offset = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      layers_.push_back({dims[l], dims[l + 1], offset});
      offset += dims[l] * dims[l + 1] + dims[l + 1];
    }
    params_ = VecX::Zero(offset);
    // Gaussian init with std gain/sqrt(fan_in), zero biases.
    Rng rng(spec.seed);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const bool last = l + 1 == layers_.size();
      const double gain = last ? spec.output_gain : std::sqrt(2.0);
      const double std = gain / std::sqrt(static_cast<double>(layers_[l].in));
      auto W = weight(l);
      for (int c = 0; c < W.cols(); ++c)
        for (int r = 0; r < W.rows(); ++r) W(r, c) = rng.normal(0.0, std);
    }
  }

  const MlpSpec& spec() const { return spec_; }
  int input_dim() const { return spec_.input; }
  int output_dim() const { return spec_.output; }
  int num_layers() const { return static_cast<int>(layers_.size()); }
  int num_params() const { return static_cast<int>(params_.size()); }
  const VecX& params() const { return params_; }
  void set_params(const VecX& p) {
    if (p.size() != params_.size()) throw ValidationError("network parameter count mismatch");
    params_ = p;
  }

  Eigen::Map<MatX> weight(std::size_t l) {
    const auto& L = layers_[l];
    return {params_.data() + L.offset, L.out, L.in};
  }
  Eigen::Map<const MatX> weight(std::size_t l) const {
    const auto& L = layers_[l];
    return {params_.data() + L.offset, L.out, L.in};
  }
  Eigen::Map<VecX> bias(std::size_t l) {
    const auto& L = layers_[l];
    return {params_.data() + L.offset + L.in * L.out, L.out};
  }
  Eigen::Map<const VecX> bias(std::size_t l) const {
    const auto& L = layers_[l];
    return {params_.data() + L.offset + L.in * L.out, L.out};
  }

  /// Output for a batch (input_dim x B). Fills `cache` when given.
  MatX forward(const MatX& x, MlpCache* cache = nullptr) const {
    if (x.rows() != spec_.input)
      throw ValidationError("network input has " + std::to_string(x.rows()) + " rows, expected " +
                            std::to_string(spec_.input));
    if (cache) {
      cache->inputs.clear();
      cache->pre.clear();
    }
    MatX a = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      if (cache) cache->inputs.push_back(a);
      MatX z = weight(l) * a;
      z.colwise() += bias(l);
      if (l + 1 == layers_.size()) return z;
      if (cache) cache->pre.push_back(z);
      a = activate(z);
    }
    return a;
  }

  VecX forward_one(const VecX& x) const { return forward(MatX(x)).col(0); }

  /// Reverse pass. `dy` is dLoss/dOutput (output_dim x B). Returns parameter
  /// gradients summed over the batch; writes dLoss/dInput to `dx` when given.
  VecX backward(const MlpCache& cache, const MatX& dy, MatX* dx = nullptr) const {
    if (cache.inputs.size() != layers_.size()) throw ValidationError("backward without a matching forward cache");
    VecX grad = VecX::Zero(params_.size());
    MatX dz = dy;
    for (int l = num_layers() - 1; l >= 0; --l) {
      const auto& L = layers_[l];
      Eigen::Map<MatX>(grad.data() + L.offset, L.out, L.in).noalias() = dz * cache.inputs[l].transpose();
      Eigen::Map<VecX>(grad.data() + L.offset + L.in * L.out, L.out) = dz.rowwise().sum();
      if (l == 0 && !dx) break;
      MatX da = weight(l).transpose() * dz;
      if (l == 0) {
        *dx = std::move(da);
        break;
      }
      dz = da.cwiseProduct(activate_grad(cache.pre[l - 1]));
    }
    return grad;
  }

 private:
  struct Layer {
    int in, out, offset;
  };

  MatX activate(const MatX& z) const {
    switch (act_) {
      case Activation::kElu: return z.unaryExpr([](double v) { return v > 0.0 ? v : std::expm1(v); });
      case Activation::kTanh: return z.array().tanh().matrix();
      case Activation::kRelu: return z.cwiseMax(0.0);
      case Activation::kIdentity: return z;
    }
    return z;
  }
  MatX activate_grad(const MatX& z) const {
    switch (act_) {
      case Activation::kElu: return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : std::exp(v); });
      case Activation::kTanh: return (1.0 - z.array().tanh().square()).matrix();
      case Activation::kRelu: return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
      case Activation::kIdentity: return MatX::Ones(z.rows(), z.cols());
    }
    return z;
  }

  MlpSpec spec_;
  Activation act_ = Activation::kElu;
  std::vector<Layer> layers_;
  VecX params_;
};

inline Json to_json(const Mlp& net) { return {{"spec", to_json(net.spec())}, {"params", vec_to_json(net.params())}}; }

inline Mlp mlp_from_json(const Json& j) {
  check_keys(j, {"spec", "params"}, "network");
  Mlp net(mlp_spec_from_json(j.at("spec")));
  const VecX p = vec_from_json(j.at("params"));
  if (p.size() != net.num_params())
    throw DataError("network has " + std::to_string(p.size()) + " parameters, spec needs " +
                    std::to_string(net.num_params()));
  if (!p.allFinite()) throw DataError("network parameters are not finite");
  net.set_params(p);
  return net;
}

}  // namespace symmimic
