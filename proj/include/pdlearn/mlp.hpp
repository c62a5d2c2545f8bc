#pragma once

#include <cmath>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pdlearn/rng.hpp"

namespace pdl {

enum class OutputActivation { Identity, Softplus };
enum class Direction { Descent, Ascent };

// Overflow-safe softplus; for large z, softplus(z) -> z.
template <typename Scalar>
Scalar softplus(Scalar z) {
  if (z > Scalar(30)) return z;
  if (z < Scalar(-30)) return std::exp(z);
  return std::log1p(std::exp(z));
}

template <typename Scalar>
Scalar logistic(Scalar z) {
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

// Fully connected TanH network with an Identity or Softplus output layer.
// Batches are stored column-wise: a batch of B input vectors is a
// (input_dim x B) matrix.
template <typename Scalar = double>
class Mlp {
 public:
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Mlp() = default;

  // Deterministic init: weights ~ Uniform(-sqrt(3/fan_in), sqrt(3/fan_in)),
  // i.e. zero mean with standard deviation 1/sqrt(fan_in); biases zero.
  Mlp(const std::vector<int>& layer_dims, OutputActivation out_act, std::uint64_t seed)
      : dims_(layer_dims), out_act_(out_act) {
    if (dims_.size() < 2) throw std::invalid_argument("Mlp: need at least 2 layer dims");
    for (int d : dims_)
      if (d < 1) throw std::invalid_argument("Mlp: layer dims must be >= 1");
    Rng rng(seed);
    weights_.reserve(dims_.size() - 1);
    biases_.reserve(dims_.size() - 1);
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
      const int fan_in = dims_[l];
      const Scalar bound = std::sqrt(Scalar(3) / Scalar(fan_in));
      Mat w(dims_[l + 1], dims_[l]);
      for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j)
          w(i, j) = static_cast<Scalar>(rng.uniform(-double(bound), double(bound)));
      weights_.push_back(std::move(w));
      biases_.push_back(Vec::Zero(dims_[l + 1]));
    }
  }

  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  std::size_t num_layers() const { return weights_.size(); }
  const std::vector<int>& layer_dims() const { return dims_; }
  OutputActivation output_activation() const { return out_act_; }

  std::vector<Mat>& weights() { return weights_; }
  std::vector<Vec>& biases() { return biases_; }
  const std::vector<Mat>& weights() const { return weights_; }
  const std::vector<Vec>& biases() const { return biases_; }

  bool finite() const {
    for (const auto& w : weights_)
      if (!w.allFinite()) return false;
    for (const auto& b : biases_)
      if (!b.allFinite()) return false;
    return true;
  }

 private:
  std::vector<int> dims_;
  OutputActivation out_act_ = OutputActivation::Identity;
  std::vector<Mat> weights_;
  std::vector<Vec> biases_;
};

template <typename Scalar = double>
struct ForwardCache {
  // activations[0] is the input batch; activations[l+1] = act(pre[l]).
  std::vector<typename Mlp<Scalar>::Mat> pre;
  std::vector<typename Mlp<Scalar>::Mat> activations;
  std::vector<int> dims;  // layer dims of the producing net, for staleness checks
};

template <typename Scalar = double>
struct GradientSet {
  std::vector<typename Mlp<Scalar>::Mat> d_weights;
  std::vector<typename Mlp<Scalar>::Vec> d_biases;

  bool finite() const {
    for (const auto& w : d_weights)
      if (!w.allFinite()) return false;
    for (const auto& b : d_biases)
      if (!b.allFinite()) return false;
    return true;
  }

  Scalar norm() const {
    Scalar sq = 0;
    for (const auto& w : d_weights) sq += w.squaredNorm();
    for (const auto& b : d_biases) sq += b.squaredNorm();
    return std::sqrt(sq);
  }
};

template <typename Scalar>
typename Mlp<Scalar>::Mat forward(const Mlp<Scalar>& net, const typename Mlp<Scalar>::Mat& inputs,
                                  ForwardCache<Scalar>* cache = nullptr) {
  if (inputs.rows() != net.input_dim())
    throw std::invalid_argument("forward: input dim mismatch");
  if (cache) {
    cache->pre.clear();
    cache->activations.clear();
    cache->activations.push_back(inputs);
    cache->dims = net.layer_dims();
  }
  typename Mlp<Scalar>::Mat a = inputs;
  const std::size_t L = net.num_layers();
  for (std::size_t l = 0; l < L; ++l) {
    typename Mlp<Scalar>::Mat z = (net.weights()[l] * a).colwise() + net.biases()[l];
    if (l + 1 < L) {
      a = z.array().tanh().matrix();
    } else if (net.output_activation() == OutputActivation::Softplus) {
      a = z.unaryExpr([](Scalar v) { return softplus(v); });
    } else {
      a = z;
    }
    if (cache) {
      cache->pre.push_back(std::move(z));
      cache->activations.push_back(a);
    }
  }
  return a;
}

// Gradient of (1/B) * sum_b output_grad_b . output_b with respect to all
// parameters, via backpropagation through the cached forward pass.
template <typename Scalar>
GradientSet<Scalar> backward(const Mlp<Scalar>& net, const ForwardCache<Scalar>& cache,
                             const typename Mlp<Scalar>::Mat& output_grad) {
  const std::size_t L = net.num_layers();
  if (cache.dims != net.layer_dims() || cache.pre.size() != L)
    throw std::invalid_argument("backward: cache does not match this network");
  if (output_grad.rows() != net.output_dim() ||
      output_grad.cols() != cache.activations[0].cols())
    throw std::invalid_argument("backward: output_grad shape mismatch");

  const Scalar inv_b = Scalar(1) / Scalar(output_grad.cols());
  GradientSet<Scalar> g;
  g.d_weights.resize(L);
  g.d_biases.resize(L);

  typename Mlp<Scalar>::Mat delta;
  if (net.output_activation() == OutputActivation::Softplus) {
    delta = output_grad.cwiseProduct(
        cache.pre[L - 1].unaryExpr([](Scalar v) { return logistic(v); }));
  } else {
    delta = output_grad;
  }
  for (std::size_t l = L; l-- > 0;) {
    g.d_weights[l] = delta * cache.activations[l].transpose() * inv_b;
    g.d_biases[l] = delta.rowwise().sum() * inv_b;
    if (l > 0) {
      delta = (net.weights()[l].transpose() * delta)
                  .cwiseProduct((1 - cache.pre[l - 1].array().tanh().square()).matrix());
    }
  }
  return g;
}

// params <- params -/+ rate * grads (Descent subtracts, Ascent adds).
template <typename Scalar>
void apply_update(Mlp<Scalar>& net, const GradientSet<Scalar>& grads, Scalar rate,
                  Direction dir) {
  if (rate <= Scalar(0)) throw std::invalid_argument("apply_update: rate must be > 0");
  if (grads.d_weights.size() != net.num_layers())
    throw std::invalid_argument("apply_update: gradient shape mismatch");
  if (!grads.finite()) throw std::runtime_error("apply_update: non-finite gradients");
  const Scalar s = (dir == Direction::Descent) ? -rate : rate;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    net.weights()[l] += s * grads.d_weights[l];
    net.biases()[l] += s * grads.d_biases[l];
  }
}

// Text serialization (round-trips doubles exactly via max_digits10).
void save_mlp(const Mlp<double>& net, std::ostream& os);
Mlp<double> load_mlp(std::istream& is);
void save_mlp_file(const Mlp<double>& net, const std::string& path);
Mlp<double> load_mlp_file(const std::string& path);

}  // namespace pdl
