#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pdlearn/mlp.hpp"
#include "pdlearn/problem.hpp"

namespace pdl {

struct TrainerConfig {
  double learning_rate = 0.1;
  int batch_size = 100;
  std::uint64_t iterations = 10000;
  std::uint64_t seed = 1;
  double eps_d = 1e-5;       // URLLC instance only
  int hidden_layers = 4;
  int width = 8;
  std::uint64_t snapshot_every = 0;  // 0 = keep no intermediate primal copies

  std::vector<int> dims() const {
    std::vector<int> d(1, 1);
    d.insert(d.end(), std::size_t(hidden_layers), width);
    d.push_back(1);
    return d;
  }
};

struct HistoryRow {
  double lagrangian = 0.0;
  double mean_constraint = 0.0;
  double primal_grad_norm = 0.0;
  double dual_grad_norm = 0.0;
};

struct TrainedPair {
  Mlp<double> primal;
  Mlp<double> dual;
  std::vector<HistoryRow> history;
  std::vector<std::pair<std::uint64_t, Mlp<double>>> snapshots;  // (iteration, primal copy)
};

// Raised when the sampled Lagrangian or a gradient stops being finite.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(std::uint64_t iteration, const std::string& what)
      : std::runtime_error(what), iteration_(iteration) {}
  std::uint64_t iteration() const { return iteration_; }

 private:
  std::uint64_t iteration_;
};

// Joint primal-descent / dual-ascent training on the sampled Lagrangian.
// Both updates at iteration t use the iterate from t (simultaneous play).
// Deterministic given tcfg.seed.
TrainedPair train(const ProblemSpec& problem, const TrainerConfig& tcfg);

struct KktResidual {
  double primal_norm = 0.0;     // ||grad_{primal params} L||
  double dual_norm = 0.0;       // ||grad_{dual params} L||
  double max_violation = 0.0;   // max_i c_i over the probe batch
  double min_multiplier = 0.0;  // min_i lambda_i
};

KktResidual kkt_residual(const TrainedPair& pair, const ProblemSpec& problem,
                         Eigen::Index probe_batch, Rng& rng);

}  // namespace pdl
