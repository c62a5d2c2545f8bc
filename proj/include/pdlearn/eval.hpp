#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "pdlearn/baseline.hpp"
#include "pdlearn/learner.hpp"

namespace pdl {

// A learned allocation policy: distance in meters -> bandwidth in Hz.
using Predictor = std::function<double(double d_m)>;

Predictor make_predictor(const Mlp<double>& primal, const ProblemSpec& problem);

// Normalized RMS deviation sqrt(E{(What - W*)^2} / E{(W*)^2}) over the grid.
double sigma_vs_oracle(const Predictor& pred, const OracleGrid& grid);

// Mean sigma per snapshot iteration across runs (all runs must share the
// snapshot schedule).
std::vector<std::pair<std::uint64_t, double>> sigma_curve(
    const std::vector<TrainedPair>& runs, const ProblemSpec& problem,
    const OracleGrid& grid);

// Fraction of (run, alpha) pairs whose allocation satisfies the QoS constraint
// at eps_check, judged on mc_samples common-random fading draws.
double availability(const std::vector<Predictor>& runs, const SystemConfig& cfg,
                    double eps_check, Eigen::Index n_alpha, Eigen::Index mc_samples,
                    std::uint64_t seed);

// percentile in (0,1]; nearest-rank over relative excess (What - W*) / W*.
double bandwidth_loss_percentile(const std::vector<Predictor>& runs,
                                 const OracleGrid& grid, double percentile,
                                 Eigen::Index n_alpha, std::uint64_t seed);

struct PerAlphaRow {
  double eps_d = 0.0;
  int run = 0;
  double d_m = 0.0;
  double w_hat_mhz = 0.0;
  double w_star_mhz = 0.0;
  double rel_excess = 0.0;
  bool satisfied = false;
};

struct Table3Row {
  double eps_d = 0.0;
  double availability = 0.0;
  double w_tilde = 0.0;
  int n_runs = 0;
  int n_alpha = 0;
};

// Row-level scoring of already-trained policies: oracle excess plus the
// constraint check at eps_check on a common fading pool.
std::vector<PerAlphaRow> eval_per_alpha(const std::vector<Predictor>& runs,
                                        const SystemConfig& cfg, const OracleGrid& grid,
                                        double eps_check, Eigen::Index n_alpha,
                                        Eigen::Index mc_samples, std::uint64_t seed);

struct Table3Options {
  std::vector<double> eps_d_sweep{1e-5, 1e-6, 1e-7};
  int n_runs = 20;
  int n_alpha = 200;
  std::uint64_t iterations = 20000;
  Eigen::Index mc_samples = 1000000;
  std::uint64_t seed = 1;
};

// Trains n_runs pairs per eps_d and scores availability / bandwidth loss
// against eps_max. per_alpha, when non-null, receives one row per
// (eps_d, run, alpha) triple.
std::vector<Table3Row> table3(const SystemConfig& cfg, const TrainerConfig& base,
                              const OracleGrid& grid, const Table3Options& opt,
                              std::vector<PerAlphaRow>* per_alpha = nullptr);

}  // namespace pdl
