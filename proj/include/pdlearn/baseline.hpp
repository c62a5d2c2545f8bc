#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pdlearn/rng.hpp"
#include "pdlearn/urllc.hpp"

namespace pdl {

struct StepSchedule {
  enum class Kind { Constant, RobbinsMonro };
  Kind kind = Kind::RobbinsMonro;
  double phi0 = 1e5;      // Hz; the residual is O(1) while W is O(1e5..1e6)
  double offset = 1000.0; // RobbinsMonro: phi(t) = phi0 / (1 + t/offset)

  double at(std::uint64_t t) const {
    return kind == Kind::Constant ? phi0 : phi0 / (1.0 + double(t) / offset);
  }
};

// Stochastic fixed-point iteration W <- [W + phi(t)(e^{-theta s} - e^{-theta m})]^+
// with one fresh fading draw per step; the projection clamps to a 1 kHz floor.
double solve_w_sgd(double alpha, const SystemConfig& cfg, double eps,
                   const StepSchedule& sched, std::uint64_t iters, Rng& rng,
                   double w0 = 1e5);

// Same iteration with an injected channel sampler (t -> g). An optional trace
// receives the iterate after every step.
double solve_w_sgd(double alpha, const SystemConfig& cfg, double eps,
                   const StepSchedule& sched, std::uint64_t iters,
                   const std::function<double(std::uint64_t)>& sample_g, double w0 = 1e5,
                   std::vector<double>* trace = nullptr);

// High-accuracy oracle: bisection on the Monte Carlo constraint with common
// random numbers, so the estimated residual is monotone in W sample-path-wise.
// Returns the smallest W (within tol) with residual <= 0.
double solve_w_bisection(double alpha, const SystemConfig& cfg, double eps,
                         Eigen::Index mc_samples, double tol_hz, Rng& rng);

struct OracleGrid {
  double eps = 0.0;
  Eigen::Index mc_samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> d_m;
  std::vector<double> alpha;
  std::vector<double> w_star_hz;

  // Piecewise-linear W*(d); d is clamped to the grid range.
  double interpolate_d(double d) const;
};

OracleGrid compute_oracle_grid(const SystemConfig& cfg, double eps, int n_points,
                               Eigen::Index mc_samples, std::uint64_t seed);
void save_oracle_grid(const OracleGrid& grid, const std::string& path);
bool load_oracle_grid(const std::string& path, OracleGrid& grid);
// Loads a compatible cached grid or computes and caches one.
OracleGrid cached_oracle_grid(const SystemConfig& cfg, double eps, int n_points,
                              Eigen::Index mc_samples, std::uint64_t seed,
                              const std::string& cache_path);

struct Table2Row {
  double d_m = 0.0;
  double eps = 0.0;
  double w_star_mhz = 0.0;
  std::string method;
  Eigen::Index mc_samples = 0;
  std::uint64_t seed = 0;
};

std::vector<Table2Row> table2(const SystemConfig& cfg, const std::vector<double>& distances,
                              const std::vector<double>& reliabilities,
                              Eigen::Index mc_samples, std::uint64_t seed);

}  // namespace pdl
