#pragma once

#include <functional>

#include <Eigen/Core>

#include "pdlearn/rng.hpp"
#include "pdlearn/urllc.hpp"

namespace pdl {

// A constrained stochastic program over a scalar decision, parameterized by a
// scalar environment parameter theta. Objective and constraint act on the
// network-output scale y; output_decoding maps y to the physical decision.
// Deliberately exposes no optimal-solution oracle: training sees only sampled
// objective/constraint values and their gradients.
struct ProblemSpec {
  int num_constraints = 1;

  // Draws n environment parameters from the training distribution.
  std::function<Eigen::ArrayXd(Rng&, Eigen::Index)> sample_params;

  // f(y; theta) and df/dy.
  std::function<void(double y, double theta, double& f, double& dfdy)> objective;

  // One stochastic draw of the constraint c(y; theta) and dc/dy.
  std::function<void(double y, double theta, Rng& rng, double& c, double& dcdy)> constraint;

  // theta -> network input feature, and network output -> physical decision.
  std::function<double(double theta)> input_encoding;
  std::function<double(double y)> output_decoding;
};

// min y^2 s.t. theta - y <= 0, theta ~ Uniform[1,2].
// KKT optimum: y*(theta) = theta, lambda*(theta) = 2 theta.
ProblemSpec toy_problem();

// Minimal-bandwidth URLLC instance: decision is bandwidth in MHz on the
// network scale (decoded to Hz), objective is the bandwidth itself, and the
// constraint is a single-draw estimate of the linearized QoS residual at the
// training reliability eps_d.
ProblemSpec urllc_problem(const SystemConfig& cfg, double eps_d,
                          Eigen::Index mc_per_sample = 1);

}  // namespace pdl
