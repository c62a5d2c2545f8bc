#include "pdlearn/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace pdl {

ProblemSpec toy_problem() {
  ProblemSpec p;
  p.num_constraints = 1;
  p.sample_params = [](Rng& rng, Eigen::Index n) { return rng.uniform_array(n, 1.0, 2.0); };
  p.objective = [](double y, double /*theta*/, double& f, double& dfdy) {
    f = y * y;
    dfdy = 2.0 * y;
  };
  p.constraint = [](double y, double theta, Rng& /*rng*/, double& c, double& dcdy) {
    c = theta - y;
    dcdy = -1.0;
  };
  p.input_encoding = [](double theta) { return (theta - 1.5) / 0.5; };
  p.output_decoding = [](double y) { return y; };
  return p;
}

ProblemSpec urllc_problem(const SystemConfig& cfg, double eps_d, Eigen::Index mc_per_sample) {
  cfg.validate();
  if (eps_d > cfg.eps_max)
    throw std::invalid_argument("urllc_problem: training reliability must satisfy eps_d <= eps_max");
  if (mc_per_sample < 1) throw std::invalid_argument("urllc_problem: mc_per_sample must be >= 1");

  const double theta = qos_exponent(cfg, eps_d);
  const double kappa = inv_q(eps_decode(eps_d));
  const double target = std::exp(-theta * cfg.arrival_rate);
  const int n_t = cfg.num_antennas;

  // Inputs: large-scale gain in dB, centered and scaled to [-1, 1] over the
  // cell's distance range (larger input = nearer user).
  const double lo_db = 10.0 * std::log10(large_scale_gain(cfg.cell_max_d, cfg));
  const double hi_db = 10.0 * std::log10(large_scale_gain(cfg.cell_min_d, cfg));
  const double mid_db = 0.5 * (lo_db + hi_db);
  const double half_db = 0.5 * (hi_db - lo_db);

  ProblemSpec p;
  p.num_constraints = 1;
  const double d_min = cfg.cell_min_d, d_max = cfg.cell_max_d;
  p.sample_params = [d_min, d_max](Rng& rng, Eigen::Index n) {
    return rng.uniform_array(n, d_min, d_max);
  };
  // Network output y is bandwidth in MHz; the objective is the bandwidth itself.
  p.objective = [](double y, double /*d*/, double& f, double& dfdy) {
    f = y;
    dfdy = 1.0;
  };
  p.constraint = [cfg, theta, kappa, target, n_t, mc_per_sample](double y, double d, Rng& rng,
                                                                double& c, double& dcdy) {
    const double w_hz = y * 1e6;
    const double a = large_scale_gain(d, cfg);
    double c_acc = 0.0, dc_acc = 0.0;
    for (Eigen::Index i = 0; i < mc_per_sample; ++i) {
      const double g = sample_small_scale(rng, n_t);
      const double s = achievable_rate(w_hz, a, g, kappa, cfg);
      const double e = std::exp(-theta * s);
      c_acc += e - target;
      dc_acc += -theta * e * rate_grad_w(w_hz, a, g, kappa, cfg) * 1e6;
    }
    c = c_acc / double(mc_per_sample);
    dcdy = dc_acc / double(mc_per_sample);
  };
  p.input_encoding = [cfg, mid_db, half_db](double d) {
    return (10.0 * std::log10(large_scale_gain(d, cfg)) - mid_db) / half_db;
  };
  p.output_decoding = [](double y) { return y * 1e6; };
  return p;
}

}  // namespace pdl
