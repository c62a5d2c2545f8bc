#include "pdlearn/urllc.hpp"

#include <stdexcept>

namespace pdl {

SystemConfig SystemConfig::make_default() {
  SystemConfig cfg;
  cfg.max_tx_power = dbm_to_watts(23.0);
  cfg.noise_psd = dbm_to_watts(-173.0);
  return cfg;
}

// Bisection on the strictly decreasing Q(z); started from a bracket that
// covers Q(12) ~ 1.8e-33 through Q(-12).
double inv_q(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("inv_q: p must be in (0,1)");
  double lo = -12.0, hi = 12.0;
  while (gaussian_q(lo) < p) lo *= 2.0;
  while (gaussian_q(hi) > p) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) return mid;  // interval narrowed to adjacent doubles
    (gaussian_q(mid) > p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace pdl
