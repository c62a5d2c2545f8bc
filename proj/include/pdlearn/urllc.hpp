#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

#include "pdlearn/rng.hpp"

namespace pdl {

// All quantities in SI units (Hz, W, s, bits, packets/frame).
struct SystemConfig {
  double frame_duration = 1e-4;    // T_f, s
  double ul_duration = 0.5e-4;     // tau, s
  double packet_bits = 160.0;      // u
  double max_tx_power = 0.0;       // P_max, W (set by make_default)
  double noise_psd = 0.0;          // N_0, W/Hz
  int num_antennas = 8;            // N_t
  double arrival_rate = 1.0;       // m, packets/frame
  double delay_bound = 10.0;       // D_max, frames
  double tx_delay = 1.0;           // D^t, frames
  double dec_delay = 1.0;          // D^c, frames
  double eps_max = 1e-5;           // overall reliability target
  double cell_min_d = 50.0;        // m
  double cell_max_d = 250.0;       // m
  double pathloss_offset_db = 35.3;
  double pathloss_exp_db = 37.6;   // per decade of distance

  double queue_delay_bound() const { return delay_bound - tx_delay - dec_delay; }

  void validate() const {
    if (ul_duration <= 0 || ul_duration > frame_duration)
      throw std::invalid_argument("SystemConfig: need 0 < tau <= T_f");
    if (queue_delay_bound() < 1)
      throw std::invalid_argument("SystemConfig: D_max - D_t - D_c must be >= 1");
    if (eps_max <= 0 || eps_max >= 1)
      throw std::invalid_argument("SystemConfig: eps_max must be in (0,1)");
    if (packet_bits <= 0 || max_tx_power <= 0 || noise_psd <= 0 || arrival_rate <= 0 ||
        num_antennas < 1 || cell_min_d <= 0 || cell_max_d <= cell_min_d)
      throw std::invalid_argument("SystemConfig: nonpositive physical quantity");
  }

  static SystemConfig make_default();
};

inline double dbm_to_watts(double p_dbm) { return std::pow(10.0, (p_dbm - 30.0) / 10.0); }

// Path-loss model 10*lg(PL) = 35.3 + 37.6*lg(d); alpha = 10^(-PL_dB/10).
inline double large_scale_gain(double d_m, const SystemConfig& cfg) {
  if (d_m <= 0) throw std::invalid_argument("large_scale_gain: d must be > 0");
  return std::pow(10.0, -(cfg.pathloss_offset_db + cfg.pathloss_exp_db * std::log10(d_m)) / 10.0);
}

// Combined small-scale gain across N_t antennas: Gamma(N_t, 1).
inline double sample_small_scale(Rng& rng, int n_antennas) {
  return rng.gamma_int(n_antennas);
}

double inv_q(double p);                 // z with Q(z) = p, bisected to machine resolution
inline double gaussian_q(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Optimal QoS exponent, from the equality case of the queueing constraint.
inline double qos_exponent(const SystemConfig& cfg, double eps) {
  return -std::log(eps / 2.0) / (cfg.arrival_rate * cfg.queue_delay_bound());
}
inline double qos_exponent(const SystemConfig& cfg) { return qos_exponent(cfg, cfg.eps_max); }

// Decoding-error budget: half of the overall reliability target.
inline double eps_decode(double eps) { return eps / 2.0; }

// Finite-blocklength achievable rate in packets/frame (dispersion ~ 1),
// clamped at 0 where the short-code penalty exceeds the Shannon term.
// kappa = inv_q(eps_c) is passed in so callers can hoist the inversion.
template <typename Scalar>
Scalar achievable_rate(Scalar w_hz, Scalar alpha, Scalar g, Scalar kappa,
                       const SystemConfig& cfg) {
  const Scalar snr = alpha * g * Scalar(cfg.max_tx_power) / (Scalar(cfg.noise_psd) * w_hz);
  const Scalar bracket = std::log1p(snr) - kappa / std::sqrt(Scalar(cfg.ul_duration) * w_hz);
  const Scalar a = Scalar(cfg.ul_duration) / (Scalar(cfg.packet_bits) * Scalar(M_LN2));
  const Scalar s = a * w_hz * bracket;
  return s > Scalar(0) ? s : Scalar(0);
}

// Analytic d(rate)/dW; 0 in the clamped region.
template <typename Scalar>
Scalar rate_grad_w(Scalar w_hz, Scalar alpha, Scalar g, Scalar kappa,
                   const SystemConfig& cfg) {
  const Scalar snr = alpha * g * Scalar(cfg.max_tx_power) / (Scalar(cfg.noise_psd) * w_hz);
  const Scalar tw = Scalar(cfg.ul_duration) * w_hz;
  const Scalar bracket = std::log1p(snr) - kappa / std::sqrt(tw);
  if (bracket <= Scalar(0)) return Scalar(0);
  const Scalar a = Scalar(cfg.ul_duration) / (Scalar(cfg.packet_bits) * Scalar(M_LN2));
  return a * (std::log1p(snr) - snr / (Scalar(1) + snr) - kappa / (Scalar(2) * std::sqrt(tw)));
}

// Vectorized rate over a fading-sample array (one W, alpha; many g).
inline Eigen::ArrayXd achievable_rate_samples(double w_hz, double alpha,
                                              const Eigen::ArrayXd& g, double kappa,
                                              const SystemConfig& cfg) {
  const double b = alpha * cfg.max_tx_power / (cfg.noise_psd * w_hz);
  const double pen = kappa / std::sqrt(cfg.ul_duration * w_hz);
  const double a = cfg.ul_duration / (cfg.packet_bits * M_LN2);
  return (a * w_hz) * ((b * g).log1p() - pen).max(0.0);
}

// QoS constraint residual (1/N) sum e^{-theta s_i} - e^{-theta m}; feasible iff <= 0.
inline double constraint_value(double w_hz, double alpha, double theta, double kappa,
                               const SystemConfig& cfg, const Eigen::ArrayXd& g_samples) {
  if (g_samples.size() == 0) throw std::invalid_argument("constraint_value: empty samples");
  const Eigen::ArrayXd s = achievable_rate_samples(w_hz, alpha, g_samples, kappa, cfg);
  return (-theta * s).exp().mean() - std::exp(-theta * cfg.arrival_rate);
}

// Effective capacity -(1/theta) ln E{e^{-theta s}} in packets/frame.
inline double effective_capacity(double w_hz, double alpha, double theta, double kappa,
                                 const SystemConfig& cfg, const Eigen::ArrayXd& g_samples) {
  if (g_samples.size() == 0) throw std::invalid_argument("effective_capacity: empty samples");
  const Eigen::ArrayXd s = achievable_rate_samples(w_hz, alpha, g_samples, kappa, cfg);
  return -std::log((-theta * s).exp().mean()) / theta;
}

}  // namespace pdl
