#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Core>

namespace pdl {

// One splitmix64 output step; also used as the mixing primitive for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Child seed = mix(master, component name, index). Documented so independent
// reimplementations can reproduce the experiment fan-out (run counts and roles),
// though bit-exact trajectories across RNG engines are not a goal.
inline std::uint64_t child_seed(std::uint64_t master, std::string_view component,
                                std::uint64_t index) {
  std::uint64_t state = master ^ fnv1a64(component);
  std::uint64_t z = splitmix64(state);
  state = z ^ index;
  return splitmix64(state);
}

// Deterministic double-precision RNG. All distributions are hand-derived from
// the raw 64-bit stream so that sequences are stable across platforms and
// standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Exponential with mean 1; log1p keeps precision near u = 0.
  double exponential() { return -std::log1p(-uniform01()); }

  // Gamma(shape, 1) for integer shape, as a sum of exponentials.
  double gamma_int(int shape) {
    double s = 0.0;
    for (int i = 0; i < shape; ++i) s += exponential();
    return s;
  }

  Eigen::ArrayXd uniform_array(Eigen::Index n, double a, double b) {
    Eigen::ArrayXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = uniform(a, b);
    return out;
  }

  Eigen::ArrayXd gamma_int_array(Eigen::Index n, int shape) {
    Eigen::ArrayXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = gamma_int(shape);
    return out;
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace pdl
