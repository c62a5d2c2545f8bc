#include "pdlearn/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pdl {

namespace {
constexpr double kFloorHz = 1e3;    // projection floor; W = 0 is an absorbing point
constexpr double kBracketHi = 1e8;  // Hz
}  // namespace

double solve_w_sgd(double alpha, const SystemConfig& cfg, double eps,
                   const StepSchedule& sched, std::uint64_t iters, Rng& rng, double w0) {
  return solve_w_sgd(
      alpha, cfg, eps, sched, iters,
      [&](std::uint64_t) { return sample_small_scale(rng, cfg.num_antennas); }, w0);
}

double solve_w_sgd(double alpha, const SystemConfig& cfg, double eps,
                   const StepSchedule& sched, std::uint64_t iters,
                   const std::function<double(std::uint64_t)>& sample_g, double w0,
                   std::vector<double>* trace) {
  if (iters < 1) throw std::invalid_argument("solve_w_sgd: iters must be >= 1");
  if (alpha <= 0) throw std::invalid_argument("solve_w_sgd: alpha must be > 0");
  const double theta = qos_exponent(cfg, eps);
  const double kappa = inv_q(eps_decode(eps));
  const double target = std::exp(-theta * cfg.arrival_rate);
  double w = std::max(w0, kFloorHz);
  if (trace) {
    trace->clear();
    trace->reserve(iters);
  }
  for (std::uint64_t t = 0; t < iters; ++t) {
    const double s = achievable_rate(w, alpha, sample_g(t), kappa, cfg);
    w = std::max(w + sched.at(t) * (std::exp(-theta * s) - target), kFloorHz);
    if (trace) trace->push_back(w);
  }
  return w;
}

double solve_w_bisection(double alpha, const SystemConfig& cfg, double eps,
                         Eigen::Index mc_samples, double tol_hz, Rng& rng) {
  if (mc_samples < 100000)
    throw std::invalid_argument("solve_w_bisection: need mc_samples >= 1e5");
  if (tol_hz <= 0) throw std::invalid_argument("solve_w_bisection: tol must be > 0");
  const double theta = qos_exponent(cfg, eps);
  const double kappa = inv_q(eps_decode(eps));
  const Eigen::ArrayXd g = rng.gamma_int_array(mc_samples, cfg.num_antennas);

  auto residual = [&](double w) { return constraint_value(w, alpha, theta, kappa, cfg, g); };

  double lo = kFloorHz, hi = kBracketHi;
  while (residual(hi) > 0.0) {
    lo = hi;
    hi *= 10.0;
    if (hi > 1e12) throw std::runtime_error("solve_w_bisection: no feasible W up to 1e12 Hz");
  }
  if (residual(lo) <= 0.0) return lo;
  while (hi - lo > tol_hz) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) <= 0.0 ? hi : lo) = mid;
  }
  return hi;
}

double OracleGrid::interpolate_d(double d) const {
  if (d_m.size() < 2) throw std::runtime_error("OracleGrid: need at least 2 points");
  if (d <= d_m.front()) return w_star_hz.front();
  if (d >= d_m.back()) return w_star_hz.back();
  const auto it = std::upper_bound(d_m.begin(), d_m.end(), d);
  const std::size_t j = std::size_t(it - d_m.begin());
  const double t = (d - d_m[j - 1]) / (d_m[j] - d_m[j - 1]);
  return (1.0 - t) * w_star_hz[j - 1] + t * w_star_hz[j];
}

OracleGrid compute_oracle_grid(const SystemConfig& cfg, double eps, int n_points,
                               Eigen::Index mc_samples, std::uint64_t seed) {
  if (n_points < 2) throw std::invalid_argument("compute_oracle_grid: need >= 2 points");
  OracleGrid grid;
  grid.eps = eps;
  grid.mc_samples = mc_samples;
  grid.seed = seed;
  for (int i = 0; i < n_points; ++i) {
    const double d =
        cfg.cell_min_d + (cfg.cell_max_d - cfg.cell_min_d) * double(i) / double(n_points - 1);
    Rng rng(child_seed(seed, "oracle-grid", std::uint64_t(i)));
    const double a = large_scale_gain(d, cfg);
    grid.d_m.push_back(d);
    grid.alpha.push_back(a);
    grid.w_star_hz.push_back(solve_w_bisection(a, cfg, eps, mc_samples, 10.0, rng));
  }
  return grid;
}

void save_oracle_grid(const OracleGrid& grid, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_oracle_grid: cannot open " + path);
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "# oracle_grid eps=" << grid.eps << " mc=" << grid.mc_samples << " seed=" << grid.seed
     << '\n';
  os << "d_m,alpha,W_star_Hz\n";
  for (std::size_t i = 0; i < grid.d_m.size(); ++i)
    os << grid.d_m[i] << ',' << grid.alpha[i] << ',' << grid.w_star_hz[i] << '\n';
}

bool load_oracle_grid(const std::string& path, OracleGrid& grid) {
  std::ifstream is(path);
  if (!is) return false;
  std::string line;
  if (!std::getline(is, line)) return false;
  std::istringstream hs(line);
  std::string tag, word;
  hs >> tag >> word;
  if (tag != "#" || word != "oracle_grid") return false;
  grid = OracleGrid{};
  for (std::string kv; hs >> kv;) {
    const auto pos = kv.find('=');
    if (pos == std::string::npos) continue;
    const std::string key = kv.substr(0, pos), val = kv.substr(pos + 1);
    if (key == "eps") grid.eps = std::stod(val);
    if (key == "mc") grid.mc_samples = Eigen::Index(std::stoll(val));
    if (key == "seed") grid.seed = std::stoull(val);
  }
  if (!std::getline(is, line)) return false;  // column header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double d = 0, a = 0, w = 0;
    char c1 = 0, c2 = 0;
    if (!(ls >> d >> c1 >> a >> c2 >> w) || c1 != ',' || c2 != ',') return false;
    grid.d_m.push_back(d);
    grid.alpha.push_back(a);
    grid.w_star_hz.push_back(w);
  }
  return grid.d_m.size() >= 2;
}

OracleGrid cached_oracle_grid(const SystemConfig& cfg, double eps, int n_points,
                              Eigen::Index mc_samples, std::uint64_t seed,
                              const std::string& cache_path) {
  OracleGrid grid;
  if (load_oracle_grid(cache_path, grid) && grid.eps == eps && grid.mc_samples == mc_samples &&
      grid.seed == seed && grid.d_m.size() == std::size_t(n_points) &&
      grid.d_m.front() == cfg.cell_min_d && grid.d_m.back() == cfg.cell_max_d)
    return grid;
  grid = compute_oracle_grid(cfg, eps, n_points, mc_samples, seed);
  save_oracle_grid(grid, cache_path);
  return grid;
}

std::vector<Table2Row> table2(const SystemConfig& cfg, const std::vector<double>& distances,
                              const std::vector<double>& reliabilities,
                              Eigen::Index mc_samples, std::uint64_t seed) {
  std::vector<Table2Row> rows;
  std::uint64_t cell = 0;
  for (double d : distances) {
    const double a = large_scale_gain(d, cfg);
    for (double eps : reliabilities) {
      Rng rng(child_seed(seed, "table2", cell++));
      Table2Row row;
      row.d_m = d;
      row.eps = eps;
      row.w_star_mhz = solve_w_bisection(a, cfg, eps, mc_samples, 10.0, rng) / 1e6;
      row.method = "bisection";
      row.mc_samples = mc_samples;
      row.seed = seed;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace pdl
