#include "pdlearn/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pdl {

Predictor make_predictor(const Mlp<double>& primal, const ProblemSpec& problem) {
  // Copies the net so the predictor outlives the training run.
  auto net = primal;
  auto enc = problem.input_encoding;
  auto dec = problem.output_decoding;
  return [net, enc, dec](double d_m) {
    Eigen::MatrixXd x(1, 1);
    x(0, 0) = enc(d_m);
    return dec(forward(net, x)(0, 0));
  };
}

double sigma_vs_oracle(const Predictor& pred, const OracleGrid& grid) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < grid.d_m.size(); ++i) {
    const double w_hat = pred(grid.d_m[i]);
    const double w_star = grid.w_star_hz[i];
    num += (w_hat - w_star) * (w_hat - w_star);
    den += w_star * w_star;
  }
  return std::sqrt(num / den);
}

std::vector<std::pair<std::uint64_t, double>> sigma_curve(
    const std::vector<TrainedPair>& runs, const ProblemSpec& problem, const OracleGrid& grid) {
  if (runs.empty()) throw std::invalid_argument("sigma_curve: no runs");
  const std::size_t n_snap = runs.front().snapshots.size();
  for (const auto& r : runs)
    if (r.snapshots.size() != n_snap)
      throw std::invalid_argument("sigma_curve: runs disagree on snapshot schedule");

  std::vector<std::pair<std::uint64_t, double>> curve;
  curve.reserve(n_snap);
  for (std::size_t s = 0; s < n_snap; ++s) {
    double acc = 0.0;
    for (const auto& r : runs)
      acc += sigma_vs_oracle(make_predictor(r.snapshots[s].second, problem), grid);
    curve.emplace_back(runs.front().snapshots[s].first, acc / double(runs.size()));
  }
  return curve;
}

namespace {

// Shared scoring pass: draws each run's alpha test set from [d_lo, d_hi] and
// judges every (run, alpha) pair. grid enables the oracle-excess columns;
// cfg + g_pool enable the constraint check at eps_check.
std::vector<PerAlphaRow> score_runs(const std::vector<Predictor>& runs, double d_lo,
                                    double d_hi, const OracleGrid* grid,
                                    const SystemConfig* cfg, double eps_check,
                                    const Eigen::ArrayXd* g_pool, Eigen::Index n_alpha,
                                    std::uint64_t seed) {
  const double theta = cfg ? qos_exponent(*cfg, eps_check) : 0.0;
  const double kappa = cfg ? inv_q(eps_decode(eps_check)) : 0.0;
  std::vector<PerAlphaRow> rows;
  rows.reserve(runs.size() * std::size_t(n_alpha));
  for (std::size_t r = 0; r < runs.size(); ++r) {
    Rng rng(child_seed(seed, "eval-alpha", r));
    for (Eigen::Index i = 0; i < n_alpha; ++i) {
      const double d = rng.uniform(d_lo, d_hi);
      PerAlphaRow row;
      row.run = int(r);
      row.d_m = d;
      const double w_hat = runs[r](d);
      row.w_hat_mhz = w_hat / 1e6;
      if (grid) {
        const double w_star = grid->interpolate_d(d);
        row.w_star_mhz = w_star / 1e6;
        row.rel_excess = (w_hat - w_star) / w_star;
      }
      if (cfg && g_pool) {
        const double a = large_scale_gain(d, *cfg);
        row.satisfied = constraint_value(w_hat, a, theta, kappa, *cfg, *g_pool) <= 0.0;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

double percentile_nearest_rank(std::vector<double> values, double percentile) {
  if (values.empty()) throw std::invalid_argument("percentile: empty sample");
  if (percentile <= 0.0 || percentile > 1.0)
    throw std::invalid_argument("percentile: must be in (0,1]");
  std::sort(values.begin(), values.end());
  const std::size_t rank = std::size_t(std::ceil(percentile * double(values.size())));
  return values[std::min(rank, values.size()) - 1];
}

}  // namespace

double availability(const std::vector<Predictor>& runs, const SystemConfig& cfg,
                    double eps_check, Eigen::Index n_alpha, Eigen::Index mc_samples,
                    std::uint64_t seed) {
  if (runs.empty()) throw std::invalid_argument("availability: no runs");
  if (mc_samples < 100000) throw std::invalid_argument("availability: need mc_samples >= 1e5");
  Rng g_rng(child_seed(seed, "eval-gpool", 0));
  const Eigen::ArrayXd g_pool = g_rng.gamma_int_array(mc_samples, cfg.num_antennas);
  const auto rows = score_runs(runs, cfg.cell_min_d, cfg.cell_max_d, nullptr, &cfg, eps_check,
                               &g_pool, n_alpha, seed);
  std::size_t ok = 0;
  for (const auto& row : rows) ok += row.satisfied;
  return double(ok) / double(rows.size());
}

double bandwidth_loss_percentile(const std::vector<Predictor>& runs, const OracleGrid& grid,
                                 double percentile, Eigen::Index n_alpha, std::uint64_t seed) {
  if (runs.empty()) throw std::invalid_argument("bandwidth_loss_percentile: no runs");
  const auto rows = score_runs(runs, grid.d_m.front(), grid.d_m.back(), &grid, nullptr, 0.0,
                               nullptr, n_alpha, seed);
  std::vector<double> excess;
  excess.reserve(rows.size());
  for (const auto& row : rows) excess.push_back(row.rel_excess);
  return percentile_nearest_rank(std::move(excess), percentile);
}

std::vector<PerAlphaRow> eval_per_alpha(const std::vector<Predictor>& runs,
                                        const SystemConfig& cfg, const OracleGrid& grid,
                                        double eps_check, Eigen::Index n_alpha,
                                        Eigen::Index mc_samples, std::uint64_t seed) {
  if (runs.empty()) throw std::invalid_argument("eval_per_alpha: no runs");
  if (mc_samples < 100000) throw std::invalid_argument("eval_per_alpha: need mc_samples >= 1e5");
  Rng g_rng(child_seed(seed, "eval-gpool", 0));
  const Eigen::ArrayXd g_pool = g_rng.gamma_int_array(mc_samples, cfg.num_antennas);
  return score_runs(runs, cfg.cell_min_d, cfg.cell_max_d, &grid, &cfg, eps_check, &g_pool,
                    n_alpha, seed);
}

std::vector<Table3Row> table3(const SystemConfig& cfg, const TrainerConfig& base,
                              const OracleGrid& grid, const Table3Options& opt,
                              std::vector<PerAlphaRow>* per_alpha) {
  Rng g_rng(child_seed(opt.seed, "eval-gpool", 0));
  const Eigen::ArrayXd g_pool = g_rng.gamma_int_array(opt.mc_samples, cfg.num_antennas);

  std::vector<Table3Row> out;
  for (std::size_t e = 0; e < opt.eps_d_sweep.size(); ++e) {
    const double eps_d = opt.eps_d_sweep[e];
    const ProblemSpec problem = urllc_problem(cfg, eps_d);
    std::vector<Predictor> preds;
    preds.reserve(std::size_t(opt.n_runs));
    for (int r = 0; r < opt.n_runs; ++r) {
      TrainerConfig tcfg = base;
      tcfg.eps_d = eps_d;
      tcfg.iterations = opt.iterations;
      tcfg.snapshot_every = 0;
      tcfg.seed = child_seed(opt.seed, "table3-run", e * 1000 + std::uint64_t(r));
      preds.push_back(make_predictor(train(problem, tcfg).primal, problem));
    }
    const auto rows = score_runs(preds, cfg.cell_min_d, cfg.cell_max_d, &grid, &cfg,
                                 cfg.eps_max, &g_pool, opt.n_alpha, opt.seed);

    Table3Row row;
    row.eps_d = eps_d;
    row.n_runs = opt.n_runs;
    row.n_alpha = opt.n_alpha;
    std::size_t ok = 0;
    std::vector<double> excess;
    excess.reserve(rows.size());
    for (const auto& r : rows) {
      ok += r.satisfied;
      excess.push_back(r.rel_excess);
    }
    row.availability = double(ok) / double(rows.size());
    row.w_tilde = percentile_nearest_rank(std::move(excess), 0.99);
    out.push_back(row);

    if (per_alpha)
      for (auto r : rows) {
        r.eps_d = eps_d;
        per_alpha->push_back(r);
      }
  }
  return out;
}

}  // namespace pdl
