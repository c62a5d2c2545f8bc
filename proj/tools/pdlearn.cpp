#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pdlearn/config.hpp"
#include "pdlearn/eval.hpp"
#include "pdlearn/io.hpp"

namespace fs = std::filesystem;
using namespace pdl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumeric = 2;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

RunConfig load_run_config(const CommonArgs& args) {
  RunConfig cfg = args.config_path.empty() ? default_config() : load_config(args.config_path);
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  if (args.seed_set) cfg.master_seed = args.seed;
  cfg.system.validate();
  return cfg;
}

std::string table2_csv(const std::vector<Table2Row>& rows) {
  std::ostringstream os;
  os << "d_m,epsilon_max,W_star_MHz,method,mc_samples,seed\n";
  for (const auto& r : rows)
    os << format_double(r.d_m) << ',' << format_double(r.eps) << ','
       << format_double(r.w_star_mhz) << ',' << r.method << ',' << r.mc_samples << ','
       << r.seed << '\n';
  return os.str();
}

std::string sigma_curve_csv(const std::vector<std::pair<std::uint64_t, double>>& curve) {
  std::ostringstream os;
  os << "iter,sigma\n";
  for (const auto& [iter, sigma] : curve) os << iter << ',' << format_double(sigma) << '\n';
  return os.str();
}

std::string table3_csv(const std::vector<Table3Row>& rows) {
  std::ostringstream os;
  os << "eps_D,availability,w_tilde,n_runs,n_alpha\n";
  for (const auto& r : rows)
    os << format_double(r.eps_d) << ',' << format_double(r.availability) << ','
       << format_double(r.w_tilde) << ',' << r.n_runs << ',' << r.n_alpha << '\n';
  return os.str();
}

std::string per_alpha_csv(const std::vector<PerAlphaRow>& rows) {
  std::ostringstream os;
  os << "eps_D,run,d_m,W_hat_MHz,W_star_MHz,rel_excess,satisfied\n";
  for (const auto& r : rows)
    os << format_double(r.eps_d) << ',' << r.run << ',' << format_double(r.d_m) << ','
       << format_double(r.w_hat_mhz) << ',' << format_double(r.w_star_mhz) << ','
       << format_double(r.rel_excess) << ',' << (r.satisfied ? 1 : 0) << '\n';
  return os.str();
}

OracleGrid grid_for(const RunConfig& cfg) {
  fs::create_directories(cfg.output_dir + "/cache");
  return cached_oracle_grid(cfg.system, cfg.system.eps_max, cfg.eval.grid_points,
                            cfg.eval.grid_mc_samples, child_seed(cfg.master_seed, "oracle", 0),
                            cfg.output_dir + "/cache/oracle_grid.csv");
}

int cmd_baseline(const CommonArgs& common, const std::vector<double>& d_list,
                 const std::vector<double>& eps_list) {
  const RunConfig cfg = load_run_config(common);
  const std::vector<double> distances =
      d_list.empty() ? std::vector<double>{250.0, 50.0} : d_list;
  const std::vector<double> reliabilities =
      eps_list.empty() ? std::vector<double>{1e-4, 1e-5, 1e-6, 1e-7} : eps_list;
  for (double d : distances)
    if (d <= 0) throw std::invalid_argument("baseline: --d must be > 0");
  for (double e : reliabilities)
    if (e <= 0 || e >= 1) throw std::invalid_argument("baseline: --eps must be in (0,1)");

  const auto rows = table2(cfg.system, distances, reliabilities, cfg.eval.grid_mc_samples,
                           child_seed(cfg.master_seed, "table2", 0));
  fs::create_directories(cfg.output_dir);
  write_text_file(cfg.output_dir + "/table2.csv", table2_csv(rows));
  for (const auto& r : rows)
    std::cout << "d=" << r.d_m << " m, eps=" << r.eps << " -> W* = " << r.w_star_mhz
              << " MHz\n";
  std::cout << "wrote " << cfg.output_dir << "/table2.csv\n";
  return kExitOk;
}

int cmd_train(const CommonArgs& common, double eps_d, std::uint64_t iters, bool quick) {
  RunConfig cfg = load_run_config(common);
  if (quick) cfg.apply_quick();
  TrainerConfig tcfg = cfg.trainer;
  if (eps_d > 0) tcfg.eps_d = eps_d;
  if (iters > 0) tcfg.iterations = iters;
  if (common.seed_set) tcfg.seed = common.seed;
  if (tcfg.eps_d > cfg.system.eps_max)
    throw std::invalid_argument("train: --eps-d must be <= eps_max");

  const ProblemSpec problem = urllc_problem(cfg.system, tcfg.eps_d);
  const std::string dir = cfg.output_dir + "/model_eps" + format_double(tcfg.eps_d) + "_seed" +
                          std::to_string(tcfg.seed);
  try {
    const TrainedPair pair = train(problem, tcfg);
    save_trained_pair(dir, pair, tcfg, qos_exponent(cfg.system, tcfg.eps_d));
  } catch (const TrainingError& e) {
    std::cerr << "train failed: " << e.what() << " (last good iteration "
              << (e.iteration() == 0 ? 0 : e.iteration() - 1) << ")\n";
    return kExitNumeric;
  }
  std::cout << "wrote " << dir << " (theta* = " << qos_exponent(cfg.system, tcfg.eps_d)
            << ")\n";
  return kExitOk;
}

int cmd_eval(const CommonArgs& common, const std::string& models_dir) {
  const RunConfig cfg = load_run_config(common);
  std::vector<std::string> model_dirs;
  if (fs::is_directory(models_dir))
    for (const auto& entry : fs::directory_iterator(models_dir))
      if (entry.is_directory() && fs::exists(entry.path() / "primal.txt"))
        model_dirs.push_back(entry.path().string());
  std::sort(model_dirs.begin(), model_dirs.end());
  if (model_dirs.empty())
    throw std::invalid_argument("eval: no trained models under '" + models_dir + "'");

  // Group loaded models by their training reliability.
  std::map<double, std::vector<Predictor>> by_eps;
  const ProblemSpec encoding = urllc_problem(cfg.system, cfg.system.eps_max);
  std::vector<std::pair<std::string, double>> sigmas;
  const OracleGrid grid = grid_for(cfg);
  for (const auto& dir : model_dirs) {
    TrainerConfig tcfg;
    const TrainedPair pair = load_trained_pair(dir, &tcfg);
    Predictor pred = make_predictor(pair.primal, encoding);
    sigmas.emplace_back(fs::path(dir).filename().string(), sigma_vs_oracle(pred, grid));
    by_eps[tcfg.eps_d].push_back(std::move(pred));
  }

  std::ostringstream sig;
  sig << "model,sigma\n";
  double acc = 0.0;
  for (const auto& [name, s] : sigmas) {
    sig << name << ',' << format_double(s) << '\n';
    acc += s;
  }
  sig << "mean," << format_double(acc / double(sigmas.size())) << '\n';

  std::vector<Table3Row> t3;
  std::vector<PerAlphaRow> per_alpha;
  for (const auto& [eps_d, preds] : by_eps) {
    const auto rows = eval_per_alpha(preds, cfg.system, grid, cfg.system.eps_max,
                                     cfg.eval.table3_alpha, cfg.eval.availability_mc_samples,
                                     child_seed(cfg.master_seed, "eval", 0));
    Table3Row row;
    row.eps_d = eps_d;
    row.n_runs = int(preds.size());
    row.n_alpha = cfg.eval.table3_alpha;
    std::size_t ok = 0;
    std::vector<double> excess;
    for (const auto& r : rows) {
      ok += r.satisfied;
      excess.push_back(r.rel_excess);
    }
    row.availability = double(ok) / double(rows.size());
    std::sort(excess.begin(), excess.end());
    row.w_tilde = excess[std::size_t(std::ceil(0.99 * double(excess.size()))) - 1];
    t3.push_back(row);
    for (auto r : rows) {
      r.eps_d = eps_d;
      per_alpha.push_back(r);
    }
  }

  fs::create_directories(cfg.output_dir);
  write_text_file(cfg.output_dir + "/sigma_eval.csv", sig.str());
  write_text_file(cfg.output_dir + "/table3.csv", table3_csv(t3));
  write_text_file(cfg.output_dir + "/per_alpha.csv", per_alpha_csv(per_alpha));
  std::cout << "evaluated " << model_dirs.size() << " models; mean sigma = "
            << acc / double(sigmas.size()) << "\nwrote " << cfg.output_dir
            << "/{sigma_eval,table3,per_alpha}.csv\n";
  return kExitOk;
}

int cmd_reproduce(const CommonArgs& common, bool quick) {
  RunConfig cfg = load_run_config(common);
  if (quick) cfg.apply_quick();
  fs::create_directories(cfg.output_dir);

  std::string stage = "oracle-grid";
  try {
    const OracleGrid grid = grid_for(cfg);

    stage = "table2";
    const auto t2 = table2(cfg.system, {250.0, 50.0}, {1e-4, 1e-5, 1e-6, 1e-7},
                           cfg.eval.grid_mc_samples, child_seed(cfg.master_seed, "table2", 0));
    write_text_file(cfg.output_dir + "/table2.csv", table2_csv(t2));
    std::cout << "[table2] " << t2.size() << " cells\n";

    stage = "train-sigma";
    const ProblemSpec problem = urllc_problem(cfg.system, cfg.trainer.eps_d);
    std::vector<TrainedPair> runs;
    TrainerConfig tcfg = cfg.trainer;
    if (tcfg.snapshot_every == 0) tcfg.snapshot_every = 500;
    for (int r = 0; r < cfg.eval.sigma_runs; ++r) {
      tcfg.seed = child_seed(cfg.master_seed, "sigma-run", std::uint64_t(r));
      runs.push_back(train(problem, tcfg));
    }
    const auto curve = sigma_curve(runs, problem, grid);
    write_text_file(cfg.output_dir + "/sigma_curve.csv", sigma_curve_csv(curve));
    std::cout << "[train-sigma] " << runs.size() << " runs, final mean sigma = "
              << curve.back().second << '\n';

    stage = "table3";
    Table3Options opt;
    opt.eps_d_sweep = cfg.eval.eps_d_sweep;
    opt.n_runs = cfg.eval.table3_runs;
    opt.n_alpha = cfg.eval.table3_alpha;
    opt.iterations = cfg.eval.table3_iterations;
    opt.mc_samples = cfg.eval.availability_mc_samples;
    opt.seed = child_seed(cfg.master_seed, "table3", 0);
    std::vector<PerAlphaRow> per_alpha;
    const auto t3 = table3(cfg.system, cfg.trainer, grid, opt, &per_alpha);
    write_text_file(cfg.output_dir + "/table3.csv", table3_csv(t3));
    write_text_file(cfg.output_dir + "/per_alpha.csv", per_alpha_csv(per_alpha));
    for (const auto& r : t3)
      std::cout << "[table3] eps_D=" << r.eps_d << " availability=" << r.availability
                << " w_tilde=" << r.w_tilde << '\n';

    stage = "manifest";
    write_manifest(cfg.output_dir,
                   {"table2.csv", "sigma_curve.csv", "table3.csv", "per_alpha.csv"});
  } catch (const std::exception& e) {
    std::cerr << "reproduce: stage '" << stage << "' failed: " << e.what() << '\n';
    return kExitNumeric;
  }
  std::cout << "wrote " << cfg.output_dir << "/manifest.txt\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised primal-dual bandwidth allocation: baseline solver, trainer, "
               "evaluation, and one-shot reproduction"};
  app.require_subcommand(1);

  CommonArgs common;
  app.add_option("--config", common.config_path, "JSON config file (defaults built in)");
  app.add_option("--out", common.out_dir, "output directory (overrides config)");
  auto* seed_opt = app.add_option("--seed", common.seed, "master seed (overrides config)");

  auto* baseline_cmd = app.add_subcommand("baseline", "solve minimal bandwidth by bisection");
  baseline_cmd->fallthrough();  // let --config/--out/--seed follow the subcommand
  std::vector<double> d_list, eps_list;
  baseline_cmd->add_option("--d", d_list, "distance(s) in meters");
  baseline_cmd->add_option("--eps", eps_list, "reliability target(s)");

  auto* train_cmd = app.add_subcommand("train", "train one primal-dual pair");
  train_cmd->fallthrough();
  double eps_d = 0.0;
  std::uint64_t iters = 0;
  bool train_quick = false;
  train_cmd->add_option("--eps-d", eps_d, "training reliability (default: config)");
  train_cmd->add_option("--iters", iters, "iterations (default: config)");
  train_cmd->add_flag("--quick", train_quick, "reduced counts");

  auto* eval_cmd = app.add_subcommand("eval", "score saved models against the oracle");
  eval_cmd->fallthrough();
  std::string models_dir;
  eval_cmd->add_option("--models", models_dir, "directory of trained model subdirectories")
      ->required();

  auto* repro_cmd = app.add_subcommand("reproduce", "baseline + training sweep + evaluation");
  repro_cmd->fallthrough();
  bool quick = false;
  repro_cmd->add_flag("--quick", quick, "reduced counts (finishes in well under 10 minutes)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }
  common.seed_set = seed_opt->count() > 0;

  try {
    if (baseline_cmd->parsed()) return cmd_baseline(common, d_list, eps_list);
    if (train_cmd->parsed()) return cmd_train(common, eps_d, iters, train_quick);
    if (eval_cmd->parsed()) return cmd_eval(common, models_dir);
    if (repro_cmd->parsed()) return cmd_reproduce(common, quick);
  } catch (const TrainingError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitValidation;
}
