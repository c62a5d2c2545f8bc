#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "pdlearn/config.hpp"
#include "pdlearn/io.hpp"

using namespace pdl;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;  // stdout + stderr interleaved
};

fs::path work_root() {
  static const fs::path root = [] {
    fs::path p = fs::temp_directory_path() / "pdlearn_cli_tests";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

fs::path fresh_dir(const std::string& name) {
  fs::path p = work_root() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

CliResult run_cli(const std::string& args) {
  static int n = 0;
  const fs::path log = work_root() / ("log" + std::to_string(n++) + ".txt");
  const std::string cmd =
      '"' + std::string(PDL_CLI_PATH) + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int raw = std::system(cmd.c_str());
  REQUIRE(raw != -1);
  CliResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = read_text_file(log.string());
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);)
    if (!line.empty()) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream is(line);
  for (std::string f; std::getline(is, f, ',');) fields.push_back(f);
  return fields;
}

std::string slurp(const fs::path& p) {
  REQUIRE(fs::exists(p));
  return read_text_file(p.string());
}

// Reduced sample counts so each invocation stays in the seconds range.
std::string write_quick_config(const fs::path& dir) {
  RunConfig cfg = default_config();
  cfg.apply_quick();
  const std::string path = (dir / "quick.json").string();
  save_config(cfg, path);
  return path;
}

}  // namespace

TEST_CASE("help and usage errors map to documented exit codes") {
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("baseline --help").code == 0);

  CHECK(run_cli("").code == 1);                   // subcommand required
  CHECK(run_cli("--no-such-flag").code == 1);     // unknown option
  CHECK(run_cli("frobnicate").code == 1);         // unknown subcommand
  CHECK(run_cli("eval").code == 1);               // --models is required

  const auto bad_d = run_cli("baseline --d 0 --eps 1e-5");
  CHECK(bad_d.code == 1);
  CHECK(bad_d.out.find("--d must be > 0") != std::string::npos);

  const auto bad_eps = run_cli("baseline --d 250 --eps 2");
  CHECK(bad_eps.code == 1);
  CHECK(bad_eps.out.find("--eps must be in (0,1)") != std::string::npos);

  // Training tighter than the deployment target is rejected before any work runs.
  const auto bad_eps_d = run_cli("train --eps-d 1e-4");
  CHECK(bad_eps_d.code == 1);
  CHECK(bad_eps_d.out.find("eps_max") != std::string::npos);
}

TEST_CASE("baseline solves a single cell and is deterministic") {
  const fs::path dir = fresh_dir("baseline");
  const std::string quick = write_quick_config(dir);
  const std::string out1 = (dir / "b1").string();
  const std::string out2 = (dir / "b2").string();

  const auto r1 = run_cli("baseline --config " + quick + " --out " + out1 +
                          " --d 250 --eps 1e-5");
  REQUIRE(r1.code == 0);
  CHECK(r1.out.find("wrote " + out1 + "/table2.csv") != std::string::npos);

  const auto rows = lines_of(slurp(fs::path(out1) / "table2.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "d_m,epsilon_max,W_star_MHz,method,mc_samples,seed");
  const auto f = split_csv(rows[1]);
  REQUIRE(f.size() == 6);
  CHECK(std::stod(f[0]) == 250.0);
  CHECK(std::stod(f[1]) == doctest::Approx(1e-5));
  CHECK(std::stod(f[2]) == doctest::Approx(0.527).epsilon(0.05));
  CHECK(f[3] == "bisection");

  const auto r2 = run_cli("baseline --config " + quick + " --out " + out2 +
                          " --d 250 --eps 1e-5");
  REQUIRE(r2.code == 0);
  CHECK(slurp(fs::path(out2) / "table2.csv") == slurp(fs::path(out1) / "table2.csv"));
}

TEST_CASE("baseline exits with the numeric-failure code when no bandwidth suffices") {
  const fs::path dir = fresh_dir("baseline_infeasible");
  RunConfig cfg = default_config();
  cfg.apply_quick();
  cfg.system.noise_psd = 1e-9;  // -60 dBm/Hz drowns the link; no W in the search range works
  const std::string path = (dir / "hot.json").string();
  save_config(cfg, path);

  const auto r = run_cli("baseline --config " + path + " --out " + (dir / "o").string() +
                         " --d 250 --eps 1e-5");
  CHECK(r.code == 2);
  CHECK(r.out.find("error:") != std::string::npos);
}

TEST_CASE("train persists a model directory keyed by reliability and seed") {
  const fs::path dir = fresh_dir("train");
  const std::string out1 = (dir / "t1").string();
  const std::string out2 = (dir / "t2").string();
  const std::string out3 = (dir / "t3").string();

  const auto r1 = run_cli("train --iters 400 --eps-d 1e-6 --seed 7 --out " + out1);
  REQUIRE(r1.code == 0);
  const fs::path model = fs::path(out1) / "model_eps1e-06_seed7";
  CHECK(r1.out.find("wrote " + model.string()) != std::string::npos);
  CHECK(r1.out.find("theta* = 1.81358") != std::string::npos);
  for (const char* name : {"primal.txt", "dual.txt", "history.csv", "meta.json"})
    CHECK(fs::exists(model / name));

  // theta* for eps_D = 1e-6 is stored at full precision in the metadata.
  CHECK(slurp(model / "meta.json").find("1.8135822173155274") != std::string::npos);
  CHECK(lines_of(slurp(model / "history.csv")).size() == 401);  // header + one row per iteration

  // Same seed reproduces the run bit for bit; a different seed does not.
  const auto r2 = run_cli("train --iters 400 --eps-d 1e-6 --seed 7 --out " + out2);
  REQUIRE(r2.code == 0);
  const fs::path model2 = fs::path(out2) / "model_eps1e-06_seed7";
  CHECK(slurp(model2 / "history.csv") == slurp(model / "history.csv"));
  CHECK(slurp(model2 / "primal.txt") == slurp(model / "primal.txt"));
  CHECK(slurp(model2 / "dual.txt") == slurp(model / "dual.txt"));

  const auto r3 = run_cli("train --iters 400 --eps-d 1e-6 --seed 8 --out " + out3);
  REQUIRE(r3.code == 0);
  CHECK(slurp(fs::path(out3) / "model_eps1e-06_seed8" / "primal.txt") !=
        slurp(model / "primal.txt"));
}

TEST_CASE("eval scores saved models and refuses an empty directory") {
  const fs::path dir = fresh_dir("eval");
  const std::string quick = write_quick_config(dir);
  const std::string models = (dir / "models").string();

  const fs::path empty = dir / "none";
  fs::create_directories(empty);
  const auto fail = run_cli("eval --models " + empty.string() + " --config " + quick +
                            " --out " + (dir / "efail").string());
  CHECK(fail.code == 1);
  CHECK(fail.out.find("no trained models") != std::string::npos);
  CHECK(!fs::exists(dir / "efail" / "sigma_eval.csv"));
  CHECK(!fs::exists(dir / "efail" / "table3.csv"));
  CHECK(!fs::exists(dir / "efail" / "per_alpha.csv"));

  REQUIRE(run_cli("train --iters 400 --seed 1 --out " + models).code == 0);
  REQUIRE(run_cli("train --iters 400 --seed 2 --out " + models).code == 0);

  const std::string out = (dir / "e1").string();
  const auto r = run_cli("eval --models " + models + " --config " + quick + " --out " + out);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("evaluated 2 models") != std::string::npos);

  const auto sig = lines_of(slurp(fs::path(out) / "sigma_eval.csv"));
  REQUIRE(sig.size() == 4);  // header, two models, mean
  CHECK(sig[0] == "model,sigma");
  CHECK(split_csv(sig[1])[0] == "model_eps1e-05_seed1");
  CHECK(split_csv(sig[2])[0] == "model_eps1e-05_seed2");
  CHECK(split_csv(sig[3])[0] == "mean");
  const double s1 = std::stod(split_csv(sig[1])[1]);
  const double s2 = std::stod(split_csv(sig[2])[1]);
  const double mean = std::stod(split_csv(sig[3])[1]);
  CHECK(s1 >= 0.0);
  CHECK(s2 >= 0.0);
  CHECK(mean == doctest::Approx(0.5 * (s1 + s2)));

  const auto t3 = lines_of(slurp(fs::path(out) / "table3.csv"));
  REQUIRE(t3.size() == 2);  // both models trained at the same eps_D
  CHECK(t3[0] == "eps_D,availability,w_tilde,n_runs,n_alpha");
  const auto row = split_csv(t3[1]);
  REQUIRE(row.size() == 5);
  CHECK(std::stod(row[0]) == doctest::Approx(1e-5));
  CHECK(std::stod(row[1]) >= 0.0);
  CHECK(std::stod(row[1]) <= 1.0);
  CHECK(row[3] == "2");
  CHECK(row[4] == "60");

  const auto pa = lines_of(slurp(fs::path(out) / "per_alpha.csv"));
  CHECK(pa.size() == 1 + 2 * 60);
  CHECK(pa[0] == "eps_D,run,d_m,W_hat_MHz,W_star_MHz,rel_excess,satisfied");
  const auto parow = split_csv(pa[1]);
  REQUIRE(parow.size() == 7);
  const double d_m = std::stod(parow[2]);
  CHECK(d_m >= 50.0);
  CHECK(d_m <= 250.0);
  CHECK(std::stod(parow[4]) > 0.0);
  CHECK((parow[6] == "0" || parow[6] == "1"));
}

TEST_CASE("reproduce --quick runs every stage and writes a checksum manifest") {
  const fs::path dir = fresh_dir("reproduce");
  const std::string out = (dir / "r1").string();

  const auto r = run_cli("reproduce --quick --seed 5 --out " + out);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("[table2] 8 cells") != std::string::npos);
  CHECK(r.out.find("[train-sigma] 3 runs") != std::string::npos);
  CHECK(r.out.find("wrote " + out + "/manifest.txt") != std::string::npos);

  const std::vector<std::string> expected = {"table2.csv", "sigma_curve.csv", "table3.csv",
                                             "per_alpha.csv"};
  const auto manifest = lines_of(slurp(fs::path(out) / "manifest.txt"));
  REQUIRE(manifest.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto f = split_csv(manifest[i]);
    REQUIRE(f.size() == 3);
    CHECK(f[0] == expected[i]);
    const fs::path file = fs::path(out) / f[0];
    REQUIRE(fs::exists(file));
    CHECK(fs::file_size(file) == std::stoull(f[1]));
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(file.string())));
    CHECK(f[2] == std::string(hex));
  }

  // Quick profile: snapshots every 500 over 3000 iterations.
  const auto curve = lines_of(slurp(fs::path(out) / "sigma_curve.csv"));
  REQUIRE(curve.size() == 7);
  CHECK(curve[0] == "iter,sigma");
  CHECK(split_csv(curve[1])[0] == "500");
  CHECK(split_csv(curve[6])[0] == "3000");
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(std::stod(split_csv(curve[i])[1]) >= 0.0);

  const auto t3 = lines_of(slurp(fs::path(out) / "table3.csv"));
  REQUIRE(t3.size() == 4);  // one row per eps_D in the sweep
  CHECK(std::stod(split_csv(t3[1])[0]) == doctest::Approx(1e-5));
  CHECK(std::stod(split_csv(t3[2])[0]) == doctest::Approx(1e-6));
  CHECK(std::stod(split_csv(t3[3])[0]) == doctest::Approx(1e-7));

  const auto pa = lines_of(slurp(fs::path(out) / "per_alpha.csv"));
  CHECK(pa.size() == 1 + 3 * 3 * 60);  // eps sweep x runs x alpha draws
}
