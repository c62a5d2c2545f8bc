#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdlearn/learner.hpp"
#include "pdlearn/urllc.hpp"

namespace pdl {

struct EvalConfig {
  int grid_points = 101;
  Eigen::Index grid_mc_samples = 1000000;
  int sigma_runs = 10;
  int table3_runs = 20;
  int table3_alpha = 200;
  std::uint64_t table3_iterations = 20000;
  Eigen::Index availability_mc_samples = 1000000;
  std::vector<double> eps_d_sweep{1e-5, 1e-6, 1e-7};
};

// On-disk configuration; system fields use the units they are quoted in
// (dBm, ms), converted to SI on load.
struct RunConfig {
  SystemConfig system;  // SI
  TrainerConfig trainer;
  EvalConfig eval;
  std::string output_dir = "out";
  std::uint64_t master_seed = 1;

  // Reduced counts for a fast end-to-end pass.
  void apply_quick();
};

RunConfig default_config();
RunConfig load_config(const std::string& path);
void save_config(const RunConfig& cfg, const std::string& path);
std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text);

}  // namespace pdl
