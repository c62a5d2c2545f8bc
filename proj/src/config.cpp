#include "pdlearn/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace pdl {

namespace {

using nlohmann::json;

// Converted presentation fields (dBm, ms) are rounded to nine decimals so a
// load/dump cycle is an exact fixed point despite the unit conversions.
double round9(double v) { return std::round(v * 1e9) / 1e9; }

json system_to_json(const SystemConfig& s) {
  return json{{"frame_duration_ms", round9(s.frame_duration * 1e3)},
              {"ul_duration_ms", round9(s.ul_duration * 1e3)},
              {"packet_bits", s.packet_bits},
              {"max_tx_power_dbm", round9(10.0 * std::log10(s.max_tx_power) + 30.0)},
              {"noise_psd_dbm_hz", round9(10.0 * std::log10(s.noise_psd) + 30.0)},
              {"num_antennas", s.num_antennas},
              {"arrival_packets_per_frame", s.arrival_rate},
              {"delay_bound_frames", s.delay_bound},
              {"tx_delay_frames", s.tx_delay},
              {"dec_delay_frames", s.dec_delay},
              {"eps_max", s.eps_max},
              {"cell_min_d_m", s.cell_min_d},
              {"cell_max_d_m", s.cell_max_d},
              {"pathloss_offset_db", s.pathloss_offset_db},
              {"pathloss_exp_db", s.pathloss_exp_db}};
}

SystemConfig system_from_json(const json& j) {
  SystemConfig s = SystemConfig::make_default();
  if (j.contains("frame_duration_ms")) s.frame_duration = j["frame_duration_ms"].get<double>() * 1e-3;
  if (j.contains("ul_duration_ms")) s.ul_duration = j["ul_duration_ms"].get<double>() * 1e-3;
  if (j.contains("packet_bits")) s.packet_bits = j["packet_bits"].get<double>();
  if (j.contains("max_tx_power_dbm")) s.max_tx_power = dbm_to_watts(j["max_tx_power_dbm"].get<double>());
  if (j.contains("noise_psd_dbm_hz")) s.noise_psd = dbm_to_watts(j["noise_psd_dbm_hz"].get<double>());
  if (j.contains("num_antennas")) s.num_antennas = j["num_antennas"].get<int>();
  if (j.contains("arrival_packets_per_frame")) s.arrival_rate = j["arrival_packets_per_frame"].get<double>();
  if (j.contains("delay_bound_frames")) s.delay_bound = j["delay_bound_frames"].get<double>();
  if (j.contains("tx_delay_frames")) s.tx_delay = j["tx_delay_frames"].get<double>();
  if (j.contains("dec_delay_frames")) s.dec_delay = j["dec_delay_frames"].get<double>();
  if (j.contains("eps_max")) s.eps_max = j["eps_max"].get<double>();
  if (j.contains("cell_min_d_m")) s.cell_min_d = j["cell_min_d_m"].get<double>();
  if (j.contains("cell_max_d_m")) s.cell_max_d = j["cell_max_d_m"].get<double>();
  if (j.contains("pathloss_offset_db")) s.pathloss_offset_db = j["pathloss_offset_db"].get<double>();
  if (j.contains("pathloss_exp_db")) s.pathloss_exp_db = j["pathloss_exp_db"].get<double>();
  s.validate();
  return s;
}

json trainer_to_json(const TrainerConfig& t) {
  return json{{"learning_rate", t.learning_rate}, {"batch_size", t.batch_size},
              {"iterations", t.iterations},      {"seed", t.seed},
              {"eps_d", t.eps_d},                {"hidden_layers", t.hidden_layers},
              {"width", t.width},                {"snapshot_every", t.snapshot_every}};
}

TrainerConfig trainer_from_json(const json& j) {
  TrainerConfig t;
  if (j.contains("learning_rate")) t.learning_rate = j["learning_rate"].get<double>();
  if (j.contains("batch_size")) t.batch_size = j["batch_size"].get<int>();
  if (j.contains("iterations")) t.iterations = j["iterations"].get<std::uint64_t>();
  if (j.contains("seed")) t.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("eps_d")) t.eps_d = j["eps_d"].get<double>();
  if (j.contains("hidden_layers")) t.hidden_layers = j["hidden_layers"].get<int>();
  if (j.contains("width")) t.width = j["width"].get<int>();
  if (j.contains("snapshot_every")) t.snapshot_every = j["snapshot_every"].get<std::uint64_t>();
  if (t.learning_rate < 0 || t.batch_size < 1 || t.hidden_layers < 1 || t.width < 1)
    throw std::invalid_argument("trainer config: invalid values");
  return t;
}

json eval_to_json(const EvalConfig& e) {
  return json{{"grid_points", e.grid_points},
              {"grid_mc_samples", e.grid_mc_samples},
              {"sigma_runs", e.sigma_runs},
              {"table3_runs", e.table3_runs},
              {"table3_alpha", e.table3_alpha},
              {"table3_iterations", e.table3_iterations},
              {"availability_mc_samples", e.availability_mc_samples},
              {"eps_d_sweep", e.eps_d_sweep}};
}

EvalConfig eval_from_json(const json& j) {
  EvalConfig e;
  if (j.contains("grid_points")) e.grid_points = j["grid_points"].get<int>();
  if (j.contains("grid_mc_samples")) e.grid_mc_samples = j["grid_mc_samples"].get<Eigen::Index>();
  if (j.contains("sigma_runs")) e.sigma_runs = j["sigma_runs"].get<int>();
  if (j.contains("table3_runs")) e.table3_runs = j["table3_runs"].get<int>();
  if (j.contains("table3_alpha")) e.table3_alpha = j["table3_alpha"].get<int>();
  if (j.contains("table3_iterations")) e.table3_iterations = j["table3_iterations"].get<std::uint64_t>();
  if (j.contains("availability_mc_samples"))
    e.availability_mc_samples = j["availability_mc_samples"].get<Eigen::Index>();
  if (j.contains("eps_d_sweep")) e.eps_d_sweep = j["eps_d_sweep"].get<std::vector<double>>();
  if (e.grid_points < 2 || e.sigma_runs < 1 || e.table3_runs < 1 || e.table3_alpha < 1 ||
      e.eps_d_sweep.empty())
    throw std::invalid_argument("eval config: invalid values");
  return e;
}

}  // namespace

void RunConfig::apply_quick() {
  trainer.iterations = 3000;
  trainer.snapshot_every = 500;
  eval.grid_points = 21;
  eval.grid_mc_samples = 200000;
  eval.sigma_runs = 3;
  eval.table3_runs = 3;
  eval.table3_alpha = 60;
  eval.table3_iterations = 3000;
  eval.availability_mc_samples = 100000;
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.system = SystemConfig::make_default();
  cfg.trainer.snapshot_every = 500;
  return cfg;
}

std::string config_to_json(const RunConfig& cfg) {
  json j{{"system", system_to_json(cfg.system)},
         {"trainer", trainer_to_json(cfg.trainer)},
         {"eval", eval_to_json(cfg.eval)},
         {"output_dir", cfg.output_dir},
         {"master_seed", cfg.master_seed}};
  return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text) {
  json j = json::parse(text);
  RunConfig cfg = default_config();
  if (j.contains("system")) cfg.system = system_from_json(j["system"]);
  if (j.contains("trainer")) cfg.trainer = trainer_from_json(j["trainer"]);
  if (j.contains("eval")) cfg.eval = eval_from_json(j["eval"]);
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("load_config: cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  try {
    return config_from_json(buf.str());
  } catch (const json::exception& e) {
    throw std::invalid_argument("load_config: " + std::string(e.what()));
  }
}

void save_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_config: cannot open " + path);
  os << config_to_json(cfg);
}

}  // namespace pdl
