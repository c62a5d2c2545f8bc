#include "pdlearn/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace pdl {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  // 17 significant digits round-trip any double; trim to the shortest form
  // that still parses back exactly.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

std::uint64_t fnv1a64_bytes(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::string& path) { return fnv1a64_bytes(read_text_file(path)); }

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_text_file: cannot open " + path);
  os << content;
  if (!os) throw std::runtime_error("write_text_file: write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_text_file: cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

void write_manifest(const std::string& dir, const std::vector<std::string>& files) {
  std::ostringstream os;
  for (const auto& name : files) {
    const std::string path = dir + "/" + name;
    const std::string bytes = read_text_file(path);
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64_bytes(bytes)));
    os << name << ',' << bytes.size() << ',' << hex << '\n';
  }
  write_text_file(dir + "/manifest.txt", os.str());
}

void save_trained_pair(const std::string& dir, const TrainedPair& pair,
                       const TrainerConfig& tcfg, double theta_star) {
  fs::create_directories(dir);
  save_mlp_file(pair.primal, dir + "/primal.txt");
  save_mlp_file(pair.dual, dir + "/dual.txt");

  std::ostringstream hist;
  hist << "iter,lagrangian,mean_constraint,primal_grad_norm,dual_grad_norm\n";
  for (std::size_t t = 0; t < pair.history.size(); ++t) {
    const auto& h = pair.history[t];
    hist << t << ',' << format_double(h.lagrangian) << ',' << format_double(h.mean_constraint)
         << ',' << format_double(h.primal_grad_norm) << ',' << format_double(h.dual_grad_norm)
         << '\n';
  }
  write_text_file(dir + "/history.csv", hist.str());

  nlohmann::json meta{{"learning_rate", tcfg.learning_rate},
                      {"batch_size", tcfg.batch_size},
                      {"iterations", tcfg.iterations},
                      {"seed", tcfg.seed},
                      {"eps_d", tcfg.eps_d},
                      {"hidden_layers", tcfg.hidden_layers},
                      {"width", tcfg.width},
                      {"theta_star", theta_star}};
  write_text_file(dir + "/meta.json", meta.dump(2) + "\n");
}

TrainedPair load_trained_pair(const std::string& dir, TrainerConfig* tcfg_out) {
  TrainedPair pair;
  pair.primal = load_mlp_file(dir + "/primal.txt");
  pair.dual = load_mlp_file(dir + "/dual.txt");
  if (tcfg_out) {
    const auto meta = nlohmann::json::parse(read_text_file(dir + "/meta.json"));
    tcfg_out->learning_rate = meta.value("learning_rate", 0.1);
    tcfg_out->batch_size = meta.value("batch_size", 100);
    tcfg_out->iterations = meta.value("iterations", std::uint64_t(0));
    tcfg_out->seed = meta.value("seed", std::uint64_t(0));
    tcfg_out->eps_d = meta.value("eps_d", 1e-5);
    tcfg_out->hidden_layers = meta.value("hidden_layers", 4);
    tcfg_out->width = meta.value("width", 8);
  }
  return pair;
}

}  // namespace pdl
