#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdlearn/learner.hpp"

namespace pdl {

// Shortest representation that round-trips a double exactly.
std::string format_double(double v);

std::uint64_t fnv1a64_bytes(const std::string& bytes);
std::uint64_t fnv1a64_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// manifest.txt: one "name,size_bytes,fnv1a64" line per file, in the given order.
void write_manifest(const std::string& dir, const std::vector<std::string>& files);

// Model directory layout: primal.txt, dual.txt, history.csv, meta.json.
void save_trained_pair(const std::string& dir, const TrainedPair& pair,
                       const TrainerConfig& tcfg, double theta_star);
TrainedPair load_trained_pair(const std::string& dir, TrainerConfig* tcfg_out = nullptr);

}  // namespace pdl
