#include "pdlearn/mlp.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pdl {

namespace {

const char* act_tag(OutputActivation a) {
  return a == OutputActivation::Softplus ? "softplus" : "identity";
}

OutputActivation act_from_tag(const std::string& tag) {
  if (tag == "softplus") return OutputActivation::Softplus;
  if (tag == "identity") return OutputActivation::Identity;
  throw std::runtime_error("load_mlp: unknown activation tag '" + tag + "'");
}

}  // namespace

void save_mlp(const Mlp<double>& net, std::ostream& os) {
  os << "mlp 1\n";
  os << "dims";
  for (int d : net.layer_dims()) os << ' ' << d;
  os << '\n';
  os << "output " << act_tag(net.output_activation()) << '\n';
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    os << "layer " << l << '\n';
    const auto& w = net.weights()[l];
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) os << (j ? " " : "") << w(i, j);
      os << '\n';
    }
    const auto& b = net.biases()[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) os << (i ? " " : "") << b(i);
    os << '\n';
  }
}

Mlp<double> load_mlp(std::istream& is) {
  std::string word;
  int version = 0;
  if (!(is >> word >> version) || word != "mlp" || version != 1)
    throw std::runtime_error("load_mlp: bad header");
  if (!(is >> word) || word != "dims") throw std::runtime_error("load_mlp: missing dims");
  std::string rest;
  std::getline(is, rest);
  std::istringstream ds(rest);
  std::vector<int> dims;
  for (int d; ds >> d;) dims.push_back(d);
  if (dims.size() < 2) throw std::runtime_error("load_mlp: need at least 2 dims");
  std::string tag;
  if (!(is >> word >> tag) || word != "output")
    throw std::runtime_error("load_mlp: missing output activation");

  Mlp<double> net(dims, act_from_tag(tag), 0);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    std::size_t idx = 0;
    if (!(is >> word >> idx) || word != "layer" || idx != l)
      throw std::runtime_error("load_mlp: bad layer header");
    auto& w = net.weights()[l];
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        if (!(is >> w(i, j))) throw std::runtime_error("load_mlp: truncated weights");
    auto& b = net.biases()[l];
    for (Eigen::Index i = 0; i < b.size(); ++i)
      if (!(is >> b(i))) throw std::runtime_error("load_mlp: truncated biases");
  }
  return net;
}

void save_mlp_file(const Mlp<double>& net, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_mlp_file: cannot open " + path);
  save_mlp(net, os);
  if (!os) throw std::runtime_error("save_mlp_file: write failed for " + path);
}

Mlp<double> load_mlp_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_mlp_file: cannot open " + path);
  return load_mlp(is);
}

}  // namespace pdl
