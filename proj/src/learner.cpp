#include "pdlearn/learner.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace pdl {

namespace {

struct BatchGrads {
  Eigen::RowVectorXd primal;  // dL/dy per sample
  Eigen::RowVectorXd dual;    // dL/dlambda per sample (= constraint value)
  double lagrangian = 0.0;
  double mean_constraint = 0.0;
};

// Per-sample Lagrangian pieces for a forwarded batch.
BatchGrads batch_grads(const ProblemSpec& problem, const Eigen::ArrayXd& thetas,
                       const Eigen::RowVectorXd& y, const Eigen::RowVectorXd& lambda,
                       Rng& rng) {
  const Eigen::Index n = thetas.size();
  BatchGrads out;
  out.primal.resize(n);
  out.dual.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double f = 0, dfdy = 0, c = 0, dcdy = 0;
    problem.objective(y[i], thetas[i], f, dfdy);
    problem.constraint(y[i], thetas[i], rng, c, dcdy);
    out.primal[i] = dfdy + lambda[i] * dcdy;
    out.dual[i] = c;
    out.lagrangian += f + lambda[i] * c;
    out.mean_constraint += c;
  }
  out.lagrangian /= double(n);
  out.mean_constraint /= double(n);
  return out;
}

Eigen::MatrixXd encode_batch(const ProblemSpec& problem, const Eigen::ArrayXd& thetas) {
  Eigen::MatrixXd x(1, thetas.size());
  for (Eigen::Index i = 0; i < thetas.size(); ++i) x(0, i) = problem.input_encoding(thetas[i]);
  return x;
}

}  // namespace

TrainedPair train(const ProblemSpec& problem, const TrainerConfig& tcfg) {
  if (problem.num_constraints != 1)
    throw std::invalid_argument("train: only single-constraint problems are supported");
  if (tcfg.batch_size < 1 || tcfg.learning_rate < 0)
    throw std::invalid_argument("train: invalid trainer config");

  TrainedPair pair;
  pair.primal = Mlp<double>(tcfg.dims(), OutputActivation::Softplus,
                            child_seed(tcfg.seed, "primal-init", 0));
  pair.dual = Mlp<double>(tcfg.dims(), OutputActivation::Softplus,
                          child_seed(tcfg.seed, "dual-init", 0));
  Rng rng(child_seed(tcfg.seed, "train-sample", 0));
  pair.history.reserve(tcfg.iterations);

  for (std::uint64_t t = 0; t < tcfg.iterations; ++t) {
    const Eigen::ArrayXd thetas = problem.sample_params(rng, tcfg.batch_size);
    const Eigen::MatrixXd x = encode_batch(problem, thetas);

    ForwardCache<double> cache_p, cache_d;
    const Eigen::RowVectorXd y = forward(pair.primal, x, &cache_p).row(0);
    const Eigen::RowVectorXd lambda = forward(pair.dual, x, &cache_d).row(0);

    const BatchGrads bg = batch_grads(problem, thetas, y, lambda, rng);
    if (!std::isfinite(bg.lagrangian)) {
      std::ostringstream msg;
      msg << "train: non-finite Lagrangian at iteration " << t;
      throw TrainingError(t, msg.str());
    }

    const GradientSet<double> gp = backward(pair.primal, cache_p, bg.primal);
    const GradientSet<double> gd = backward(pair.dual, cache_d, bg.dual);
    if (!gp.finite() || !gd.finite()) {
      std::ostringstream msg;
      msg << "train: non-finite gradient at iteration " << t;
      throw TrainingError(t, msg.str());
    }

    pair.history.push_back(
        {bg.lagrangian, bg.mean_constraint, double(gp.norm()), double(gd.norm())});

    if (tcfg.learning_rate > 0) {
      apply_update(pair.primal, gp, tcfg.learning_rate, Direction::Descent);
      apply_update(pair.dual, gd, tcfg.learning_rate, Direction::Ascent);
    }

    if (tcfg.snapshot_every > 0 && (t + 1) % tcfg.snapshot_every == 0)
      pair.snapshots.emplace_back(t + 1, pair.primal);
  }
  return pair;
}

KktResidual kkt_residual(const TrainedPair& pair, const ProblemSpec& problem,
                         Eigen::Index probe_batch, Rng& rng) {
  if (probe_batch < 1) throw std::invalid_argument("kkt_residual: probe_batch must be >= 1");
  const Eigen::ArrayXd thetas = problem.sample_params(rng, probe_batch);
  Eigen::MatrixXd x(1, thetas.size());
  for (Eigen::Index i = 0; i < thetas.size(); ++i) x(0, i) = problem.input_encoding(thetas[i]);

  ForwardCache<double> cache_p, cache_d;
  const Eigen::RowVectorXd y = forward(pair.primal, x, &cache_p).row(0);
  const Eigen::RowVectorXd lambda = forward(pair.dual, x, &cache_d).row(0);

  Eigen::RowVectorXd gy(probe_batch), gl(probe_batch);
  double max_violation = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < probe_batch; ++i) {
    double f = 0, dfdy = 0, c = 0, dcdy = 0;
    problem.objective(y[i], thetas[i], f, dfdy);
    problem.constraint(y[i], thetas[i], rng, c, dcdy);
    gy[i] = dfdy + lambda[i] * dcdy;
    gl[i] = c;
    max_violation = std::max(max_violation, c);
  }

  KktResidual r;
  r.primal_norm = backward(pair.primal, cache_p, gy).norm();
  r.dual_norm = backward(pair.dual, cache_d, gl).norm();
  r.max_violation = max_violation;
  r.min_multiplier = lambda.minCoeff();
  return r;
}

}  // namespace pdl
