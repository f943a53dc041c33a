#include "rescomp/optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rescomp/error.hpp"

namespace rescomp {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kLambdaMin = 1e-12;

void check_finite(const Network& net, double m, std::size_t iteration) {
  if (!std::isfinite(m) || !net.params.all_finite()) {
    throw Error(ErrorCode::DivergenceDetected,
                "training diverged at iteration " + std::to_string(iteration));
  }
}

class BackpropOptimizer final : public Optimizer {
 public:
  std::string_view name() const noexcept override { return "backprop"; }
  TrainingResult train(const Network& net, const Dataset& data,
                       const TrainingConfig& cfg) const override {
    return train_backprop(net, data, cfg);
  }
};

class LmOptimizer final : public Optimizer {
 public:
  std::string_view name() const noexcept override { return "lm"; }
  TrainingResult train(const Network& net, const Dataset& data,
                       const TrainingConfig& cfg) const override {
    return train_lm(net, data, cfg);
  }
};

/// Solves (JᵀJ + λI)·δ = Jᵀr. When there are more parameters than residuals
/// the equivalent residual-space system δ = Jᵀ(JJᵀ + λI)⁻¹r is smaller.
class DampedSolver {
 public:
  DampedSolver(const MatrixXd& jac, const VectorXd& res) : jac_(jac), res_(res) {
    dual_ = jac.cols() > jac.rows();
    if (dual_) {
      gram_ = MatrixXd::Zero(jac.rows(), jac.rows());
      gram_.selfadjointView<Eigen::Lower>().rankUpdate(jac);
    } else {
      gram_ = MatrixXd::Zero(jac.cols(), jac.cols());
      gram_.selfadjointView<Eigen::Lower>().rankUpdate(jac.transpose());
      rhs_ = jac.transpose() * res;
    }
  }

  /// False when the factorization fails or produces a non-finite step.
  bool solve(double lambda, VectorXd& step) const {
    MatrixXd a = gram_;
    a.diagonal().array() += lambda;
    Eigen::LLT<MatrixXd, Eigen::Lower> llt(a);
    if (llt.info() != Eigen::Success) return false;
    step = dual_ ? VectorXd(jac_.transpose() * llt.solve(res_)) : VectorXd(llt.solve(rhs_));
    return step.allFinite();
  }

 private:
  const MatrixXd& jac_;
  const VectorXd& res_;
  bool dual_ = false;
  MatrixXd gram_;
  VectorXd rhs_;
};

}  // namespace

void validate(const TrainingConfig& cfg) {
  if (cfg.max_iterations == 0 || cfg.stall_window == 0 || cfg.stall_window >= cfg.max_iterations) {
    throw Error(ErrorCode::InvalidArgument, "need 0 < stall_window < max_iterations");
  }
  if (!(cfg.learning_rate > 0.0) || !(cfg.lm_lambda0 > 0.0) || !(cfg.lm_factor > 1.0) ||
      !(cfg.stall_tol > 0.0) || cfg.lm_max_escalations == 0) {
    throw Error(ErrorCode::InvalidArgument, "training rates, damping and tolerances must be positive");
  }
}

std::string_view to_string(StopReason reason) noexcept {
  return reason == StopReason::Stalled ? "Stalled" : "MaxIterations";
}

std::string_view to_string(OptimizerKind kind) noexcept {
  return kind == OptimizerKind::Backprop ? "backprop" : "lm";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "lm") return OptimizerKind::LevenbergMarquardt;
  if (name == "backprop") return OptimizerKind::Backprop;
  throw Error(ErrorCode::InvalidArgument, "unknown optimizer '" + std::string(name) + "'");
}

std::unique_ptr<Optimizer> make_optimizer(OptimizerKind kind) {
  if (kind == OptimizerKind::Backprop) return std::make_unique<BackpropOptimizer>();
  return std::make_unique<LmOptimizer>();
}

bool stopping_rule(std::span<const double> h, const TrainingConfig& cfg) {
  const std::size_t w = cfg.stall_window;
  if (w == 0 || h.size() < w) return false;
  const double start = h[h.size() - w];
  const double end = h.back();
  if (start <= 0.0) return true;
  return (start - end) < cfg.stall_tol * start;
}

TrainingResult train_backprop(const Network& net, const Dataset& data, const TrainingConfig& cfg) {
  validate(cfg);
  validate(data);

  TrainingResult result{net, {}, mse(net, data)};
  result.history.initial_mse = result.final_mse;
  Network current = net;
  auto& hist = result.history;
  hist.mse_per_iteration.reserve(cfg.max_iterations);

  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    const Gradient g = gradient(current, data);
    current.params.assign(current.params.flatten() - cfg.learning_rate * g.flatten());
    const double m = mse(current, data);
    check_finite(current, m, it);

    hist.mse_per_iteration.push_back(m);
    hist.iterations_run = it + 1;
    if (m < result.final_mse) {
      result.final_mse = m;
      result.network = current;
    }
    if (stopping_rule(hist.mse_per_iteration, cfg)) {
      hist.stop_reason = StopReason::Stalled;
      break;
    }
  }
  return result;
}

TrainingResult train_lm(const Network& net, const Dataset& data, const TrainingConfig& cfg) {
  validate(cfg);
  validate(data);

  TrainingResult result{net, {}, mse(net, data)};
  auto& hist = result.history;
  hist.initial_mse = result.final_mse;
  if (result.final_mse == 0.0) {
    hist.stop_reason = StopReason::Stalled;
    return result;
  }

  Network& current = result.network;
  double lambda = cfg.lm_lambda0;
  VectorXd step;
  hist.mse_per_iteration.reserve(cfg.max_iterations);

  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    const ResidualJacobian rj = residual_jacobian(current, data);
    const DampedSolver solver(rj.jacobian, rj.residuals);
    const VectorXd flat = current.params.flatten();

    bool accepted = false;
    bool any_factorized = false;
    Network trial = current;
    for (std::size_t esc = 0; esc <= cfg.lm_max_escalations; ++esc) {
      if (solver.solve(lambda, step)) {
        any_factorized = true;
        trial.params.assign(flat - step);
        const double m = mse(trial, data);
        if (std::isfinite(m) && trial.params.all_finite() && m < result.final_mse) {
          current = std::move(trial);
          result.final_mse = m;
          lambda = std::max(lambda / cfg.lm_factor, kLambdaMin);
          accepted = true;
          break;
        }
      }
      lambda *= cfg.lm_factor;
    }

    if (!accepted) {
      if (!any_factorized) {
        throw Error(ErrorCode::SingularNormalEquations,
                    "damped normal equations could not be factorized at iteration " +
                        std::to_string(it));
      }
      // Every damping level failed to reduce the error: a local minimum.
      hist.stop_reason = StopReason::Stalled;
      break;
    }

    hist.mse_per_iteration.push_back(result.final_mse);
    hist.iterations_run = it + 1;
    if (result.final_mse == 0.0 || stopping_rule(hist.mse_per_iteration, cfg)) {
      hist.stop_reason = StopReason::Stalled;
      break;
    }
  }
  return result;
}

std::vector<SweepPoint> node_sweep(const Dataset& data, std::span<const std::size_t> nodes,
                                   const Optimizer& optimizer, const TrainingConfig& cfg,
                                   const AffineMap& target_norm) {
  validate(data);
  std::vector<SweepPoint> out;
  out.reserve(nodes.size());
  for (std::size_t hidden : nodes) {
    if (hidden == 0) throw Error(ErrorCode::InvalidArgument, "hidden width must be >= 1");
    const NetworkShape shape{static_cast<std::size_t>(data.inputs.cols()), hidden,
                             static_cast<std::size_t>(data.targets.cols())};
    const Network start = init_network(shape, cfg.seed, target_norm.lo, target_norm.hi);
    const auto trained = optimizer.train(start, data, cfg);
    out.push_back({hidden, trained.final_mse, trained.history.iterations_run});
  }
  return out;
}

}  // namespace rescomp
