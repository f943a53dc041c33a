#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "rescomp/ann.hpp"

namespace rescomp {

struct TrainingConfig {
  std::size_t max_iterations = 10000;
  double learning_rate = 0.5;  // backprop only
  double lm_lambda0 = 1e-3;
  double lm_factor = 10.0;
  std::size_t lm_max_escalations = 30;
  std::size_t stall_window = 200;
  double stall_tol = 1e-9;
  std::uint64_t seed = 42;
};

void validate(const TrainingConfig& cfg);

enum class StopReason { MaxIterations, Stalled };

std::string_view to_string(StopReason reason) noexcept;

struct TrainingHistory {
  std::vector<double> mse_per_iteration;
  StopReason stop_reason = StopReason::MaxIterations;
  std::size_t iterations_run = 0;
  double initial_mse = 0.0;
};

struct TrainingResult {
  Network network;
  TrainingHistory history;
  double final_mse = 0.0;  // MSE of `network` on the training data
};

/// True once the MSE improved by less than `stall_tol` (relative) across the
/// trailing `stall_window` entries of the history.
bool stopping_rule(std::span<const double> mse_history, const TrainingConfig& cfg);

/// Plain full-batch gradient descent, no momentum. Returns the best network seen.
TrainingResult train_backprop(const Network& net, const Dataset& data, const TrainingConfig& cfg);

/// Levenberg-Marquardt with identity damping. Only accepted steps are recorded.
TrainingResult train_lm(const Network& net, const Dataset& data, const TrainingConfig& cfg);

enum class OptimizerKind { LevenbergMarquardt, Backprop };

std::string_view to_string(OptimizerKind kind) noexcept;
OptimizerKind parse_optimizer(std::string_view name);

/// Training strategy interface; new optimizers plug in here.
class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual std::string_view name() const noexcept = 0;
  virtual TrainingResult train(const Network& net, const Dataset& data,
                               const TrainingConfig& cfg) const = 0;
};

std::unique_ptr<Optimizer> make_optimizer(OptimizerKind kind);

struct SweepPoint {
  std::size_t hidden = 0;
  double final_mse = 0.0;
  std::size_t iterations = 0;
};

inline std::vector<std::size_t> default_sweep_nodes() {
  return {10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 110};
}

/// One training run per hidden width, all initialized from `cfg.seed`.
std::vector<SweepPoint> node_sweep(const Dataset& data, std::span<const std::size_t> nodes,
                                   const Optimizer& optimizer, const TrainingConfig& cfg,
                                   const AffineMap& target_norm);

}  // namespace rescomp
