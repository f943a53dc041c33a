#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "rescomp/ann.hpp"
#include "rescomp/optim.hpp"

namespace rescomp {

/// P×J hidden-layer matrix, one row per training pattern.
struct ActivationMatrix {
  Eigen::MatrixXd values;
};

/// Singular values, descending and non-negative.
struct SingularSpectrum {
  std::vector<double> values;
};

/// Hidden-node inputs before the sigmoid: X[p][j] = Σ_k w_jk·x_pk + θ_j.
ActivationMatrix activation_matrix(const Network& net, const Dataset& data);

/// Hidden-node outputs after the sigmoid: H[p][j] = g(X[p][j]).
ActivationMatrix hidden_output_matrix(const Network& net, const Dataset& data);

SingularSpectrum singular_values(const ActivationMatrix& x);

/// Number of σ strictly above rel_tol·σ_max; 0 for an all-zero spectrum.
std::size_t effective_rank(const SingularSpectrum& spectrum, double rel_tol = 1e-3);

/// Which hidden-layer matrix drives the rank estimate.
enum class PruneBasis { PreActivation, PostActivation };

struct PruneOptions {
  double rel_tol = 1e-3;
  PruneBasis basis = PruneBasis::PostActivation;
  double lo_arcmin = -6.0;
  double hi_arcmin = 6.0;
};

struct PruneReport {
  std::size_t initial_hidden = 0;
  std::size_t pruned_hidden = 0;
  PruneBasis basis = PruneBasis::PostActivation;
  double rel_tol = 1e-3;
  SingularSpectrum initial_spectrum;
  SingularSpectrum pruned_spectrum;
  double initial_mse = 0.0;
  double pruned_mse = 0.0;
};

struct PruneResult {
  Network initial;
  Network pruned;
  TrainingHistory initial_history;
  TrainingHistory pruned_history;
  PruneReport report;
};

/// Trains at `initial_hidden`, estimates the effective rank of the hidden
/// layer and retrains a fresh network at that width (never below 1).
PruneResult prune_and_retrain(const Dataset& data, std::size_t initial_hidden,
                              const Optimizer& optimizer, const TrainingConfig& cfg,
                              const PruneOptions& opts = {});

}  // namespace rescomp
