#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

namespace rescomp {

/// K:J:I layer widths of a single-hidden-layer network.
struct NetworkShape {
  std::size_t inputs = 1;
  std::size_t hidden = 80;
  std::size_t outputs = 1;

  std::size_t parameter_count() const noexcept {
    return inputs * hidden + hidden + hidden * outputs + outputs;
  }
  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

/// Affine map between a physical interval [lo, hi] and a normalized one.
struct AffineMap {
  double lo = 0.0;
  double hi = 1.0;
  double norm_lo = 0.0;
  double norm_hi = 1.0;

  double normalize(double v) const noexcept {
    return norm_lo + (v - lo) * (norm_hi - norm_lo) / (hi - lo);
  }
  double denormalize(double u) const noexcept {
    return lo + (u - norm_lo) * (hi - lo) / (norm_hi - norm_lo);
  }
  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

/// Degrees [0, 360] onto [0, 1].
AffineMap input_map() noexcept;

/// Arc-minutes [lo, hi] onto [0.1, 0.9]. Throws DegenerateBounds unless hi > lo.
AffineMap target_map(double lo_arcmin, double hi_arcmin);

/// Weights and thresholds. Also the container for a gradient of the same layout.
///
/// Flat order: hidden weights (J×K, row-major), hidden thresholds (J),
/// output weights (I×J, row-major), output thresholds (I).
struct Parameters {
  Eigen::MatrixXd w_hidden;      // J×K
  Eigen::VectorXd theta_hidden;  // J
  Eigen::MatrixXd w_output;      // I×J
  Eigen::VectorXd theta_output;  // I

  static Parameters zeros(const NetworkShape& shape);

  NetworkShape shape() const noexcept;
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);
  bool all_finite() const noexcept;
};

/// Partial derivatives of the MSE in the same layout as the network parameters.
struct Gradient : Parameters {};

struct Network {
  Parameters params;
  AffineMap input_norm = input_map();
  AffineMap target_norm;

  NetworkShape shape() const noexcept { return params.shape(); }
};

/// Normalized training patterns, one row per pattern.
struct Dataset {
  Eigen::MatrixXd inputs;   // P×K
  Eigen::MatrixXd targets;  // P×I

  std::size_t size() const noexcept { return static_cast<std::size_t>(inputs.rows()); }
};

/// Checks P ≥ 1, matching row counts and entries in [0, 1].
void validate(const Dataset& data);

struct ResidualJacobian {
  Eigen::VectorXd residuals;  // P·I, index p·I + i, r = D − O
  Eigen::MatrixXd jacobian;   // (P·I) × n_params, ∂r/∂param
};

/// Logistic function, held strictly inside (0, 1) even when it saturates.
inline double sigmoid(double z) noexcept {
  return std::clamp(1.0 / (1.0 + std::exp(-z)), 0x1p-1022, 1.0 - 0x1p-53);
}

/// Uniform [-0.5, 0.5] weights from `seed`, zero thresholds.
Network init_network(const NetworkShape& shape, std::uint64_t seed, double lo_arcmin = -6.0,
                     double hi_arcmin = 6.0);

Eigen::VectorXd forward(const Network& net, const Eigen::VectorXd& x);

double mse(const Network& net, const Dataset& data);

/// ∂MSE/∂parameter by reverse accumulation over every pattern.
Gradient gradient(const Network& net, const Dataset& data);

ResidualJacobian residual_jacobian(const Network& net, const Dataset& data);

}  // namespace rescomp
