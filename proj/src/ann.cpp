#include "rescomp/ann.hpp"

#include <cmath>
#include <random>

#include "rescomp/error.hpp"

namespace rescomp {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Index idx(std::size_t v) { return static_cast<Index>(v); }

void require_nonempty(const Dataset& data) {
  if (data.inputs.rows() == 0) throw Error(ErrorCode::EmptyDataset, "dataset has no patterns");
}

void require_compatible(const Network& net, const Dataset& data) {
  require_nonempty(data);
  const auto shape = net.shape();
  if (data.inputs.cols() != idx(shape.inputs) || data.targets.cols() != idx(shape.outputs) ||
      data.inputs.rows() != data.targets.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "dataset does not match network shape");
  }
}

MatrixXd sigmoid(const MatrixXd& z) {
  return z.unaryExpr([](double v) { return rescomp::sigmoid(v); });
}

/// Batched forward pass: hidden activations H (P×J) and outputs O (P×I).
struct Activations {
  MatrixXd hidden;
  MatrixXd output;
};

Activations forward_batch(const Parameters& p, const MatrixXd& inputs) {
  Activations act;
  MatrixXd z = inputs * p.w_hidden.transpose();
  z.rowwise() += p.theta_hidden.transpose();
  act.hidden = sigmoid(z);
  MatrixXd a = act.hidden * p.w_output.transpose();
  a.rowwise() += p.theta_output.transpose();
  act.output = sigmoid(a);
  return act;
}

}  // namespace

AffineMap input_map() noexcept { return {0.0, 360.0, 0.0, 1.0}; }

AffineMap target_map(double lo_arcmin, double hi_arcmin) {
  if (!(hi_arcmin > lo_arcmin) || !std::isfinite(lo_arcmin) || !std::isfinite(hi_arcmin)) {
    throw Error(ErrorCode::DegenerateBounds, "target bounds need finite hi > lo");
  }
  return {lo_arcmin, hi_arcmin, 0.1, 0.9};
}

Parameters Parameters::zeros(const NetworkShape& shape) {
  if (shape.inputs == 0 || shape.hidden == 0 || shape.outputs == 0) {
    throw Error(ErrorCode::InvalidArgument, "network layers need at least one node");
  }
  return {MatrixXd::Zero(idx(shape.hidden), idx(shape.inputs)), VectorXd::Zero(idx(shape.hidden)),
          MatrixXd::Zero(idx(shape.outputs), idx(shape.hidden)), VectorXd::Zero(idx(shape.outputs))};
}

NetworkShape Parameters::shape() const noexcept {
  return {static_cast<std::size_t>(w_hidden.cols()), static_cast<std::size_t>(w_hidden.rows()),
          static_cast<std::size_t>(w_output.rows())};
}

VectorXd Parameters::flatten() const {
  VectorXd flat(idx(shape().parameter_count()));
  Index q = 0;
  for (Index j = 0; j < w_hidden.rows(); ++j)
    for (Index k = 0; k < w_hidden.cols(); ++k) flat[q++] = w_hidden(j, k);
  for (Index j = 0; j < theta_hidden.size(); ++j) flat[q++] = theta_hidden[j];
  for (Index i = 0; i < w_output.rows(); ++i)
    for (Index j = 0; j < w_output.cols(); ++j) flat[q++] = w_output(i, j);
  for (Index i = 0; i < theta_output.size(); ++i) flat[q++] = theta_output[i];
  return flat;
}

void Parameters::assign(const VectorXd& flat) {
  if (flat.size() != idx(shape().parameter_count())) {
    throw Error(ErrorCode::ShapeMismatch, "flat parameter vector has the wrong length");
  }
  Index q = 0;
  for (Index j = 0; j < w_hidden.rows(); ++j)
    for (Index k = 0; k < w_hidden.cols(); ++k) w_hidden(j, k) = flat[q++];
  for (Index j = 0; j < theta_hidden.size(); ++j) theta_hidden[j] = flat[q++];
  for (Index i = 0; i < w_output.rows(); ++i)
    for (Index j = 0; j < w_output.cols(); ++j) w_output(i, j) = flat[q++];
  for (Index i = 0; i < theta_output.size(); ++i) theta_output[i] = flat[q++];
}

bool Parameters::all_finite() const noexcept {
  return w_hidden.allFinite() && theta_hidden.allFinite() && w_output.allFinite() &&
         theta_output.allFinite();
}

void validate(const Dataset& data) {
  require_nonempty(data);
  if (data.inputs.rows() != data.targets.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "inputs and targets differ in pattern count");
  }
  auto in_unit = [](const MatrixXd& m) {
    return m.allFinite() && (m.array() >= 0.0).all() && (m.array() <= 1.0).all();
  };
  if (!in_unit(data.inputs) || !in_unit(data.targets)) {
    throw Error(ErrorCode::OutOfRange, "normalized dataset entries must lie in [0, 1]");
  }
}

Network init_network(const NetworkShape& shape, std::uint64_t seed, double lo_arcmin,
                     double hi_arcmin) {
  Network net;
  net.target_norm = target_map(lo_arcmin, hi_arcmin);
  net.params = Parameters::zeros(shape);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-0.5, 0.5);
  auto& p = net.params;
  for (Index j = 0; j < p.w_hidden.rows(); ++j)
    for (Index k = 0; k < p.w_hidden.cols(); ++k) p.w_hidden(j, k) = uniform(rng);
  for (Index i = 0; i < p.w_output.rows(); ++i)
    for (Index j = 0; j < p.w_output.cols(); ++j) p.w_output(i, j) = uniform(rng);
  return net;
}

VectorXd forward(const Network& net, const VectorXd& x) {
  const auto& p = net.params;
  if (x.size() != p.w_hidden.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "input vector does not match network inputs");
  }
  const VectorXd hidden = (p.w_hidden * x + p.theta_hidden).unaryExpr([](double z) { return sigmoid(z); });
  return (p.w_output * hidden + p.theta_output).unaryExpr([](double z) { return sigmoid(z); });
}

double mse(const Network& net, const Dataset& data) {
  require_compatible(net, data);
  const auto act = forward_batch(net.params, data.inputs);
  return (data.targets - act.output).squaredNorm() / static_cast<double>(data.targets.size());
}

Gradient gradient(const Network& net, const Dataset& data) {
  require_compatible(net, data);
  const auto& p = net.params;
  const auto act = forward_batch(p, data.inputs);
  const double scale = -2.0 / static_cast<double>(data.targets.size());

  // δ at the output pre-activation, then back through W_o to the hidden layer.
  const MatrixXd d_out = (scale * (data.targets - act.output).array() * act.output.array() *
                          (1.0 - act.output.array()))
                             .matrix();
  const MatrixXd d_hidden =
      ((d_out * p.w_output).array() * act.hidden.array() * (1.0 - act.hidden.array())).matrix();

  Gradient g;
  g.w_output = d_out.transpose() * act.hidden;
  g.theta_output = d_out.colwise().sum().transpose();
  g.w_hidden = d_hidden.transpose() * data.inputs;
  g.theta_hidden = d_hidden.colwise().sum().transpose();
  return g;
}

ResidualJacobian residual_jacobian(const Network& net, const Dataset& data) {
  require_compatible(net, data);
  const auto& p = net.params;
  const auto act = forward_batch(p, data.inputs);
  const Index n_patterns = data.inputs.rows();
  const Index n_in = p.w_hidden.cols();
  const Index n_hidden = p.w_hidden.rows();
  const Index n_out = p.w_output.rows();

  const Index off_theta_h = n_hidden * n_in;
  const Index off_w_o = off_theta_h + n_hidden;
  const Index off_theta_o = off_w_o + n_out * n_hidden;

  ResidualJacobian rj;
  rj.residuals.resize(n_patterns * n_out);
  rj.jacobian = MatrixXd::Zero(n_patterns * n_out, off_theta_o + n_out);

  for (Index pt = 0; pt < n_patterns; ++pt) {
    for (Index i = 0; i < n_out; ++i) {
      const Index row = pt * n_out + i;
      const double o = act.output(pt, i);
      rj.residuals[row] = data.targets(pt, i) - o;
      const double s = -o * (1.0 - o);  // ∂r/∂(output pre-activation)
      for (Index j = 0; j < n_hidden; ++j) {
        const double h = act.hidden(pt, j);
        const double back = s * p.w_output(i, j) * h * (1.0 - h);
        for (Index k = 0; k < n_in; ++k) rj.jacobian(row, j * n_in + k) = back * data.inputs(pt, k);
        rj.jacobian(row, off_theta_h + j) = back;
        rj.jacobian(row, off_w_o + i * n_hidden + j) = s * h;
      }
      rj.jacobian(row, off_theta_o + i) = s;
    }
  }
  return rj;
}

}  // namespace rescomp
