#include "rescomp/prune.hpp"

#include <algorithm>

#include <Eigen/SVD>

#include "rescomp/error.hpp"

namespace rescomp {

ActivationMatrix activation_matrix(const Network& net, const Dataset& data) {
  const auto& p = net.params;
  if (data.inputs.rows() == 0) throw Error(ErrorCode::EmptyDataset, "dataset has no patterns");
  if (data.inputs.cols() != p.w_hidden.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "dataset inputs do not match network inputs");
  }
  ActivationMatrix x{data.inputs * p.w_hidden.transpose()};
  x.values.rowwise() += p.theta_hidden.transpose();
  return x;
}

ActivationMatrix hidden_output_matrix(const Network& net, const Dataset& data) {
  auto x = activation_matrix(net, data);
  x.values = x.values.unaryExpr([](double z) { return sigmoid(z); });
  return x;
}

SingularSpectrum singular_values(const ActivationMatrix& x) {
  SingularSpectrum s;
  if (x.values.size() == 0) return s;
  if (!x.values.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "activation matrix has non-finite entries");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x.values);
  const auto& sv = svd.singularValues();
  s.values.assign(sv.data(), sv.data() + sv.size());
  // Eigen already sorts descending; keep the invariant explicit.
  std::sort(s.values.begin(), s.values.end(), std::greater<>());
  for (double& v : s.values) v = std::max(v, 0.0);
  return s;
}

std::size_t effective_rank(const SingularSpectrum& spectrum, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "relative tolerance must lie in (0, 1)");
  }
  if (spectrum.values.empty()) return 0;
  const double sigma_max = *std::max_element(spectrum.values.begin(), spectrum.values.end());
  if (sigma_max <= 0.0) return 0;
  const double cutoff = rel_tol * sigma_max;
  return static_cast<std::size_t>(std::count_if(spectrum.values.begin(), spectrum.values.end(),
                                                [cutoff](double v) { return v > cutoff; }));
}

namespace {

SingularSpectrum spectrum_of(const Network& net, const Dataset& data, PruneBasis basis) {
  return singular_values(basis == PruneBasis::PreActivation ? activation_matrix(net, data)
                                                            : hidden_output_matrix(net, data));
}

}  // namespace

PruneResult prune_and_retrain(const Dataset& data, std::size_t initial_hidden,
                              const Optimizer& optimizer, const TrainingConfig& cfg,
                              const PruneOptions& opts) {
  if (initial_hidden < 2) {
    throw Error(ErrorCode::InvalidArgument, "pruning needs an initial hidden width of at least 2");
  }
  validate(data);
  const auto n_in = static_cast<std::size_t>(data.inputs.cols());
  const auto n_out = static_cast<std::size_t>(data.targets.cols());

  const Network start =
      init_network({n_in, initial_hidden, n_out}, cfg.seed, opts.lo_arcmin, opts.hi_arcmin);
  auto first = optimizer.train(start, data, cfg);

  PruneReport report;
  report.initial_hidden = initial_hidden;
  report.basis = opts.basis;
  report.rel_tol = opts.rel_tol;
  report.initial_spectrum = spectrum_of(first.network, data, opts.basis);
  report.initial_mse = first.final_mse;
  report.pruned_hidden = std::max<std::size_t>(1, effective_rank(report.initial_spectrum, opts.rel_tol));

  const Network restart =
      init_network({n_in, report.pruned_hidden, n_out}, cfg.seed, opts.lo_arcmin, opts.hi_arcmin);
  auto second = optimizer.train(restart, data, cfg);
  report.pruned_spectrum = spectrum_of(second.network, data, opts.basis);
  report.pruned_mse = second.final_mse;

  return {std::move(first.network), std::move(second.network), std::move(first.history),
          std::move(second.history), std::move(report)};
}

}  // namespace rescomp
