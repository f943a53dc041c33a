#include "rescomp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "rescomp/error.hpp"
#include "rescomp/json_io.hpp"

namespace rescomp {
namespace {

using nlohmann::json;

double predict_ann(const Network& net, double theta_deg) {
  const auto shape = net.shape();
  if (shape.inputs != 1 || shape.outputs != 1) {
    throw Error(ErrorCode::ShapeMismatch, "angle compensation needs a 1-input, 1-output network");
  }
  Eigen::VectorXd x(1);
  x[0] = net.input_norm.normalize(wrap_360(theta_deg));
  return net.target_norm.denormalize(forward(net, x)[0]);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

void write_history(std::ostream& out, const TrainingHistory& h) {
  out << "iteration,mse\n";
  for (std::size_t i = 0; i < h.mse_per_iteration.size(); ++i) {
    fmt::print(out, "{},{:.17g}\n", i + 1, h.mse_per_iteration[i]);
  }
}

json history_json(const TrainingHistory& h, std::string_view optimizer, std::size_t hidden,
                  double final_mse) {
  return {{"optimizer", optimizer},          {"hidden", hidden},
          {"initial_mse", h.initial_mse},    {"final_mse", final_mse},
          {"iterations_run", h.iterations_run}, {"stop_reason", to_string(h.stop_reason)}};
}

json eval_json(const EvaluationReport& r) {
  return {{"pre", to_json(r.pre_stats)},
          {"post", to_json(r.post_stats)},
          {"max_abs_residual_arcmin", r.max_abs_residual_arcmin}};
}

}  // namespace

double predict_error(const CompensationModel& model, double theta_enc_deg) {
  if (const auto* net = std::get_if<Network>(&model.payload)) return predict_ann(*net, theta_enc_deg);
  return eval_fourier(std::get<FourierModel>(model.payload), wrap_360(theta_enc_deg));
}

double correct(const CompensationModel& model, double theta_enc_deg) {
  return wrap_360(theta_enc_deg - predict_error(model, theta_enc_deg) / kArcminPerDegree);
}

EvaluationReport evaluate(const CompensationModel& model, const CalibrationSet& test) {
  EvaluationReport report;
  report.rows.reserve(test.size());
  std::vector<double> observed, residual;
  for (const auto& s : test.samples()) {
    ResidualRow row;
    row.table_angle_deg = s.table_angle_deg;
    row.encoder_angle_deg = s.encoder_angle_deg;
    row.observed_arcmin = wrap_signed_deg(s.encoder_angle_deg - s.table_angle_deg) * kArcminPerDegree;
    row.predicted_arcmin = predict_error(model, s.encoder_angle_deg);
    row.residual_arcmin = row.predicted_arcmin - row.observed_arcmin;
    observed.push_back(row.observed_arcmin);
    residual.push_back(row.residual_arcmin);
    report.max_abs_residual_arcmin = std::max(report.max_abs_residual_arcmin, std::abs(row.residual_arcmin));
    report.rows.push_back(row);
  }
  if (report.rows.empty()) throw Error(ErrorCode::EmptyDataset, "evaluation set is empty");
  report.pre_stats = stats(observed);
  report.post_stats = stats(residual);
  return report;
}

void write_residual_csv(std::ostream& out, const EvaluationReport& report) {
  out << "table_angle_deg,encoder_angle_deg,observed_arcmin,predicted_arcmin,residual_arcmin\n";
  for (const auto& r : report.rows) {
    fmt::print(out, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.table_angle_deg,
               r.encoder_angle_deg, r.observed_arcmin, r.predicted_arcmin, r.residual_arcmin);
  }
}

Dataset make_dataset(const CalibrationSet& cal, const AffineMap& target_norm) {
  const auto profile = error_profile(cal);
  const auto map_in = input_map();
  const auto n = static_cast<Eigen::Index>(profile.size());
  Dataset data{Eigen::MatrixXd(n, 1), Eigen::MatrixXd(n, 1)};
  for (Eigen::Index p = 0; p < n; ++p) {
    const auto& pt = profile.points[static_cast<std::size_t>(p)];
    data.inputs(p, 0) = map_in.normalize(pt.encoder_angle_deg);
    data.targets(p, 0) = target_norm.normalize(pt.error_arcmin);
  }
  validate(data);
  return data;
}

ExperimentResult run_experiment(const ExperimentOptions& opts) {
  if (opts.spec.has_value() == opts.csv.has_value()) {
    throw Error(ErrorCode::InvalidArgument, "experiment needs exactly one of a spec or a CSV file");
  }
  const CalibrationSet full = opts.spec
      ? synthesize(*opts.spec, {opts.grid_step_deg, 0.0, true, opts.encoder_id, {}})
      : load_calibration(*opts.csv, opts.encoder_id);
  auto [train, test] = partition_even_odd(full);
  for (const auto& t : test.samples()) {
    const bool seen = std::any_of(train.samples().begin(), train.samples().end(), [&](const auto& s) {
      return s.table_angle_deg == t.table_angle_deg;
    });
    if (seen) throw Error(ErrorCode::InvalidArgument, "test angle also present in training data");
  }

  const auto norm = target_map(opts.lo_arcmin, opts.hi_arcmin);
  const Dataset data = make_dataset(train, norm);
  const auto optimizer = make_optimizer(opts.optimizer);
  const Network start = init_network({1, opts.hidden, 1}, opts.training.seed, opts.lo_arcmin, opts.hi_arcmin);

  std::optional<PruneReport> prune_report;
  TrainingResult trained;
  if (opts.prune) {
    PruneOptions prune_opts = opts.prune_options;
    prune_opts.lo_arcmin = opts.lo_arcmin;
    prune_opts.hi_arcmin = opts.hi_arcmin;
    auto pruned = prune_and_retrain(data, opts.hidden, *optimizer, opts.training, prune_opts);
    prune_report = pruned.report;
    trained = {std::move(pruned.pruned), std::move(pruned.pruned_history), pruned.report.pruned_mse};
  } else {
    trained = optimizer->train(start, data, opts.training);
  }

  std::optional<TrainingHistory> comparison_history;
  std::optional<double> comparison_mse;
  if (opts.compare_optimizers) {
    const auto other = make_optimizer(opts.optimizer == OptimizerKind::Backprop
                                          ? OptimizerKind::LevenbergMarquardt
                                          : OptimizerKind::Backprop);
    auto run = other->train(start, data, opts.training);
    comparison_history = std::move(run.history);
    comparison_mse = run.final_mse;
  }

  const auto train_profile = error_profile(train);
  auto spectrum = harmonic_spectrum(train_profile);
  auto orders = select_top(spectrum, std::min(opts.fourier_top, spectrum.entries.size()));
  auto fourier = fit_fourier(train_profile, orders);

  ExperimentResult result{opts.encoder_id,
                          std::move(train),
                          std::move(test),
                          stats(train_profile),
                          CompensationModel::ann(std::move(trained.network), opts.encoder_id),
                          CompensationModel::fourier(std::move(fourier), opts.encoder_id),
                          opts.optimizer,
                          std::move(trained.history),
                          trained.final_mse,
                          std::move(comparison_history),
                          comparison_mse,
                          std::move(prune_report),
                          std::move(spectrum),
                          std::move(orders),
                          {},
                          {}};
  result.ann_eval = evaluate(result.ann_model, result.test);
  result.fourier_eval = evaluate(result.fourier_model, result.test);
  return result;
}

void write_experiment(const std::filesystem::path& dir, const ExperimentResult& r) {
  std::filesystem::create_directories(dir);
  const std::size_t hidden = std::get<Network>(r.ann_model.payload).shape().hidden;
  const auto primary = to_string(r.optimizer);
  const std::string_view secondary = r.optimizer == OptimizerKind::Backprop ? "lm" : "backprop";

  {
    auto out = open_out(dir / "summary.csv");
    out << "encoder_id,n_train,n_test,pre_mae_arcmin,pre_rms_arcmin,pre_min_arcmin,pre_max_arcmin,"
           "fourier_mae_arcmin,fourier_rms_arcmin,fourier_max_abs_arcmin,"
           "ann_mae_arcmin,ann_rms_arcmin,ann_max_abs_arcmin,optimizer,hidden,train_mse,iterations\n";
    const auto& pre = r.ann_eval.pre_stats;
    fmt::print(out, "{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{},{},{:.9g},{}\n",
               r.encoder_id, r.train.size(), r.test.size(), pre.mae_arcmin, pre.rms_arcmin,
               pre.min_arcmin, pre.max_arcmin, r.fourier_eval.post_stats.mae_arcmin,
               r.fourier_eval.post_stats.rms_arcmin, r.fourier_eval.max_abs_residual_arcmin,
               r.ann_eval.post_stats.mae_arcmin, r.ann_eval.post_stats.rms_arcmin,
               r.ann_eval.max_abs_residual_arcmin, primary, hidden, r.ann_train_mse,
               r.ann_history.iterations_run);
  }
  {
    auto out = open_out(dir / "optimizers.csv");
    out << "optimizer,hidden,final_mse,iterations,stop_reason\n";
    fmt::print(out, "{},{},{:.17g},{},{}\n", primary, hidden, r.ann_train_mse,
               r.ann_history.iterations_run, to_string(r.ann_history.stop_reason));
    if (r.comparison_history) {
      fmt::print(out, "{},{},{:.17g},{},{}\n", secondary, hidden, *r.comparison_train_mse,
                 r.comparison_history->iterations_run, to_string(r.comparison_history->stop_reason));
    }
  }
  {
    auto out = open_out(dir / "residuals.csv");
    out << "table_angle_deg,encoder_angle_deg,observed_arcmin,ann_predicted_arcmin,ann_residual_arcmin,"
           "fourier_predicted_arcmin,fourier_residual_arcmin\n";
    for (std::size_t i = 0; i < r.ann_eval.rows.size(); ++i) {
      const auto& a = r.ann_eval.rows[i];
      const auto& f = r.fourier_eval.rows[i];
      fmt::print(out, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", a.table_angle_deg,
                 a.encoder_angle_deg, a.observed_arcmin, a.predicted_arcmin, a.residual_arcmin,
                 f.predicted_arcmin, f.residual_arcmin);
    }
  }
  {
    auto out = open_out(dir / "history.csv");
    write_history(out, r.ann_history);
  }
  if (r.comparison_history) {
    auto out = open_out(dir / fmt::format("history_{}.csv", secondary));
    write_history(out, *r.comparison_history);
  }

  json report;
  report["encoder_id"] = r.encoder_id;
  report["train_profile"] = to_json(r.train_stats);
  report["ann"] = eval_json(r.ann_eval);
  report["ann"]["training"] = history_json(r.ann_history, primary, hidden, r.ann_train_mse);
  report["fourier"] = eval_json(r.fourier_eval);
  report["fourier"]["orders"] = r.fourier_orders;
  const std::size_t shown = std::min<std::size_t>(r.spectrum.entries.size(), 20);
  report["fourier"]["spectrum_top"] = to_json(HarmonicSpectrum{
      {r.spectrum.entries.begin(), r.spectrum.entries.begin() + static_cast<std::ptrdiff_t>(shown)}});
  if (r.comparison_history) {
    report["comparison_training"] =
        history_json(*r.comparison_history, secondary, hidden, *r.comparison_train_mse);
  }
  if (r.prune_report) report["prune"] = to_json(*r.prune_report);
  {
    auto out = open_out(dir / "report.json");
    out << report.dump(2) << '\n';
  }
  save_model(dir / "ann_model.json", r.ann_model);
  save_model(dir / "fourier_model.json", r.fourier_model);
}

}  // namespace rescomp
