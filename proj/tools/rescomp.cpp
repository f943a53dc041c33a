// rescomp: encoder error-compensation command line.
//
//   rescomp simulate       synthesize a calibration CSV from a harmonic spec
//   rescomp train          fit a 1:J:1 network to a calibration CSV
//   rescomp prune          train, estimate hidden-layer rank, retrain narrower
//   rescomp sweep          final training MSE across hidden widths
//   rescomp fourier        harmonic analysis + least-squares Fourier model
//   rescomp evaluate       residuals of a model on a held-out CSV
//   rescomp correct        apply a model to encoder angles
//   rescomp run-experiment full train/test comparison, written to a directory
//
// Failures print "error: <ErrorName>: <detail>" on stderr and exit with 1.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "rescomp/error.hpp"
#include "rescomp/json_io.hpp"
#include "rescomp/pipeline.hpp"

namespace {

using namespace rescomp;
using nlohmann::json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  return out;
}

struct TrainFlags {
  std::string optimizer = "lm";
  std::size_t hidden = 80;
  std::uint64_t seed = 42;
  std::size_t max_iterations = 10000;
  double learning_rate = 0.5;
  std::size_t stall_window = 200;
  double stall_tol = 1e-9;
  double lo_arcmin = -6.0;
  double hi_arcmin = 6.0;
  bool even_only = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--optimizer", optimizer, "lm or backprop")->check(CLI::IsMember({"lm", "backprop"}));
    cmd->add_option("--hidden", hidden, "hidden nodes")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "initialization seed");
    cmd->add_option("--max-iter", max_iterations, "iteration budget");
    cmd->add_option("--lr", learning_rate, "backprop learning rate");
    cmd->add_option("--stall-window", stall_window, "stopping-rule window");
    cmd->add_option("--stall-tol", stall_tol, "stopping-rule relative tolerance");
    cmd->add_option("--lo", lo_arcmin, "lower target bound, arc-min");
    cmd->add_option("--hi", hi_arcmin, "upper target bound, arc-min");
    cmd->add_flag("--even-only", even_only, "train on even-degree rows only");
  }

  TrainingConfig config() const {
    TrainingConfig cfg;
    cfg.max_iterations = max_iterations;
    cfg.learning_rate = learning_rate;
    cfg.stall_window = stall_window;
    cfg.stall_tol = stall_tol;
    cfg.seed = seed;
    return cfg;
  }
};

CalibrationSet training_set(const std::string& path, const std::string& encoder_id, bool even_only) {
  auto cal = load_calibration(path, encoder_id);
  return even_only ? partition_even_odd(cal).first : cal;
}

void write_history_csv(const std::string& path, const TrainingHistory& h) {
  auto out = open_out(path);
  out << "iteration,mse\n";
  for (std::size_t i = 0; i < h.mse_per_iteration.size(); ++i) {
    fmt::print(out, "{},{:.17g}\n", i + 1, h.mse_per_iteration[i]);
  }
}

std::string fmt_angle(double deg) { return fmt::format("{:.6f}", deg); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Encoder error compensation: neural-network and Fourier models"};
  app.require_subcommand(1);
  std::string encoder_id = "encoder";
  app.add_option("--encoder-id", encoder_id, "label stored with data and models");

  // simulate
  auto* sim = app.add_subcommand("simulate", "synthesize a calibration CSV");
  std::string sim_spec, sim_out;
  std::optional<int> sim_archetype;
  double sim_step = 2.0, sim_offset = 0.0;
  bool sim_no_quantize = false;
  auto* spec_opt = sim->add_option("--spec", sim_spec, "harmonic spec JSON");
  sim->add_option("--archetype", sim_archetype, "built-in reference archetype 0..3")->excludes(spec_opt);
  sim->add_option("--step", sim_step, "grid step, degrees");
  sim->add_option("--offset", sim_offset, "grid offset, degrees");
  sim->add_option("--out", sim_out, "output CSV")->required();
  sim->add_flag("--no-quantize", sim_no_quantize, "skip 16-bit quantization");

  // train
  auto* train = app.add_subcommand("train", "train a compensation network");
  std::string train_data, train_out, train_history;
  TrainFlags train_flags;
  train->add_option("--data", train_data, "calibration CSV")->required();
  train->add_option("--out", train_out, "model file")->required();
  train->add_option("--history", train_history, "iteration,mse CSV");
  train_flags.add_to(train);

  // prune
  auto* prune = app.add_subcommand("prune", "SVD-based hidden-layer pruning");
  std::string prune_data, prune_out, prune_report;
  std::string prune_basis = "post";
  double prune_tol = 1e-3;
  TrainFlags prune_flags;
  prune->add_option("--data", prune_data, "calibration CSV")->required();
  prune->add_option("--out", prune_out, "pruned model file")->required();
  prune->add_option("--report", prune_report, "JSON report with both spectra");
  prune->add_option("--rel-tol", prune_tol, "relative singular-value cutoff");
  prune->add_option("--basis", prune_basis, "pre or post (sigmoid) hidden matrix")
      ->check(CLI::IsMember({"pre", "post"}));
  prune_flags.add_to(prune);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "final MSE across hidden-layer widths");
  std::string sweep_data, sweep_out;
  std::vector<std::size_t> sweep_nodes = default_sweep_nodes();
  TrainFlags sweep_flags;
  sweep->add_option("--data", sweep_data, "calibration CSV")->required();
  sweep->add_option("--nodes", sweep_nodes, "hidden widths")->delimiter(',');
  sweep->add_option("--out", sweep_out, "hidden,final_mse,iterations CSV");
  sweep_flags.add_to(sweep);

  // fourier
  auto* four = app.add_subcommand("fourier", "fit the Fourier-series baseline");
  std::string four_data, four_out, four_spectrum;
  std::size_t four_top = 10;
  bool four_even_only = false;
  four->add_option("--data", four_data, "calibration CSV")->required();
  four->add_option("--top", four_top, "number of harmonics kept");
  four->add_option("--out", four_out, "model file")->required();
  four->add_option("--spectrum", four_spectrum, "order,amplitude_arcmin CSV");
  four->add_flag("--even-only", four_even_only, "fit even-degree rows only");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "residuals of a model on test data");
  std::string eval_model, eval_data, eval_residuals, eval_report;
  bool eval_odd_only = false;
  eval->add_option("--model", eval_model, "model file")->required();
  eval->add_option("--data", eval_data, "calibration CSV")->required();
  eval->add_option("--residuals", eval_residuals, "per-angle residual CSV");
  eval->add_option("--report", eval_report, "JSON summary");
  eval->add_flag("--odd-only", eval_odd_only, "evaluate odd-degree rows only");

  // correct
  auto* corr = app.add_subcommand("correct", "compensate encoder angles");
  std::string corr_model;
  std::optional<double> corr_angle;
  bool corr_stdin = false;
  corr->add_option("--model", corr_model, "model file")->required();
  auto* angle_opt = corr->add_option("--angle", corr_angle, "single encoder angle, degrees");
  corr->add_flag("--stdin", corr_stdin, "one angle per line in, one corrected angle per line out")
      ->excludes(angle_opt);

  // run-experiment
  auto* exp = app.add_subcommand("run-experiment", "train/test comparison of ANN and Fourier models");
  std::string exp_spec, exp_data, exp_dir;
  std::optional<int> exp_archetype;
  ExperimentOptions exp_opts;
  std::string exp_optimizer = "lm";
  std::string exp_basis = "post";
  auto* exp_spec_opt = exp->add_option("--spec", exp_spec, "harmonic spec JSON");
  auto* exp_arch_opt = exp->add_option("--archetype", exp_archetype, "built-in archetype 0..3");
  auto* exp_data_opt = exp->add_option("--data", exp_data, "full-circle 1-degree calibration CSV")
                           ;
  exp_spec_opt->excludes(exp_arch_opt)->excludes(exp_data_opt);
  exp_arch_opt->excludes(exp_data_opt);
  exp->add_option("--out-dir", exp_dir, "report directory")->required();
  exp->add_option("--step", exp_opts.grid_step_deg, "synthesis grid step, degrees");
  exp->add_option("--hidden", exp_opts.hidden, "hidden nodes")->check(CLI::PositiveNumber);
  exp->add_option("--optimizer", exp_optimizer, "lm or backprop")->check(CLI::IsMember({"lm", "backprop"}));
  exp->add_option("--seed", exp_opts.training.seed, "initialization seed");
  exp->add_option("--max-iter", exp_opts.training.max_iterations, "iteration budget");
  exp->add_option("--lr", exp_opts.training.learning_rate, "backprop learning rate");
  exp->add_flag("--prune", exp_opts.prune, "retrain at the SVD-estimated width");
  exp->add_option("--rel-tol", exp_opts.prune_options.rel_tol, "relative singular-value cutoff");
  exp->add_option("--basis", exp_basis, "pre or post")->check(CLI::IsMember({"pre", "post"}));
  exp->add_flag("--compare", exp_opts.compare_optimizers, "also train the other optimizer");
  exp->add_option("--top", exp_opts.fourier_top, "Fourier harmonics kept");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: InvalidArgument: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*sim) {
      HarmonicSpec spec = sim_archetype ? reference_archetype(*sim_archetype)
                                        : (sim_spec.empty() ? HarmonicSpec{} : load_harmonic_spec(sim_spec));
      const auto cal = synthesize(spec, {sim_step, sim_offset, !sim_no_quantize, encoder_id, {}});
      save_calibration(sim_out, cal);
      fmt::print("wrote {} samples to {}\n", cal.size(), sim_out);
    } else if (*train) {
      const auto cal = training_set(train_data, encoder_id, train_flags.even_only);
      const auto norm = target_map(train_flags.lo_arcmin, train_flags.hi_arcmin);
      const auto data = make_dataset(cal, norm);
      const auto start = init_network({1, train_flags.hidden, 1}, train_flags.seed, norm.lo, norm.hi);
      const auto result = make_optimizer(parse_optimizer(train_flags.optimizer))->train(start, data, train_flags.config());
      save_model(train_out, CompensationModel::ann(result.network, encoder_id));
      if (!train_history.empty()) write_history_csv(train_history, result.history);
      fmt::print("{} 1:{}:1  iterations {}  final mse {:.6g}  stop {}\n", train_flags.optimizer,
                 train_flags.hidden, result.history.iterations_run, result.final_mse,
                 to_string(result.history.stop_reason));
    } else if (*prune) {
      const auto cal = training_set(prune_data, encoder_id, prune_flags.even_only);
      const auto data = make_dataset(cal, target_map(prune_flags.lo_arcmin, prune_flags.hi_arcmin));
      PruneOptions opts{prune_tol, prune_basis == "pre" ? PruneBasis::PreActivation : PruneBasis::PostActivation,
                        prune_flags.lo_arcmin, prune_flags.hi_arcmin};
      const auto result = prune_and_retrain(data, prune_flags.hidden,
                                            *make_optimizer(parse_optimizer(prune_flags.optimizer)),
                                            prune_flags.config(), opts);
      save_model(prune_out, CompensationModel::ann(result.pruned, encoder_id));
      if (!prune_report.empty()) open_out(prune_report) << to_json(result.report).dump(2) << '\n';
      fmt::print("hidden {} -> {}  mse {:.6g} -> {:.6g}\n", result.report.initial_hidden,
                 result.report.pruned_hidden, result.report.initial_mse, result.report.pruned_mse);
    } else if (*sweep) {
      const auto cal = training_set(sweep_data, encoder_id, sweep_flags.even_only);
      const auto norm = target_map(sweep_flags.lo_arcmin, sweep_flags.hi_arcmin);
      const auto points = node_sweep(make_dataset(cal, norm), sweep_nodes,
                                     *make_optimizer(parse_optimizer(sweep_flags.optimizer)),
                                     sweep_flags.config(), norm);
      std::ostringstream table;
      table << "hidden,final_mse,iterations\n";
      for (const auto& p : points) fmt::print(table, "{},{:.17g},{}\n", p.hidden, p.final_mse, p.iterations);
      if (sweep_out.empty()) std::cout << table.str();
      else open_out(sweep_out) << table.str();
    } else if (*four) {
      const auto cal = training_set(four_data, encoder_id, four_even_only);
      const auto profile = error_profile(cal);
      const auto spectrum = harmonic_spectrum(profile);
      const auto orders = select_top(spectrum, std::min(four_top, spectrum.entries.size()));
      save_model(four_out, CompensationModel::fourier(fit_fourier(profile, orders), encoder_id));
      if (!four_spectrum.empty()) {
        auto out = open_out(four_spectrum);
        out << "order,amplitude_arcmin\n";
        for (const auto& e : spectrum.entries) fmt::print(out, "{},{:.17g}\n", e.n, e.amplitude_arcmin);
      }
      fmt::print("orders: {}\n", fmt::join(orders, " "));
    } else if (*eval) {
      const auto model = load_model(eval_model);
      auto cal = load_calibration(eval_data, encoder_id);
      if (eval_odd_only) cal = partition_even_odd(cal).second;
      const auto report = evaluate(model, cal);
      if (!eval_residuals.empty()) {
        auto out = open_out(eval_residuals);
        write_residual_csv(out, report);
      }
      const json summary{{"pre", to_json(report.pre_stats)},
                         {"post", to_json(report.post_stats)},
                         {"max_abs_residual_arcmin", report.max_abs_residual_arcmin}};
      if (!eval_report.empty()) open_out(eval_report) << summary.dump(2) << '\n';
      fmt::print("pre  MAE {:.4f}' RMS {:.4f}'\npost MAE {:.4f}' RMS {:.4f}' max|res| {:.4f}'\n",
                 report.pre_stats.mae_arcmin, report.pre_stats.rms_arcmin, report.post_stats.mae_arcmin,
                 report.post_stats.rms_arcmin, report.max_abs_residual_arcmin);
    } else if (*corr) {
      const auto model = load_model(corr_model);
      if (corr_angle) {
        if (!std::isfinite(*corr_angle)) throw Error(ErrorCode::InvalidArgument, "angle must be finite");
        std::cout << fmt_angle(correct(model, *corr_angle)) << '\n';
      } else if (corr_stdin) {
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(std::cin, line)) {
          ++line_no;
          if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
          double angle = 0.0;
          std::istringstream parse(line);
          if (!(parse >> angle) || !std::isfinite(angle) || !(parse >> std::ws).eof()) {
            throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": not an angle");
          }
          std::cout << fmt_angle(correct(model, angle)) << '\n';
        }
      } else {
        throw Error(ErrorCode::InvalidArgument, "correct needs --angle or --stdin");
      }
    } else if (*exp) {
      if (!exp_spec.empty()) exp_opts.spec = load_harmonic_spec(exp_spec);
      else if (!exp_data.empty()) exp_opts.csv = exp_data;
      else exp_opts.spec = reference_archetype(exp_archetype.value_or(0));
      exp_opts.encoder_id = encoder_id;
      exp_opts.optimizer = parse_optimizer(exp_optimizer);
      exp_opts.prune_options.basis = exp_basis == "pre" ? PruneBasis::PreActivation : PruneBasis::PostActivation;
      const auto result = run_experiment(exp_opts);
      write_experiment(exp_dir, result);
      fmt::print("pre MAE {:.4f}'  Fourier MAE {:.4f}'  ANN MAE {:.4f}' (max|res| {:.4f}')\n",
                 result.ann_eval.pre_stats.mae_arcmin, result.fourier_eval.post_stats.mae_arcmin,
                 result.ann_eval.post_stats.mae_arcmin, result.ann_eval.max_abs_residual_arcmin);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.name() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: InternalError: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
