#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rescomp/ann.hpp"
#include "rescomp/caldata.hpp"
#include "rescomp/fourier.hpp"
#include "rescomp/optim.hpp"
#include "rescomp/prune.hpp"
#include "rescomp/simgen.hpp"

namespace rescomp {

inline constexpr int kModelFormatVersion = 1;

enum class ModelKind { ANN, Fourier };

std::string_view to_string(ModelKind kind) noexcept;

/// Serializable compensation model: either a trained network or a Fourier fit.
struct CompensationModel {
  ModelKind kind = ModelKind::ANN;
  std::string encoder_id;
  std::variant<Network, FourierModel> payload;
  int format_version = kModelFormatVersion;

  static CompensationModel ann(Network net, std::string encoder_id = {});
  static CompensationModel fourier(FourierModel model, std::string encoder_id = {});
};

void write_model(std::ostream& out, const CompensationModel& model);
CompensationModel read_model(std::istream& in,
                             std::optional<ModelKind> expected = std::nullopt);

void save_model(const std::filesystem::path& path, const CompensationModel& model);
CompensationModel load_model(const std::filesystem::path& path,
                             std::optional<ModelKind> expected = std::nullopt);

/// Predicted encoder error at an encoder angle, arc-minutes.
double predict_error(const CompensationModel& model, double theta_enc_deg);

/// θ_COR = θ_ENC − ε(θ_ENC), wrapped into [0, 360).
double correct(const CompensationModel& model, double theta_enc_deg);

struct ResidualRow {
  double table_angle_deg = 0.0;
  double encoder_angle_deg = 0.0;
  double observed_arcmin = 0.0;
  double predicted_arcmin = 0.0;
  double residual_arcmin = 0.0;  // predicted − observed
};

struct EvaluationReport {
  ProfileStats pre_stats;
  ProfileStats post_stats;
  double max_abs_residual_arcmin = 0.0;
  std::vector<ResidualRow> rows;
};

EvaluationReport evaluate(const CompensationModel& model, const CalibrationSet& test);

void write_residual_csv(std::ostream& out, const EvaluationReport& report);

/// Normalized dataset from a calibration set: θ_ENC/360 → target-map(error).
Dataset make_dataset(const CalibrationSet& cal, const AffineMap& target_norm);

struct ExperimentOptions {
  // Exactly one data source: a harmonic spec or a full-circle calibration CSV.
  std::optional<HarmonicSpec> spec;
  std::optional<std::filesystem::path> csv;
  double grid_step_deg = 1.0;
  std::string encoder_id = "encoder";

  std::size_t hidden = 80;
  OptimizerKind optimizer = OptimizerKind::LevenbergMarquardt;
  // LM keeps shaving training error long after held-out error bottoms out;
  // experiments stop at 6000 iterations.
  TrainingConfig training{.max_iterations = 6000};
  double lo_arcmin = -6.0;
  double hi_arcmin = 6.0;

  bool prune = false;
  PruneOptions prune_options;

  // Also train the other optimizer from the same start (LM vs backprop table).
  bool compare_optimizers = false;
  std::size_t fourier_top = 10;
};

struct ExperimentResult {
  std::string encoder_id;
  CalibrationSet train;
  CalibrationSet test;
  ProfileStats train_stats;
  CompensationModel ann_model;
  CompensationModel fourier_model;
  OptimizerKind optimizer = OptimizerKind::LevenbergMarquardt;
  TrainingHistory ann_history;
  double ann_train_mse = 0.0;
  std::optional<TrainingHistory> comparison_history;
  std::optional<double> comparison_train_mse;
  std::optional<PruneReport> prune_report;
  HarmonicSpectrum spectrum;
  std::vector<int> fourier_orders;
  EvaluationReport ann_eval;
  EvaluationReport fourier_eval;
};

/// Load or synthesize → split even/odd → train → (prune) → Fourier baseline → evaluate.
ExperimentResult run_experiment(const ExperimentOptions& opts);

/// Writes summary.csv, optimizers.csv, residuals.csv, history.csv,
/// report.json, ann_model.json and fourier_model.json into `dir`.
void write_experiment(const std::filesystem::path& dir, const ExperimentResult& result);

}  // namespace rescomp
