#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rescomp {

inline constexpr double kArcminPerDegree = 60.0;

/// One rotary-table reading paired with the encoder's decoded angle.
struct CalibrationSample {
  double table_angle_deg = 0.0;
  double encoder_angle_deg = 0.0;

  friend bool operator==(const CalibrationSample&, const CalibrationSample&) = default;
};

/// Ordered calibration run of a single encoder.
///
/// Invariants (checked on construction): at least two samples, every angle
/// finite and in [0, 360), table angles strictly increasing.
class CalibrationSet {
 public:
  explicit CalibrationSet(std::vector<CalibrationSample> samples,
                          std::string encoder_id = {}, std::string epoch = {});

  std::span<const CalibrationSample> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  const std::string& encoder_id() const noexcept { return encoder_id_; }
  const std::string& epoch() const noexcept { return epoch_; }

  friend bool operator==(const CalibrationSet&, const CalibrationSet&) = default;

 private:
  std::vector<CalibrationSample> samples_;
  std::string encoder_id_;
  std::string epoch_;
};

struct ErrorPoint {
  double encoder_angle_deg = 0.0;
  double error_arcmin = 0.0;
};

/// Signed encoder error (encoder minus table, arc-minutes) ordered by encoder angle.
struct ErrorProfile {
  std::vector<ErrorPoint> points;

  std::size_t size() const noexcept { return points.size(); }
};

struct ProfileStats {
  double mae_arcmin = 0.0;
  double rms_arcmin = 0.0;
  double min_arcmin = 0.0;
  double max_arcmin = 0.0;
  std::size_t n_samples = 0;
};

/// Shortest signed angular difference, mapped into (-180, 180].
double wrap_signed_deg(double diff_deg) noexcept;

/// Maps any finite angle into [0, 360).
double wrap_360(double angle_deg) noexcept;

CalibrationSet read_calibration(std::istream& in, std::string encoder_id = {},
                                std::string epoch = {});
CalibrationSet load_calibration(const std::filesystem::path& path,
                                std::string encoder_id = {}, std::string epoch = {});

void write_calibration(std::ostream& out, const CalibrationSet& cal);
void save_calibration(const std::filesystem::path& path, const CalibrationSet& cal);

ErrorProfile error_profile(const CalibrationSet& cal);

/// Splits an integer-degree grid into even-degree (training) and odd-degree
/// (test) halves. Throws NonIntegerGrid when a table angle is off-grid.
std::pair<CalibrationSet, CalibrationSet> partition_even_odd(const CalibrationSet& cal);

/// Union of two disjoint sets, re-sorted by table angle.
CalibrationSet merge(const CalibrationSet& a, const CalibrationSet& b);

ProfileStats stats(const ErrorProfile& profile);
ProfileStats stats(std::span<const double> errors_arcmin);

}  // namespace rescomp
