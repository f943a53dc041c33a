#include "rescomp/caldata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>

#include "rescomp/error.hpp"

namespace rescomp {
namespace {

constexpr std::string_view kHeader = "table_angle_deg,encoder_angle_deg";
constexpr double kGridTolDeg = 1e-9;

bool in_circle(double a) { return std::isfinite(a) && a >= 0.0 && a < 360.0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string where(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

}  // namespace

double wrap_signed_deg(double diff_deg) noexcept {
  double d = std::fmod(diff_deg, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

double wrap_360(double angle_deg) noexcept {
  double a = std::fmod(angle_deg, 360.0);
  if (a < 0.0) a += 360.0;
  // fmod of a tiny negative can round up to exactly 360
  if (a >= 360.0) a = 0.0;
  return a;
}

CalibrationSet::CalibrationSet(std::vector<CalibrationSample> samples, std::string encoder_id,
                               std::string epoch)
    : samples_(std::move(samples)), encoder_id_(std::move(encoder_id)), epoch_(std::move(epoch)) {
  if (samples_.size() < 2) {
    throw Error(ErrorCode::InsufficientSamples,
                "calibration set needs at least 2 samples, got " + std::to_string(samples_.size()));
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (!in_circle(s.table_angle_deg) || !in_circle(s.encoder_angle_deg)) {
      throw Error(ErrorCode::OutOfRange, "sample " + std::to_string(i) + " has an angle outside [0, 360)");
    }
    if (i == 0) continue;
    const double prev = samples_[i - 1].table_angle_deg;
    if (s.table_angle_deg == prev) {
      throw Error(ErrorCode::DuplicateGridAngle,
                  "duplicate table angle " + std::to_string(s.table_angle_deg));
    }
    if (s.table_angle_deg < prev) {
      throw Error(ErrorCode::UnorderedGrid, "table angles must be strictly increasing at sample " +
                                                std::to_string(i));
    }
  }
}

CalibrationSet read_calibration(std::istream& in, std::string encoder_id, std::string epoch) {
  std::vector<CalibrationSample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    if (line_no == 1 && row == kHeader) continue;

    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
      throw Error(ErrorCode::MalformedRow, where(line_no) + "expected two comma-separated fields");
    }
    CalibrationSample s;
    if (!parse_double(row.substr(0, comma), s.table_angle_deg) ||
        !parse_double(row.substr(comma + 1), s.encoder_angle_deg)) {
      throw Error(ErrorCode::MalformedRow, where(line_no) + "non-numeric field in '" + line + "'");
    }
    if (!in_circle(s.table_angle_deg) || !in_circle(s.encoder_angle_deg)) {
      throw Error(ErrorCode::OutOfRange, where(line_no) + "angle outside [0, 360)");
    }
    if (!samples.empty() && samples.back().table_angle_deg == s.table_angle_deg) {
      throw Error(ErrorCode::DuplicateGridAngle,
                  where(line_no) + "duplicate table angle " + std::string(row.substr(0, comma)));
    }
    samples.push_back(s);
  }
  // Duplicates that are not adjacent still need the DuplicateGridAngle name.
  std::vector<double> sorted;
  sorted.reserve(samples.size());
  for (const auto& s : samples) sorted.push_back(s.table_angle_deg);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::DuplicateGridAngle, "duplicate table angle in calibration data");
  }
  return CalibrationSet(std::move(samples), std::move(encoder_id), std::move(epoch));
}

CalibrationSet load_calibration(const std::filesystem::path& path, std::string encoder_id,
                                std::string epoch) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_calibration(in, std::move(encoder_id), std::move(epoch));
}

void write_calibration(std::ostream& out, const CalibrationSet& cal) {
  const auto old_precision = out.precision();
  out << kHeader << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& s : cal.samples()) out << s.table_angle_deg << ',' << s.encoder_angle_deg << '\n';
  out.precision(old_precision);
}

void save_calibration(const std::filesystem::path& path, const CalibrationSet& cal) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_calibration(out, cal);
}

ErrorProfile error_profile(const CalibrationSet& cal) {
  ErrorProfile profile;
  profile.points.reserve(cal.size());
  for (const auto& s : cal.samples()) {
    profile.points.push_back(
        {s.encoder_angle_deg, wrap_signed_deg(s.encoder_angle_deg - s.table_angle_deg) * kArcminPerDegree});
  }
  std::stable_sort(profile.points.begin(), profile.points.end(),
                   [](const ErrorPoint& a, const ErrorPoint& b) {
                     return a.encoder_angle_deg < b.encoder_angle_deg;
                   });
  return profile;
}

std::pair<CalibrationSet, CalibrationSet> partition_even_odd(const CalibrationSet& cal) {
  std::vector<CalibrationSample> even, odd;
  for (const auto& s : cal.samples()) {
    const double nearest = std::round(s.table_angle_deg);
    if (std::abs(s.table_angle_deg - nearest) > kGridTolDeg) {
      throw Error(ErrorCode::NonIntegerGrid,
                  "table angle " + std::to_string(s.table_angle_deg) + " is not on an integer-degree grid");
    }
    (static_cast<long long>(nearest) % 2 == 0 ? even : odd).push_back(s);
  }
  return {CalibrationSet(std::move(even), cal.encoder_id(), cal.epoch()),
          CalibrationSet(std::move(odd), cal.encoder_id(), cal.epoch())};
}

CalibrationSet merge(const CalibrationSet& a, const CalibrationSet& b) {
  std::vector<CalibrationSample> all(a.samples().begin(), a.samples().end());
  all.insert(all.end(), b.samples().begin(), b.samples().end());
  std::sort(all.begin(), all.end(), [](const CalibrationSample& x, const CalibrationSample& y) {
    return x.table_angle_deg < y.table_angle_deg;
  });
  return CalibrationSet(std::move(all), a.encoder_id(), a.epoch());
}

ProfileStats stats(std::span<const double> errors) {
  if (errors.empty()) throw Error(ErrorCode::EmptyProfile, "statistics of an empty profile");
  ProfileStats s;
  s.n_samples = errors.size();
  s.min_arcmin = errors.front();
  s.max_arcmin = errors.front();
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (double e : errors) {
    abs_sum += std::abs(e);
    sq_sum += e * e;
    s.min_arcmin = std::min(s.min_arcmin, e);
    s.max_arcmin = std::max(s.max_arcmin, e);
  }
  const auto n = static_cast<double>(errors.size());
  s.mae_arcmin = abs_sum / n;
  s.rms_arcmin = std::sqrt(sq_sum / n);
  return s;
}

ProfileStats stats(const ErrorProfile& profile) {
  std::vector<double> errors;
  errors.reserve(profile.size());
  for (const auto& p : profile.points) errors.push_back(p.error_arcmin);
  return stats(errors);
}

}  // namespace rescomp
