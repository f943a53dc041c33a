#include "rescomp/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include <Eigen/Dense>

#include "rescomp/error.hpp"

namespace rescomp {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRankThreshold = 1e-9;

// Amplitudes are compared on a 1e-12' grid so that round-off does not break ties.
long long amplitude_key(double amplitude_arcmin) { return std::llround(amplitude_arcmin * 1e12); }

bool by_amplitude(const HarmonicAmplitude& a, const HarmonicAmplitude& b) {
  const auto ka = amplitude_key(a.amplitude_arcmin), kb = amplitude_key(b.amplitude_arcmin);
  if (ka != kb) return ka > kb;
  return a.n < b.n;
}

void require_uniform_grid(const ErrorProfile& profile) {
  const std::size_t n = profile.size();
  if (n < 2) throw Error(ErrorCode::NonUniformGrid, "harmonic analysis needs at least 2 samples");
  const double step = 360.0 / static_cast<double>(n);
  const double first = profile.points.front().encoder_angle_deg;
  for (std::size_t k = 0; k < n; ++k) {
    const double expected = first + static_cast<double>(k) * step;
    if (std::abs(profile.points[k].encoder_angle_deg - expected) > kGridJitterFraction * step) {
      throw Error(ErrorCode::NonUniformGrid,
                  "sample " + std::to_string(k) + " is off the uniform " + std::to_string(step) +
                      "-degree grid");
    }
  }
}

}  // namespace

HarmonicSpectrum harmonic_spectrum(const ErrorProfile& profile) {
  require_uniform_grid(profile);
  const std::size_t count = profile.size();
  const auto n_samples = static_cast<double>(count);
  const int nyquist = static_cast<int>(count / 2);

  HarmonicSpectrum spectrum;
  spectrum.entries.reserve(static_cast<std::size_t>(nyquist) + 1);
  for (int n = 0; n <= nyquist; ++n) {
    double c = 0.0;
    double s = 0.0;
    for (const auto& p : profile.points) {
      const double arg = n * p.encoder_angle_deg * kDegToRad;
      c += p.error_arcmin * std::cos(arg);
      s += p.error_arcmin * std::sin(arg);
    }
    double amplitude;
    if (n == 0) {
      amplitude = std::abs(c) / n_samples;
    } else if (2 * n == static_cast<int>(count)) {
      // The Nyquist term has a single degree of freedom on an even grid.
      amplitude = std::hypot(c, s) / n_samples;
    } else {
      amplitude = 2.0 * std::hypot(c, s) / n_samples;
    }
    spectrum.entries.push_back({n, amplitude});
  }
  std::stable_sort(spectrum.entries.begin(), spectrum.entries.end(), by_amplitude);
  return spectrum;
}

std::vector<int> select_top(const HarmonicSpectrum& spectrum, std::size_t count) {
  if (count > spectrum.entries.size()) {
    throw Error(ErrorCode::InvalidArgument, "requested more harmonics than the spectrum holds");
  }
  auto entries = spectrum.entries;
  std::stable_sort(entries.begin(), entries.end(), by_amplitude);
  std::vector<int> orders;
  orders.reserve(count);
  for (std::size_t i = 0; i < count; ++i) orders.push_back(entries[i].n);
  return orders;
}

FourierModel fit_fourier(const ErrorProfile& profile, std::span<const int> orders) {
  std::set<int> seen;
  std::vector<int> positive;
  for (int n : orders) {
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "harmonic orders must be >= 0");
    if (!seen.insert(n).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate harmonic order " + std::to_string(n));
    }
    if (n > 0) positive.push_back(n);
  }
  const auto n_coef = static_cast<Eigen::Index>(1 + 2 * positive.size());
  const auto n_rows = static_cast<Eigen::Index>(profile.size());
  if (n_rows == 0) throw Error(ErrorCode::EmptyProfile, "cannot fit an empty profile");
  if (n_coef > n_rows) {
    throw Error(ErrorCode::UnderdeterminedFit, std::to_string(n_coef) + " coefficients but only " +
                                                   std::to_string(n_rows) + " samples");
  }

  Eigen::MatrixXd design(n_rows, n_coef);
  Eigen::VectorXd observed(n_rows);
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    const auto& p = profile.points[static_cast<std::size_t>(r)];
    const double theta = wrap_360(p.encoder_angle_deg) * kDegToRad;
    design(r, 0) = 1.0;
    for (std::size_t t = 0; t < positive.size(); ++t) {
      const auto col = static_cast<Eigen::Index>(1 + 2 * t);
      design(r, col) = std::cos(positive[t] * theta);
      design(r, col + 1) = std::sin(positive[t] * theta);
    }
    observed[r] = p.error_arcmin;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(kRankThreshold);
  if (qr.rank() < n_coef) {
    throw Error(ErrorCode::RankDeficientDesign,
                "design matrix has rank " + std::to_string(qr.rank()) + " < " + std::to_string(n_coef));
  }
  const Eigen::VectorXd coef = qr.solve(observed);

  FourierModel model;
  model.a0 = coef[0];
  for (std::size_t t = 0; t < positive.size(); ++t) {
    const auto col = static_cast<Eigen::Index>(1 + 2 * t);
    model.terms.push_back({positive[t], coef[col], coef[col + 1]});
  }
  return model;
}

double eval_fourier(const FourierModel& model, double theta_deg) noexcept {
  const double theta = wrap_360(theta_deg) * kDegToRad;
  double e = model.a0;
  for (const auto& t : model.terms) e += t.a * std::cos(t.n * theta) + t.b * std::sin(t.n * theta);
  return e;
}

}  // namespace rescomp
