#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rescomp/caldata.hpp"

namespace rescomp {

struct HarmonicAmplitude {
  int n = 0;
  double amplitude_arcmin = 0.0;
};

/// Harmonic amplitudes sorted by descending amplitude (ties: smaller order first;
/// amplitudes within 1e-12' of each other tie).
struct HarmonicSpectrum {
  std::vector<HarmonicAmplitude> entries;
};

struct FourierTerm {
  int n = 0;
  double a = 0.0;  // cos coefficient, arc-min
  double b = 0.0;  // sin coefficient, arc-min
};

/// ε(θ) = a0 + Σ aₙ cos(nθ) + bₙ sin(nθ), θ in degrees, n cycles per revolution.
struct FourierModel {
  double a0 = 0.0;
  std::vector<FourierTerm> terms;
};

/// Fraction of the nominal step a sample may sit off the uniform grid.
inline constexpr double kGridJitterFraction = 0.1;

/// Discrete projection onto cos(nθ), sin(nθ) for n = 0 .. N/2.
/// Throws NonUniformGrid when the angles are not a full-circle uniform grid.
HarmonicSpectrum harmonic_spectrum(const ErrorProfile& profile);

std::vector<int> select_top(const HarmonicSpectrum& spectrum, std::size_t count = 10);

/// Least-squares fit over the profile's angles. A DC term is always included.
FourierModel fit_fourier(const ErrorProfile& profile, std::span<const int> orders);

double eval_fourier(const FourierModel& model, double theta_deg) noexcept;

}  // namespace rescomp
