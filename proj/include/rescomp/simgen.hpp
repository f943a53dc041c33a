#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rescomp/caldata.hpp"

namespace rescomp {

/// 16-bit angle word: 360/65536 degrees (about 0.33 arc-min).
inline constexpr double kLsbDeg = 360.0 / 65536.0;

struct HarmonicTerm {
  int n = 0;
  double amp_arcmin = 0.0;
  double phase_rad = 0.0;
};

/// Systematic error model e(θ) = Σ amp·cos(nθ + phase), plus gaussian scatter.
struct HarmonicSpec {
  std::vector<HarmonicTerm> terms;
  double noise_sigma_arcmin = 0.1;
  std::uint64_t seed = 42;
};

void validate(const HarmonicSpec& spec);

/// Closed-form noiseless error at a table angle, arc-minutes.
double harmonic_error_arcmin(const HarmonicSpec& spec, double theta_deg);

/// Round-half-away-from-zero to the 16-bit grid, wrapped into [0, 360).
double quantize16(double angle_deg) noexcept;

struct SynthesisOptions {
  double grid_step_deg = 2.0;
  double grid_offset_deg = 0.0;
  bool quantize = true;
  std::string encoder_id = "synthetic";
  std::string epoch;
};

CalibrationSet synthesize(const HarmonicSpec& spec, const SynthesisOptions& opts = {});

/// Synthetic stand-ins for the four calibrated encoders, scaled so the
/// noiseless 1-degree-grid profile has MAE 1.33', 0.55', 1.09' and 1.78'.
/// `index` is 0..3.
HarmonicSpec reference_archetype(int index);

/// Seed-42 reference profile used across tests; same as archetype 0.
HarmonicSpec reference_spec();

}  // namespace rescomp
