#pragma once

// JSON conversions shared by the model files, experiment reports and spec files.

#include <json.hpp>

#include "rescomp/caldata.hpp"
#include "rescomp/fourier.hpp"
#include "rescomp/optim.hpp"
#include "rescomp/prune.hpp"
#include "rescomp/simgen.hpp"

namespace rescomp {

nlohmann::json to_json(const ProfileStats& s);
nlohmann::json to_json(const SingularSpectrum& s);
nlohmann::json to_json(const PruneReport& r);
nlohmann::json to_json(const HarmonicSpectrum& s);
nlohmann::json to_json(const HarmonicSpec& spec);

/// Reads `terms: [{n, amp_arcmin, phase_rad}]`, `noise_sigma_arcmin`, `seed`.
HarmonicSpec harmonic_spec_from_json(const nlohmann::json& j);
HarmonicSpec load_harmonic_spec(const std::filesystem::path& path);

}  // namespace rescomp
