#include "rescomp/json_io.hpp"

#include <fstream>

#include "rescomp/error.hpp"

namespace rescomp {

using nlohmann::json;

json to_json(const ProfileStats& s) {
  return {{"mae_arcmin", s.mae_arcmin}, {"rms_arcmin", s.rms_arcmin}, {"min_arcmin", s.min_arcmin},
          {"max_arcmin", s.max_arcmin}, {"n_samples", s.n_samples}};
}

json to_json(const SingularSpectrum& s) { return s.values; }

json to_json(const PruneReport& r) {
  return {{"initial_hidden", r.initial_hidden},
          {"pruned_hidden", r.pruned_hidden},
          {"basis", r.basis == PruneBasis::PreActivation ? "pre_activation" : "post_activation"},
          {"rel_tol", r.rel_tol},
          {"initial_mse", r.initial_mse},
          {"pruned_mse", r.pruned_mse},
          {"initial_spectrum", to_json(r.initial_spectrum)},
          {"pruned_spectrum", to_json(r.pruned_spectrum)}};
}

json to_json(const HarmonicSpectrum& s) {
  json out = json::array();
  for (const auto& e : s.entries) out.push_back({{"order", e.n}, {"amplitude_arcmin", e.amplitude_arcmin}});
  return out;
}

json to_json(const HarmonicSpec& spec) {
  json terms = json::array();
  for (const auto& t : spec.terms) {
    terms.push_back({{"n", t.n}, {"amp_arcmin", t.amp_arcmin}, {"phase_rad", t.phase_rad}});
  }
  return {{"terms", terms}, {"noise_sigma_arcmin", spec.noise_sigma_arcmin}, {"seed", spec.seed}};
}

HarmonicSpec harmonic_spec_from_json(const json& j) {
  HarmonicSpec spec;
  try {
    if (!j.is_object() || !j.contains("terms") || !j.at("terms").is_array()) {
      throw Error(ErrorCode::InvalidArgument, "spec needs a 'terms' array");
    }
    for (const auto& t : j.at("terms")) {
      spec.terms.push_back({t.at("n").get<int>(), t.at("amp_arcmin").get<double>(),
                            t.value("phase_rad", 0.0)});
    }
    spec.noise_sigma_arcmin = j.value("noise_sigma_arcmin", spec.noise_sigma_arcmin);
    spec.seed = j.value("seed", spec.seed);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad harmonic spec: ") + e.what());
  }
  validate(spec);
  return spec;
}

HarmonicSpec load_harmonic_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  const json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw Error(ErrorCode::CorruptFile, path.string() + " is not valid JSON");
  return harmonic_spec_from_json(j);
}

}  // namespace rescomp
