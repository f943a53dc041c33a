// Acceptance suite: one PASS/FAIL line per headline criterion.
//
// Usage: rescomp_acceptance [path-to-rescomp-cli]
// With a CLI path, the determinism check drives `rescomp run-experiment`
// twice; without one it calls the library directly.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "gradcheck.hpp"
#include "rescomp/error.hpp"
#include "rescomp/pipeline.hpp"

namespace fs = std::filesystem;
using namespace rescomp;

namespace {

int failures = 0;

void report(bool ok, std::string_view name, const std::string& detail) {
  fmt::print("{} {:<28} {}\n", ok ? "PASS" : "FAIL", name, detail);
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Dataset reference_training_set() {
  const auto [train, test] = partition_even_odd(synthesize(reference_spec(), {.grid_step_deg = 1.0}));
  return make_dataset(train, target_map(-6.0, 6.0));
}

void gradient_check() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    const auto c = check::random_case(rng);
    if (!check::components_agree(gradient(c.net, c.data).flatten(),
                                   check::central_difference(c.net, c.data, 1e-5), 1e-6, 1e-10)) {
      ++bad;
    }
  }
  const double secs = seconds_since(t0);
  report(bad == 0 && secs < 10.0, "gradient-check", fmt::format("{} of 100 networks disagree, {:.2f} s", bad, secs));
}

void forward_oracle() {
  Network net;
  net.params = Parameters::zeros({1, 2, 1});
  net.params.w_hidden << 1.0, -1.0;
  net.params.w_output << 1.0, 1.0;
  const double out = forward(net, Eigen::VectorXd::Zero(1))[0];
  const double expected = 0.7310585786300049;
  report(std::abs(out - expected) <= 1e-12, "forward-oracle", fmt::format("g(1) = {:.16f}", out));
}

void lm_beats_backprop() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto data = reference_training_set();
  const auto start = init_network({1, 80, 1}, 42);
  TrainingConfig cfg;
  cfg.max_iterations = 10000;
  const auto lm = train_lm(start, data, cfg);
  const auto bp = train_backprop(start, data, cfg);
  const double secs = seconds_since(t0);
  report(lm.final_mse <= bp.final_mse && lm.final_mse <= 0.017 && secs < 600.0, "lm-beats-backprop",
         fmt::format("MSE lm {:.3e} ({} it) <= backprop {:.3e} ({} it), {:.0f} s", lm.final_mse,
                     lm.history.iterations_run, bp.final_mse, bp.history.iterations_run, secs));
}

struct ArchetypeRun {
  double pre_mae = 0.0;
  double ann_mae = 0.0;
  double ann_max = 0.0;
  double fourier_mae = 0.0;
};

std::vector<ArchetypeRun> end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::array<double, 4> targets{1.33, 0.55, 1.09, 1.78};
  std::vector<ArchetypeRun> runs;
  bool ok = true;
  std::string detail;
  for (int k = 0; k < 4; ++k) {
    ExperimentOptions opts;
    opts.spec = reference_archetype(k);
    opts.encoder_id = fmt::format("arch{}", k);
    const auto r = run_experiment(opts);
    const auto& pre = r.ann_eval.pre_stats;
    ArchetypeRun run{pre.mae_arcmin, r.ann_eval.post_stats.mae_arcmin, r.ann_eval.max_abs_residual_arcmin,
                     r.fourier_eval.post_stats.mae_arcmin};
    ok = ok && std::abs(run.pre_mae - targets[k]) <= 0.1 && run.ann_mae <= 0.25 && run.ann_max <= 0.65 &&
         run.pre_mae >= 4.0 * run.ann_mae;
    detail += fmt::format("{}[pre {:.2f} ann {:.3f} max {:.3f}] ", k, run.pre_mae, run.ann_mae, run.ann_max);
    runs.push_back(run);
  }
  const double secs = seconds_since(t0);
  report(ok && secs < 2400.0, "end-to-end-compensation", detail + fmt::format("{:.0f} s", secs));
  return runs;
}

void parity(const std::vector<ArchetypeRun>& runs) {
  bool ok = runs.size() == 4;
  std::string detail;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const double gap = std::abs(runs[k].ann_mae - runs[k].fourier_mae);
    ok = ok && gap <= 0.1;
    detail += fmt::format("{}[ann {:.3f} fourier {:.3f}] ", k, runs[k].ann_mae, runs[k].fourier_mae);
  }
  report(ok, "ann-fourier-parity", detail);
}

void fourier_exactness() {
  HarmonicSpec spec = reference_spec();
  spec.noise_sigma_arcmin = 0.0;
  ErrorProfile profile;
  for (int d = 0; d < 360; ++d) profile.points.push_back({double(d), harmonic_error_arcmin(spec, d)});

  const std::vector<int> orders{0, 1, 2, 16};
  const auto m = fit_fourier(profile, orders);
  double worst = 0.0;
  for (const auto& t : spec.terms) {
    if (t.n == 0) {
      worst = std::max(worst, std::abs(m.a0 - t.amp_arcmin * std::cos(t.phase_rad)));
      continue;
    }
    for (const auto& f : m.terms) {
      if (f.n != t.n) continue;
      worst = std::max(worst, std::abs(f.a - t.amp_arcmin * std::cos(t.phase_rad)));
      worst = std::max(worst, std::abs(f.b + t.amp_arcmin * std::sin(t.phase_rad)));
    }
  }
  auto top = select_top(harmonic_spectrum(profile), 4);
  std::sort(top.begin(), top.end());
  report(worst <= 1e-9 && m.terms.size() == 3 && top == orders, "fourier-exactness",
         fmt::format("max coefficient error {:.1e}', top orders {}", worst, fmt::join(top, " ")));
}

void svd_pruning(double unpruned_mae) {
  std::mt19937_64 rng(60);
  std::normal_distribution<double> n(0.0, 1.0);
  ActivationMatrix x{Eigen::MatrixXd(180, 80)};
  for (auto& v : x.values.leftCols(60).reshaped()) v = n(rng);
  for (int c = 0; c < 20; ++c) x.values.col(60 + c) = x.values.col(c);
  const auto rank = effective_rank(singular_values(x));
  report(rank <= 60, "svd-pruning-duplicates", fmt::format("rank {} of 180x80 with 20 duplicated columns", rank));

  ExperimentOptions opts;
  opts.spec = reference_spec();
  opts.prune = true;
  const auto r = run_experiment(opts);
  const auto& pr = *r.prune_report;
  const double mae = r.ann_eval.post_stats.mae_arcmin;
  report(pr.pruned_hidden < 80 && std::abs(mae - unpruned_mae) <= 0.05, "svd-pruning-reference",
         fmt::format("J 80 -> {}, held-out MAE {:.3f}' vs unpruned {:.3f}'", pr.pruned_hidden, mae, unpruned_mae));
}

void persistence() {
  TrainingConfig cfg;
  cfg.max_iterations = 300;
  const auto trained = train_lm(init_network({1, 80, 1}, 42), reference_training_set(), cfg);
  const auto model = CompensationModel::ann(trained.network, "ref");
  std::ostringstream out;
  write_model(out, model);
  std::istringstream in(out.str());
  const auto back = read_model(in);
  const bool exact = std::get<Network>(back.payload).params.flatten() == trained.network.params.flatten();

  auto rejected_as = [](const std::string& text, ErrorCode code) {
    std::istringstream s(text);
    try {
      read_model(s);
    } catch (const Error& e) {
      return e.code() == code;
    }
    return false;
  };
  std::string v999 = out.str();
  v999.replace(v999.find("\"format_version\": 1"), 19, "\"format_version\": 999");
  const bool truncated = rejected_as(out.str().substr(0, out.str().size() / 3), ErrorCode::CorruptFile);
  const bool version = rejected_as(v999, ErrorCode::UnsupportedVersion);
  report(exact && truncated && version, "persistence",
         fmt::format("241 params bit-exact: {}, truncated -> CorruptFile: {}, v999 -> UnsupportedVersion: {}",
                     exact, truncated, version));
}

void determinism(const char* cli) {
  const fs::path root = fs::temp_directory_path() / "rescomp_acceptance_determinism";
  fs::remove_all(root);
  const fs::path a = root / "a", b = root / "b";
  if (cli) {
    for (const auto& dir : {a, b}) {
      const auto cmd = fmt::format("\"{}\" run-experiment --archetype 2 --max-iter 800 --compare --out-dir \"{}\" > /dev/null",
                                   cli, dir.string());
      if (std::system(cmd.c_str()) != 0) {
        report(false, "determinism", "run-experiment exited nonzero");
        return;
      }
    }
  } else {
    ExperimentOptions opts;
    opts.spec = reference_archetype(2);
    opts.training.max_iterations = 800;
    opts.compare_optimizers = true;
    write_experiment(a, run_experiment(opts));
    write_experiment(b, run_experiment(opts));
  }
  std::size_t files = 0, same = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    ++files;
    if (slurp(entry.path()) == slurp(b / entry.path().filename())) ++same;
  }
  report(files > 0 && same == files, "determinism",
         fmt::format("{}/{} report files byte-identical ({})", same, files, cli ? "cli" : "library"));
  fs::remove_all(root);
}

}  // namespace

int main(int argc, char** argv) {
  const char* cli = argc > 1 ? argv[1] : nullptr;
  try {
    gradient_check();
    forward_oracle();
    fourier_exactness();
    persistence();
    determinism(cli);
    lm_beats_backprop();
    const auto runs = end_to_end();
    parity(runs);
    svd_pruning(runs.front().ann_mae);
  } catch (const std::exception& e) {
    report(false, "unexpected-error", e.what());
  }
  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
