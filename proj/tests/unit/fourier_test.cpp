#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "rescomp/fourier.hpp"
#include "rescomp/pipeline.hpp"
#include "support.hpp"

using namespace rescomp;

namespace {

ErrorProfile sampled(const std::function<double(double)>& f, double step = 2.0) {
  ErrorProfile p;
  for (double t = 0.0; t < 360.0; t += step) p.points.push_back({t, f(t)});
  return p;
}

double rad(double deg) { return deg * M_PI / 180.0; }

double amplitude_of(const HarmonicSpectrum& s, int n) {
  for (const auto& e : s.entries)
    if (e.n == n) return e.amplitude_arcmin;
  ADD_FAILURE() << "order " << n << " missing";
  return 0.0;
}

double sum_sq_residual(const FourierModel& m, const ErrorProfile& p) {
  double s = 0.0;
  for (const auto& pt : p.points) s += std::pow(eval_fourier(m, pt.encoder_angle_deg) - pt.error_arcmin, 2);
  return s;
}

const FourierTerm* term(const FourierModel& m, int n) {
  for (const auto& t : m.terms)
    if (t.n == n) return &t;
  return nullptr;
}

}  // namespace

TEST(Spectrum, PureCosine) {
  const auto s = harmonic_spectrum(sampled([](double t) { return 3.0 * std::cos(2.0 * rad(t)); }));
  EXPECT_EQ(s.entries.size(), 91u);
  EXPECT_EQ(s.entries.front().n, 2);
  EXPECT_NEAR(s.entries.front().amplitude_arcmin, 3.0, 1e-12);
  for (std::size_t i = 1; i < s.entries.size(); ++i) EXPECT_LT(s.entries[i].amplitude_arcmin, 1e-10);
}

TEST(Spectrum, ConstantIsDcOnly) {
  const auto s = harmonic_spectrum(sampled([](double) { return 1.0; }));
  EXPECT_EQ(s.entries.front().n, 0);
  EXPECT_NEAR(s.entries.front().amplitude_arcmin, 1.0, 1e-12);
  EXPECT_LT(s.entries[1].amplitude_arcmin, 1e-10);
}

TEST(Spectrum, ReferenceProfileTopOrdersAreGeneratorOrders) {
  const auto cal = synthesize(reference_spec(), {.grid_step_deg = 2.0});
  auto top = select_top(harmonic_spectrum(error_profile(cal)), 4);
  std::sort(top.begin(), top.end());
  EXPECT_EQ(top, (std::vector<int>{0, 1, 2, 16}));
}

TEST(Spectrum, Parseval) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  ErrorProfile p;
  for (int k = 0; k < 180; ++k) p.points.push_back({2.0 * k, n(rng)});
  double mean_sq = 0.0;
  for (const auto& pt : p.points) mean_sq += pt.error_arcmin * pt.error_arcmin;
  mean_sq /= 180.0;

  double energy = 0.0;
  for (const auto& e : harmonic_spectrum(p).entries) {
    const double a2 = e.amplitude_arcmin * e.amplitude_arcmin;
    energy += (e.n == 0 || e.n == 90) ? a2 : a2 / 2.0;
  }
  EXPECT_NEAR(energy, mean_sq, 1e-8 * mean_sq);
}

TEST(Spectrum, RejectsNonUniformGrid) {
  ErrorProfile p = sampled([](double) { return 0.0; });
  p.points[10].encoder_angle_deg += 0.5;
  EXPECT_RESCOMP_ERROR(NonUniformGrid, harmonic_spectrum(p));
  ErrorProfile half;
  for (double t = 0.0; t < 180.0; t += 2.0) half.points.push_back({t, 0.0});
  EXPECT_RESCOMP_ERROR(NonUniformGrid, harmonic_spectrum(half));
}

TEST(SelectTop, CountAndTieBreak) {
  const HarmonicSpectrum s{{{7, 2.0}, {4, 2.0}, {1, 0.5}}};
  EXPECT_TRUE(select_top(s, 0).empty());
  EXPECT_EQ(select_top(s, 2), (std::vector<int>{4, 7}));

  const auto tied = harmonic_spectrum(
      sampled([](double t) { return 2.0 * std::cos(7.0 * rad(t)) + 2.0 * std::sin(4.0 * rad(t)); }));
  EXPECT_EQ(select_top(tied, 2), (std::vector<int>{4, 7}));
  EXPECT_RESCOMP_ERROR(InvalidArgument, select_top(s, 4));
}

TEST(FitFourier, RecoversGeneratorCoefficients) {
  const HarmonicSpec spec{{{0, 0.4132, 0.0}, {1, 1.9283, 0.7}, {2, 1.1019, 2.1}, {16, 0.6887, -1.2}}, 0.0, 1};
  const auto profile = sampled([&](double t) { return harmonic_error_arcmin(spec, t); }, 1.0);
  const std::vector<int> orders{0, 1, 2, 16};
  const auto m = fit_fourier(profile, orders);
  EXPECT_NEAR(m.a0, 0.4132, 1e-9);
  ASSERT_EQ(m.terms.size(), 3u);
  for (const auto& t : spec.terms) {
    if (t.n == 0) continue;
    const auto* f = term(m, t.n);
    ASSERT_NE(f, nullptr);
    EXPECT_NEAR(f->a, t.amp_arcmin * std::cos(t.phase_rad), 1e-9);
    EXPECT_NEAR(f->b, -t.amp_arcmin * std::sin(t.phase_rad), 1e-9);
  }
}

TEST(FitFourier, ZeroProfile) {
  const std::vector<int> orders{1, 3, 5};
  const auto m = fit_fourier(sampled([](double) { return 0.0; }), orders);
  EXPECT_EQ(m.a0, 0.0);
  for (const auto& t : m.terms) {
    EXPECT_EQ(t.a, 0.0);
    EXPECT_EQ(t.b, 0.0);
  }
}

TEST(FitFourier, LeastSquaresOptimal) {
  const auto cal = synthesize(reference_spec(), {.grid_step_deg = 2.0});
  const auto profile = error_profile(cal);
  const auto orders = select_top(harmonic_spectrum(profile), 10);
  const auto m = fit_fourier(profile, orders);
  const double best = sum_sq_residual(m, profile);
  for (std::size_t i = 0; i <= 2 * m.terms.size(); ++i) {
    for (double d : {-1e-3, 1e-3}) {
      FourierModel p = m;
      if (i == 0) p.a0 += d;
      else if (i % 2) p.terms[(i - 1) / 2].a += d;
      else p.terms[(i - 1) / 2].b += d;
      EXPECT_GE(sum_sq_residual(p, profile), best);
    }
  }
}

TEST(FitFourier, FitEvaluateRoundTrip) {
  const FourierModel m{0.25, {{1, 1.5, -0.5}, {3, 0.0, 0.75}, {16, -0.4, 0.2}}};
  const auto profile = sampled([&](double t) { return eval_fourier(m, t); });
  const std::vector<int> orders{1, 3, 16};
  const auto back = fit_fourier(profile, orders);
  EXPECT_NEAR(back.a0, m.a0, 1e-9);
  for (const auto& t : m.terms) {
    const auto* f = term(back, t.n);
    ASSERT_NE(f, nullptr);
    EXPECT_NEAR(f->a, t.a, 1e-9);
    EXPECT_NEAR(f->b, t.b, 1e-9);
  }
}

TEST(FitFourier, HeldOutReferenceMae) {
  const auto [train, test] = partition_even_odd(synthesize(reference_spec(), {.grid_step_deg = 1.0}));
  const auto profile = error_profile(train);
  const auto m = fit_fourier(profile, select_top(harmonic_spectrum(profile), 10));
  EXPECT_LE(evaluate(CompensationModel::fourier(m), test).post_stats.mae_arcmin, 0.25);
}

TEST(FitFourier, Errors) {
  ErrorProfile three;
  for (double t : {0.0, 120.0, 240.0}) three.points.push_back({t, 1.0});
  const std::vector<int> two{1, 2};
  EXPECT_RESCOMP_ERROR(UnderdeterminedFit, fit_fourier(three, two));

  ErrorProfile four;
  for (double t : {0.0, 90.0, 180.0, 270.0}) four.points.push_back({t, 1.0});
  const std::vector<int> alias{4};
  EXPECT_RESCOMP_ERROR(RankDeficientDesign, fit_fourier(four, alias));

  const std::vector<int> dup{1, 1};
  const std::vector<int> neg{-1};
  EXPECT_RESCOMP_ERROR(InvalidArgument, fit_fourier(sampled([](double) { return 0.0; }), dup));
  EXPECT_RESCOMP_ERROR(InvalidArgument, fit_fourier(sampled([](double) { return 0.0; }), neg));
}

TEST(EvalFourier, Examples) {
  const FourierModel dc{1.0, {}};
  for (double t : {0.0, 33.0, 359.0}) EXPECT_EQ(eval_fourier(dc, t), 1.0);
  const FourierModel c1{0.0, {{1, 2.0, 0.0}}};
  EXPECT_NEAR(eval_fourier(c1, 90.0), 0.0, 1e-15);
  EXPECT_NEAR(eval_fourier(c1, 360.0), eval_fourier(c1, 0.0), 1e-15);
}
