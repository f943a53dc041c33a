#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "rescomp/pipeline.hpp"
#include "rescomp/prune.hpp"
#include "support.hpp"

using namespace rescomp;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (auto& v : m.reshaped()) v = n(rng);
  return m;
}

std::size_t rank_of(const MatrixXd& m, double tol = 1e-3) {
  return effective_rank(singular_values({m}), tol);
}

Dataset reference_training_set() {
  const auto [train, test] = partition_even_odd(synthesize(reference_spec(), {.grid_step_deg = 1.0}));
  return make_dataset(train, target_map(-6.0, 6.0));
}

}  // namespace

TEST(ActivationMatrix, ZeroWeightsRepeatThresholds) {
  Network net;
  net.params = Parameters::zeros({1, 4, 1});
  net.params.theta_hidden << 0.1, -0.2, 0.3, 0.0;
  Dataset data{MatrixXd::Random(6, 1).cwiseAbs(), MatrixXd::Constant(6, 1, 0.5)};
  const auto x = activation_matrix(net, data).values;
  ASSERT_EQ(x.rows(), 6);
  for (Eigen::Index p = 0; p < x.rows(); ++p) EXPECT_EQ(x.row(p).transpose(), net.params.theta_hidden);
}

TEST(ActivationMatrix, HandComputedSinglePattern) {
  Network net;
  net.params = Parameters::zeros({1, 2, 1});
  net.params.w_hidden << 1.0, -1.0;
  net.params.theta_hidden << 0.5, 0.25;
  Dataset data{MatrixXd::Constant(1, 1, 0.25), MatrixXd::Constant(1, 1, 0.5)};
  const auto x = activation_matrix(net, data).values;
  EXPECT_DOUBLE_EQ(x(0, 0), 0.75);
  EXPECT_DOUBLE_EQ(x(0, 1), 0.0);
  const auto h = hidden_output_matrix(net, data).values;
  EXPECT_DOUBLE_EQ(h(0, 1), 0.5);
}

TEST(ActivationMatrix, TrainingGridShape) {
  const auto x = activation_matrix(init_network({1, 80, 1}, 42), reference_training_set()).values;
  EXPECT_EQ(x.rows(), 180);
  EXPECT_EQ(x.cols(), 80);
  EXPECT_RESCOMP_ERROR(ShapeMismatch,
                       activation_matrix(init_network({2, 3, 1}, 1), reference_training_set()));
}

TEST(SingularValues, Examples) {
  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 3.0;
  const auto s = singular_values({d}).values;
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NEAR(s[0], 3.0, 1e-14);
  EXPECT_NEAR(s[1], 2.0, 1e-14);

  VectorXd u(3), v(4);
  u << 2.0, 0.0, 0.0;
  v << 0.0, 3.0, 4.0, 0.0;
  const auto r1 = singular_values({u * v.transpose()}).values;
  EXPECT_NEAR(r1[0], 10.0, 1e-12);
  for (std::size_t i = 1; i < r1.size(); ++i) EXPECT_NEAR(r1[i], 0.0, 1e-12);
}

TEST(SingularValues, FrobeniusIdentityAndOrdering) {
  const MatrixXd m = random_matrix(180, 80, 1);
  const auto s = singular_values({m}).values;
  const double sum_sq = std::inner_product(s.begin(), s.end(), s.begin(), 0.0);
  EXPECT_NEAR(sum_sq, m.squaredNorm(), 1e-10 * m.squaredNorm());
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_GE(s[i - 1], s[i]);
  EXPECT_GE(s.back(), 0.0);
}

TEST(EffectiveRank, Examples) {
  EXPECT_EQ(effective_rank({{10.0, 0.0}}, 1e-3), 1u);
  EXPECT_EQ(effective_rank({{0.0, 0.0, 0.0}}, 1e-3), 0u);
  EXPECT_RESCOMP_ERROR(InvalidArgument, effective_rank({{1.0}}, 0.0));
  EXPECT_RESCOMP_ERROR(InvalidArgument, effective_rank({{1.0}}, 1.0));
}

TEST(EffectiveRank, DuplicatedColumnsAddNoRank) {
  MatrixXd m(180, 80);
  m.leftCols(60) = random_matrix(180, 60, 2);
  for (int c = 0; c < 20; ++c) m.col(60 + c) = m.col(3 * c);
  EXPECT_LE(rank_of(m), 60u);
}

TEST(EffectiveRank, MonotoneUnderDuplication) {
  for (std::uint64_t seed = 10; seed < 30; ++seed) {
    MatrixXd m = random_matrix(50, 8, seed) * random_matrix(8, 20, seed + 100);
    const std::size_t before = rank_of(m);
    MatrixXd grown(m.rows(), m.cols() + 1);
    grown << m, m.col(static_cast<Eigen::Index>(seed % 20));
    EXPECT_LE(rank_of(grown), before) << "seed " << seed;
  }
}

TEST(EffectiveRank, ScaleInvariant) {
  const MatrixXd m = random_matrix(40, 6, 3) * random_matrix(6, 15, 4);
  const std::size_t base = rank_of(m);
  for (double c : {1e-3, -7.0, 1e5}) EXPECT_EQ(rank_of(c * m), base) << c;
}

TEST(PruneAndRetrain, DegenerateWidthRuns) {
  const HarmonicSpec one{{{1, 2.0, 0.3}}, 0.05, 9};
  const auto [train, test] = partition_even_odd(synthesize(one, {.grid_step_deg = 1.0}));
  TrainingConfig cfg;
  cfg.max_iterations = 200;
  cfg.stall_window = 50;
  const auto r = prune_and_retrain(make_dataset(train, target_map(-6.0, 6.0)), 2,
                                   *make_optimizer(OptimizerKind::LevenbergMarquardt), cfg);
  EXPECT_GE(r.report.pruned_hidden, 1u);
  EXPECT_LE(r.report.pruned_hidden, 2u);
  EXPECT_EQ(r.report.initial_spectrum.values.size(), 2u);
  EXPECT_EQ(r.pruned.shape().hidden, r.report.pruned_hidden);
  EXPECT_TRUE(r.pruned.params.all_finite());
}

TEST(PruneAndRetrain, RejectsSingleNode) {
  TrainingConfig cfg;
  EXPECT_RESCOMP_ERROR(InvalidArgument,
                       prune_and_retrain(reference_training_set(), 1,
                                         *make_optimizer(OptimizerKind::LevenbergMarquardt), cfg));
}
