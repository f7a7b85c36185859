#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace nlap;

namespace {
const ModelSpec kDelta = ModelSpec::planted_submatrix();

// Families with an interval at the top of the range, where the threshold search is well posed.
SigmaSpec random_theory_sigma(RandomStream& rs) {
  for (;;) {
    SigmaSpec s = fixtures::random_sigma(rs);
    if (s.family_name() != "constant" && s.family_name() != "tabulated") return s;
  }
}
}  // namespace

TEST(Properties, ThresholdIsShiftInvariant) {
  RandomStream rs(101);
  for (int rep = 0; rep < 6; ++rep) {
    const SigmaSpec s = random_theory_sigma(rs);
    const double c = -2.0 + 4.0 * rs.uniform();
    const ThresholdSolver a(s, kDelta), b(s.shifted(c), kDelta);
    const double bs = a.beta_star();
    EXPECT_NEAR(b.beta_star(), bs, 1e-8) << s.to_json().dump();
    EXPECT_NEAR(b.bulk_edge(), a.bulk_edge() + c, 1e-9);
    EXPECT_NEAR(b.theta(bs + 0.5), a.theta(bs + 0.5) + c, 1e-9);
    EXPECT_NEAR(b.predict(bs + 0.5).lambda1_predicted, a.predict(bs + 0.5).lambda1_predicted + c, 1e-9);
  }
}

TEST(Properties, ThetaIsMonotoneInBeta) {
  RandomStream rs(102);
  for (int rep = 0; rep < 6; ++rep) {
    const SigmaSpec s = random_theory_sigma(rs);
    const ThresholdSolver solver(s, rep % 2 == 0 ? kDelta : ModelSpec::half_normal());
    double prev = solver.edge_plus();
    for (double beta = 0.1; beta < 3.0; beta += 0.1) {
      const double th = solver.theta(beta);
      EXPECT_GE(th, prev - 1e-12) << s.to_json().dump() << " beta " << beta;
      EXPECT_GE(th, solver.edge_plus());
      prev = th;
    }
  }
}

TEST(Properties, OutlierPredicateIsAThreshold) {
  RandomStream rs(103);
  for (int rep = 0; rep < 6; ++rep) {
    const SigmaSpec s = random_theory_sigma(rs);
    const ThresholdSolver solver(s, kDelta);
    const double bs = solver.beta_star();
    EXPECT_GT(bs, 0.0);
    for (double f : {0.5, 0.9, 0.999}) EXPECT_FALSE(solver.has_outlier(f * bs));
    for (double f : {1.001, 1.1, 2.0}) EXPECT_TRUE(solver.has_outlier(f * bs));
  }
}

TEST(Properties, PredictionIsContinuousAtThreshold) {
  RandomStream rs(104);
  for (int rep = 0; rep < 6; ++rep) {
    const SigmaSpec s = random_theory_sigma(rs);
    const ThresholdSolver solver(s, kDelta);
    const double bs = solver.beta_star();
    const TheoryResult above = solver.predict(bs * (1.0 + 1e-6));
    EXPECT_TRUE(above.has_outlier);
    EXPECT_NEAR(above.lambda1_predicted, above.bulk_edge_plus, 1e-3) << s.to_json().dump();
  }
}

TEST(Properties, BulkEdgeIsTheMinimumOfH) {
  RandomStream rs(105);
  for (int rep = 0; rep < 8; ++rep) {
    const SigmaSpec s = random_theory_sigma(rs);
    const ThresholdSolver solver(s, kDelta);
    const double edge = solver.bulk_edge();
    EXPECT_GT(edge, solver.edge_plus());
    EXPECT_LE(edge, solver.edge_plus() + 2.0 + 1e-9);
    for (double du = 0.01; du < 5.0; du *= 1.5) EXPECT_GE(solver.h(solver.edge_plus() + du), edge - 1e-10);
    for (double beta : {0.5, 1.0, 2.0, 3.0}) EXPECT_GE(solver.predict(beta).lambda1_predicted, edge - 1e-10);
  }
}

TEST(Properties, DensityVanishesAboveEdge) {
  RandomStream rs(106);
  for (int rep = 0; rep < 4; ++rep) {
    const SigmaSpec s = random_theory_sigma(rs);
    const double edge = free_conv_edge(s);
    const DensityResult r = free_conv_density(s, {edge - 0.5, edge + 0.3, edge + 1.0});
    ASSERT_TRUE(r.all_converged());
    for (double res : r.residual) EXPECT_LE(res, 1e-8);
    EXPECT_GT(r.density[0], 0.01);
    EXPECT_LT(r.density[1], 2e-3);
    EXPECT_LT(r.density[2], 1e-3);
  }
}

TEST(Properties, CompressedSpectrumShiftInvariance) {
  RandomStream rs(107);
  for (int rep = 0; rep < 5; ++rep) {
    const SigmaSpec s = fixtures::random_sigma(rs);
    const Instance inst = sample_observation(ModelSpec::planted_submatrix(1.2), 80, static_cast<std::uint64_t>(rep));
    const double c = rs.normal();
    const double a = laplacian_top(inst.y_hat, s, true).lambda1;
    const double b = laplacian_top(inst.y_hat, s.shifted(c), true).lambda1;
    EXPECT_NEAR(b, a + c, 1e-9);
  }
}

TEST(Properties, EmpiricalOutlierApproachesPrediction) {
  const SigmaSpec s = fixtures::best_tanh_submatrix();
  const double beta = 1.5;
  const double predicted = predicted_lambda1(s, kDelta, beta).lambda1_predicted;
  auto mean_gap = [&](std::size_t n) {
    double sum = 0.0;
    const int trials = 6;
    for (int t = 0; t < trials; ++t) {
      const Instance inst = sample_observation(kDelta.with_beta(beta), n, trial_seed(77, static_cast<std::size_t>(t)));
      sum += laplacian_top(inst.y_hat, s, true).lambda1;
    }
    return std::abs(sum / trials - predicted);
  };
  const double small = mean_gap(200), large = mean_gap(1600);
  EXPECT_LT(large, small);
  EXPECT_LT(large, 0.1);
}
