#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "nlap/nonlin.hpp"
#include "nlap/rng.hpp"
#include "support.hpp"

using namespace nlap;

TEST(Sigma, ZeroIsZeroEverywhere) {
  const SigmaSpec s = SigmaSpec::zero();
  for (double x : {-1e6, -1.0, 0.0, 3.5, 1e9}) EXPECT_EQ(eval_sigma(s, x), 0.0);
}

TEST(Sigma, TanhLimits) {
  const SigmaSpec s = SigmaSpec::tanh(1.0, 1.0);
  EXPECT_EQ(eval_sigma(s, 0.0), 0.0);
  EXPECT_NEAR(eval_sigma(s, 50.0), 1.0, 1e-15);
  EXPECT_NEAR(eval_sigma(s, -50.0), -1.0, 1e-15);
}

TEST(Sigma, ZShapedRampMidpoint) {
  const double a = 2.0, b = 3.0, c = -1.0;
  const SigmaSpec s = SigmaSpec::zshaped(a, b, c);
  EXPECT_DOUBLE_EQ(eval_sigma(s, c + a / 2), b / 2);
  EXPECT_EQ(eval_sigma(s, c - 10.0), 0.0);
  EXPECT_EQ(eval_sigma(s, c + a + 10.0), b);
}

TEST(Sigma, StepIsRightContinuous) {
  const SigmaSpec s = SigmaSpec::step({0.0, 1.0}, {0.0, 1.0, 3.0});
  EXPECT_EQ(eval_sigma(s, -0.1), 0.0);
  EXPECT_EQ(eval_sigma(s, 0.0), 1.0);
  EXPECT_EQ(eval_sigma(s, 0.999), 1.0);
  EXPECT_EQ(eval_sigma(s, 1.0), 3.0);
}

TEST(Sigma, TabulatedInterpolatesAndExtends) {
  const SigmaSpec s = SigmaSpec::tabulated({-1.0, 0.0, 2.0}, {-2.0, 0.0, 1.0});
  EXPECT_DOUBLE_EQ(eval_sigma(s, -0.5), -1.0);
  EXPECT_DOUBLE_EQ(eval_sigma(s, 1.0), 0.5);
  EXPECT_EQ(eval_sigma(s, -9.0), -2.0);
  EXPECT_EQ(eval_sigma(s, 9.0), 1.0);
}

TEST(Sigma, Edges) {
  EXPECT_EQ(sigma_edges(SigmaSpec::zero()).minus, 0.0);
  EXPECT_EQ(sigma_edges(SigmaSpec::zero()).plus, 0.0);
  const SigmaEdges t = sigma_edges(SigmaSpec::tanh(2.0, 0.5));
  EXPECT_EQ(t.minus, -2.0);
  EXPECT_EQ(t.plus, 2.0);
  const SigmaEdges st = sigma_edges(SigmaSpec::step({0.0, 1.0}, {0.0, 1.0, 3.0}));
  EXPECT_EQ(st.minus, 0.0);
  EXPECT_EQ(st.plus, 3.0);
  const SigmaEdges c = sigma_edges(SigmaSpec::constant(1.5).shifted(0.5));
  EXPECT_EQ(c.minus, 2.0);
  EXPECT_EQ(c.plus, 2.0);
}

TEST(Sigma, InvalidParametersRejected) {
  EXPECT_THROW(SigmaSpec::zshaped(0.0, 1.0, 0.0), InvalidParameter);
  EXPECT_THROW(SigmaSpec::zshaped(1.0, -1.0, 0.0), InvalidParameter);
  EXPECT_THROW(SigmaSpec::tanh(-1.0, 1.0), InvalidParameter);
  EXPECT_THROW(SigmaSpec::tanh(1.0, -1.0), InvalidParameter);
  EXPECT_THROW(SigmaSpec::step({1.0, 0.0}, {0.0, 1.0, 2.0}), InvalidParameter);
  EXPECT_THROW(SigmaSpec::step({0.0, 1.0}, {0.0, 2.0, 1.0}), InvalidParameter);
  EXPECT_THROW(SigmaSpec::step({0.0}, {0.0}), InvalidParameter);
}

TEST(Sigma, ValidateZero) {
  const SigmaValidation v = validate_sigma(SigmaSpec::zero(), 10.0, 1001);
  EXPECT_TRUE(v.monotone);
  EXPECT_EQ(v.bound, 0.0);
  EXPECT_EQ(v.lipschitz, 0.0);
}

TEST(Sigma, ValidateTanhLipschitzAtOrigin) {
  const SigmaValidation v = validate_sigma(SigmaSpec::tanh(1.0, 1.0), 5.0, 10001);
  EXPECT_TRUE(v.monotone);
  EXPECT_NEAR(v.lipschitz, 1.0, 1e-3);
  EXPECT_EQ(v.bound, 1.0);
  EXPECT_EQ(v.range_center, 0.0);
}

TEST(Sigma, ValidateStepFlagsInfiniteLipschitz) {
  const SigmaValidation v = validate_sigma(SigmaSpec::step({0.0}, {0.0, 1.0}), 5.0, 101);
  EXPECT_TRUE(v.monotone);
  EXPECT_FALSE(v.lipschitz_finite);
  EXPECT_TRUE(std::isinf(v.lipschitz));
}

TEST(Sigma, ValidateReportsShiftCenter) {
  const SigmaValidation v = validate_sigma(SigmaSpec::tanh(1.0, 1.0).shifted(2.5), 5.0, 101);
  EXPECT_DOUBLE_EQ(v.range_center, 2.5);
}

TEST(Sigma, ValidateTabulatedViolationNamesPair) {
  const SigmaSpec s = SigmaSpec::tabulated({0.0, 1.0, 2.0}, {0.0, 1.0, 0.5});
  try {
    validate_sigma(s, 3.0, 11);
    FAIL() << "expected a monotonicity violation";
  } catch (const MonotonicityViolation& e) {
    EXPECT_EQ(e.first(), 1u);
    EXPECT_EQ(e.second(), 2u);
    EXPECT_NE(std::string(e.what()).find("(1,2)"), std::string::npos);
  }
}

TEST(Sigma, JsonRoundTrip) {
  const SigmaSpec specs[] = {SigmaSpec::zero(),
                             SigmaSpec::constant(0.25),
                             SigmaSpec::zshaped(1.0, 2.0, -0.5),
                             SigmaSpec::tanh(1.7, 0.58).shifted(-1.0),
                             SigmaSpec::step({-1.0, 0.5}, {0.0, 0.3, 0.9}),
                             SigmaSpec::tabulated({-1.0, 1.0}, {-1.0, 1.0})};
  for (const auto& s : specs) {
    const SigmaSpec back = SigmaSpec::from_json(nlohmann::json::parse(s.to_json().dump()));
    EXPECT_EQ(back, s) << s.to_json().dump();
  }
  EXPECT_THROW(SigmaSpec::from_json(nlohmann::json{{"family", "relu"}}), InvalidParameter);
  EXPECT_THROW(SigmaSpec::from_json(nlohmann::json{{"family", "tanh"}, {"params", {{"a", 1.0}}}}), InvalidParameter);
}

// Every family is non-decreasing on a fine grid and stays inside its edges.
TEST(SigmaProperty, MonotoneAndBoundedOnGrid) {
  RandomStream rs(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const SigmaSpec s = fixtures::random_sigma(rs);
    const SigmaEdges e = s.edges();
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 10000; ++i) {
      const double x = -10.0 + 20.0 * i / 9999.0;
      const double v = s(x);
      ASSERT_GE(v, prev - 1e-9) << s.to_json().dump() << " at x = " << x;
      ASSERT_GE(v, e.minus);
      ASSERT_LE(v, e.plus);
      prev = v;
    }
  }
}

TEST(SigmaProperty, ShiftAddsConstantExactly) {
  RandomStream rs(99);
  for (int trial = 0; trial < 30; ++trial) {
    const SigmaSpec s = fixtures::random_sigma(rs);
    for (double c : {-1.0, 0.5, 3.0}) {
      const SigmaSpec t = s.shifted(c);
      for (double x : {-4.0, -0.3, 0.0, 0.7, 5.0}) ASSERT_EQ(t(x), s(x) + c);
    }
  }
}
