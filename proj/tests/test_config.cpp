#include <gtest/gtest.h>

#include "support.hpp"

using namespace nlap;

TEST(Config, DottedSectionsNest) {
  const Config c = parse_config_string("[model]\np = 0.2\n[model.eta]\nkind = point_mass\nc = 2\n");
  EXPECT_EQ(c.get<std::string>("model.p"), "0.2");
  EXPECT_EQ(c.get<std::string>("model.eta.kind"), "point_mass");
  EXPECT_EQ(c.get<double>("model.eta.c"), 2.0);
}

TEST(Config, FullSweep) {
  const std::string text =
      "[model]\n"
      "p = 0.1\n"
      "sparsity = independent_entries\n"
      "[model.eta]\n"
      "kind = discrete\n"
      "atoms = 1, 2\n"
      "weights = 0.5, 0.5\n"
      "[sigma]\n"
      "family = tanh\n"
      "a = 1.5\n"
      "b = 0.5\n"
      "[sweep]\n"
      "n = 300\n"
      "trials = 7\n"
      "seed = 0x10\n"
      "compressed = no\n"
      "statistics = lambda1_L, max_row\n"
      "beta_min = 0.5\n"
      "beta_max = 1.5\n"
      "beta_points = 3\n"
      "[quadrature]\n"
      "hermite_nodes = 100\n";
  const SweepConfig s = sweep_from_config(parse_config_string(text));
  EXPECT_EQ(s.n, 300u);
  EXPECT_EQ(s.trials, 7u);
  EXPECT_EQ(s.seed, 16u);
  EXPECT_FALSE(s.use_compressed);
  EXPECT_EQ(s.statistics, (std::vector<Statistic>{Statistic::Lambda1L, Statistic::MaxRow}));
  EXPECT_EQ(s.beta_grid, (std::vector<double>{0.5, 1.0, 1.5}));
  EXPECT_EQ(s.quadrature.hermite_nodes, 100);
  EXPECT_EQ(s.sigma, SigmaSpec::tanh(1.5, 0.5));
  EXPECT_EQ(s.model.sparsity, Sparsity::IndependentEntries);
  EXPECT_DOUBLE_EQ(s.model.m2(), 2.5);
}

TEST(Config, Defaults) {
  const SweepConfig s = sweep_from_config(parse_config_string(""));
  EXPECT_EQ(s.n, 500u);
  EXPECT_EQ(s.beta_grid.size(), kDefaultBetaPoints);
  EXPECT_EQ(s.model.scaling, SparsityScaling::BetaOverSqrtN);
  EXPECT_EQ(s.sigma, SigmaSpec::zero());
}

TEST(Config, PresetAndDescriptor) {
  const SweepConfig s = sweep_from_config(parse_config_string(
      "[model]\npreset = half_normal\np = 0.3\n[sigma]\ndescriptor = {\"family\":\"zshaped\",\"params\":{\"a\":2,\"b\":1,\"c\":0}}\n"
      "[sweep]\nbeta_grid = 0.2, 0.4\n"));
  EXPECT_DOUBLE_EQ(s.model.p, 0.3);
  EXPECT_EQ(s.sigma, SigmaSpec::zshaped(2.0, 1.0, 0.0));
  EXPECT_EQ(s.beta_grid, (std::vector<double>{0.2, 0.4}));
}

TEST(Config, Errors) {
  EXPECT_THROW(sweep_from_config(parse_config_string("[sweep]\nbogus = 1\n")), ValidationError);
  EXPECT_THROW(sweep_from_config(parse_config_string("[other]\nx = 1\n")), ValidationError);
  EXPECT_THROW(sweep_from_config(parse_config_string("[sweep]\nn = ten\n")), ValidationError);
  EXPECT_THROW(sweep_from_config(parse_config_string("[sweep]\ncompressed = maybe\n")), ValidationError);
  EXPECT_THROW(sweep_from_config(parse_config_string("[model.eta]\nweird = 1\n")), ValidationError);
  EXPECT_THROW(sweep_from_config(parse_config_string("[sigma]\nfamily = tanh\na = -1\nb = 1\n")), InvalidParameter);
  EXPECT_THROW(parse_config_string("[broken\n"), ValidationError);
  EXPECT_THROW(load_config("/nonexistent/config.ini"), IoError);
}

TEST(Config, DemoFileLoads) {
  const SweepConfig s = sweep_from_config(load_config(NLAP_DEMO_DIR "/sweep.ini"));
  EXPECT_NO_THROW(s.validate());
}
