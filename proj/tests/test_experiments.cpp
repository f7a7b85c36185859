#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace nlap;

namespace {
SweepConfig small_sweep() {
  SweepConfig c;
  c.sigma = fixtures::best_tanh_submatrix();
  c.n = 120;
  c.trials = 4;
  c.beta_grid = {0.0, 0.8, 1.6, 2.4};
  c.seed = 5;
  return c;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}
}  // namespace

TEST(Sweep, ColumnsAndShape) {
  const SweepResult r = run_phase_sweep(small_sweep());
  EXPECT_EQ(r.columns, (std::vector<std::string>{"lambda1_L", "overlap", "overlap2"}));
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_TRUE(std::isnan(r.mean(0, "overlap")));
  EXPECT_NEAR(r.mean(2, "overlap2"), [&] {
    double s = 0.0;
    for (const auto& t : r.raw[2]) s += t[2];
    return s / 4.0;
  }(), 1e-15);
  EXPECT_NEAR(r.theory_beta_star, 0.755007389, 1e-6);
  const Table t = r.to_table();
  EXPECT_EQ(t.columns.front(), "beta");
  EXPECT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.at(3, "trials"), 4.0);
  EXPECT_THROW(r.mean(0, "max_row"), InvalidParameter);
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
  SweepConfig c = small_sweep();
  c.threads = 1;
  const SweepResult a = run_phase_sweep(c);
  c.threads = 4;
  const SweepResult b = run_phase_sweep(c);
  for (std::size_t ib = 0; ib < a.raw.size(); ++ib)
    for (std::size_t t = 0; t < a.raw[ib].size(); ++t)
      for (std::size_t c = 0; c < a.raw[ib][t].size(); ++c) {
        const double x = a.raw[ib][t][c], y = b.raw[ib][t][c];
        EXPECT_TRUE(x == y || (std::isnan(x) && std::isnan(y)));
      }
  std::ostringstream sa, sb;
  write_csv(sa, a.to_table());
  write_csv(sb, b.to_table());
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Sweep, PairedNoiseMakesLambdaMonotone) {
  SweepConfig c = small_sweep();
  c.statistics = {Statistic::Lambda1L};
  c.theory_overlay = false;
  const SweepResult r = run_phase_sweep(c);
  for (std::size_t t = 0; t < c.trials; ++t) {
    for (std::size_t ib = 1; ib < c.beta_grid.size(); ++ib) EXPECT_GE(r.raw[ib][t][0], r.raw[ib - 1][t][0] - 1e-9);
  }
  EXPECT_TRUE(std::isnan(r.rows[0].theory_lambda1));
}

TEST(Sweep, OverlapGrowsWithSignal) {
  SweepConfig c = small_sweep();
  c.n = 300;
  c.beta_grid = {0.4, 2.5};
  const SweepResult r = run_phase_sweep(c);
  EXPECT_LT(r.mean(0, "overlap"), r.mean(1, "overlap"));
  EXPECT_GT(r.mean(1, "overlap"), 0.7);
}

TEST(Sweep, AllStatistics) {
  SweepConfig c = small_sweep();
  c.statistics = {Statistic::Lambda1L, Statistic::Lambda1Y, Statistic::MaxRow, Statistic::Overlap};
  c.use_compressed = false;
  const SweepResult r = run_phase_sweep(c);
  EXPECT_EQ(r.columns.size(), 5u);
  for (const auto& row : r.rows) EXPECT_EQ(row.mean.size(), 5u);
}

TEST(Sweep, Validation) {
  SweepConfig c = small_sweep();
  c.beta_grid = {1.0, 0.5};
  EXPECT_THROW(run_phase_sweep(c), InvalidParameter);
  c = small_sweep();
  c.n = 1;
  EXPECT_THROW(run_phase_sweep(c), InvalidDimension);
  c = small_sweep();
  c.statistics.clear();
  EXPECT_THROW(run_phase_sweep(c), InvalidParameter);
}

TEST(Sweep, TrialFailureCarriesPosition) {
  SweepConfig c = small_sweep();
  c.model = ModelSpec::half_normal(0.001, 0.0);
  c.n = 50;
  c.beta_grid = {0.0, 1.0};
  try {
    run_phase_sweep(c);
    FAIL() << "expected TrialFailure";
  } catch (const TrialFailure& e) {
    EXPECT_EQ(e.beta(), 1.0);
  }
}

TEST(LaplacianTopTest, CompressedEigenvectorIsOrthogonalToOnes) {
  const Instance inst = sample_observation(ModelSpec::planted_submatrix(1.5), 150, 2);
  const LaplacianTop top = laplacian_top(inst.y_hat, fixtures::best_tanh_submatrix(), true);
  EXPECT_NEAR(top.v1.sum(), 0.0, 1e-10);
  EXPECT_NEAR(top.v1.norm(), 1.0, 1e-12);
  const Vector comp = full_spectrum(build_compressed(inst.y_hat, fixtures::best_tanh_submatrix()));
  EXPECT_NEAR(top.lambda1, comp(0), 1e-9);
}

TEST(Spectrum, SmallRunIsConsistent) {
  const SpectrumReport r = run_spectrum_experiment(ModelSpec::planted_submatrix(0.0), SigmaSpec::tanh(1.0, 1.0), 300, 3, 30);
  EXPECT_EQ(r.eigenvalues.size(), 299u);
  EXPECT_EQ(r.bin_edges.size(), 31u);
  double area = 0.0;
  for (std::size_t i = 0; i < r.histogram.size(); ++i) area += r.histogram[i] * (r.bin_edges[i + 1] - r.bin_edges[i]);
  EXPECT_NEAR(area, 1.0, 1e-12);
  EXPECT_TRUE(r.density_converged);
  EXPECT_LT(r.wasserstein1, 0.08);
  EXPECT_NEAR(r.lambda1, r.bulk_edge_plus, 0.25);
  EXPECT_EQ(r.histogram_table().rows.size(), 30u);
  EXPECT_THROW(run_spectrum_experiment(ModelSpec{}, SigmaSpec::zero(), 1, 1), InvalidDimension);
}

TEST(Wasserstein, PointMassAgainstUniform) {
  const std::vector<double> x = linspace(0.0, 1.0, 2001);
  const std::vector<double> cdf = cdf_from_density(x, std::vector<double>(x.size(), 1.0));
  EXPECT_NEAR(cdf.back(), 1.0, 0.0);
  EXPECT_NEAR(wasserstein1_quantiles({0.5}, x, cdf), 0.25, 1e-3);
  std::vector<double> uniform;
  for (int i = 0; i < 1000; ++i) uniform.push_back((i + 0.5) / 1000.0);
  EXPECT_LT(wasserstein1_quantiles(uniform, x, cdf), 2e-3);
  EXPECT_THROW(wasserstein1_quantiles({}, x, cdf), InvalidParameter);
  EXPECT_THROW(cdf_from_density({0.0}, {1.0}), InvalidDimension);
}

TEST(Detection, SeparatesAboveThreshold) {
  const ModelSpec m = ModelSpec::planted_submatrix(2.0);
  const SigmaSpec s = fixtures::best_tanh_submatrix();
  const double tau = calibrated_tau(s, m);
  const DetectionReport r = run_detection(m, s, 200, tau, 12, 4, Statistic::Lambda1L);
  EXPECT_EQ(r.null_stats.size(), 12u);
  EXPECT_LE(r.type1 + r.type2, 0.25);
  EXPECT_EQ(r.type1, r.type1_at(tau));
  EXPECT_EQ(r.total_error_at(-1e9), 1.0);
  EXPECT_EQ(r.total_error_at(1e9), 1.0);
}

TEST(Detection, PairedClassesShareNoise) {
  const ModelSpec m = ModelSpec::planted_submatrix(1.0);
  const DetectionReport r = run_detection(m, SigmaSpec::zero(), 80, 0.0, 5, 9, Statistic::Lambda1Y);
  for (std::size_t t = 0; t < 5; ++t) {
    EXPECT_EQ(r.null_stats[t], top_eigenpair(sample_goe(80, trial_seed(9, t))).lambda1);
  }
}

TEST(Detection, Errors) {
  EXPECT_THROW(run_detection(ModelSpec::planted_submatrix(0.0), SigmaSpec::zero(), 50, 0.0, 3, 1, Statistic::MaxRow),
               InvalidParameter);
  EXPECT_THROW(run_detection(ModelSpec::planted_submatrix(1.0), SigmaSpec::zero(), 50, 0.0, 3, 1, Statistic::Overlap),
               InvalidParameter);
  EXPECT_THROW(run_detection(ModelSpec::planted_submatrix(1.0), SigmaSpec::zero(), 50, 0.0, 0, 1, Statistic::MaxRow),
               InvalidParameter);
}

TEST(Transfer, ZeroSigmaIsOneEverywhere) {
  const TransferTable t = run_transfer_table({SigmaSpec::zero(), fixtures::best_tanh_submatrix()},
                                             {ModelSpec::planted_submatrix(), ModelSpec::half_normal()});
  ASSERT_EQ(t.beta_star.size(), 2u);
  EXPECT_NEAR(t.beta_star[0][0], 1.0, 1e-10);
  EXPECT_NEAR(t.beta_star[0][1], 1.0, 1e-10);
  EXPECT_NEAR(t.beta_star[1][0], 0.755007389, 1e-6);
  EXPECT_EQ(t.to_table().columns, (std::vector<std::string>{"sigma", "model0", "model1"}));
  EXPECT_THROW(run_transfer_table({}, {ModelSpec{}}), InvalidParameter);
}

TEST(Output, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(NAN), "nan");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
  EXPECT_EQ(parse_output_format("json"), OutputFormat::Json);
  EXPECT_THROW(parse_output_format("xml"), InvalidParameter);
}

TEST(Output, EmptyTableWritesHeaderOnly) {
  Table t;
  t.columns = {"a", "b"};
  std::ostringstream os;
  write_csv(os, t);
  EXPECT_EQ(os.str(), "a,b\n");
  std::istringstream is(os.str());
  const Table back = read_csv(is);
  EXPECT_EQ(back.columns, t.columns);
  EXPECT_TRUE(back.rows.empty());
}

TEST(Output, CsvAndJsonRoundTrip) {
  Table t;
  t.columns = {"x", "y"};
  t.rows = {{0.1, 1.0 / 3.0}, {NAN, 2e-300}};
  const auto prov = provenance_lines("sweep", nlohmann::json{{"k", 1}});
  ASSERT_EQ(prov.size(), 3u);
  EXPECT_EQ(prov[1], "rng_version 1");
  std::ostringstream os;
  write_csv(os, t, prov);
  EXPECT_EQ(os.str().substr(0, 13), "# nl-spectra ");
  std::istringstream is(os.str());
  const Table c = read_csv(is);
  EXPECT_EQ(c.rows[0], t.rows[0]);
  EXPECT_TRUE(std::isnan(c.rows[1][0]));
  EXPECT_EQ(c.rows[1][1], 2e-300);

  const Table j = table_from_json(nlohmann::json::parse(table_to_json(t, prov).dump()));
  EXPECT_EQ(j.columns, t.columns);
  EXPECT_EQ(j.rows[0], t.rows[0]);
  EXPECT_TRUE(std::isnan(j.rows[1][0]));
}

TEST(Output, EmitIsByteIdentical) {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string a = (dir / "nlap_emit_a.csv").string(), b = (dir / "nlap_emit_b.csv").string();
  SweepConfig c = small_sweep();
  c.trials = 2;
  const auto prov = provenance_lines("sweep", c.to_json());
  emit_results(run_phase_sweep(c).to_table(), a, OutputFormat::Csv, prov);
  emit_results(run_phase_sweep(c).to_table(), b, OutputFormat::Csv, prov);
  EXPECT_EQ(slurp(a), slurp(b));
  emit_results(run_phase_sweep(c).to_table(), a, OutputFormat::Json, prov);
  EXPECT_NO_THROW(nlohmann::json::parse(slurp(a)));
  std::filesystem::remove(a);
  std::filesystem::remove(b);
  EXPECT_THROW(emit_results(Table{}, "/nonexistent_dir/x.csv", OutputFormat::Csv), IoError);
}
