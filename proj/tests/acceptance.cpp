// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "support.hpp"

using namespace nlap;

namespace {

// Tolerances.
constexpr double kTolBetaStarZero = 1e-6;
constexpr double kMaxSecondsBetaStarZero = 1.0;
constexpr double kTolBbpLambda = 0.05;
constexpr double kTolBbpOverlap2 = 0.05;
constexpr double kMaxTanh = 0.765, kMaxZShaped = 0.775, kMaxStep = 0.765;
constexpr double kTargetTanh = 0.755, kTargetZShaped = 0.765, kTolTarget = 0.010;
constexpr double kTolTransfer = 0.012;
constexpr double kTolSemicircle = 2e-3;
constexpr double kTolEdgeZero = 1e-6;
constexpr double kMaxW1 = 0.05;
constexpr double kTolOutlierMean = 0.1;
constexpr double kMaxExcessBelow = 0.15;
constexpr double kTolGoldenLambda = 1e-9;
constexpr double kTolSecular = 1e-9;
constexpr double kTolShiftBeta = 1e-8, kTolShiftTheta = 1e-8;
constexpr double kMinDegreeError = 0.8;
constexpr double kMaxLaplacianError = 0.2;

constexpr std::size_t kN = 2000;
constexpr std::size_t kTrials = 20;
constexpr std::size_t kDetectionTrials = 200;
constexpr std::size_t kTauGrid = 50;
constexpr double kGoldenLambdaTanh12 = 2.799612935289331;

const ModelSpec kDelta = ModelSpec::planted_submatrix();
const ModelSpec kHalfNormal = ModelSpec::half_normal();

struct Outcome {
  bool pass = false;
  std::string detail;
};

char buf[512];

template <typename... A>
std::string fmt(const char* f, A... a) {
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FamilyOptimum optimize(FamilyKind f, const ModelSpec& m, int max_evals) {
  OptimizeConfig c;
  c.family = f;
  c.max_evals = max_evals;
  return optimize_family(m, c);
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const double a = beta_star(SigmaSpec::zero(), kDelta);
  const double b = beta_star(SigmaSpec::zero(), kHalfNormal);
  const double secs = seconds_since(t0);
  const bool ok = std::abs(a - 1.0) <= kTolBetaStarZero && std::abs(b - 1.0) <= kTolBetaStarZero &&
                  secs < kMaxSecondsBetaStarZero;
  return {ok, fmt("beta*(zero; delta1) = %.9f, beta*(zero; |N|) = %.9f, %.3f s", a, b, secs)};
}

Outcome criterion2() {
  SweepConfig c;
  c.sigma = SigmaSpec::zero();
  c.n = kN;
  c.trials = kTrials;
  c.beta_grid = {1.5, 2.0};
  c.use_compressed = false;
  c.statistics = {Statistic::Lambda1L, Statistic::Overlap};
  c.theory_overlay = false;
  const SweepResult r = run_phase_sweep(c);
  bool ok = true;
  std::string d;
  for (std::size_t i = 0; i < 2; ++i) {
    const double beta = c.beta_grid[i];
    const double lam = r.mean(i, "lambda1_L"), ov2 = r.mean(i, "overlap2");
    ok = ok && std::abs(lam - (beta + 1.0 / beta)) <= kTolBbpLambda && std::abs(ov2 - (1.0 - 1.0 / (beta * beta))) <= kTolBbpOverlap2;
    d += fmt("beta %.1f: lambda1 %.4f (%.4f), overlap2 %.4f (%.4f); ", beta, lam, beta + 1.0 / beta, ov2,
             1.0 - 1.0 / (beta * beta));
  }
  return {ok, d};
}

Outcome criterion3() {
  const FamilyOptimum t = optimize(FamilyKind::Tanh, kDelta, 2000);
  const FamilyOptimum z = optimize(FamilyKind::ZShaped, kDelta, 2000);
  const FamilyOptimum s = optimize(FamilyKind::Step, kDelta, 20000);
  const bool ok = t.beta_star <= kMaxTanh && std::abs(t.beta_star - kTargetTanh) <= kTolTarget &&
                  z.beta_star <= kMaxZShaped && std::abs(z.beta_star - kTargetZShaped) <= kTolTarget &&
                  s.beta_star <= kMaxStep;
  return {ok, fmt("tanh %.6f, zshaped %.6f, step(16) %.6f", t.beta_star, z.beta_star, s.beta_star)};
}

Outcome criterion4() {
  const SigmaSpec best_delta = optimize(FamilyKind::Tanh, kDelta, 2000).sigma;
  const SigmaSpec best_hn = optimize(FamilyKind::Tanh, kHalfNormal, 2000).sigma;
  const TransferTable t = run_transfer_table({SigmaSpec::zero(), best_delta, best_hn}, {kDelta, kHalfNormal});
  const double expected[3][2] = {{1.0, 1.0}, {0.755, 0.673}, {0.767, 0.662}};
  bool ok = true;
  std::string d;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      ok = ok && std::abs(t.beta_star[i][j] - expected[i][j]) <= kTolTransfer;
      d += fmt("%.4f%s", t.beta_star[i][j], j == 0 ? "," : (i < 2 ? "; " : ""));
    }
  }
  return {ok, "rows (zero; best delta1 tanh; best |N| tanh) = " + d};
}

Outcome criterion5() {
  const std::vector<double> grid = linspace(-1.9, 1.9, 200);
  QuadratureConfig q;
  q.inversion_epsilon = 1e-3;
  const DensityResult r = free_conv_density(SigmaSpec::zero(), grid, q);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double exact = std::sqrt(4.0 - grid[i] * grid[i]) / (2.0 * std::numbers::pi);
    worst = std::max(worst, std::abs(r.density[i] - exact));
  }
  const double edge = free_conv_edge(SigmaSpec::zero());
  const bool ok = r.all_converged() && worst <= kTolSemicircle && std::abs(edge - 2.0) <= kTolEdgeZero;
  return {ok, fmt("max density error %.2e, edge %.9f", worst, edge)};
}

Outcome criterion6() {
  const SigmaSpec s = optimize(FamilyKind::Tanh, kDelta, 2000).sigma;
  const SpectrumReport r = run_spectrum_experiment(kDelta.with_beta(0.0), s, kN, 1);
  const bool ok = r.density_converged && r.wasserstein1 <= kMaxW1;
  return {ok, fmt("W1 = %.4f", r.wasserstein1)};
}

Outcome criterion7() {
  const SigmaSpec s = optimize(FamilyKind::Tanh, kDelta, 2000).sigma;
  const QuadratureConfig fine = QuadratureConfig{}.refined(4);
  const double golden_fixed = predicted_lambda1(fixtures::best_tanh_submatrix(), kDelta, 1.2, fine).lambda1_predicted;
  const TheoryResult above = predicted_lambda1(s, kDelta, 1.2, fine);
  const TheoryResult below = predicted_lambda1(s, kDelta, 0.5, fine);

  SweepConfig c;
  c.sigma = s;
  c.n = kN;
  c.trials = kTrials;
  c.beta_grid = {0.5, 1.2};
  c.statistics = {Statistic::Lambda1L};
  c.theory_overlay = false;
  const SweepResult r = run_phase_sweep(c);
  const double mean_below = r.mean(0, "lambda1_L"), mean_above = r.mean(1, "lambda1_L");
  double max_excess = -INFINITY;
  for (const auto& t : r.raw[0]) max_excess = std::max(max_excess, t[0] - below.bulk_edge_plus);
  const bool ok = std::abs(golden_fixed - kGoldenLambdaTanh12) <= kTolGoldenLambda && !below.has_outlier &&
                  above.has_outlier && std::abs(mean_above - above.lambda1_predicted) <= kTolOutlierMean &&
                  std::abs(mean_below - below.bulk_edge_plus) <= kTolOutlierMean && max_excess <= kMaxExcessBelow;
  return {ok, fmt("beta 1.2: mean %.4f vs %.4f; beta 0.5: mean %.4f vs edge %.4f, max excess %.4f; golden %.12f",
                  mean_above, above.lambda1_predicted, mean_below, below.bulk_edge_plus, max_excess, golden_fixed)};
}

Outcome criterion8() {
  RandomStream rs(8);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rs.below(19));
    Vector y(n), d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      y(i) = rs.normal();
      d(i) = rs.normal();
    }
    const Matrix m = y * y.transpose() + Matrix(d.asDiagonal());
    worst = std::max(worst, std::abs(secular_top_eigenvalue(y, d) - symmetric_eigen(m).values(0)));
  }
  return {worst <= kTolSecular, fmt("max deviation %.2e over 1000 pairs", worst)};
}

Outcome criterion9() {
  RandomStream rs(9);
  const Matrix y = sample_goe(60, 9);
  double worst_beta = 0.0, worst_theta = 0.0;
  bool exact = true;
  for (int rep = 0; rep < 10; ++rep) {
    const SigmaSpec s = fixtures::random_sigma(rs);
    const ThresholdSolver base(s, kDelta);
    const double bs = base.beta_star();
    const double th = base.theta(1.5);
    const Matrix l = build_laplacian(y, s);
    for (double c : {-1.0, 0.5, 3.0}) {
      const ThresholdSolver shifted(s.shifted(c), kDelta);
      worst_beta = std::max(worst_beta, std::abs(shifted.beta_star() - bs));
      worst_theta = std::max(worst_theta, std::abs(shifted.theta(1.5) - (th + c)));
      Matrix expected = l;
      expected.diagonal().array() += c;
      exact = exact && (build_laplacian(y, s.shifted(c)).array() == expected.array()).all();
    }
  }
  const bool ok = worst_beta <= kTolShiftBeta && worst_theta <= kTolShiftTheta && exact;
  return {ok, fmt("max |d beta*| %.2e, max |d theta - c| %.2e, laplacian exact: %s", worst_beta, worst_theta,
                  exact ? "yes" : "no")};
}

Outcome criterion10() {
  const DetectionReport deg =
      run_detection(kDelta.with_beta(1.0), SigmaSpec::zero(), kN, 0.0, kDetectionTrials, 10, Statistic::MaxRow);
  double lo = INFINITY, hi = -INFINITY;
  for (const auto* v : {&deg.null_stats, &deg.alt_stats}) {
    for (double s : *v) {
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
  }
  double min_err = INFINITY;
  for (double tau : linspace(lo, hi, kTauGrid)) min_err = std::min(min_err, deg.total_error_at(tau));

  const SigmaSpec s = optimize(FamilyKind::Tanh, kDelta, 2000).sigma;
  const ModelSpec planted = kDelta.with_beta(1.2);
  const double tau = calibrated_tau(s, planted);
  const DetectionReport lap = run_detection(planted, s, kN, tau, kDetectionTrials / 2, 11, Statistic::Lambda1L);
  const double lap_err = lap.type1 + lap.type2;
  const bool ok = min_err >= kMinDegreeError && lap_err <= kMaxLaplacianError;
  return {ok, fmt("max_row min total error %.3f over %zu tau; sigma-Laplacian total error %.3f at tau %.4f", min_err,
                  kTauGrid, lap_err, tau)};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9, criterion10};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %zu  %s  [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
