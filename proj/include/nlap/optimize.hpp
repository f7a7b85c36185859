#pragma once

// Nelder-Mead search for the nonlinearity with the smallest threshold
// beta*(sigma) within a parametric family.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nlap/errors.hpp"
#include "nlap/models.hpp"
#include "nlap/nonlin.hpp"
#include "nlap/parallel.hpp"
#include "nlap/rng.hpp"
#include "nlap/theory.hpp"

namespace nlap {

enum class FamilyKind { Tanh, ZShaped, Step };

inline std::string family_kind_name(FamilyKind f) {
  switch (f) {
    case FamilyKind::Tanh: return "tanh";
    case FamilyKind::ZShaped: return "zshaped";
    case FamilyKind::Step: return "step";
  }
  return "?";
}

inline FamilyKind parse_family_kind(const std::string& s) {
  if (s == "tanh") return FamilyKind::Tanh;
  if (s == "zshaped" || s == "z") return FamilyKind::ZShaped;
  if (s == "step") return FamilyKind::Step;
  throw InvalidParameter("unknown family '" + s + "' (expected tanh, zshaped or step)");
}

inline constexpr int kDefaultStepKnots = 16;

struct OptimizeConfig {
  FamilyKind family = FamilyKind::Tanh;
  int step_knots = kDefaultStepKnots;
  std::vector<double> initial_point;  ///< empty: family default
  double initial_step = 0.2;          ///< simplex edge, relative to max(|x_i|, 1)
  int max_evals = 2000;               ///< per restart
  double f_tol = 1e-10;
  double x_tol = 1e-8;
  int restarts = 2;
  std::uint64_t seed = 1;
  double jitter = 0.05;

  void validate() const {
    if (max_evals < 1) throw InvalidParameter("max_evals must be >= 1");
    if (!(f_tol > 0.0) || !(x_tol > 0.0)) throw InvalidParameter("optimizer tolerances must be positive");
    if (!(initial_step > 0.0)) throw InvalidParameter("initial_step must be positive");
    if (restarts < 0) throw InvalidParameter("restarts must be >= 0");
    if (!(jitter >= 0.0)) throw InvalidParameter("jitter must be >= 0");
    if (family == FamilyKind::Step && step_knots < 1) throw InvalidParameter("step family needs at least one knot");
  }
};

struct NelderMeadResult {
  std::vector<double> best_params;
  double best_value = std::numeric_limits<double>::infinity();
  int evals = 0;
};

namespace detail {

struct SimplexRun {
  std::vector<double> x;
  double f;
  int evals;
};

inline SimplexRun nelder_mead_run(const std::function<double(const std::vector<double>&)>& objective,
                                  const std::vector<double>& x0, const OptimizeConfig& cfg) {
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  const std::size_t d = x0.size();
  if (d == 0) throw InvalidDimension("nelder_mead: empty parameter vector");
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = objective(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> pts(d + 1, x0);
  std::vector<double> fs(d + 1);
  for (std::size_t i = 0; i < d; ++i) pts[i + 1][i] += cfg.initial_step * std::max(1.0, std::abs(x0[i]));
  bool any_finite = false;
  for (std::size_t i = 0; i <= d; ++i) {
    fs[i] = eval(pts[i]);
    any_finite = any_finite || std::isfinite(fs[i]);
  }
  if (!any_finite) throw NumericalError("nelder_mead: objective is not finite at any initial simplex vertex");

  std::vector<std::size_t> order(d + 1);
  auto combine = [d](const std::vector<double>& a, const std::vector<double>& b, double t) {
    std::vector<double> out(d);
    for (std::size_t i = 0; i < d; ++i) out[i] = a[i] + t * (b[i] - a[i]);
    return out;
  };

  while (true) {
    for (std::size_t i = 0; i <= d; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&fs](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[d - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= d; ++i) {
      double dist = 0.0;
      for (std::size_t k = 0; k < d; ++k) dist = std::max(dist, std::abs(pts[i][k] - pts[best][k]));
      diameter = std::max(diameter, dist);
    }
    const double spread = std::isfinite(fs[worst]) ? fs[worst] - fs[best] : std::numeric_limits<double>::infinity();
    if (diameter < cfg.x_tol || spread < cfg.f_tol || evals >= cfg.max_evals) break;

    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < d; ++k) centroid[k] += pts[i][k] / static_cast<double>(d);
    }

    const std::vector<double> xr = combine(centroid, pts[worst], -kReflect);
    const double fr = eval(xr);
    if (fr < fs[best]) {
      const std::vector<double> xe = combine(centroid, pts[worst], -kExpand);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        fs[worst] = fe;
      } else {
        pts[worst] = xr;
        fs[worst] = fr;
      }
      continue;
    }
    if (fr < fs[second]) {
      pts[worst] = xr;
      fs[worst] = fr;
      continue;
    }
    const bool outside = fr < fs[worst];
    const std::vector<double> xc =
        outside ? combine(centroid, xr, kContract) : combine(centroid, pts[worst], kContract);
    const double fc = eval(xc);
    if (fc < (outside ? fr : fs[worst])) {
      pts[worst] = xc;
      fs[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == best) continue;
      pts[i] = combine(pts[best], pts[i], kShrink);
      fs[i] = eval(pts[i]);
    }
  }
  const auto it = std::min_element(fs.begin(), fs.end());
  return {pts[static_cast<std::size_t>(it - fs.begin())], *it, evals};
}

}  // namespace detail

/**
 * Nelder-Mead with coefficients (reflect 1, expand 2, contract 0.5, shrink
 * 0.5). Restart k > 0 starts from the best point so far, jittered by a
 * seeded relative perturbation. Infeasible points should evaluate to +inf.
 */
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                                    const OptimizeConfig& cfg) {
  cfg.validate();
  if (cfg.initial_point.empty()) throw InvalidParameter("nelder_mead: initial_point is empty");
  NelderMeadResult out;
  out.best_params = cfg.initial_point;
  RandomStream rs(derive_seed(cfg.seed, "restart-jitter"));
  for (int r = 0; r <= cfg.restarts; ++r) {
    std::vector<double> start = out.best_params;
    if (r > 0) {
      for (double& x : start) x += cfg.jitter * std::max(1.0, std::abs(x)) * (2.0 * rs.uniform() - 1.0);
    }
    detail::SimplexRun run;
    try {
      run = detail::nelder_mead_run(objective, start, cfg);
    } catch (const NumericalError&) {
      if (r == 0) throw;
      continue;
    }
    out.evals += run.evals;
    if (run.f < out.best_value) {
      out.best_value = run.f;
      out.best_params = run.x;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Family parameterizations. The vertical gauge is fixed: tanh is centered,
// the Z-shaped minimum and the first step value are 0.
//   tanh     (a, b)                     sigma = a tanh(b x), a, b >= 0
//   zshaped  (a, b, c)                  a > 0, b >= 0
//   step     (a_1..a_m, b_1..b_m)       knots x_k = a_1 + ... + a_k (a_{k>=2} > 0),
//                                       values v_0 = 0, v_k = b_1 + ... + b_k (b_k >= 0)

inline std::size_t family_dimension(FamilyKind f, int step_knots = kDefaultStepKnots) {
  switch (f) {
    case FamilyKind::Tanh: return 2;
    case FamilyKind::ZShaped: return 3;
    case FamilyKind::Step: return 2 * static_cast<std::size_t>(step_knots);
  }
  return 0;
}

inline std::vector<std::string> family_param_names(FamilyKind f, int step_knots = kDefaultStepKnots) {
  switch (f) {
    case FamilyKind::Tanh: return {"a", "b"};
    case FamilyKind::ZShaped: return {"a", "b", "c"};
    case FamilyKind::Step: {
      std::vector<std::string> names;
      for (int k = 1; k <= step_knots; ++k) names.push_back("a" + std::to_string(k));
      for (int k = 1; k <= step_knots; ++k) names.push_back("b" + std::to_string(k));
      return names;
    }
  }
  return {};
}

/// Nonlinearity for a parameter vector, or nullopt when it violates the family constraints.
inline std::optional<SigmaSpec> family_sigma(FamilyKind f, const std::vector<double>& p,
                                             int step_knots = kDefaultStepKnots) {
  if (p.size() != family_dimension(f, step_knots)) throw InvalidDimension("family parameter vector has the wrong length");
  for (double v : p) if (!std::isfinite(v)) return std::nullopt;
  switch (f) {
    case FamilyKind::Tanh:
      if (p[0] < 0.0 || p[1] < 0.0) return std::nullopt;
      return SigmaSpec::tanh(p[0], p[1]);
    case FamilyKind::ZShaped:
      if (!(p[0] > 0.0) || p[1] < 0.0) return std::nullopt;
      return SigmaSpec::zshaped(p[0], p[1], p[2]);
    case FamilyKind::Step: {
      const auto m = static_cast<std::size_t>(step_knots);
      std::vector<double> knots(m), values(m + 1, 0.0);
      double x = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        if (k > 0 && !(p[k] > 0.0)) return std::nullopt;
        if (p[m + k] < 0.0) return std::nullopt;
        x += p[k];
        knots[k] = x;
        values[k + 1] = values[k] + p[m + k];
      }
      for (std::size_t k = 1; k < m; ++k) if (!(knots[k] > knots[k - 1])) return std::nullopt;
      return SigmaSpec::step(std::move(knots), std::move(values));
    }
  }
  return std::nullopt;
}

/// Default starting point: a tanh near the best S-shaped nonlinearity (or its staircase).
inline std::vector<double> family_initial_point(FamilyKind f, int step_knots = kDefaultStepKnots) {
  constexpr double a = 1.7, b = 0.58;
  switch (f) {
    case FamilyKind::Tanh: return {1.0, 0.5};
    case FamilyKind::ZShaped: return {2.0, 2.0, -1.0};
    case FamilyKind::Step: {
      const auto m = static_cast<std::size_t>(step_knots);
      const double width = 8.0 / static_cast<double>(m + 1);
      std::vector<double> p(2 * m);
      double prev = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const double knot = -4.0 + width * static_cast<double>(k + 1);
        p[k] = k == 0 ? knot : width;
        const double mid = knot + 0.5 * width;
        const double v = k + 1 == m ? 2.0 * a : a + a * std::tanh(b * mid);
        p[m + k] = std::max(0.0, v - prev);
        prev = v;
      }
      return p;
    }
  }
  return {};
}

struct FamilyOptimum {
  SigmaSpec sigma;
  std::vector<double> params;
  double beta_star = 0.0;
  int evals = 0;
};

/// beta*(family_sigma(p)), +inf for infeasible parameters or failed threshold searches.
inline double family_objective(FamilyKind f, const std::vector<double>& p, const ModelSpec& model,
                               const QuadratureConfig& q, int step_knots = kDefaultStepKnots) {
  const auto sigma = family_sigma(f, p, step_knots);
  if (!sigma) return std::numeric_limits<double>::infinity();
  try {
    return beta_star(*sigma, model, q);
  } catch (const BracketFailure&) {
    return std::numeric_limits<double>::infinity();
  } catch (const NumericalError&) {
    return std::numeric_limits<double>::infinity();
  }
}

inline FamilyOptimum optimize_family(const ModelSpec& model, OptimizeConfig cfg, const QuadratureConfig& q = {}) {
  cfg.validate();
  q.validate();
  model.validate();
  if (cfg.initial_point.empty()) cfg.initial_point = family_initial_point(cfg.family, cfg.step_knots);
  const FamilyKind f = cfg.family;
  const int m = cfg.step_knots;
  auto objective = [&](const std::vector<double>& p) { return family_objective(f, p, model, q, m); };
  const NelderMeadResult r = nelder_mead(objective, cfg);
  const auto sigma = family_sigma(f, r.best_params, m);
  if (!sigma || !std::isfinite(r.best_value)) throw NumericalError("optimize_family: no feasible point found");
  return {*sigma, r.best_params, r.best_value, r.evals};
}

// ---------------------------------------------------------------------------

struct HeatmapAxis {
  std::size_t index = 0;  ///< parameter being varied
  std::vector<double> values;
};

struct HeatmapResult {
  FamilyKind family = FamilyKind::ZShaped;
  std::string x_name, y_name;
  std::vector<double> x_values, y_values;
  std::vector<std::vector<double>> beta_star;  ///< [iy][ix]; NaN marks infeasible cells

  double min_value() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& row : beta_star) for (double v : row) if (!std::isnan(v)) best = std::min(best, v);
    return best;
  }
};

/// beta* over a grid of two parameters, the others held at `base`.
inline HeatmapResult heatmap_sweep(FamilyKind f, const ModelSpec& model, const std::vector<double>& base,
                                   const HeatmapAxis& x, const HeatmapAxis& y, const QuadratureConfig& q = {},
                                   int step_knots = kDefaultStepKnots) {
  const std::size_t dim = family_dimension(f, step_knots);
  if (base.size() != dim) throw InvalidDimension("heatmap_sweep: base parameter vector has the wrong length");
  if (x.index >= dim || y.index >= dim || x.index == y.index) {
    throw InvalidParameter("heatmap_sweep: need two distinct free parameters");
  }
  if (x.values.empty() || y.values.empty()) throw InvalidParameter("heatmap_sweep: empty parameter range");
  const auto names = family_param_names(f, step_knots);
  HeatmapResult r;
  r.family = f;
  r.x_name = names[x.index];
  r.y_name = names[y.index];
  r.x_values = x.values;
  r.y_values = y.values;
  const std::size_t nx = x.values.size(), ny = y.values.size();
  std::vector<double> flat(nx * ny);
  parallel_for(nx * ny, [&](std::size_t cell) {
    std::vector<double> p = base;
    p[x.index] = x.values[cell % nx];
    p[y.index] = y.values[cell / nx];
    const double v = family_objective(f, p, model, q, step_knots);
    flat[cell] = std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
  });
  r.beta_star.assign(ny, std::vector<double>(nx));
  for (std::size_t i = 0; i < nx * ny; ++i) r.beta_star[i / nx][i % nx] = flat[i];
  return r;
}

}  // namespace nlap
