#pragma once

// Asymptotic predictions for the compressed sigma-Laplacian.
//
// Notation: nu = Law(sigma(g)), g ~ N(0,1); G_nu its Stieltjes transform and
// H_nu(z) = z + G_nu(z). For a signal strength beta:
//
//   theta(beta)  solves  E_{y~eta, g}[ y^2 / (theta - sigma(beta m1/m2 y + g)) ] = m2 / beta
//                if a root above edge+(sigma) exists, else theta = edge+(sigma);
//   outlier      iff theta > edge+(sigma) and H_nu'(theta) > 0, where
//                H_nu'(u) = 1 - E[1 / (u - sigma(g))^2];
//   beta*        is the threshold of that (monotone) outlier predicate;
//   lambda_1  -> H_nu(theta) above beta*, else edge+(mu_sc [+] nu),
//                the value of H_nu at its critical point above edge+(sigma).
//
// Every Gaussian expectation is a finite sum over a discretization of the
// pushforward measure Law(sigma(shift + g)):
//   tanh            Gauss-Hermite nodes;
//   step            exact cell masses from the error function;
//   zshaped, table  exact masses of the flat tails plus composite
//                   Gauss-Legendre panels (times the normal density) on the
//                   linear pieces.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "nlap/errors.hpp"
#include "nlap/models.hpp"
#include "nlap/nonlin.hpp"
#include "nlap/parallel.hpp"
#include "nlap/quadrature.hpp"

namespace nlap {

struct QuadratureConfig {
  int hermite_nodes = 200;
  int eta_nodes = 64;      ///< half-normal eta: composite Gauss-Legendre nodes
  int panel_nodes = 8;     ///< Gauss-Legendre nodes per panel on linear pieces of sigma
  double tol_root = 1e-12;
  double tol_fixed_point = 1e-9;
  int max_fixed_point_iters = 10000;
  double damping = 0.5;
  double inversion_epsilon = 1e-3;

  void validate() const {
    if (hermite_nodes < 8 || eta_nodes < 8 || panel_nodes < 2 || max_fixed_point_iters < 8) {
      throw InvalidParameter("quadrature node and iteration counts must be at least 8");
    }
    if (!(tol_root > 0.0) || !(tol_fixed_point > 0.0) || !(inversion_epsilon > 0.0)) {
      throw InvalidParameter("quadrature tolerances must be positive");
    }
    if (!(damping > 0.0 && damping <= 1.0)) throw InvalidParameter("damping must lie in (0, 1]");
  }

  /// Same tolerances, every node count multiplied by `factor`.
  QuadratureConfig refined(int factor) const {
    QuadratureConfig r = *this;
    r.hermite_nodes *= factor;
    r.eta_nodes *= factor;
    r.panel_nodes *= factor;
    return r;
  }
};

/// Finite measure sum_i weight[i] * delta(value[i]).
struct DiscreteMeasure {
  std::vector<double> value;
  std::vector<double> weight;

  void add(double v, double w) {
    if (w > 0.0) {
      value.push_back(v);
      weight.push_back(w);
    }
  }
  double total() const {
    long double s = 0.0L;
    for (double w : weight) s += w;
    return static_cast<double>(s);
  }
  double max_value() const { return value.empty() ? 0.0 : *std::max_element(value.begin(), value.end()); }
  double mean() const {
    long double s = 0.0L;
    for (std::size_t i = 0; i < value.size(); ++i) s += static_cast<long double>(weight[i]) * value[i];
    return static_cast<double>(s / total());
  }

  /// sum w / (theta - v)^power, accumulated in extended precision.
  double inverse_moment(double theta, int power) const {
    long double s = 0.0L;
    for (std::size_t i = 0; i < value.size(); ++i) {
      const long double r = 1.0L / (static_cast<long double>(theta) - value[i]);
      long double t = weight[i] * r;
      for (int p = 1; p < power; ++p) t *= r;
      s += t;
    }
    return static_cast<double>(s);
  }

  std::complex<double> stieltjes(std::complex<double> z) const {
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < value.size(); ++i) s += weight[i] / (z - value[i]);
    return s;
  }
};

namespace detail {

inline constexpr double kGaussClip = 12.0;
inline constexpr double kPanelWidth = 0.5;

/// Adds Law(v(g)) restricted to g in [lo, hi], where v is linear from v_lo to v_hi.
inline void add_linear_piece(DiscreteMeasure& out, double lo, double hi, double v_lo, double v_hi, int panel_nodes) {
  if (!(hi > lo)) return;
  auto value_at = [&](double g) { return v_lo + (g - lo) / (hi - lo) * (v_hi - v_lo); };
  const double clo = std::max(lo, -kGaussClip);
  const double chi = std::min(hi, kGaussClip);
  if (!(chi > clo)) {
    out.add(value_at(std::clamp(0.0, lo, hi)), normal_mass(lo, hi));
    return;
  }
  if (clo > lo) out.add(value_at(clo), normal_mass(lo, clo));
  if (chi < hi) out.add(value_at(chi), normal_mass(chi, hi));
  const auto rule = gauss_legendre(panel_nodes);
  const int panels = std::max(1, static_cast<int>(std::ceil((chi - clo) / kPanelWidth)));
  const double width = (chi - clo) / panels;
  for (int k = 0; k < panels; ++k) {
    const double mid = clo + (k + 0.5) * width;
    for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
      const double g = mid + 0.5 * width * rule->nodes[i];
      out.add(value_at(g), width * rule->weights[i] * normal_pdf(g));
    }
  }
}

/// sigma(shift + g) for sigma piecewise linear through (xs, vs), flat outside.
inline void add_piecewise_linear(DiscreteMeasure& out, const std::vector<double>& xs, const std::vector<double>& vs,
                                 double shift, double offset, double scale, int panel_nodes) {
  const double inf = std::numeric_limits<double>::infinity();
  out.add(scale * vs.front() + offset, normal_mass(-inf, xs.front() - shift));
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    add_linear_piece(out, xs[i] - shift, xs[i + 1] - shift, scale * vs[i] + offset, scale * vs[i + 1] + offset,
                     panel_nodes);
  }
  out.add(scale * vs.back() + offset, normal_mass(xs.back() - shift, inf));
}

}  // namespace detail

/**
 * Discretization of Law(sigma(shift + g)), g ~ N(0,1), with total weight
 * `weight_scale`.
 */
inline DiscreteMeasure pushforward_measure(const SigmaSpec& sigma, double shift, const QuadratureConfig& q,
                                           double weight_scale = 1.0) {
  DiscreteMeasure out;
  const double off = sigma.offset();
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, family::Zero>) {
          out.add(0.0 + off, 1.0);
        } else if constexpr (std::is_same_v<F, family::Constant>) {
          out.add(f.c + off, 1.0);
        } else if constexpr (std::is_same_v<F, family::Tanh>) {
          const auto rule = gauss_hermite(q.hermite_nodes);
          for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
            out.add(f.a * std::tanh(f.b * (shift + rule->nodes[i])) + off, rule->weights[i]);
          }
        } else if constexpr (std::is_same_v<F, family::Step>) {
          const double inf = std::numeric_limits<double>::infinity();
          const std::size_t m = f.knots.size();
          for (std::size_t k = 0; k <= m; ++k) {
            const double lo = k == 0 ? -inf : f.knots[k - 1] - shift;
            const double hi = k == m ? inf : f.knots[k] - shift;
            out.add(f.values[k] + off, normal_mass(lo, hi));
          }
        } else if constexpr (std::is_same_v<F, family::ZShaped>) {
          detail::add_piecewise_linear(out, {f.c, f.c + f.a}, {0.0, f.b}, shift, off, 1.0, q.panel_nodes);
        } else {
          detail::add_piecewise_linear(out, f.grid, f.values, shift, off, 1.0, q.panel_nodes);
        }
      },
      sigma.family());
  if (weight_scale != 1.0) for (double& w : out.weight) w *= weight_scale;
  return out;
}

/// True for families whose discretization is exact (no refinement needed).
inline bool exact_discretization(const SigmaSpec& sigma) {
  return std::holds_alternative<family::Zero>(sigma.family()) ||
         std::holds_alternative<family::Constant>(sigma.family()) ||
         std::holds_alternative<family::Step>(sigma.family());
}

/// Nodes (y_j, u_j) of eta.
inline QuadratureRule eta_nodes(const EtaDistribution& e, const QuadratureConfig& q) {
  return std::visit(
      [&q](const auto& d) -> QuadratureRule {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, eta::PointMass>) return {{d.c}, {1.0}};
        else if constexpr (std::is_same_v<D, eta::HalfNormal>) return half_normal_rule(q.eta_nodes);
        else return {d.atoms, d.weights};
      },
      e);
}

/// Law of sigma(beta m1/m2 y + g) weighted by y^2, y ~ eta: the measure whose
/// Stieltjes transform at theta is the left side of the theta equation.
inline DiscreteMeasure signal_measure(const SigmaSpec& sigma, const ModelSpec& model, double beta,
                                      const QuadratureConfig& q) {
  const QuadratureRule ys = eta_nodes(model.eta, q);
  const double ratio = model.m1() / model.m2();
  DiscreteMeasure out;
  for (std::size_t j = 0; j < ys.nodes.size(); ++j) {
    const double y = ys.nodes[j];
    const double w = ys.weights[j] * y * y;
    if (!(w > 0.0)) continue;
    DiscreteMeasure part = pushforward_measure(sigma, ratio * beta * y, q, w);
    out.value.insert(out.value.end(), part.value.begin(), part.value.end());
    out.weight.insert(out.weight.end(), part.weight.begin(), part.weight.end());
  }
  return out;
}

namespace detail {

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericalError(std::string(what) + ": quadrature produced a non-finite value");
}

/// Root of an increasing function on [lo, hi] (phi(lo) <= 0 <= phi(hi)) by
/// Newton steps safeguarded with bisection. `phi` returns (value, derivative).
template <class F>
double safeguarded_newton(F&& phi, double lo, double hi, double tol, int max_iter = 300) {
  double x = lo;
  auto [f, df] = phi(x);
  if (f >= 0.0) return lo;
  for (int it = 0; it < max_iter; ++it) {
    if (f < 0.0) lo = x;
    else hi = x;
    if (f == 0.0) return x;
    double next = (df > 0.0 && std::isfinite(df)) ? x - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    std::tie(f, df) = phi(x);
    if (step <= tol * std::max(1.0, std::abs(x)) || hi - lo <= tol * std::max(1.0, std::abs(x))) return x;
  }
  return x;
}

}  // namespace detail

/**
 * E[(theta - sigma(shift + g))^(-power)], g ~ N(0,1), power in {1, 2}.
 * Non-exact discretizations are refined by doubling the node counts until
 * successive values agree to tol_root/10 when theta is close to edge+.
 */
inline double gauss_expect_inverse(const SigmaSpec& sigma, double theta, double shift, int power,
                                   const QuadratureConfig& q = {}) {
  q.validate();
  if (power != 1 && power != 2) throw InvalidParameter("gauss_expect_inverse: power must be 1 or 2");
  const SigmaEdges e = sigma.edges();
  if (!(theta > e.plus)) {
    throw SingularArgument("gauss_expect_inverse: theta = " + std::to_string(theta) +
                           " is not above edge+(sigma) = " + std::to_string(e.plus));
  }
  double value = pushforward_measure(sigma, shift, q).inverse_moment(theta, power);
  detail::require_finite(value, "gauss_expect_inverse");
  const bool near_edge = theta - e.plus < 0.1 * std::max(1.0, e.plus - e.minus);
  if (!exact_discretization(sigma) && near_edge) {
    for (int factor = 2; factor <= 16; factor *= 2) {
      const double finer = pushforward_measure(sigma, shift, q.refined(factor)).inverse_moment(theta, power);
      const bool agree = std::abs(finer - value) <= 0.1 * q.tol_root * std::max(1.0, std::abs(finer));
      value = finer;
      if (agree) break;
    }
  }
  return value;
}

/// G_nu(z) = E[1 / (z - sigma(g))] for Im z >= 0, z off the closed range when real.
inline std::complex<double> stieltjes_pushforward(const SigmaSpec& sigma, std::complex<double> z,
                                                  const QuadratureConfig& q = {}) {
  q.validate();
  if (z.imag() < 0.0) throw InvalidParameter("stieltjes_pushforward: Im z must be >= 0");
  const SigmaEdges e = sigma.edges();
  if (z.imag() == 0.0 && z.real() >= e.minus && z.real() <= e.plus) {
    throw SingularArgument("stieltjes_pushforward: real z lies in the closure of sigma(R)");
  }
  std::complex<double> g = pushforward_measure(sigma, 0.0, q).stieltjes(z);
  if (!exact_discretization(sigma)) {
    for (int factor = 2; factor <= 16; factor *= 2) {
      const std::complex<double> finer = pushforward_measure(sigma, 0.0, q.refined(factor)).stieltjes(z);
      const bool agree = std::abs(finer - g) <= 0.1 * q.tol_root * std::max(1.0, std::abs(finer));
      g = finer;
      if (agree) break;
    }
  }
  if (!std::isfinite(g.real()) || !std::isfinite(g.imag())) throw NumericalError("stieltjes_pushforward: non-finite value");
  return g;
}

struct TheoryResult {
  double theta = 0.0;
  double beta_star = 0.0;
  double lambda1_predicted = 0.0;
  double bulk_edge_plus = 0.0;
  bool has_outlier = false;
};

/**
 * Solver for theta(beta), beta*(sigma), the bulk edge and the outlier
 * location for one (sigma, model, quadrature) triple. The noise measure
 * Law(sigma(g)) is discretized once on construction.
 */
class ThresholdSolver {
 public:
  ThresholdSolver(SigmaSpec sigma, ModelSpec model, QuadratureConfig q = {})
      : sigma_(std::move(sigma)), model_(std::move(model)), q_(q), edges_(sigma_.edges()) {
    q_.validate();
    if (!(model_.m1() > 0.0)) throw InvalidParameter("eta must have a positive mean");
    noise_ = pushforward_measure(sigma_, 0.0, q_);
  }

  const SigmaSpec& sigma() const { return sigma_; }
  const ModelSpec& model() const { return model_; }
  const QuadratureConfig& quadrature() const { return q_; }
  double edge_plus() const { return edges_.plus; }
  const DiscreteMeasure& noise_measure() const { return noise_; }

  /// H_nu(u) = u + E[1/(u - sigma(g))].
  double h(double u) const { return u + noise_.inverse_moment(u, 1); }
  /// H_nu'(u) = 1 - E[1/(u - sigma(g))^2].
  double h_prime(double u) const { return 1.0 - noise_.inverse_moment(u, 2); }

  double theta(double beta) const {
    if (!(beta >= 0.0)) throw InvalidParameter("theta_sigma: beta must be >= 0");
    if (beta == 0.0) return edges_.plus;
    return solve_theta(signal_measure(sigma_, model_, beta, q_), model_.m2() / beta, beta);
  }

  bool has_outlier(double beta) const { return outlier_at(beta, theta(beta)); }

  double beta_star() const {
    double lo = 1e-3, hi = 4.0;
    while (has_outlier(lo)) {
      lo *= 0.5;
      if (lo < 1e-12) throw BracketFailure("beta_star: outlier persists as beta -> 0", lo, hi);
    }
    while (!has_outlier(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e6) throw BracketFailure("beta_star: no outlier for any beta up to the bracket", lo, hi);
    }
    while (hi - lo > q_.tol_root * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (has_outlier(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  }

  /// edge+(mu_sc [+] nu) = H_nu(u*), H_nu'(u*) = 0, u* > edge+(sigma).
  double bulk_edge() const {
    const double base = edges_.plus;
    const double lo = base + 1e-9;
    const double hi = base + 1.0;
    // phi(u) = E2(u)^(-1/2) - 1 is increasing and close to linear near an atom at the edge.
    auto phi = [this](double u) {
      const double e2 = noise_.inverse_moment(u, 2);
      const double e3 = noise_.inverse_moment(u, 3);
      return std::make_pair(1.0 / std::sqrt(e2) - 1.0, e3 / (e2 * std::sqrt(e2)));
    };
    const double u = detail::safeguarded_newton(phi, lo, hi, q_.tol_root);
    const double edge = h(u);
    detail::require_finite(edge, "free_conv_edge");
    return edge;
  }

  TheoryResult predict(double beta) const {
    if (!(beta >= 0.0)) throw InvalidParameter("predicted_lambda1: beta must be >= 0");
    TheoryResult r;
    r.theta = theta(beta);
    r.beta_star = beta_star();
    r.bulk_edge_plus = bulk_edge();
    r.has_outlier = beta > 0.0 && outlier_at(beta, r.theta);
    r.lambda1_predicted = r.has_outlier ? h(r.theta) : r.bulk_edge_plus;
    return r;
  }

 private:
  bool outlier_at(double beta, double theta) const {
    if (!(beta > 0.0) || !(theta > edges_.plus)) return false;
    return h_prime(theta) > 0.0;
  }

  double solve_theta(const DiscreteMeasure& m, double target, double beta) const {
    const double edge = edges_.plus;
    const double lo = edge + 1e-9;
    const double g_lo = m.inverse_moment(lo, 1);
    detail::require_finite(g_lo, "theta_sigma");
    if (g_lo < target) return edge;
    double hi = edge + beta + 1.0;
    for (int k = 0; m.inverse_moment(hi, 1) > target; ++k) {
      if (k > 60) throw BracketFailure("theta_sigma: upper bracket expansion failed", lo, hi);
      hi = edge + 2.0 * (hi - edge);
    }
    // 1/G(theta) - 1/target is increasing and nearly linear next to the edge.
    auto phi = [&m, target](double th) {
      const double g1 = m.inverse_moment(th, 1);
      const double g2 = m.inverse_moment(th, 2);
      return std::make_pair(1.0 / g1 - 1.0 / target, g2 / (g1 * g1));
    };
    const double theta = detail::safeguarded_newton(phi, lo, hi, q_.tol_root);
    detail::require_finite(theta, "theta_sigma");
    return theta;
  }

  SigmaSpec sigma_;
  ModelSpec model_;
  QuadratureConfig q_;
  SigmaEdges edges_;
  DiscreteMeasure noise_;
};

inline double theta_sigma(const SigmaSpec& sigma, const ModelSpec& model, double beta, const QuadratureConfig& q = {}) {
  if (!(beta > 0.0)) throw InvalidParameter("theta_sigma: beta must be > 0");
  return ThresholdSolver(sigma, model, q).theta(beta);
}

inline double beta_star(const SigmaSpec& sigma, const ModelSpec& model, const QuadratureConfig& q = {}) {
  return ThresholdSolver(sigma, model, q).beta_star();
}

inline TheoryResult predicted_lambda1(const SigmaSpec& sigma, const ModelSpec& model, double beta,
                                      const QuadratureConfig& q = {}) {
  return ThresholdSolver(sigma, model, q).predict(beta);
}

inline double free_conv_edge(const SigmaSpec& sigma, const QuadratureConfig& q = {}) {
  return ThresholdSolver(sigma, ModelSpec{}, q).bulk_edge();
}

// ---------------------------------------------------------------------------
// Density of mu_sc [+] nu by the subordination fixed point
//   G = G_nu(z - G),  z = x + i eps,
// followed by Stieltjes inversion rho(x) ~ -Im G / pi.

struct DensityResult {
  std::vector<double> x;
  std::vector<double> density;
  std::vector<std::complex<double>> stieltjes;
  std::vector<double> residual;  ///< |G - G_nu(z - G)| at exit
  std::vector<int> iterations;
  std::vector<bool> converged;

  bool all_converged() const { return std::all_of(converged.begin(), converged.end(), [](bool b) { return b; }); }
};

namespace detail {

/// Stieltjes transform of the semicircle law on [-2, 2], Im w > 0.
inline std::complex<double> semicircle_stieltjes(std::complex<double> w) {
  return 0.5 * (w - std::sqrt(w - 2.0) * std::sqrt(w + 2.0));
}

struct FixedPointOutcome {
  std::complex<double> g;
  double residual;
  int iterations;
  bool converged;
};

/**
 * Solves G = sum_i w_i / (z - G - s_i) with Im G < 0. Newton steps are
 * taken when they keep G in the lower half-plane and reduce the residual;
 * otherwise a damped fixed-point step is used, halving the damping whenever
 * it would leave the lower half-plane.
 */
inline FixedPointOutcome subordination_fixed_point(const DiscreteMeasure& nu, std::complex<double> z,
                                                   std::complex<double> g0, const QuadratureConfig& q) {
  auto map = [&nu](std::complex<double> z_, std::complex<double> g, std::complex<double>* deriv) {
    std::complex<double> s = 0.0, ds = 0.0;
    for (std::size_t i = 0; i < nu.value.size(); ++i) {
      const std::complex<double> r = 1.0 / (z_ - g - nu.value[i]);
      s += nu.weight[i] * r;
      ds += nu.weight[i] * r * r;
    }
    if (deriv) *deriv = ds;
    return s;
  };
  std::complex<double> g = g0;
  double damping = q.damping;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < q.max_fixed_point_iters; ++it) {
    std::complex<double> dt;
    const std::complex<double> t = map(z, g, &dt);
    const std::complex<double> f = g - t;
    residual = std::abs(f);
    if (residual <= q.tol_fixed_point) return {g, residual, it, true};
    const std::complex<double> jac = 1.0 - dt;
    if (std::abs(jac) > 0.0) {
      const std::complex<double> gn = g - f / jac;
      if (gn.imag() < 0.0 && std::isfinite(gn.real()) && std::isfinite(gn.imag())) {
        const double rn = std::abs(gn - map(z, gn, nullptr));
        if (rn < residual) {
          g = gn;
          continue;
        }
      }
    }
    std::complex<double> gd = (1.0 - damping) * g + damping * t;
    while (!(gd.imag() < 0.0) && damping > 1e-12) {
      damping *= 0.5;
      gd = (1.0 - damping) * g + damping * t;
    }
    g = gd;
  }
  return {g, residual, q.max_fixed_point_iters, false};
}

}  // namespace detail

inline DensityResult free_conv_density(const SigmaSpec& sigma, const std::vector<double>& grid,
                                       const QuadratureConfig& q = {}) {
  q.validate();
  for (double x : grid) if (!std::isfinite(x)) throw InvalidParameter("free_conv_density: grid must be finite");
  const DiscreteMeasure nu = pushforward_measure(sigma, 0.0, q);
  const double mean = nu.mean();
  DensityResult r;
  const std::size_t n = grid.size();
  r.x = grid;
  r.density.assign(n, 0.0);
  r.stieltjes.assign(n, 0.0);
  r.residual.assign(n, 0.0);
  r.iterations.assign(n, 0);
  r.converged.assign(n, false);
  std::vector<char> ok(n, 0);
  parallel_for(n, [&](std::size_t i) {
    const std::complex<double> z(grid[i], q.inversion_epsilon);
    const std::complex<double> g0 = detail::semicircle_stieltjes(z - mean);
    const auto out = detail::subordination_fixed_point(nu, z, g0, q);
    r.stieltjes[i] = out.g;
    r.residual[i] = out.residual;
    r.iterations[i] = out.iterations;
    ok[i] = out.converged ? 1 : 0;
    r.density[i] = std::max(0.0, -out.g.imag() / std::numbers::pi);
  });
  for (std::size_t i = 0; i < n; ++i) r.converged[i] = ok[i] != 0;
  return r;
}

// ---------------------------------------------------------------------------
// Dense-signal heuristic (experimental): eta = |N(0,1)|, p = 1, and
// nu_beta = Law(sigma(beta sqrt(2/pi) |g| + h)).

struct DenseThreshold {
  double theta = 0.0;
  double beta_star = 0.0;
  bool experimental = true;
};

inline DenseThreshold dense_theta_beta_star(const SigmaSpec& sigma, double beta, const QuadratureConfig& q = {}) {
  q.validate();
  if (!(beta >= 0.0)) throw InvalidParameter("dense_theta_beta_star: beta must be >= 0");
  const double edge = sigma.edges().plus;
  const QuadratureRule ys = half_normal_rule(q.eta_nodes);
  const double c = std::sqrt(2.0 / std::numbers::pi);

  auto measure = [&](double b, bool square_weight) {
    DiscreteMeasure out;
    for (std::size_t j = 0; j < ys.nodes.size(); ++j) {
      const double y = ys.nodes[j];
      const double w = square_weight ? ys.weights[j] * y * y : ys.weights[j];
      DiscreteMeasure part = pushforward_measure(sigma, b * c * y, q, w);
      out.value.insert(out.value.end(), part.value.begin(), part.value.end());
      out.weight.insert(out.weight.end(), part.weight.begin(), part.weight.end());
    }
    return out;
  };
  auto theta_at = [&](double b) {
    if (b == 0.0) return edge;
    const DiscreteMeasure m = measure(b, true);
    const double target = 1.0 / b;
    const double lo = edge + 1e-9;
    if (m.inverse_moment(lo, 1) < target) return edge;
    double hi = edge + b + 1.0;
    for (int k = 0; m.inverse_moment(hi, 1) > target; ++k) {
      if (k > 60) throw BracketFailure("dense theta: upper bracket expansion failed", lo, hi);
      hi = edge + 2.0 * (hi - edge);
    }
    auto phi = [&m, target](double th) {
      const double g1 = m.inverse_moment(th, 1);
      const double g2 = m.inverse_moment(th, 2);
      return std::make_pair(1.0 / g1 - 1.0 / target, g2 / (g1 * g1));
    };
    return detail::safeguarded_newton(phi, lo, hi, q.tol_root);
  };
  auto outlier = [&](double b) {
    const double th = theta_at(b);
    if (!(th > edge)) return false;
    return measure(b, false).inverse_moment(th, 2) < 1.0;
  };

  DenseThreshold r;
  r.theta = theta_at(beta);
  detail::require_finite(r.theta, "dense_theta_beta_star");
  double lo = 1e-3, hi = 4.0;
  while (outlier(lo) && lo > 1e-12) lo *= 0.5;
  while (!outlier(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw BracketFailure("dense beta_star: bracket expansion failed", lo, hi);
  }
  while (hi - lo > q.tol_root * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (outlier(mid) ? hi : lo) = mid;
  }
  r.beta_star = 0.5 * (lo + hi);
  return r;
}

}  // namespace nlap
