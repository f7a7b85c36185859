#pragma once

// Gaussian quadrature rules by the Golub-Welsch method: nodes are the
// eigenvalues of the Jacobi matrix of the orthogonal polynomial family and
// weights are mu_0 times the squared first components of its eigenvectors.
// All rules are normalized to probability weights.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <tuple>
#include <vector>

#include "nlap/errors.hpp"
#include "nlap/spectra.hpp"

namespace nlap {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;  ///< sum to 1
};

namespace detail {

inline QuadratureRule golub_welsch(Vector diag, Vector off) {
  const Eigen::Index n = diag.size();
  Tridiagonal t{std::move(diag), std::move(off)};
  Matrix first_row = Matrix::Zero(1, n);
  first_row(0, 0) = 1.0;
  tridiagonal_ql(t, &first_row, 200);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&t](Eigen::Index a, Eigen::Index b) { return t.diag(a) < t.diag(b); });
  QuadratureRule r;
  r.nodes.reserve(static_cast<std::size_t>(n));
  r.weights.reserve(static_cast<std::size_t>(n));
  double total = 0.0;
  for (Eigen::Index i : order) {
    r.nodes.push_back(t.diag(i));
    r.weights.push_back(first_row(0, i) * first_row(0, i));
    total += r.weights.back();
  }
  for (double& w : r.weights) w /= total;
  return r;
}

enum class RuleKind { Hermite, Laguerre, Legendre };

inline std::shared_ptr<const QuadratureRule> cached_rule(RuleKind kind, int n, double alpha,
                                                         QuadratureRule (*make)(int, double)) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, double>, std::shared_ptr<const QuadratureRule>> cache;
  const auto key = std::make_tuple(static_cast<int>(kind), n, alpha);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto rule = std::make_shared<const QuadratureRule>(make(n, alpha));
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(rule)).first->second;
}

inline QuadratureRule make_hermite(int n, double) {
  Vector diag = Vector::Zero(n);
  Vector off = Vector::Zero(n);
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(static_cast<double>(k));
  QuadratureRule r = golub_welsch(std::move(diag), std::move(off));
  // Symmetrize: the exact rule is symmetric about 0.
  const std::size_t m = r.nodes.size();
  for (std::size_t i = 0; i < m / 2; ++i) {
    const double x = 0.5 * (r.nodes[m - 1 - i] - r.nodes[i]);
    const double w = 0.5 * (r.weights[m - 1 - i] + r.weights[i]);
    r.nodes[i] = -x;
    r.nodes[m - 1 - i] = x;
    r.weights[i] = w;
    r.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) r.nodes[m / 2] = 0.0;
  return r;
}

inline QuadratureRule make_laguerre(int n, double alpha) {
  Vector diag(n), off = Vector::Zero(n);
  for (int k = 0; k < n; ++k) diag(k) = 2.0 * k + alpha + 1.0;
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(k * (k + alpha));
  return golub_welsch(std::move(diag), std::move(off));
}

inline QuadratureRule make_legendre(int n, double) {
  Vector diag = Vector::Zero(n);
  Vector off = Vector::Zero(n);
  for (int k = 1; k < n; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(std::move(diag), std::move(off));
}

}  // namespace detail

/// E[f(g)], g ~ N(0,1) ~ sum w_i f(x_i).
inline std::shared_ptr<const QuadratureRule> gauss_hermite(int n) {
  if (n < 1) throw InvalidParameter("gauss_hermite: need at least one node");
  return detail::cached_rule(detail::RuleKind::Hermite, n, 0.0, &detail::make_hermite);
}

/// Probability weight t^alpha e^{-t} / Gamma(alpha+1) on (0, inf).
inline std::shared_ptr<const QuadratureRule> gauss_laguerre(int n, double alpha) {
  if (n < 1 || !(alpha > -1.0)) throw InvalidParameter("gauss_laguerre: need n >= 1 and alpha > -1");
  return detail::cached_rule(detail::RuleKind::Laguerre, n, alpha, &detail::make_laguerre);
}

/// Uniform probability weight on [-1, 1].
inline std::shared_ptr<const QuadratureRule> gauss_legendre(int n) {
  if (n < 1) throw InvalidParameter("gauss_legendre: need at least one node");
  return detail::cached_rule(detail::RuleKind::Legendre, n, 0.0, &detail::make_legendre);
}

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

inline constexpr int kHalfNormalPanelNodes = 16;
inline constexpr double kHalfNormalCutoff = 10.0;

/// E[f(|g|)], g ~ N(0,1): composite Gauss-Legendre on [0, 10] times the
/// half-normal density, in panels of 16 nodes (n rounded up to a multiple).
inline QuadratureRule half_normal_rule(int n) {
  if (n < 1) throw InvalidParameter("half_normal_rule: need at least one node");
  const int panels = (n + kHalfNormalPanelNodes - 1) / kHalfNormalPanelNodes;
  const auto gl = gauss_legendre(kHalfNormalPanelNodes);
  const double h = kHalfNormalCutoff / panels;
  QuadratureRule r;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = h * (k + 0.5);
    for (std::size_t i = 0; i < gl->nodes.size(); ++i) {
      const double y = mid + 0.5 * h * gl->nodes[i];
      r.nodes.push_back(y);
      r.weights.push_back(h * gl->weights[i] * 2.0 * normal_pdf(y));
      total += r.weights.back();
    }
  }
  for (double& w : r.weights) w /= total;
  return r;
}

/// P(lo <= g < hi) for g ~ N(0,1), without cancellation in either tail.
inline double normal_mass(double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  constexpr double r = 0.70710678118654752440;
  if (lo >= 0.0) return 0.5 * (std::erfc(lo * r) - std::erfc(hi * r));
  if (hi <= 0.0) return 0.5 * (std::erfc(-hi * r) - std::erfc(-lo * r));
  return 1.0 - 0.5 * std::erfc(-lo * r) - 0.5 * std::erfc(hi * r);
}

}  // namespace nlap
