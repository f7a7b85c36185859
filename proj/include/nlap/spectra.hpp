#pragma once

// Dense symmetric eigensolvers and spectral statistics.
//
// full_spectrum: Householder tridiagonalization followed by implicit-shift QL.
// top_eigenpair: Lanczos with full reorthogonalization, which at desk scale
// costs a few hundred matrix-vector products.
// secular_top_eigenvalue: the largest root of sum y_i^2 / (lambda - d_i) = 1,
// which is the top eigenvalue of y y^T + diag(d).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nlap/errors.hpp"
#include "nlap/linalg.hpp"
#include "nlap/rng.hpp"

namespace nlap {

/// Symmetric tridiagonal matrix: diag[i], and off[i] couples i and i+1.
struct Tridiagonal {
  Vector diag;
  Vector off;  ///< size n; the last entry is unused
};

/**
 * Implicit QL iteration with Wilkinson-type shifts on a symmetric tridiagonal
 * matrix. On return t.diag holds the (unsorted) eigenvalues. If `z` is
 * non-null its columns are rotated alongside, so passing Q yields Q S where
 * S holds the tridiagonal eigenvectors; passing a 1 x n row e_1^T yields the
 * first components only.
 */
inline void tridiagonal_ql(Tridiagonal& t, Matrix* z = nullptr, int max_sweeps = 60) {
  const Eigen::Index n = t.diag.size();
  Vector& d = t.diag;
  Vector& e = t.off;
  if (e.size() < n) throw InvalidDimension("tridiagonal_ql: off-diagonal is too short");
  if (n > 0) e(n - 1) = 0.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (Eigen::Index l = 0; l < n; ++l) {
    int iter = 0;
    Eigen::Index m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d(m)) + std::abs(d(m + 1));
        if (std::abs(e(m)) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == max_sweeps) {
          throw NonConvergence("tridiagonal_ql: no convergence for eigenvalue " + std::to_string(l), std::abs(e(l)));
        }
        double g = (d(l + 1) - d(l)) / (2.0 * e(l));
        double r = std::hypot(g, 1.0);
        g = d(m) - d(l) + e(l) / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        Eigen::Index i = m - 1;
        bool deflated = false;
        for (; i >= l; --i) {
          double f = s * e(i);
          const double b = c * e(i);
          r = std::hypot(f, g);
          e(i + 1) = r;
          if (r == 0.0) {
            d(i + 1) -= p;
            e(m) = 0.0;
            deflated = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d(i + 1) - p;
          r = (d(i) - g) * s + 2.0 * c * b;
          p = s * r;
          d(i + 1) = g + p;
          g = c * r - b;
          if (z != nullptr) {
            auto zi = z->col(i);
            auto zi1 = z->col(i + 1);
            for (Eigen::Index k = 0; k < z->rows(); ++k) {
              f = zi1(k);
              zi1(k) = s * zi(k) + c * f;
              zi(k) = c * zi(k) - s * f;
            }
          }
        }
        if (deflated) continue;
        d(l) -= p;
        e(l) = g;
        e(m) = 0.0;
      }
    } while (m != l);
  }
}

/// Householder reduction A = Q T Q^T. Q is formed only when requested.
inline Tridiagonal tridiagonalize(Matrix a, Matrix* q = nullptr) {
  const Eigen::Index n = a.rows();
  Tridiagonal t{Vector::Zero(n), Vector::Zero(n)};
  std::vector<double> taus(static_cast<std::size_t>(std::max<Eigen::Index>(n - 1, 0)), 0.0);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const Eigen::Index len = n - k - 1;
    auto x = a.col(k).tail(len);
    t.diag(k) = a(k, k);
    const double xnorm = x.norm();
    if (len == 1 || xnorm == 0.0) {
      t.off(k) = x(0);
      taus[static_cast<std::size_t>(k)] = 0.0;
      continue;
    }
    const double alpha = x(0) > 0.0 ? -xnorm : xnorm;
    Vector v = x;
    v(0) -= alpha;
    const double tau = 2.0 / v.squaredNorm();
    t.off(k) = alpha;
    auto a22 = a.bottomRightCorner(len, len);
    const Vector p = tau * (a22.selfadjointView<Eigen::Lower>() * v);
    const double kk = 0.5 * tau * p.dot(v);
    const Vector w = p - kk * v;
    a22.selfadjointView<Eigen::Lower>().rankUpdate(v, w, -1.0);
    x = v;
    taus[static_cast<std::size_t>(k)] = tau;
  }
  if (n > 0) t.diag(n - 1) = a(n - 1, n - 1);
  if (q != nullptr) {
    q->setIdentity(n, n);
    for (Eigen::Index k = n - 2; k >= 0; --k) {
      const double tau = taus[static_cast<std::size_t>(k)];
      if (tau == 0.0) continue;
      const Eigen::Index len = n - k - 1;
      const Vector v = a.col(k).tail(len);
      auto qs = q->bottomRightCorner(len, len);
      const Eigen::RowVectorXd vtq = v.transpose() * qs;
      qs.noalias() -= (tau * v) * vtq;
    }
  }
  return t;
}

struct EigenDecomposition {
  Vector values;   ///< descending
  Matrix vectors;  ///< column i pairs with values(i)
};

namespace detail {

inline void fix_sign(Eigen::Ref<Vector> v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0.0) v = -v;
}

inline std::vector<Eigen::Index> descending_order(const Vector& values) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
  std::stable_sort(idx.begin(), idx.end(), [&values](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });
  return idx;
}

}  // namespace detail

/// All eigenvalues of a symmetric matrix, descending.
inline Vector full_spectrum(const Matrix& m) {
  require_symmetric(m, "full_spectrum");
  Tridiagonal t = tridiagonalize(m);
  tridiagonal_ql(t);
  Vector v = t.diag;
  std::sort(v.data(), v.data() + v.size(), std::greater<double>());
  return v;
}

/// Eigenvalues and eigenvectors; each eigenvector has its largest-magnitude entry positive.
inline EigenDecomposition symmetric_eigen(const Matrix& m) {
  require_symmetric(m, "symmetric_eigen");
  Matrix q;
  Tridiagonal t = tridiagonalize(m, &q);
  tridiagonal_ql(t, &q);
  const auto order = detail::descending_order(t.diag);
  EigenDecomposition out{Vector(m.rows()), Matrix(m.rows(), m.cols())};
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    out.values(c) = t.diag(order[i]);
    out.vectors.col(c) = q.col(order[i]);
    detail::fix_sign(out.vectors.col(c));
  }
  return out;
}

struct TopEigenpair {
  double lambda1 = 0.0;
  Vector v1;
  double residual = 0.0;  ///< |M v - lambda v|
  int iterations = 0;
};

/**
 * Largest eigenvalue and its eigenvector by Lanczos with full
 * reorthogonalization, from a fixed pseudo-random start vector. Stops when
 * |M v - lambda v| <= tol * |M|, with |M| estimated by the extreme Ritz
 * values.
 */
inline TopEigenpair top_eigenpair(const Matrix& m, double tol = 1e-10, int max_iter = 1000) {
  require_symmetric(m, "top_eigenpair");
  if (!(tol > 0.0)) throw InvalidParameter("top_eigenpair: tol must be positive");
  const Eigen::Index n = m.rows();
  if (n == 0) throw InvalidDimension("top_eigenpair: empty matrix");
  if (n == 1) return {m(0, 0), Vector::Ones(1), 0.0, 0};

  const Eigen::Index kmax = std::min<Eigen::Index>(n, std::max(max_iter, 1));
  Matrix basis(n, kmax);
  std::vector<double> alpha, beta;
  RandomStream rs(0x5EED5EEDULL);
  Vector q(n);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = rs.normal();
  q.normalize();

  double last_residual = std::numeric_limits<double>::infinity();
  Eigen::Index k = 0;
  Vector w(n);
  for (;;) {
    basis.col(k) = q;
    w.noalias() = m.selfadjointView<Eigen::Lower>() * q;
    const double a = q.dot(w);
    w -= a * q;
    if (k > 0) w -= beta.back() * basis.col(k - 1);
    // Two passes of classical Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass) {
      const Vector h = basis.leftCols(k + 1).transpose() * w;
      w.noalias() -= basis.leftCols(k + 1) * h;
    }
    alpha.push_back(a);
    const double b = w.norm();
    ++k;

    const bool exhausted = k == n || k == kmax;
    const bool breakdown = b <= 1e-14 * std::max(1.0, std::abs(a));
    if (k % 8 == 0 || exhausted || breakdown) {
      Tridiagonal t{Eigen::Map<Vector>(alpha.data(), k), Vector::Zero(k)};
      for (Eigen::Index i = 0; i + 1 < k; ++i) t.off(i) = beta[static_cast<std::size_t>(i)];
      Matrix s = Matrix::Identity(k, k);
      tridiagonal_ql(t, &s);
      Eigen::Index top = 0;
      t.diag.maxCoeff(&top);
      const double norm_est = std::max(std::abs(t.diag.maxCoeff()), std::abs(t.diag.minCoeff()));
      const double ritz_residual = std::abs(b * s(k - 1, top));
      if (ritz_residual <= tol * norm_est || exhausted || breakdown) {
        Vector v = basis.leftCols(k) * s.col(top);
        v.normalize();
        const double lam = t.diag(top);
        const double true_residual = (m.selfadjointView<Eigen::Lower>() * v - lam * v).norm();
        last_residual = true_residual;
        if (true_residual <= tol * std::max(norm_est, std::numeric_limits<double>::min()) || k == n || breakdown) {
          detail::fix_sign(v);
          return {lam, std::move(v), true_residual, static_cast<int>(k)};
        }
        if (exhausted) break;
      }
    }
    if (breakdown) break;
    beta.push_back(b);
    q = w / b;
  }
  throw NonConvergence("top_eigenpair: Lanczos did not converge within " + std::to_string(kmax) + " steps",
                       last_residual);
}

/// |<v, x>| / (|v| |x|).
inline double overlap(const Vector& v, const Vector& x) {
  if (v.size() != x.size()) throw InvalidDimension("overlap: vectors differ in length");
  const double nv = v.norm();
  const double nx = x.norm();
  if (nv == 0.0 || nx == 0.0) throw InvalidParameter("overlap: zero vector");
  return std::min(1.0, std::abs(v.dot(x)) / (nv * nx));
}

struct SpectralSummary {
  Vector eigenvalues;  ///< descending; may hold only the top value
  Vector top_vector;
  double lambda1 = 0.0;
  std::optional<double> overlap;
};

inline SpectralSummary spectral_summary(const Matrix& m, const Vector* signal = nullptr) {
  EigenDecomposition ed = symmetric_eigen(m);
  SpectralSummary s;
  s.eigenvalues = ed.values;
  s.top_vector = ed.vectors.col(0);
  s.lambda1 = ed.values(0);
  if (signal != nullptr && signal->norm() > 0.0) s.overlap = overlap(s.top_vector, *signal);
  return s;
}

/**
 * Top eigenvalue of y y^T + diag(d) from the secular equation
 * sum_i y_i^2 / (lambda - d_i) = 1. Indices with y_i == 0 decouple and
 * contribute d_i itself as an eigenvalue.
 */
inline double secular_top_eigenvalue(const Vector& y, const Vector& d, double tol = 1e-14) {
  if (y.size() != d.size()) throw InvalidDimension("secular_top_eigenvalue: y and d differ in length");
  const double ynorm2 = y.squaredNorm();
  if (ynorm2 == 0.0) throw InvalidParameter("secular_top_eigenvalue: y is zero; the eigenvalues are just d");
  double dmax = -std::numeric_limits<double>::infinity();
  double decoupled = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0.0) dmax = std::max(dmax, d(i));
    else decoupled = std::max(decoupled, d(i));
  }
  auto f = [&](double lam, double* df) {
    double s = 0.0, ds = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y(i) == 0.0) continue;
      const double inv = 1.0 / (lam - d(i));
      const double t = y(i) * y(i) * inv;
      s += t;
      ds -= t * inv;
    }
    if (df) *df = ds;
    return s - 1.0;
  };
  // The root lies in (dmax, dmax + |y|^2]; f is decreasing and convex there.
  double lo = dmax;
  double hi = dmax + ynorm2;
  double lam = hi;
  for (int it = 0; it < 400; ++it) {
    double df = 0.0;
    const double fv = f(lam, &df);
    if (fv > 0.0) lo = lam;
    else hi = lam;
    if (fv == 0.0 || hi - lo <= tol * std::max(1.0, std::abs(hi))) break;
    double next = lam - fv / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == lam) break;
    lam = next;
  }
  return std::max(lam, decoupled);
}

/// max_i (Y_hat 1)_i, the statistic of the degree baseline detector.
inline double max_row_statistic(const Matrix& y_hat) {
  require_square(y_hat, "max_row_statistic");
  if (y_hat.rows() == 0) throw InvalidDimension("max_row_statistic: empty matrix");
  return symmetric_row_sums(y_hat).maxCoeff();
}

}  // namespace nlap
