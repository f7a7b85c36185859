#pragma once

// sigma-Laplacian L = Y_hat + diag(sigma(Y_hat 1)) and its compression
// L_tilde = V^T L V onto the orthogonal complement of the all-ones vector.
//
// V is columns 2..n of the Householder reflector H = I - tau u u^T with
// u = e_1 - 1/sqrt(n), which swaps e_1 and 1/sqrt(n). V^T L V is then the
// trailing (n-1)x(n-1) block of H L H, formed with an O(n^2) rank-2 update.

#include <cmath>

#include "nlap/errors.hpp"
#include "nlap/linalg.hpp"
#include "nlap/nonlin.hpp"

namespace nlap {

/// Diagonal entries sigma(Y_hat 1) without assembling L.
inline Vector laplacian_diagonal(const Matrix& y_hat, const SigmaSpec& sigma) {
  const Vector rows = symmetric_row_sums(y_hat);
  Vector d(rows.size());
  for (Eigen::Index i = 0; i < rows.size(); ++i) d(i) = sigma.base(rows(i));
  return d;
}

inline Matrix build_laplacian(const Matrix& y_hat, const SigmaSpec& sigma) {
  require_symmetric(y_hat, "build_laplacian");
  const Vector d = laplacian_diagonal(y_hat, sigma);
  Matrix l = y_hat;
  // The offset is added last so that sigma + c gives exactly L + c*I.
  for (Eigen::Index i = 0; i < l.rows(); ++i) l(i, i) = (l(i, i) + d(i)) + sigma.offset();
  return l;
}

/// Reflector H = I - tau u u^T with H e_1 = 1/sqrt(n).
struct OnesReflector {
  Vector u;
  double tau = 0.0;

  explicit OnesReflector(Eigen::Index n) {
    if (n < 2) throw InvalidDimension("ones-complement basis needs n >= 2");
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    u = Vector::Constant(n, -s);
    u(0) += 1.0;
    tau = 2.0 / u.squaredNorm();
  }

  Eigen::Index n() const { return u.size(); }

  Vector apply(const Vector& v) const { return v - (tau * u.dot(v)) * u; }

  /// V v_tilde = H [0; v_tilde].
  Vector lift(const Vector& v_tilde) const {
    if (v_tilde.size() != n() - 1) throw InvalidDimension("lift: vector has the wrong dimension");
    Vector full(n());
    full(0) = 0.0;
    full.tail(n() - 1) = v_tilde;
    return apply(full);
  }

  /// V^T v = (H v)[1:].
  Vector restrict(const Vector& v) const {
    if (v.size() != n()) throw InvalidDimension("restrict: vector has the wrong dimension");
    return apply(v).tail(n() - 1);
  }
};

struct CompressionBasis {
  std::size_t n = 0;
  Matrix v_columns;  ///< n x (n-1), orthonormal, orthogonal to 1
};

inline CompressionBasis ones_complement_basis(std::size_t n) {
  const OnesReflector h(static_cast<Eigen::Index>(n));
  const auto N = static_cast<Eigen::Index>(n);
  Matrix full = Matrix::Identity(N, N) - h.tau * h.u * h.u.transpose();
  return {n, full.rightCols(N - 1)};
}

/// V^T M V for symmetric M, via the rank-2 form of H M H.
inline Matrix compress(const Matrix& m) {
  require_square(m, "compress");
  const OnesReflector h(m.rows());
  const Eigen::Index n = m.rows();
  const Vector p = h.tau * (m * h.u);
  const double k = 0.5 * h.tau * h.u.dot(p);
  const Vector w = p - k * h.u;
  Matrix out(n - 1, n - 1);
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      const double v = m(i, j) - h.u(i) * w(j) - w(i) * h.u(j);
      out(i - 1, j - 1) = v;
      out(j - 1, i - 1) = v;
    }
  }
  return out;
}

/// Reference route with an explicit basis matrix; O(n^3).
inline Matrix compress_explicit(const Matrix& m, const CompressionBasis& basis) {
  const Matrix& v = basis.v_columns;
  Matrix out = v.transpose() * (m * v);
  return 0.5 * (out + out.transpose());
}

inline Matrix build_compressed(const Matrix& y_hat, const SigmaSpec& sigma) {
  if (y_hat.rows() < 2) throw InvalidDimension("build_compressed: n must be at least 2");
  return compress(build_laplacian(y_hat, sigma));
}

}  // namespace nlap
