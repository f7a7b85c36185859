#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <string>

#include "nlap/errors.hpp"

namespace nlap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest |m_ij - m_ji| relative to max |m_ij|; zero for an exactly symmetric matrix.
inline double asymmetry(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidDimension("matrix is not square");
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

inline void require_square(const Matrix& m, const char* who) {
  if (m.rows() != m.cols()) {
    throw InvalidDimension(std::string(who) + ": matrix is " + std::to_string(m.rows()) + "x" +
                           std::to_string(m.cols()) + ", expected square");
  }
}

inline void require_symmetric(const Matrix& m, const char* who, double rel_tol = 1e-10) {
  require_square(m, who);
  const double a = asymmetry(m);
  if (a > rel_tol) {
    throw NotSymmetric(std::string(who) + ": relative asymmetry " + std::to_string(a) +
                       " exceeds tolerance");
  }
}

/// Pairwise (cascade) summation; the result depends only on the input order.
inline double pairwise_sum(std::span<const double> v) {
  constexpr std::size_t kBlock = 32;
  if (v.size() <= kBlock) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// Row sums of a column-major matrix, each computed by pairwise summation.
/// For a symmetric matrix row i equals column i, which is contiguous.
inline Vector symmetric_row_sums(const Matrix& m) {
  Vector out(m.rows());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    out(j) = pairwise_sum(std::span<const double>(m.col(j).data(), static_cast<std::size_t>(m.rows())));
  }
  return out;
}

}  // namespace nlap
