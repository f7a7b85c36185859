#pragma once

#include <vector>

#include "nlap/nlap.hpp"

namespace nlap::fixtures {

/// Random symmetric matrix with N(0,1) entries.
inline Matrix random_symmetric(Eigen::Index n, RandomStream& rs) {
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      m(i, j) = rs.normal();
      m(j, i) = m(i, j);
    }
  }
  return m;
}

/// Random member of one of the bounded monotone families.
inline SigmaSpec random_sigma(RandomStream& rs) {
  switch (rs.below(5)) {
    case 0:
      return SigmaSpec::tanh(0.2 + 2.8 * rs.uniform(), 0.1 + 1.9 * rs.uniform());
    case 1:
      return SigmaSpec::zshaped(0.5 + 4.5 * rs.uniform(), 0.2 + 2.8 * rs.uniform(), -3.0 + 4.0 * rs.uniform());
    case 2: {
      const std::size_t m = 1 + rs.below(4);
      std::vector<double> knots, values{0.0};
      double x = -2.0 + rs.uniform();
      for (std::size_t k = 0; k < m; ++k) {
        knots.push_back(x);
        x += 0.2 + rs.uniform();
        values.push_back(values.back() + 0.1 + rs.uniform());
      }
      return SigmaSpec::step(knots, values);
    }
    case 3: {
      const std::size_t m = 3 + rs.below(4);
      std::vector<double> grid, values;
      double x = -3.0 + rs.uniform(), v = -1.0 + rs.uniform();
      for (std::size_t k = 0; k < m; ++k) {
        grid.push_back(x);
        values.push_back(v);
        x += 0.3 + rs.uniform();
        v += rs.uniform();
      }
      return SigmaSpec::tabulated(grid, values);
    }
    default:
      return SigmaSpec::constant(-2.0 + 4.0 * rs.uniform());
  }
}

inline SigmaSpec best_tanh_submatrix() { return SigmaSpec::tanh(1.70975544, 0.58384115); }

}  // namespace nlap::fixtures
