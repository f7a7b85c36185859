#pragma once

// Nonlinearities sigma applied to the row sums of the observation.
//
// Every family is monotone non-decreasing and bounded, so edge-(sigma) and
// edge+(sigma) (the infimum and supremum of its range) exist in closed form.
// A SigmaSpec carries an additive offset; `shifted(c)` adds c to it, which
// moves the Laplacian by c*I without changing anything else.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nlap/errors.hpp"

namespace nlap {

namespace family {

struct Zero {};

struct Constant {
  double c = 0.0;
};

/// 0 for x < c, the ramp b(x-c)/a on [c, c+a], b for x > c+a.
struct ZShaped {
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;
};

/// a * tanh(b x).
struct Tanh {
  double a = 1.0;
  double b = 1.0;
};

/// values[k] on [knots[k-1], knots[k]) with knots[-1] = -inf, knots[m] = +inf.
/// values.size() == knots.size() + 1; right-continuous at the knots.
struct Step {
  std::vector<double> knots;
  std::vector<double> values;
};

/// Linear interpolation of (grid, values), constant beyond the ends.
struct Tabulated {
  std::vector<double> grid;
  std::vector<double> values;
};

}  // namespace family

using SigmaFamily = std::variant<family::Zero, family::Constant, family::ZShaped, family::Tanh,
                                 family::Step, family::Tabulated>;

struct SigmaEdges {
  double minus;
  double plus;
};

class SigmaSpec {
 public:
  SigmaSpec() = default;

  static SigmaSpec zero() { return SigmaSpec(family::Zero{}); }
  static SigmaSpec constant(double c) { return SigmaSpec(family::Constant{c}); }

  static SigmaSpec zshaped(double a, double b, double c) {
    if (!(a > 0.0) || !(b >= 0.0) || !std::isfinite(c) || !std::isfinite(a) || !std::isfinite(b)) {
      throw InvalidParameter("zshaped sigma requires a > 0, b >= 0 and finite c");
    }
    return SigmaSpec(family::ZShaped{a, b, c});
  }

  static SigmaSpec tanh(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
      throw InvalidParameter("tanh sigma requires a >= 0 and b >= 0");
    }
    return SigmaSpec(family::Tanh{a, b});
  }

  static SigmaSpec step(std::vector<double> knots, std::vector<double> values) {
    if (values.size() != knots.size() + 1) {
      throw InvalidParameter("step sigma needs exactly one more value than knots");
    }
    for (std::size_t i = 1; i < knots.size(); ++i) {
      if (!(knots[i] > knots[i - 1])) throw InvalidParameter("step knots must be strictly increasing");
    }
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (!(values[i] >= values[i - 1])) throw InvalidParameter("step values must be non-decreasing");
    }
    for (double v : knots) if (!std::isfinite(v)) throw InvalidParameter("step knots must be finite");
    for (double v : values) if (!std::isfinite(v)) throw InvalidParameter("step values must be finite");
    return SigmaSpec(family::Step{std::move(knots), std::move(values)});
  }

  /// Monotonicity of the table is not enforced here; validate_sigma reports it.
  static SigmaSpec tabulated(std::vector<double> grid, std::vector<double> values) {
    if (grid.empty() || grid.size() != values.size()) {
      throw InvalidParameter("tabulated sigma needs matching, nonempty grid and values");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (!(grid[i] > grid[i - 1])) throw InvalidParameter("tabulated grid must be strictly increasing");
    }
    return SigmaSpec(family::Tabulated{std::move(grid), std::move(values)});
  }

  const SigmaFamily& family() const noexcept { return family_; }
  double offset() const noexcept { return offset_; }

  /// sigma + c.
  SigmaSpec shifted(double c) const {
    SigmaSpec out = *this;
    out.offset_ += c;
    return out;
  }

  std::string family_name() const {
    return std::visit(
        [](const auto& f) -> std::string {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, family::Zero>) return "zero";
          else if constexpr (std::is_same_v<F, family::Constant>) return "constant";
          else if constexpr (std::is_same_v<F, family::ZShaped>) return "zshaped";
          else if constexpr (std::is_same_v<F, family::Tanh>) return "tanh";
          else if constexpr (std::is_same_v<F, family::Step>) return "step";
          else return "tabulated";
        },
        family_);
  }

  double operator()(double x) const { return base(x) + offset_; }

  /// Value without the offset.
  double base(double x) const {
    return std::visit(
        [x](const auto& f) -> double {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, family::Zero>) {
            return 0.0;
          } else if constexpr (std::is_same_v<F, family::Constant>) {
            return f.c;
          } else if constexpr (std::is_same_v<F, family::ZShaped>) {
            if (x < f.c) return 0.0;
            if (x > f.c + f.a) return f.b;
            return f.b * (x - f.c) / f.a;
          } else if constexpr (std::is_same_v<F, family::Tanh>) {
            return f.a * std::tanh(f.b * x);
          } else if constexpr (std::is_same_v<F, family::Step>) {
            const auto k = std::upper_bound(f.knots.begin(), f.knots.end(), x) - f.knots.begin();
            return f.values[static_cast<std::size_t>(k)];
          } else {
            if (x <= f.grid.front()) return f.values.front();
            if (x >= f.grid.back()) return f.values.back();
            const auto hi = static_cast<std::size_t>(
                std::upper_bound(f.grid.begin(), f.grid.end(), x) - f.grid.begin());
            const std::size_t lo = hi - 1;
            const double t = (x - f.grid[lo]) / (f.grid[hi] - f.grid[lo]);
            return f.values[lo] + t * (f.values[hi] - f.values[lo]);
          }
        },
        family_);
  }

  SigmaEdges edges() const {
    const SigmaEdges e = std::visit(
        [](const auto& f) -> SigmaEdges {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, family::Zero>) {
            return {0.0, 0.0};
          } else if constexpr (std::is_same_v<F, family::Constant>) {
            return {f.c, f.c};
          } else if constexpr (std::is_same_v<F, family::ZShaped>) {
            return {std::min(0.0, f.b), std::max(0.0, f.b)};
          } else if constexpr (std::is_same_v<F, family::Tanh>) {
            return {-f.a, f.a};
          } else if constexpr (std::is_same_v<F, family::Step>) {
            const auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
            return {*lo, *hi};
          } else {
            const auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
            return {*lo, *hi};
          }
        },
        family_);
    return {e.minus + offset_, e.plus + offset_};
  }

  /// True when the supremum is attained on a set of positive Gaussian measure.
  bool attains_sup_on_interval() const {
    return std::visit(
        [](const auto& f) -> bool {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, family::Tanh>) return f.a == 0.0 || f.b == 0.0;
          else return true;
        },
        family_);
  }

  friend bool operator==(const SigmaSpec& l, const SigmaSpec& r) {
    return l.offset_ == r.offset_ && l.to_json_family() == r.to_json_family();
  }

  nlohmann::json to_json() const {
    nlohmann::json j = to_json_family();
    if (offset_ != 0.0) j["params"]["shift"] = offset_;
    return j;
  }

  static SigmaSpec from_json(const nlohmann::json& j);

 private:
  explicit SigmaSpec(SigmaFamily f) : family_(std::move(f)) {}

  nlohmann::json to_json_family() const {
    nlohmann::json j;
    j["family"] = family_name();
    nlohmann::json p = nlohmann::json::object();
    std::visit(
        [&p](const auto& f) {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, family::Constant>) {
            p["c"] = f.c;
          } else if constexpr (std::is_same_v<F, family::ZShaped>) {
            p["a"] = f.a;
            p["b"] = f.b;
            p["c"] = f.c;
          } else if constexpr (std::is_same_v<F, family::Tanh>) {
            p["a"] = f.a;
            p["b"] = f.b;
          } else if constexpr (std::is_same_v<F, family::Step>) {
            p["knots"] = f.knots;
            p["values"] = f.values;
          } else if constexpr (std::is_same_v<F, family::Tabulated>) {
            p["grid"] = f.grid;
            p["values"] = f.values;
          }
        },
        family_);
    j["params"] = std::move(p);
    return j;
  }

  SigmaFamily family_ = family::Zero{};
  double offset_ = 0.0;
};

inline SigmaSpec SigmaSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family")) {
    throw InvalidParameter("sigma descriptor must be an object with a \"family\" field");
  }
  const std::string fam = j.at("family").get<std::string>();
  const nlohmann::json p = j.value("params", nlohmann::json::object());
  auto num = [&p, &fam](const char* key) {
    if (!p.contains(key)) throw InvalidParameter("sigma family '" + fam + "' is missing parameter '" + key + "'");
    return p.at(key).get<double>();
  };
  SigmaSpec s;
  if (fam == "zero") s = zero();
  else if (fam == "constant") s = constant(num("c"));
  else if (fam == "zshaped") s = zshaped(num("a"), num("b"), num("c"));
  else if (fam == "tanh") s = tanh(num("a"), num("b"));
  else if (fam == "step") s = step(p.at("knots").get<std::vector<double>>(), p.at("values").get<std::vector<double>>());
  else if (fam == "tabulated") s = tabulated(p.at("grid").get<std::vector<double>>(), p.at("values").get<std::vector<double>>());
  else throw InvalidParameter("unknown sigma family '" + fam + "'");
  if (p.contains("shift")) s = s.shifted(p.at("shift").get<double>());
  return s;
}

inline double eval_sigma(const SigmaSpec& sigma, double x) { return sigma(x); }

inline SigmaEdges sigma_edges(const SigmaSpec& sigma) { return sigma.edges(); }

/// First index pair (i, i+1) where a table decreases.
class MonotonicityViolation : public ValidationError {
 public:
  MonotonicityViolation(std::size_t first, std::size_t second)
      : ValidationError("sigma is not monotone: value decreases between indices (" + std::to_string(first) +
                        "," + std::to_string(second) + ")"),
        first_(first),
        second_(second) {}
  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }

 private:
  std::size_t first_, second_;
};

struct SigmaValidation {
  bool monotone = true;
  /// First grid pair that decreases by more than the slack, if any.
  std::optional<std::pair<std::size_t, std::size_t>> violation;
  double bound = 0.0;          ///< K = sup |sigma|
  double lipschitz = 0.0;      ///< largest finite-difference slope on the grid
  bool lipschitz_finite = true;
  /// c such that sigma - c has a range symmetric about 0.
  double range_center = 0.0;
};

/**
 * Grid check of the standing assumptions on sigma: monotone, bounded and
 * Lipschitz. Step functions are reported with an infinite Lipschitz constant
 * rather than rejected. Tabulated input with a decreasing table throws
 * MonotonicityViolation naming the offending pair.
 */
inline SigmaValidation validate_sigma(const SigmaSpec& sigma, double grid_halfwidth, int grid_points) {
  if (grid_points < 2) throw InvalidParameter("validate_sigma needs at least 2 grid points");
  if (!(grid_halfwidth > 0.0)) throw InvalidParameter("validate_sigma needs a positive grid half-width");

  if (const auto* tab = std::get_if<family::Tabulated>(&sigma.family())) {
    for (std::size_t i = 1; i < tab->values.size(); ++i) {
      if (tab->values[i] < tab->values[i - 1]) throw MonotonicityViolation(i - 1, i);
    }
  }

  SigmaValidation r;
  const SigmaEdges e = sigma.edges();
  r.bound = std::max(std::abs(e.minus), std::abs(e.plus));
  r.range_center = 0.5 * (e.minus + e.plus);

  constexpr double kSlack = 1e-9;
  const double h = 2.0 * grid_halfwidth / (grid_points - 1);
  double prev = sigma(-grid_halfwidth);
  for (int i = 1; i < grid_points; ++i) {
    const double x = -grid_halfwidth + i * h;
    const double cur = sigma(x);
    if (cur < prev - kSlack && r.monotone) {
      r.monotone = false;
      r.violation = std::make_pair(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(i));
    }
    r.lipschitz = std::max(r.lipschitz, std::abs(cur - prev) / h);
    prev = cur;
  }
  if (const auto* st = std::get_if<family::Step>(&sigma.family())) {
    if (st->values.front() != st->values.back()) {
      r.lipschitz = std::numeric_limits<double>::infinity();
      r.lipschitz_finite = false;
    }
  }
  return r;
}

}  // namespace nlap
