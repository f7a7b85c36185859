#pragma once

// Samplers for the observation ensembles.
//
//   Y_hat = Y / sqrt(n) = beta * x x^T + W_hat,  W_hat = W / sqrt(n),
//
// with W from the GOE (off-diagonal variance 1, diagonal variance 2) and
// x = y / |y|, y_i = eps_i * z_i, z_i ~ eta, eps chosen by the sparsity mode.
// Each master seed is split into the sub-streams "noise", "signal-support"
// and "signal-values", so changing beta alone leaves W_hat untouched.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nlap/errors.hpp"
#include "nlap/linalg.hpp"
#include "nlap/rng.hpp"

namespace nlap {

namespace eta {

struct PointMass {
  double c = 1.0;
};

/// Law of |g|, g ~ N(0, 1).
struct HalfNormal {};

struct Discrete {
  std::vector<double> atoms;
  std::vector<double> weights;  ///< normalized on construction
};

}  // namespace eta

using EtaDistribution = std::variant<eta::PointMass, eta::HalfNormal, eta::Discrete>;

inline EtaDistribution make_discrete_eta(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.empty() || atoms.size() != weights.size()) {
    throw InvalidParameter("discrete eta needs matching, nonempty atoms and weights");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidParameter("discrete eta weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw InvalidParameter("discrete eta weights must not all be zero");
  for (double& w : weights) w /= total;
  return eta::Discrete{std::move(atoms), std::move(weights)};
}

inline double eta_m1(const EtaDistribution& e) {
  return std::visit(
      [](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, eta::PointMass>) return d.c;
        else if constexpr (std::is_same_v<D, eta::HalfNormal>) return std::sqrt(2.0 / std::numbers::pi);
        else {
          double s = 0.0;
          for (std::size_t i = 0; i < d.atoms.size(); ++i) s += d.weights[i] * d.atoms[i];
          return s;
        }
      },
      e);
}

inline double eta_m2(const EtaDistribution& e) {
  return std::visit(
      [](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, eta::PointMass>) return d.c * d.c;
        else if constexpr (std::is_same_v<D, eta::HalfNormal>) return 1.0;
        else {
          double s = 0.0;
          for (std::size_t i = 0; i < d.atoms.size(); ++i) s += d.weights[i] * d.atoms[i] * d.atoms[i];
          return s;
        }
      },
      e);
}

enum class Sparsity { RandomSubset, IndependentEntries };

/// How the sparsity level is fixed: a constant, or p = beta / sqrt(n) as in
/// the Gaussian planted submatrix model.
enum class SparsityScaling { Fixed, BetaOverSqrtN };

struct ModelSpec {
  EtaDistribution eta = eta::PointMass{1.0};
  double p = 0.1;
  Sparsity sparsity = Sparsity::RandomSubset;
  SparsityScaling scaling = SparsityScaling::Fixed;
  double beta = 0.0;

  double m1() const { return eta_m1(eta); }
  double m2() const { return eta_m2(eta); }

  double sparsity_level(std::size_t n) const {
    if (scaling == SparsityScaling::BetaOverSqrtN) {
      return std::min(1.0, beta / std::sqrt(static_cast<double>(n)));
    }
    return p;
  }

  ModelSpec with_beta(double b) const {
    ModelSpec m = *this;
    m.beta = b;
    return m;
  }

  void validate() const {
    if (!(m1() > 0.0)) throw InvalidParameter("eta must have a positive mean");
    if (std::holds_alternative<eta::PointMass>(eta) && !(std::get<eta::PointMass>(eta).c > 0.0)) {
      throw InvalidParameter("point-mass eta needs c > 0");
    }
    if (scaling == SparsityScaling::Fixed && !(p > 0.0 && p <= 1.0)) {
      throw InvalidParameter("sparsity level p must lie in (0, 1]");
    }
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidParameter("beta must be finite and >= 0");
  }

  /// eta = delta_1, random subset of size beta*sqrt(n).
  static ModelSpec planted_submatrix(double beta = 0.0) {
    ModelSpec m;
    m.eta = eta::PointMass{1.0};
    m.sparsity = Sparsity::RandomSubset;
    m.scaling = SparsityScaling::BetaOverSqrtN;
    m.beta = beta;
    return m;
  }

  static ModelSpec half_normal(double p = 0.05, double beta = 0.0) {
    ModelSpec m;
    m.eta = eta::HalfNormal{};
    m.p = p;
    m.beta = beta;
    return m;
  }

  nlohmann::json to_json() const;
  static ModelSpec from_json(const nlohmann::json& j);
};

inline nlohmann::json ModelSpec::to_json() const {
  nlohmann::json j;
  std::visit(
      [&j](const auto& d) {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, eta::PointMass>) j["eta"] = {{"kind", "point_mass"}, {"c", d.c}};
        else if constexpr (std::is_same_v<D, eta::HalfNormal>) j["eta"] = {{"kind", "half_normal"}};
        else j["eta"] = {{"kind", "discrete"}, {"atoms", d.atoms}, {"weights", d.weights}};
      },
      eta);
  if (scaling == SparsityScaling::BetaOverSqrtN) j["p"] = "beta/sqrt(n)";
  else j["p"] = p;
  j["sparsity"] = sparsity == Sparsity::RandomSubset ? "random_subset" : "independent_entries";
  j["beta"] = beta;
  return j;
}

inline ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "submatrix" || name == "planted_submatrix") return planted_submatrix();
    if (name == "half_normal" || name == "halfnormal") return half_normal();
    throw InvalidParameter("unknown model preset '" + name + "'");
  }
  ModelSpec m;
  const auto& e = j.at("eta");
  const std::string kind = e.is_string() ? e.get<std::string>() : e.at("kind").get<std::string>();
  if (kind == "point_mass") m.eta = eta::PointMass{e.is_object() ? e.value("c", 1.0) : 1.0};
  else if (kind == "half_normal") m.eta = eta::HalfNormal{};
  else if (kind == "discrete") m.eta = make_discrete_eta(e.at("atoms").get<std::vector<double>>(), e.at("weights").get<std::vector<double>>());
  else throw InvalidParameter("unknown eta kind '" + kind + "'");
  if (j.contains("p")) {
    if (j.at("p").is_string()) {
      if (j.at("p").get<std::string>() != "beta/sqrt(n)") throw InvalidParameter("p must be a number or \"beta/sqrt(n)\"");
      m.scaling = SparsityScaling::BetaOverSqrtN;
    } else {
      m.p = j.at("p").get<double>();
    }
  }
  const std::string sp = j.value("sparsity", std::string("random_subset"));
  if (sp == "random_subset") m.sparsity = Sparsity::RandomSubset;
  else if (sp == "independent_entries") m.sparsity = Sparsity::IndependentEntries;
  else throw InvalidParameter("unknown sparsity mode '" + sp + "'");
  m.beta = j.value("beta", 0.0);
  m.validate();
  return m;
}

/**
 * Whether (model, n) satisfies the sparsity window p >= (log n)^6 / n under
 * which the limit theorems are proven. Finite-n runs almost never do; the
 * harness records the answer instead of refusing the run.
 */
inline bool in_proven_regime(const ModelSpec& model, std::size_t n) {
  const double p = model.sparsity_level(n);
  const double ln = std::log(static_cast<double>(n));
  return p * static_cast<double>(n) >= std::pow(ln, 6.0) && p < 1.0;
}

struct Instance {
  std::size_t n = 0;
  Matrix y_hat;
  Vector x;  ///< unit hidden signal, zero when beta == 0
  std::uint64_t seed = 0;
  ModelSpec model;

  /// Support of the hidden signal.
  std::vector<std::size_t> support() const {
    std::vector<std::size_t> s;
    for (Eigen::Index i = 0; i < x.size(); ++i) if (x(i) != 0.0) s.push_back(static_cast<std::size_t>(i));
    return s;
  }
};

/// W / sqrt(n) for W from the GOE. The lower triangle is drawn column by column.
inline Matrix sample_goe(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidDimension("sample_goe: n must be at least 1");
  RandomStream rs(derive_seed(seed, "noise"));
  const auto N = static_cast<Eigen::Index>(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double diag_scale = std::numbers::sqrt2 * scale;
  Matrix w(N, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    w(j, j) = diag_scale * rs.normal();
    for (Eigen::Index i = j + 1; i < N; ++i) {
      const double v = scale * rs.normal();
      w(i, j) = v;
      w(j, i) = v;
    }
  }
  return w;
}

namespace detail {

inline double draw_eta(const EtaDistribution& e, RandomStream& rs) {
  return std::visit(
      [&rs](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, eta::PointMass>) return d.c;
        else if constexpr (std::is_same_v<D, eta::HalfNormal>) return std::abs(rs.normal());
        else {
          const double u = rs.uniform();
          double acc = 0.0;
          for (std::size_t i = 0; i < d.atoms.size(); ++i) {
            acc += d.weights[i];
            if (u < acc) return d.atoms[i];
          }
          return d.atoms.back();
        }
      },
      e);
}

/// k distinct indices of [0, n), uniformly, sorted ascending.
inline std::vector<std::size_t> random_subset(std::size_t n, std::size_t k, RandomStream& rs) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rs.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline std::size_t subset_size(double p, std::size_t n) {
  return static_cast<std::size_t>(std::llround(p * static_cast<double>(n)));
}

}  // namespace detail

struct SignalDraw {
  Vector x;  ///< y / |y|
  Vector y;  ///< unnormalized entries eps_i * z_i
};

inline constexpr int kSignalRetries = 16;

inline SignalDraw sample_signal(const ModelSpec& model, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidDimension("sample_signal: n must be at least 1");
  model.validate();
  const double p = model.sparsity_level(n);
  if (model.sparsity == Sparsity::RandomSubset && detail::subset_size(p, n) < 1) {
    throw InvalidParameter("sample_signal: round(n*p) is zero under the random-subset model");
  }
  for (int attempt = 0; attempt < kSignalRetries; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : derive_seed(seed, static_cast<std::uint64_t>(attempt));
    RandomStream support_rs(derive_seed(s, "signal-support"));
    RandomStream values_rs(derive_seed(s, "signal-values"));
    std::vector<std::size_t> support;
    if (model.sparsity == Sparsity::RandomSubset) {
      support = detail::random_subset(n, detail::subset_size(p, n), support_rs);
    } else {
      for (std::size_t i = 0; i < n; ++i) if (support_rs.bernoulli(p)) support.push_back(i);
    }
    Vector y = Vector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i : support) y(static_cast<Eigen::Index>(i)) = detail::draw_eta(model.eta, values_rs);
    const double norm = y.norm();
    if (norm > 0.0) return {y / norm, y};
  }
  throw NumericalError("sample_signal: drew an all-zero signal " + std::to_string(kSignalRetries) + " times");
}

inline Instance sample_observation(const ModelSpec& model, std::size_t n, std::uint64_t seed) {
  model.validate();
  Instance inst;
  inst.n = n;
  inst.seed = seed;
  inst.model = model;
  inst.y_hat = sample_goe(n, seed);
  const auto N = static_cast<Eigen::Index>(n);
  if (model.beta == 0.0) {
    inst.x = Vector::Zero(N);
    return inst;
  }
  inst.x = sample_signal(model, n, seed).x;
  const double beta = model.beta;
  for (Eigen::Index j = 0; j < N; ++j) {
    const double bx = beta * inst.x(j);
    if (bx == 0.0) continue;
    for (Eigen::Index i = j; i < N; ++i) {
      const double v = inst.y_hat(i, j) + bx * inst.x(i);
      inst.y_hat(i, j) = v;
      inst.y_hat(j, i) = v;
    }
  }
  return inst;
}

/**
 * Planted clique in G(n, 1/2), encoded by the Seidel matrix (+1 edge,
 * -1 non-edge, 0 diagonal), normalized by sqrt(n). The clique has
 * round(beta*sqrt(n)) vertices.
 */
inline Instance sample_planted_clique(std::size_t n, double beta, std::uint64_t seed) {
  if (n == 0) throw InvalidDimension("sample_planted_clique: n must be at least 1");
  if (!(beta >= 0.0)) throw InvalidParameter("sample_planted_clique: beta must be >= 0");
  const double size = beta * std::sqrt(static_cast<double>(n));
  if (size > static_cast<double>(n)) throw InvalidParameter("sample_planted_clique: beta*sqrt(n) exceeds n");
  const std::size_t k = static_cast<std::size_t>(std::llround(size));

  const auto N = static_cast<Eigen::Index>(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  RandomStream noise(derive_seed(seed, "noise"));
  Matrix y = Matrix::Zero(N, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index i = j + 1; i < N; ++i) {
      const double v = (noise.next_u64() >> 63) ? scale : -scale;
      y(i, j) = v;
      y(j, i) = v;
    }
  }
  RandomStream support_rs(derive_seed(seed, "signal-support"));
  const auto clique = detail::random_subset(n, k, support_rs);
  Vector x = Vector::Zero(N);
  for (std::size_t a : clique) {
    x(static_cast<Eigen::Index>(a)) = 1.0 / std::sqrt(static_cast<double>(k));
    for (std::size_t b : clique) {
      if (a != b) y(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = scale;
    }
  }
  Instance inst;
  inst.n = n;
  inst.y_hat = std::move(y);
  inst.x = std::move(x);
  inst.seed = seed;
  inst.model = ModelSpec::planted_submatrix(beta);
  inst.model.scaling = SparsityScaling::Fixed;
  inst.model.p = k > 0 ? static_cast<double>(k) / static_cast<double>(n) : 1.0;
  return inst;
}

// ---------------------------------------------------------------------------
// Serialization.
//
// Binary container, little-endian:
//   8 bytes  magic "NLAPINST"
//   u32      format version (1)
//   u32      reserved (0)
//   u64      n
//   u64      seed
//   u64      length L of the model descriptor
//   L bytes  model descriptor (JSON text)
//   f64[n(n+1)/2]  lower triangle of y_hat, row-major: (0,0),(1,0),(1,1),(2,0),...
//   f64[n]   x

inline constexpr char kInstanceMagic[8] = {'N', 'L', 'A', 'P', 'I', 'N', 'S', 'T'};
inline constexpr std::uint32_t kInstanceFormatVersion = 1;

namespace detail {

template <class T>
void put_le(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes{};
  is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  if (!is) throw IoError("instance container truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

}  // namespace detail

inline void write_instance(std::ostream& os, const Instance& inst) {
  os.write(kInstanceMagic, sizeof kInstanceMagic);
  detail::put_le<std::uint32_t>(os, kInstanceFormatVersion);
  detail::put_le<std::uint32_t>(os, 0);
  detail::put_le<std::uint64_t>(os, inst.n);
  detail::put_le<std::uint64_t>(os, inst.seed);
  const std::string model = inst.model.to_json().dump();
  detail::put_le<std::uint64_t>(os, model.size());
  os.write(model.data(), static_cast<std::streamsize>(model.size()));
  const auto N = static_cast<Eigen::Index>(inst.n);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) detail::put_le<double>(os, inst.y_hat(i, j));
  for (Eigen::Index i = 0; i < N; ++i) detail::put_le<double>(os, inst.x(i));
  if (!os) throw IoError("failed writing instance container");
}

inline Instance read_instance(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kInstanceMagic, sizeof magic) != 0) throw IoError("not an instance container (bad magic)");
  const auto version = detail::get_le<std::uint32_t>(is);
  if (version != kInstanceFormatVersion) throw IoError("unsupported instance container version " + std::to_string(version));
  (void)detail::get_le<std::uint32_t>(is);
  Instance inst;
  inst.n = detail::get_le<std::uint64_t>(is);
  inst.seed = detail::get_le<std::uint64_t>(is);
  const auto len = detail::get_le<std::uint64_t>(is);
  std::string model(len, '\0');
  is.read(model.data(), static_cast<std::streamsize>(len));
  if (!is) throw IoError("instance container truncated in model descriptor");
  inst.model = ModelSpec::from_json(nlohmann::json::parse(model));
  const auto N = static_cast<Eigen::Index>(inst.n);
  inst.y_hat.resize(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = detail::get_le<double>(is);
      inst.y_hat(i, j) = v;
      inst.y_hat(j, i) = v;
    }
  }
  inst.x.resize(N);
  for (Eigen::Index i = 0; i < N; ++i) inst.x(i) = detail::get_le<double>(is);
  return inst;
}

inline void save_instance(const std::string& path, const Instance& inst) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_instance(os, inst);
}

inline Instance load_instance(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return read_instance(is);
}

inline constexpr std::size_t kMaxJsonInstanceDim = 64;

/// JSON form for small golden instances (n <= 64).
inline nlohmann::json instance_to_json(const Instance& inst) {
  if (inst.n > kMaxJsonInstanceDim) throw InvalidDimension("JSON instance export is limited to n <= 64");
  nlohmann::json j;
  j["n"] = inst.n;
  j["seed"] = inst.seed;
  j["model"] = inst.model.to_json();
  std::vector<double> lower;
  const auto N = static_cast<Eigen::Index>(inst.n);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j2 = 0; j2 <= i; ++j2) lower.push_back(inst.y_hat(i, j2));
  j["y_hat_lower"] = lower;
  j["x"] = std::vector<double>(inst.x.data(), inst.x.data() + inst.x.size());
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
  Instance inst;
  inst.n = j.at("n").get<std::size_t>();
  if (inst.n > kMaxJsonInstanceDim) throw InvalidDimension("JSON instance import is limited to n <= 64");
  inst.seed = j.at("seed").get<std::uint64_t>();
  inst.model = ModelSpec::from_json(j.at("model"));
  const auto lower = j.at("y_hat_lower").get<std::vector<double>>();
  const auto N = static_cast<Eigen::Index>(inst.n);
  if (lower.size() != inst.n * (inst.n + 1) / 2) throw IoError("y_hat_lower has the wrong length");
  inst.y_hat.resize(N, N);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index c = 0; c <= i; ++c) {
      inst.y_hat(i, c) = lower[k];
      inst.y_hat(c, i) = lower[k];
      ++k;
    }
  }
  const auto x = j.at("x").get<std::vector<double>>();
  if (x.size() != inst.n) throw IoError("x has the wrong length");
  inst.x = Eigen::Map<const Vector>(x.data(), N);
  return inst;
}

}  // namespace nlap
