#pragma once

// Monte Carlo harness: phase-transition sweeps, spectrum histograms with the
// analytic bulk density, detection error rates and threshold tables.
//
// Trial t of a sweep uses the seed derive_seed(master, t) at every beta, so
// the noise matrix of trial t is shared across the beta grid.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlap/errors.hpp"
#include "nlap/laplacian.hpp"
#include "nlap/models.hpp"
#include "nlap/nonlin.hpp"
#include "nlap/parallel.hpp"
#include "nlap/rng.hpp"
#include "nlap/spectra.hpp"
#include "nlap/theory.hpp"
#include "nlap/version.hpp"

namespace nlap {

enum class Statistic { Lambda1L, Lambda1Y, Overlap, MaxRow };

inline std::string statistic_name(Statistic s) {
  switch (s) {
    case Statistic::Lambda1L: return "lambda1_L";
    case Statistic::Lambda1Y: return "lambda1_Y";
    case Statistic::Overlap: return "overlap";
    case Statistic::MaxRow: return "max_row";
  }
  return "?";
}

inline Statistic parse_statistic(const std::string& s) {
  if (s == "lambda1_L") return Statistic::Lambda1L;
  if (s == "lambda1_Y") return Statistic::Lambda1Y;
  if (s == "overlap") return Statistic::Overlap;
  if (s == "max_row") return Statistic::MaxRow;
  throw InvalidParameter("unknown statistic '" + s + "' (expected lambda1_L, lambda1_Y, overlap or max_row)");
}

/// Failure inside one Monte Carlo trial, tagged with its position.
class TrialFailure : public Error {
 public:
  TrialFailure(double beta, std::size_t trial, const std::string& what)
      : Error("trial " + std::to_string(trial) + " at beta = " + std::to_string(beta) + ": " + what),
        beta_(beta),
        trial_(trial) {}
  double beta() const noexcept { return beta_; }
  std::size_t trial() const noexcept { return trial_; }

 private:
  double beta_;
  std::size_t trial_;
};

inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    v[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return v;
}

inline constexpr std::size_t kDefaultBetaPoints = 25;

struct SweepConfig {
  ModelSpec model = ModelSpec::planted_submatrix();
  SigmaSpec sigma;
  std::size_t n = 500;
  std::vector<double> beta_grid = linspace(0.0, 2.0, kDefaultBetaPoints);
  std::size_t trials = 20;
  std::uint64_t seed = 1;
  bool use_compressed = true;
  std::vector<Statistic> statistics{Statistic::Lambda1L, Statistic::Overlap};
  bool theory_overlay = true;
  QuadratureConfig quadrature;
  unsigned threads = 0;  ///< 0: worker_count()

  void validate() const {
    if (n < 2) throw InvalidDimension("sweep: n must be at least 2");
    if (trials < 1) throw InvalidParameter("sweep: trials must be >= 1");
    if (beta_grid.empty()) throw InvalidParameter("sweep: beta grid is empty");
    for (std::size_t i = 0; i < beta_grid.size(); ++i) {
      if (!(beta_grid[i] >= 0.0) || !std::isfinite(beta_grid[i])) throw InvalidParameter("sweep: beta values must be finite and >= 0");
      if (i > 0 && !(beta_grid[i] > beta_grid[i - 1])) throw InvalidParameter("sweep: beta grid must be ascending");
    }
    if (statistics.empty()) throw InvalidParameter("sweep: no statistics selected");
    model.validate();
    quadrature.validate();
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["model"] = model.to_json();
    j["sigma"] = sigma.to_json();
    j["n"] = n;
    j["beta_grid"] = beta_grid;
    j["trials"] = trials;
    j["seed"] = seed;
    j["use_compressed"] = use_compressed;
    std::vector<std::string> names;
    for (Statistic s : statistics) names.push_back(statistic_name(s));
    j["statistics"] = names;
    j["theory_overlay"] = theory_overlay;
    j["quadrature"] = {{"hermite_nodes", quadrature.hermite_nodes},
                       {"eta_nodes", quadrature.eta_nodes},
                       {"panel_nodes", quadrature.panel_nodes},
                       {"tol_root", quadrature.tol_root},
                       {"tol_fixed_point", quadrature.tol_fixed_point},
                       {"max_fixed_point_iters", quadrature.max_fixed_point_iters},
                       {"damping", quadrature.damping},
                       {"inversion_epsilon", quadrature.inversion_epsilon}};
    return j;
  }
};

/// Rectangular numeric report: named columns, one row per record.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw InvalidParameter("table has no column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
  }
  double at(std::size_t row, const std::string& name) const { return rows.at(row).at(column(name)); }
};

struct SweepRow {
  double beta = 0.0;
  std::size_t trials = 0;
  std::vector<double> mean;  ///< per column of SweepResult::columns
  std::vector<double> stddev;
  double theory_theta = std::numeric_limits<double>::quiet_NaN();
  double theory_lambda1 = std::numeric_limits<double>::quiet_NaN();
};

struct SweepResult {
  std::vector<std::string> columns;  ///< statistic columns; "overlap" also yields "overlap2"
  std::vector<SweepRow> rows;
  double theory_beta_star = std::numeric_limits<double>::quiet_NaN();
  double theory_bulk_edge = std::numeric_limits<double>::quiet_NaN();
  /// raw[row][trial][column]
  std::vector<std::vector<std::vector<double>>> raw;

  double mean(std::size_t row, const std::string& column) const {
    const auto it = std::find(columns.begin(), columns.end(), column);
    if (it == columns.end()) throw InvalidParameter("sweep has no statistic '" + column + "'");
    return rows.at(row).mean.at(static_cast<std::size_t>(it - columns.begin()));
  }

  Table to_table() const {
    Table t;
    t.columns = {"beta", "trials"};
    for (const auto& c : columns) {
      t.columns.push_back(c + "_mean");
      t.columns.push_back(c + "_std");
    }
    for (const char* c : {"theory_theta", "theory_lambda1", "theory_beta_star", "theory_bulk_edge"}) t.columns.push_back(c);
    for (const auto& r : rows) {
      std::vector<double> v{r.beta, static_cast<double>(r.trials)};
      for (std::size_t i = 0; i < columns.size(); ++i) {
        v.push_back(r.mean[i]);
        v.push_back(r.stddev[i]);
      }
      v.push_back(r.theory_theta);
      v.push_back(r.theory_lambda1);
      v.push_back(theory_beta_star);
      v.push_back(theory_bulk_edge);
      t.rows.push_back(std::move(v));
    }
    return t;
  }
};

/// Top eigenpair of the (compressed) sigma-Laplacian, with the eigenvector in R^n.
struct LaplacianTop {
  double lambda1 = 0.0;
  Vector v1;
};

inline LaplacianTop laplacian_top(const Matrix& y_hat, const SigmaSpec& sigma, bool compressed) {
  const Matrix l = build_laplacian(y_hat, sigma);
  if (!compressed) {
    TopEigenpair top = top_eigenpair(l);
    return {top.lambda1, std::move(top.v1)};
  }
  const OnesReflector h(l.rows());
  TopEigenpair top = top_eigenpair(compress(l));
  return {top.lambda1, h.lift(top.v1)};
}

namespace detail {

inline double sample_mean(const std::vector<double>& v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  return static_cast<double>(s / static_cast<long double>(v.size()));
}

inline double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = sample_mean(v);
  long double s = 0.0L;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(static_cast<double>(s / static_cast<long double>(v.size() - 1)));
}

}  // namespace detail

inline std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) {
  return derive_seed(master, static_cast<std::uint64_t>(trial));
}

inline SweepResult run_phase_sweep(const SweepConfig& cfg) {
  cfg.validate();
  SweepResult out;
  for (Statistic s : cfg.statistics) {
    out.columns.push_back(statistic_name(s));
    if (s == Statistic::Overlap) out.columns.push_back("overlap2");
  }
  const std::size_t nb = cfg.beta_grid.size(), nt = cfg.trials, nc = out.columns.size();
  out.raw.assign(nb, std::vector<std::vector<double>>(nt, std::vector<double>(nc, 0.0)));

  parallel_for(
      nb * nt,
      [&](std::size_t cell) {
        const std::size_t ib = cell / nt, t = cell % nt;
        const double beta = cfg.beta_grid[ib];
        try {
          const Instance inst = sample_observation(cfg.model.with_beta(beta), cfg.n, trial_seed(cfg.seed, t));
          std::optional<LaplacianTop> top;
          auto need_top = [&] {
            if (!top) top = laplacian_top(inst.y_hat, cfg.sigma, cfg.use_compressed);
            return *top;
          };
          std::vector<double>& row = out.raw[ib][t];
          std::size_t c = 0;
          for (Statistic s : cfg.statistics) {
            switch (s) {
              case Statistic::Lambda1L: row[c++] = need_top().lambda1; break;
              case Statistic::Lambda1Y: row[c++] = top_eigenpair(inst.y_hat).lambda1; break;
              case Statistic::MaxRow: row[c++] = max_row_statistic(inst.y_hat); break;
              case Statistic::Overlap: {
                const double ov = beta > 0.0 ? overlap(need_top().v1, inst.x) : std::numeric_limits<double>::quiet_NaN();
                row[c++] = ov;
                row[c++] = ov * ov;
                break;
              }
            }
          }
        } catch (const Error& e) {
          throw TrialFailure(beta, t, e.what());
        }
      },
      cfg.threads == 0 ? worker_count() : cfg.threads);

  std::optional<ThresholdSolver> solver;
  if (cfg.theory_overlay) {
    solver.emplace(cfg.sigma, cfg.model, cfg.quadrature);
    out.theory_beta_star = solver->beta_star();
    out.theory_bulk_edge = solver->bulk_edge();
  }
  for (std::size_t ib = 0; ib < nb; ++ib) {
    SweepRow r;
    r.beta = cfg.beta_grid[ib];
    r.trials = nt;
    for (std::size_t c = 0; c < nc; ++c) {
      std::vector<double> col(nt);
      for (std::size_t t = 0; t < nt; ++t) col[t] = out.raw[ib][t][c];
      r.mean.push_back(detail::sample_mean(col));
      r.stddev.push_back(detail::sample_std(col));
    }
    if (solver) {
      if (r.beta > 0.0) {
        r.theory_theta = solver->theta(r.beta);
        const bool outlier = r.beta > out.theory_beta_star;
        r.theory_lambda1 = outlier ? solver->h(r.theory_theta) : out.theory_bulk_edge;
      } else {
        r.theory_theta = solver->edge_plus();
        r.theory_lambda1 = out.theory_bulk_edge;
      }
    }
    out.rows.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------

inline constexpr int kDefaultBins = 60;
inline constexpr double kHistogramPad = 0.25;
inline constexpr std::size_t kW1Quantiles = 512;
inline constexpr std::size_t kDensityGridPoints = 1500;

struct SpectrumReport {
  std::vector<double> eigenvalues;  ///< descending
  std::vector<double> bin_edges;    ///< bins + 1 entries
  std::vector<double> histogram;    ///< normalized to unit area
  std::vector<double> analytic_at_centers;
  std::vector<double> density_x;
  std::vector<double> density;
  double lambda1 = 0.0;
  double bulk_edge_plus = 0.0;
  double lambda1_predicted = 0.0;
  double wasserstein1 = 0.0;
  bool density_converged = true;

  Table histogram_table() const {
    Table t;
    t.columns = {"bin_lo", "bin_hi", "empirical", "analytic"};
    for (std::size_t i = 0; i + 1 < bin_edges.size(); ++i) {
      t.rows.push_back({bin_edges[i], bin_edges[i + 1], histogram[i], analytic_at_centers[i]});
    }
    return t;
  }
};

/// Distribution function from density samples on an ascending grid (trapezoid rule), scaled to end at 1.
inline std::vector<double> cdf_from_density(const std::vector<double>& x, const std::vector<double>& rho) {
  if (x.size() != rho.size() || x.size() < 2) throw InvalidDimension("cdf_from_density: need matching grids of size >= 2");
  std::vector<double> cdf(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) cdf[i] = cdf[i - 1] + 0.5 * (rho[i] + rho[i - 1]) * (x[i] - x[i - 1]);
  const double total = cdf.back();
  if (!(total > 0.0)) throw NumericalError("cdf_from_density: density has zero mass on the grid");
  for (double& c : cdf) c /= total;
  return cdf;
}

/**
 * W1 between the empirical law of `samples` and the law with distribution
 * function `cdf` on grid `x`, by matching quantiles at levels (k + 1/2)/K.
 */
inline double wasserstein1_quantiles(std::vector<double> samples, const std::vector<double>& x,
                                     const std::vector<double>& cdf, std::size_t levels = kW1Quantiles) {
  if (samples.empty()) throw InvalidParameter("wasserstein1_quantiles: no samples");
  std::sort(samples.begin(), samples.end());
  const std::size_t m = samples.size();
  long double total = 0.0L;
  for (std::size_t k = 0; k < levels; ++k) {
    const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(levels);
    const std::size_t idx = std::min(m - 1, static_cast<std::size_t>(u * static_cast<double>(m)));
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    double q;
    if (it == cdf.begin()) q = x.front();
    else if (it == cdf.end()) q = x.back();
    else {
      const std::size_t j = static_cast<std::size_t>(it - cdf.begin());
      const double c0 = cdf[j - 1], c1 = cdf[j];
      q = c1 > c0 ? x[j - 1] + (u - c0) / (c1 - c0) * (x[j] - x[j - 1]) : x[j];
    }
    total += std::abs(samples[idx] - q);
  }
  return static_cast<double>(total / static_cast<long double>(levels));
}

inline SpectrumReport run_spectrum_experiment(const ModelSpec& model, const SigmaSpec& sigma, std::size_t n,
                                              std::uint64_t seed, int bins = kDefaultBins,
                                              const QuadratureConfig& q = {}) {
  if (bins < 1) throw InvalidParameter("run_spectrum_experiment: bins must be >= 1");
  if (n < 2) throw InvalidDimension("run_spectrum_experiment: n must be at least 2");
  SpectrumReport r;
  const Instance inst = sample_observation(model, n, trial_seed(seed, 0));
  const Vector ev = full_spectrum(build_compressed(inst.y_hat, sigma));
  r.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  r.lambda1 = r.eigenvalues.front();

  const double lo = r.eigenvalues.back() - kHistogramPad, hi = r.eigenvalues.front() + kHistogramPad;
  r.bin_edges = linspace(lo, hi, static_cast<std::size_t>(bins) + 1);
  r.histogram.assign(static_cast<std::size_t>(bins), 0.0);
  const double width = (hi - lo) / bins;
  for (double v : r.eigenvalues) {
    const auto b = std::min<std::size_t>(static_cast<std::size_t>(bins) - 1, static_cast<std::size_t>((v - lo) / width));
    r.histogram[b] += 1.0;
  }
  for (double& h : r.histogram) h /= static_cast<double>(r.eigenvalues.size()) * width;

  // The bulk lies inside [edge-(sigma) - 2, edge+(sigma) + 2].
  const SigmaEdges e = sigma.edges();
  r.density_x = linspace(e.minus - 2.5, e.plus + 2.5, kDensityGridPoints);
  const DensityResult d = free_conv_density(sigma, r.density_x, q);
  r.density = d.density;
  r.density_converged = d.all_converged();
  for (std::size_t i = 0; i < static_cast<std::size_t>(bins); ++i) {
    const double c = 0.5 * (r.bin_edges[i] + r.bin_edges[i + 1]);
    double v = 0.0;
    if (c > r.density_x.front() && c < r.density_x.back()) {
      const double step = r.density_x[1] - r.density_x[0];
      const auto j = static_cast<std::size_t>((c - r.density_x.front()) / step);
      const double t = (c - r.density_x[j]) / step;
      v = (1.0 - t) * r.density[j] + t * r.density[std::min(j + 1, r.density.size() - 1)];
    }
    r.analytic_at_centers.push_back(v);
  }
  r.wasserstein1 = wasserstein1_quantiles(r.eigenvalues, r.density_x, cdf_from_density(r.density_x, r.density));

  const TheoryResult th = predicted_lambda1(sigma, model, model.beta, q);
  r.bulk_edge_plus = th.bulk_edge_plus;
  r.lambda1_predicted = th.lambda1_predicted;
  return r;
}

// ---------------------------------------------------------------------------

struct DetectionReport {
  Statistic statistic = Statistic::Lambda1L;
  double tau = 0.0;
  double beta = 0.0;
  std::vector<double> null_stats;  ///< beta = 0
  std::vector<double> alt_stats;   ///< beta = model.beta, same noise
  double type1 = 0.0;
  double type2 = 0.0;

  double type1_at(double t) const {
    return static_cast<double>(std::count_if(null_stats.begin(), null_stats.end(), [t](double s) { return s >= t; })) /
           static_cast<double>(null_stats.size());
  }
  double type2_at(double t) const {
    return static_cast<double>(std::count_if(alt_stats.begin(), alt_stats.end(), [t](double s) { return s < t; })) /
           static_cast<double>(alt_stats.size());
  }
  double total_error_at(double t) const { return type1_at(t) + type2_at(t); }
};

/// Value of `statistic` on one observation.
inline double detection_statistic(const Instance& inst, const SigmaSpec& sigma, Statistic statistic, bool compressed) {
  switch (statistic) {
    case Statistic::Lambda1L: return laplacian_top(inst.y_hat, sigma, compressed).lambda1;
    case Statistic::Lambda1Y: return top_eigenpair(inst.y_hat).lambda1;
    case Statistic::MaxRow: return max_row_statistic(inst.y_hat);
    case Statistic::Overlap: break;
  }
  throw InvalidParameter("detection needs lambda1_L, lambda1_Y or max_row");
}

/**
 * Type-I rate over `trials` null draws (beta = 0) and type-II rate over
 * `trials` planted draws (beta = model.beta). Trial t of both classes uses
 * the same noise seed.
 */
inline DetectionReport run_detection(const ModelSpec& model, const SigmaSpec& sigma, std::size_t n, double tau,
                                     std::size_t trials, std::uint64_t seed, Statistic statistic,
                                     bool compressed = true) {
  if (trials < 1) throw InvalidParameter("run_detection: trials must be >= 1");
  if (statistic == Statistic::Overlap) throw InvalidParameter("run_detection: overlap is not a test statistic");
  model.validate();
  if (!(model.beta > 0.0)) throw InvalidParameter("run_detection: the planted class needs beta > 0");
  DetectionReport r;
  r.statistic = statistic;
  r.tau = tau;
  r.beta = model.beta;
  r.null_stats.assign(trials, 0.0);
  r.alt_stats.assign(trials, 0.0);
  parallel_for(2 * trials, [&](std::size_t cell) {
    const std::size_t t = cell / 2;
    const bool planted = cell % 2 == 1;
    const double beta = planted ? model.beta : 0.0;
    try {
      const Instance inst = sample_observation(model.with_beta(beta), n, trial_seed(seed, t));
      (planted ? r.alt_stats : r.null_stats)[t] = detection_statistic(inst, sigma, statistic, compressed);
    } catch (const Error& e) {
      throw TrialFailure(beta, t, e.what());
    }
  });
  r.type1 = r.type1_at(tau);
  r.type2 = r.type2_at(tau);
  return r;
}

/// Threshold halfway between the predicted bulk edge and the predicted outlier.
inline double calibrated_tau(const SigmaSpec& sigma, const ModelSpec& model, const QuadratureConfig& q = {}) {
  const TheoryResult th = predicted_lambda1(sigma, model, model.beta, q);
  return 0.5 * (th.bulk_edge_plus + th.lambda1_predicted);
}

// ---------------------------------------------------------------------------

struct TransferTable {
  std::vector<std::string> sigma_labels;
  std::vector<std::string> model_labels;
  std::vector<std::vector<double>> beta_star;  ///< [sigma][model]

  Table to_table() const {
    Table t;
    t.columns = {"sigma"};
    for (std::size_t j = 0; j < model_labels.size(); ++j) t.columns.push_back("model" + std::to_string(j));
    for (std::size_t i = 0; i < beta_star.size(); ++i) {
      std::vector<double> row{static_cast<double>(i)};
      row.insert(row.end(), beta_star[i].begin(), beta_star[i].end());
      t.rows.push_back(std::move(row));
    }
    return t;
  }
};

inline TransferTable run_transfer_table(const std::vector<SigmaSpec>& sigmas, const std::vector<ModelSpec>& models,
                                        const QuadratureConfig& q = {}) {
  if (sigmas.empty() || models.empty()) throw InvalidParameter("run_transfer_table: empty sigma or model list");
  TransferTable t;
  for (const auto& s : sigmas) t.sigma_labels.push_back(s.to_json().dump());
  for (const auto& m : models) t.model_labels.push_back(m.to_json().dump());
  const std::size_t ns = sigmas.size(), nm = models.size();
  std::vector<double> flat(ns * nm);
  parallel_for(ns * nm, [&](std::size_t cell) { flat[cell] = beta_star(sigmas[cell / nm], models[cell % nm], q); });
  t.beta_star.assign(ns, std::vector<double>(nm));
  for (std::size_t i = 0; i < ns * nm; ++i) t.beta_star[i / nm][i % nm] = flat[i];
  return t;
}

// ---------------------------------------------------------------------------
// Output. CSV: optional "# " provenance lines, a header row, then rows with
// 17 significant digits. JSON: sorted keys, {"meta": ..., "rows": [{column: value}]}.

enum class OutputFormat { Csv, Json };

inline OutputFormat parse_output_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw InvalidParameter("unknown output format '" + s + "' (expected csv or json)");
}

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Provenance lines: tool version, RNG version and the resolved configuration.
inline std::vector<std::string> provenance_lines(const std::string& command, const nlohmann::json& config) {
  return {"nl-spectra " + std::string(kVersion) + " " + command, "rng_version " + std::to_string(kRngVersion),
          "config " + config.dump()};
}

inline void write_csv(std::ostream& os, const Table& t, const std::vector<std::string>& provenance = {}) {
  for (const auto& line : provenance) os << "# " << line << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
}

inline nlohmann::json table_to_json(const Table& t, const std::vector<std::string>& provenance = {}) {
  nlohmann::json j;
  j["meta"] = {{"provenance", provenance}, {"columns", t.columns}};
  j["rows"] = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (std::isfinite(row[i])) r[t.columns[i]] = row[i];
      else r[t.columns[i]] = format_double(row[i]);
    }
    j["rows"].push_back(std::move(r));
  }
  return j;
}

inline Table table_from_json(const nlohmann::json& j) {
  Table t;
  t.columns = j.at("meta").at("columns").get<std::vector<std::string>>();
  for (const auto& r : j.at("rows")) {
    std::vector<double> row;
    for (const auto& c : t.columns) {
      const auto& v = r.at(c);
      row.push_back(v.is_string() ? std::stod(v.get<std::string>()) : v.get<double>());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Table read_csv(std::istream& is) {
  Table t;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (header) {
      t.columns = std::move(cells);
      header = false;
      continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(std::stod(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline void emit_results(const Table& t, const std::string& path, OutputFormat format,
                         const std::vector<std::string>& provenance = {}) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  if (format == OutputFormat::Csv) write_csv(os, t, provenance);
  else os << table_to_json(t, provenance).dump(2) << '\n';
  os.flush();
  if (!os) throw IoError("write to '" + path + "' failed");
}

}  // namespace nlap
