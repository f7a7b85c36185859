// nl-spectra: command line front end for the nonlinear Laplacian toolkit.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlap/nlap.hpp"

using nlohmann::json;

namespace {

std::string read_text(const std::string& arg) {
  if (arg.empty() || arg[0] != '@') return arg;
  std::ifstream is(arg.substr(1));
  if (!is) throw nlap::IoError("cannot open '" + arg.substr(1) + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// JSON text, @file, or a bare preset name.
json descriptor(const std::string& arg) {
  const std::string text = read_text(arg);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '"' || text[first] == '[')) {
    return json::parse(text);
  }
  return json(nlap::detail::trim(text));
}

nlap::SigmaSpec parse_sigma(const std::string& arg) {
  const json j = descriptor(arg);
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "zero") return nlap::SigmaSpec::zero();
    throw nlap::InvalidParameter("sigma descriptor must be JSON, @file or 'zero'");
  }
  return nlap::SigmaSpec::from_json(j);
}

nlap::ModelSpec parse_model(const std::string& arg) { return nlap::ModelSpec::from_json(descriptor(arg)); }

std::vector<double> parse_range(const std::string& s) {
  const auto parts = [&s] {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) out.push_back(item);
    return out;
  }();
  if (parts.size() != 3) throw nlap::InvalidParameter("range '" + s + "' must look like lo:hi:step");
  const double lo = std::stod(parts[0]), hi = std::stod(parts[1]), step = std::stod(parts[2]);
  if (!(step > 0.0) || !(hi >= lo)) throw nlap::InvalidParameter("range '" + s + "' needs lo <= hi and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = lo + step * static_cast<double>(i);
  return v;
}

void write_json(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) throw nlap::IoError("cannot open '" + out + "' for writing");
  os << j.dump(2) << '\n';
}

void write_table(const nlap::Table& t, const std::string& out, const std::string& format,
                 const std::vector<std::string>& provenance) {
  const nlap::OutputFormat f = nlap::parse_output_format(format);
  if (!out.empty() && out != "-") {
    nlap::emit_results(t, out, f, provenance);
    return;
  }
  if (f == nlap::OutputFormat::Csv) nlap::write_csv(std::cout, t, provenance);
  else std::cout << nlap::table_to_json(t, provenance).dump(2) << '\n';
}

json quadrature_json(const nlap::QuadratureConfig& q) {
  return {{"hermite_nodes", q.hermite_nodes}, {"eta_nodes", q.eta_nodes},   {"panel_nodes", q.panel_nodes},
          {"tol_root", q.tol_root},           {"inversion_epsilon", q.inversion_epsilon}};
}

json theory_json(const nlap::TheoryResult& t) {
  return {{"theta", t.theta},
          {"beta_star", t.beta_star},
          {"lambda1_predicted", t.lambda1_predicted},
          {"bulk_edge_plus", t.bulk_edge_plus},
          {"has_outlier", t.has_outlier}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear Laplacian spectral toolkit"};
  app.set_version_flag("--version", std::string(nlap::kVersion));
  app.require_subcommand(1);

  std::string sigma_arg = "zero", model_arg = "submatrix", out, format = "csv";
  std::size_t n = 500, trials = 20;
  double beta = 0.0;
  std::uint64_t seed = 1;
  nlap::QuadratureConfig q;

  // simulate
  auto* sim = app.add_subcommand("simulate", "Sample one instance and summarize the spectrum of its sigma-Laplacian");
  bool uncompressed = false;
  std::string save_instance, load_instance;
  std::size_t top_k = 0;
  sim->add_option("--model", model_arg, "Model descriptor (JSON, @file, or submatrix / half_normal)");
  sim->add_option("--sigma", sigma_arg, "Nonlinearity descriptor (JSON, @file, or zero)");
  sim->add_option("--n", n, "Dimension")->check(CLI::PositiveNumber);
  sim->add_option("--beta", beta, "Signal strength")->check(CLI::NonNegativeNumber);
  sim->add_option("--seed", seed, "Master seed");
  sim->add_flag("--uncompressed", uncompressed, "Use L instead of the compressed Laplacian");
  sim->add_option("--save-instance", save_instance, "Write the sampled instance (binary)");
  sim->add_option("--instance", load_instance, "Read the instance instead of sampling (binary or .json)");
  sim->add_option("--top", top_k, "Number of eigenvalues to print (0: all)");
  sim->add_option("--out", out, "Output file (default stdout)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Phase-transition sweep from a config file");
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::size_t> trials_override;
  sweep->add_option("--config", config_path, "INI config with [model], [sigma], [sweep], [quadrature]")->required();
  sweep->add_option("--seed", seed_override, "Override sweep.seed");
  sweep->add_option("--trials", trials_override, "Override sweep.trials");
  sweep->add_option("--out", out, "Output file (default stdout)");
  sweep->add_option("--format", format, "csv or json");

  // density
  auto* density = app.add_subcommand("density", "Limiting bulk density of the compressed sigma-Laplacian");
  std::string grid_arg = "-3:3:0.01";
  density->add_option("--sigma", sigma_arg, "Nonlinearity descriptor");
  density->add_option("--grid", grid_arg, "lo:hi:step");
  density->add_option("--eps", q.inversion_epsilon, "Imaginary offset for Stieltjes inversion")->check(CLI::PositiveNumber);
  density->add_option("--out", out, "Output file (default stdout)");
  density->add_option("--format", format, "csv or json");

  // threshold
  auto* threshold = app.add_subcommand("threshold", "Threshold beta* and, with --beta, the predicted top eigenvalue");
  std::optional<double> beta_opt;
  threshold->add_option("--sigma", sigma_arg, "Nonlinearity descriptor");
  threshold->add_option("--model", model_arg, "Model descriptor");
  threshold->add_option("--beta", beta_opt, "Signal strength for theta and the outlier prediction");
  threshold->add_option("--hermite-nodes", q.hermite_nodes, "Gauss-Hermite nodes");
  bool dense = false;
  threshold->add_flag("--dense", dense, "Also report the dense-signal heuristic (experimental)");
  threshold->add_option("--out", out, "Output file (default stdout)");

  // optimize
  auto* optimize = app.add_subcommand("optimize", "Minimize beta* over a nonlinearity family");
  std::string family = "tanh";
  nlap::OptimizeConfig ocfg;
  optimize->add_option("--family", family, "tanh, zshaped or step");
  optimize->add_option("--model", model_arg, "Model descriptor");
  optimize->add_option("--max-evals", ocfg.max_evals, "Evaluations per restart")->check(CLI::PositiveNumber);
  optimize->add_option("--restarts", ocfg.restarts, "Jittered restarts after the first run");
  optimize->add_option("--seed", ocfg.seed, "Restart jitter seed");
  optimize->add_option("--knots", ocfg.step_knots, "Knots of the step family");
  optimize->add_option("--init", ocfg.initial_point, "Initial parameters")->delimiter(',');
  optimize->add_option("--out", out, "Output file (default stdout)");

  // heatmap
  auto* heatmap = app.add_subcommand("heatmap", "beta* over a grid of two family parameters");
  std::vector<double> base;
  std::string x_arg, y_arg;
  heatmap->add_option("--family", family, "tanh, zshaped or step");
  heatmap->add_option("--model", model_arg, "Model descriptor");
  heatmap->add_option("--base", base, "Parameters held fixed (full vector)")->delimiter(',')->required();
  heatmap->add_option("--x", x_arg, "name=lo:hi:step")->required();
  heatmap->add_option("--y", y_arg, "name=lo:hi:step")->required();
  heatmap->add_option("--out", out, "Output file (default stdout)");
  heatmap->add_option("--format", format, "csv or json");

  // transfer
  auto* transfer = app.add_subcommand("transfer", "beta* for every (sigma, model) pair");
  std::vector<std::string> sigma_list, model_list;
  transfer->add_option("--sigma", sigma_list, "Nonlinearity descriptors")->required();
  transfer->add_option("--model", model_list, "Model descriptors")->required();
  transfer->add_option("--out", out, "Output file (default stdout)");
  transfer->add_option("--format", format, "csv or json");

  // detect
  auto* detect = app.add_subcommand("detect", "Error rates of a threshold test");
  std::optional<double> tau;
  std::string statistic = "lambda1_L";
  detect->add_option("--model", model_arg, "Model descriptor");
  detect->add_option("--sigma", sigma_arg, "Nonlinearity descriptor");
  detect->add_option("--n", n, "Dimension")->check(CLI::PositiveNumber);
  detect->add_option("--beta", beta, "Signal strength of the planted class")->check(CLI::PositiveNumber)->required();
  detect->add_option("--tau", tau, "Threshold (default: midway between predicted bulk edge and outlier)");
  detect->add_option("--trials", trials, "Trials per class")->check(CLI::PositiveNumber);
  detect->add_option("--seed", seed, "Master seed");
  detect->add_option("--statistic", statistic, "lambda1_L, lambda1_Y or max_row");
  detect->add_flag("--uncompressed", uncompressed, "Use L instead of the compressed Laplacian");
  detect->add_option("--out", out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      nlap::Instance inst;
      if (!load_instance.empty()) {
        if (load_instance.size() > 5 && load_instance.substr(load_instance.size() - 5) == ".json") {
          std::ifstream is(load_instance);
          if (!is) throw nlap::IoError("cannot open '" + load_instance + "'");
          inst = nlap::instance_from_json(json::parse(is));
        } else {
          inst = nlap::load_instance(load_instance);
        }
      } else {
        inst = nlap::sample_observation(parse_model(model_arg).with_beta(beta), n, seed);
      }
      if (!save_instance.empty()) nlap::save_instance(save_instance, inst);
      const nlap::SigmaSpec sigma = parse_sigma(sigma_arg);
      const nlap::Matrix l = nlap::build_laplacian(inst.y_hat, sigma);
      json j;
      if (uncompressed) {
        const nlap::Vector* signal = inst.model.beta > 0.0 ? &inst.x : nullptr;
        const nlap::SpectralSummary s = nlap::spectral_summary(l, signal);
        std::vector<double> ev(s.eigenvalues.data(), s.eigenvalues.data() + s.eigenvalues.size());
        if (top_k > 0 && top_k < ev.size()) ev.resize(top_k);
        j["eigenvalues"] = ev;
        j["lambda1"] = s.lambda1;
        j["overlap"] = s.overlap ? json(*s.overlap) : json(nullptr);
      } else {
        const nlap::OnesReflector h(l.rows());
        const nlap::SpectralSummary s = nlap::spectral_summary(nlap::compress(l));
        std::vector<double> ev(s.eigenvalues.data(), s.eigenvalues.data() + s.eigenvalues.size());
        if (top_k > 0 && top_k < ev.size()) ev.resize(top_k);
        j["eigenvalues"] = ev;
        j["lambda1"] = s.lambda1;
        j["overlap"] = inst.model.beta > 0.0 ? json(nlap::overlap(h.lift(s.top_vector), inst.x)) : json(nullptr);
      }
      j["n"] = inst.n;
      j["seed"] = inst.seed;
      j["compressed"] = !uncompressed;
      j["model"] = inst.model.to_json();
      j["sigma"] = sigma.to_json();
      j["max_row"] = nlap::max_row_statistic(inst.y_hat);
      j["proven_regime"] = nlap::in_proven_regime(inst.model, inst.n);
      j["theory"] = theory_json(nlap::predicted_lambda1(sigma, inst.model, inst.model.beta, q));
      j["version"] = nlap::kVersion;
      write_json(j, out);
    } else if (*sweep) {
      nlap::SweepConfig cfg = nlap::sweep_from_config(nlap::load_config(config_path));
      if (seed_override) cfg.seed = *seed_override;
      if (trials_override) cfg.trials = *trials_override;
      const nlap::SweepResult r = nlap::run_phase_sweep(cfg);
      json resolved = cfg.to_json();
      resolved["proven_regime"] = nlap::in_proven_regime(cfg.model, cfg.n);
      write_table(r.to_table(), out, format, nlap::provenance_lines("sweep", resolved));
    } else if (*density) {
      const nlap::SigmaSpec sigma = parse_sigma(sigma_arg);
      const std::vector<double> grid = parse_range(grid_arg);
      const nlap::DensityResult d = nlap::free_conv_density(sigma, grid, q);
      nlap::Table t;
      t.columns = {"x", "density", "converged", "residual"};
      for (std::size_t i = 0; i < grid.size(); ++i) {
        t.rows.push_back({d.x[i], d.density[i], d.converged[i] ? 1.0 : 0.0, d.residual[i]});
      }
      json resolved = {{"sigma", sigma.to_json()}, {"grid", grid_arg}, {"quadrature", quadrature_json(q)}};
      write_table(t, out, format, nlap::provenance_lines("density", resolved));
    } else if (*threshold) {
      const nlap::SigmaSpec sigma = parse_sigma(sigma_arg);
      const nlap::ModelSpec model = parse_model(model_arg);
      const nlap::ThresholdSolver solver(sigma, model, q);
      json j;
      j["sigma"] = sigma.to_json();
      j["model"] = model.to_json();
      j["beta_star"] = solver.beta_star();
      j["bulk_edge_plus"] = solver.bulk_edge();
      if (beta_opt) {
        j["beta"] = *beta_opt;
        j["theory"] = theory_json(solver.predict(*beta_opt));
      }
      if (dense) {
        const nlap::DenseThreshold d = nlap::dense_theta_beta_star(sigma, beta_opt.value_or(1.0), q);
        j["dense"] = {{"theta", d.theta}, {"beta_star", d.beta_star}, {"experimental", d.experimental}};
      }
      j["version"] = nlap::kVersion;
      write_json(j, out);
    } else if (*optimize) {
      ocfg.family = nlap::parse_family_kind(family);
      const nlap::ModelSpec model = parse_model(model_arg);
      const nlap::FamilyOptimum r = nlap::optimize_family(model, ocfg, q);
      json j;
      j["family"] = family;
      j["params"] = r.params;
      j["param_names"] = nlap::family_param_names(ocfg.family, ocfg.step_knots);
      j["beta_star"] = r.beta_star;
      j["evals"] = r.evals;
      j["sigma"] = r.sigma.to_json();
      j["model"] = model.to_json();
      j["seed"] = ocfg.seed;
      j["version"] = nlap::kVersion;
      write_json(j, out);
    } else if (*heatmap) {
      const nlap::FamilyKind f = nlap::parse_family_kind(family);
      const nlap::ModelSpec model = parse_model(model_arg);
      const auto names = nlap::family_param_names(f, ocfg.step_knots);
      auto axis = [&names](const std::string& arg) {
        const auto eq = arg.find('=');
        if (eq == std::string::npos) throw nlap::InvalidParameter("axis '" + arg + "' must look like name=lo:hi:step");
        const std::string name = arg.substr(0, eq);
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw nlap::InvalidParameter("family has no parameter '" + name + "'");
        return nlap::HeatmapAxis{static_cast<std::size_t>(it - names.begin()), parse_range(arg.substr(eq + 1))};
      };
      const nlap::HeatmapResult h = nlap::heatmap_sweep(f, model, base, axis(x_arg), axis(y_arg), q, ocfg.step_knots);
      nlap::Table t;
      t.columns = {h.x_name, h.y_name, "beta_star"};
      for (std::size_t iy = 0; iy < h.y_values.size(); ++iy) {
        for (std::size_t ix = 0; ix < h.x_values.size(); ++ix) t.rows.push_back({h.x_values[ix], h.y_values[iy], h.beta_star[iy][ix]});
      }
      json resolved = {{"family", family}, {"model", model.to_json()}, {"base", base}, {"x", x_arg}, {"y", y_arg}};
      write_table(t, out, format, nlap::provenance_lines("heatmap", resolved));
    } else if (*transfer) {
      std::vector<nlap::SigmaSpec> sigmas;
      std::vector<nlap::ModelSpec> models;
      for (const auto& s : sigma_list) sigmas.push_back(parse_sigma(s));
      for (const auto& m : model_list) models.push_back(parse_model(m));
      const nlap::TransferTable t = nlap::run_transfer_table(sigmas, models, q);
      json resolved = {{"sigmas", t.sigma_labels}, {"models", t.model_labels}};
      write_table(t.to_table(), out, format, nlap::provenance_lines("transfer", resolved));
    } else if (*detect) {
      const nlap::SigmaSpec sigma = parse_sigma(sigma_arg);
      const nlap::ModelSpec model = parse_model(model_arg).with_beta(beta);
      const nlap::Statistic stat = nlap::parse_statistic(statistic);
      double t_used = 0.0;
      if (tau) t_used = *tau;
      else if (stat == nlap::Statistic::MaxRow) throw nlap::InvalidParameter("max_row needs an explicit --tau");
      else t_used = nlap::calibrated_tau(stat == nlap::Statistic::Lambda1Y ? nlap::SigmaSpec::zero() : sigma, model, q);
      const nlap::DetectionReport r = nlap::run_detection(model, sigma, n, t_used, trials, seed, stat, !uncompressed);
      json j;
      j["statistic"] = statistic;
      j["tau"] = r.tau;
      j["tau_calibrated"] = !tau.has_value();
      j["beta"] = r.beta;
      j["n"] = n;
      j["trials"] = trials;
      j["seed"] = seed;
      j["type1"] = r.type1;
      j["type2"] = r.type2;
      j["total_error"] = r.type1 + r.type2;
      j["model"] = model.to_json();
      j["sigma"] = sigma.to_json();
      j["version"] = nlap::kVersion;
      write_json(j, out);
    }
  } catch (const nlap::Error& e) {
    std::cerr << "nl-spectra: " << e.what() << '\n';
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "nl-spectra: bad descriptor: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
