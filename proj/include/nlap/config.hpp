#pragma once

// Run configuration in INI syntax. Dotted section names nest:
//
//   [model]
//   p = beta/sqrt(n)
//   [model.eta]
//   kind = point_mass
//   c = 1
//
// reads as model.p, model.eta.kind and model.eta.c. List values are comma
// separated. Unknown keys are rejected.

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "nlap/errors.hpp"
#include "nlap/experiments.hpp"
#include "nlap/models.hpp"
#include "nlap/nonlin.hpp"
#include "nlap/theory.hpp"

namespace nlap {

using Config = boost::property_tree::ptree;

inline Config parse_config(std::istream& is) {
  Config flat;
  try {
    boost::property_tree::ini_parser::read_ini(is, flat);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  Config nested;
  for (const auto& [name, node] : flat) {
    if (node.empty()) {
      nested.put(name, node.data());
      continue;
    }
    for (const auto& [key, value] : node) nested.put(name + "." + key, value.data());
  }
  return nested;
}

inline Config parse_config_string(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

inline Config load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config '" + path + "'");
  return parse_config(is);
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double parse_number(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (trim(s.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("config: '" + key + "' expects a number, got '" + s + "'");
}

inline std::vector<double> parse_numbers(const std::string& s, const std::string& key) {
  std::vector<double> v;
  for (const auto& item : split_list(s)) v.push_back(parse_number(item, key));
  return v;
}

inline bool parse_bool(const std::string& s, const std::string& key) {
  const std::string t = trim(s);
  if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
  if (t == "false" || t == "no" || t == "0" || t == "off") return false;
  throw ValidationError("config: '" + key + "' expects a boolean, got '" + s + "'");
}

inline void require_keys(const Config& section, const std::string& name, std::initializer_list<const char*> allowed) {
  for (const auto& [key, child] : section) {
    if (std::none_of(allowed.begin(), allowed.end(), [&key](const char* a) { return key == a; })) {
      throw ValidationError("config: unknown key '" + key + "' in section [" + name + "]");
    }
  }
}

}  // namespace detail

inline SigmaSpec sigma_from_config(const Config& s) {
  detail::require_keys(s, "sigma", {"family", "a", "b", "c", "knots", "values", "grid", "shift", "descriptor"});
  if (auto d = s.get_optional<std::string>("descriptor")) return SigmaSpec::from_json(nlohmann::json::parse(*d));
  nlohmann::json j;
  j["family"] = detail::trim(s.get<std::string>("family", "zero"));
  nlohmann::json p = nlohmann::json::object();
  for (const char* key : {"a", "b", "c", "shift"}) {
    if (auto v = s.get_optional<std::string>(key)) p[key] = detail::parse_number(*v, std::string("sigma.") + key);
  }
  for (const char* key : {"knots", "values", "grid"}) {
    if (auto v = s.get_optional<std::string>(key)) p[key] = detail::parse_numbers(*v, std::string("sigma.") + key);
  }
  j["params"] = p;
  return SigmaSpec::from_json(j);
}

inline ModelSpec model_from_config(const Config& m) {
  detail::require_keys(m, "model", {"preset", "p", "sparsity", "beta", "eta"});
  ModelSpec out;
  if (auto preset = m.get_optional<std::string>("preset")) out = ModelSpec::from_json(detail::trim(*preset));
  nlohmann::json j = out.to_json();
  if (auto e = m.get_child_optional("eta")) {
    detail::require_keys(*e, "model.eta", {"kind", "c", "atoms", "weights"});
    nlohmann::json eta;
    eta["kind"] = detail::trim(e->get<std::string>("kind", "point_mass"));
    if (auto c = e->get_optional<std::string>("c")) eta["c"] = detail::parse_number(*c, "model.eta.c");
    if (auto a = e->get_optional<std::string>("atoms")) eta["atoms"] = detail::parse_numbers(*a, "model.eta.atoms");
    if (auto w = e->get_optional<std::string>("weights")) eta["weights"] = detail::parse_numbers(*w, "model.eta.weights");
    j["eta"] = eta;
  }
  if (auto p = m.get_optional<std::string>("p")) {
    const std::string t = detail::trim(*p);
    if (t == "beta/sqrt(n)") j["p"] = t;
    else j["p"] = detail::parse_number(t, "model.p");
  }
  if (auto sp = m.get_optional<std::string>("sparsity")) j["sparsity"] = detail::trim(*sp);
  if (auto b = m.get_optional<std::string>("beta")) j["beta"] = detail::parse_number(*b, "model.beta");
  return ModelSpec::from_json(j);
}

inline QuadratureConfig quadrature_from_config(const Config& s, QuadratureConfig q = {}) {
  detail::require_keys(s, "quadrature",
                       {"hermite_nodes", "eta_nodes", "panel_nodes", "tol_root", "tol_fixed_point",
                        "max_fixed_point_iters", "damping", "inversion_epsilon"});
  auto num = [&s](const char* key, double fallback) {
    const auto v = s.get_optional<std::string>(key);
    return v ? detail::parse_number(*v, std::string("quadrature.") + key) : fallback;
  };
  q.hermite_nodes = static_cast<int>(num("hermite_nodes", q.hermite_nodes));
  q.eta_nodes = static_cast<int>(num("eta_nodes", q.eta_nodes));
  q.panel_nodes = static_cast<int>(num("panel_nodes", q.panel_nodes));
  q.tol_root = num("tol_root", q.tol_root);
  q.tol_fixed_point = num("tol_fixed_point", q.tol_fixed_point);
  q.max_fixed_point_iters = static_cast<int>(num("max_fixed_point_iters", q.max_fixed_point_iters));
  q.damping = num("damping", q.damping);
  q.inversion_epsilon = num("inversion_epsilon", q.inversion_epsilon);
  q.validate();
  return q;
}

/// Sections [model] (with [model.eta]), [sigma], [sweep] and [quadrature].
inline SweepConfig sweep_from_config(const Config& root) {
  detail::require_keys(root, "<top level>", {"model", "sigma", "sweep", "quadrature"});
  SweepConfig cfg;
  if (auto m = root.get_child_optional("model")) cfg.model = model_from_config(*m);
  if (auto s = root.get_child_optional("sigma")) cfg.sigma = sigma_from_config(*s);
  if (auto q = root.get_child_optional("quadrature")) cfg.quadrature = quadrature_from_config(*q);
  if (auto s = root.get_child_optional("sweep")) {
    detail::require_keys(*s, "sweep",
                         {"n", "trials", "seed", "compressed", "statistics", "beta_grid", "beta_min", "beta_max",
                          "beta_points", "theory", "threads"});
    auto num = [&s](const char* key, double fallback) {
      const auto v = s->get_optional<std::string>(key);
      return v ? detail::parse_number(*v, std::string("sweep.") + key) : fallback;
    };
    cfg.n = static_cast<std::size_t>(num("n", static_cast<double>(cfg.n)));
    cfg.trials = static_cast<std::size_t>(num("trials", static_cast<double>(cfg.trials)));
    if (auto seed = s->get_optional<std::string>("seed")) cfg.seed = std::stoull(detail::trim(*seed), nullptr, 0);
    if (auto c = s->get_optional<std::string>("compressed")) cfg.use_compressed = detail::parse_bool(*c, "sweep.compressed");
    if (auto t = s->get_optional<std::string>("theory")) cfg.theory_overlay = detail::parse_bool(*t, "sweep.theory");
    cfg.threads = static_cast<unsigned>(num("threads", 0.0));
    if (auto st = s->get_optional<std::string>("statistics")) {
      cfg.statistics.clear();
      for (const auto& name : detail::split_list(*st)) cfg.statistics.push_back(parse_statistic(name));
    }
    if (auto g = s->get_optional<std::string>("beta_grid")) {
      cfg.beta_grid = detail::parse_numbers(*g, "sweep.beta_grid");
    } else if (s->get_optional<std::string>("beta_min") || s->get_optional<std::string>("beta_max") ||
               s->get_optional<std::string>("beta_points")) {
      cfg.beta_grid = linspace(num("beta_min", 0.0), num("beta_max", 2.0),
                               static_cast<std::size_t>(num("beta_points", static_cast<double>(kDefaultBetaPoints))));
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace nlap
