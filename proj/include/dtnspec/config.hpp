// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dtnspec/classify.hpp"

namespace dtnspec {

using json = nlohmann::json;

inline constexpr const char* config_schema = "dtnspec.config/1";

struct PotentialSpec {
  std::string kind = "zero";  // zero | constant | well | tabulated
  double value = 0.0;
  double depth = 0.0;
  double width = 0.0;
  std::vector<double> interior;
  std::vector<double> boundary;
  double bound = 0.0;
};

struct ProbeSpec {
  std::string kind = "basis";  // basis | random
  std::uint64_t seed = 0;
  int count = 1;
};

struct RunConfig {
  DomainSpec domain;
  PotentialSpec potential;
  double window_a = -1.0;
  double window_b = 4.0;
  double step = 0.1;
  LimitPolicy policy;
  ProbeSpec probes;
  Thresholds thresholds;
  int contour_nodes = 64;
  std::string output = "out";
  int threads = 1;
  std::uint64_t seed = 0;

  ClassifyConfig classify_config() const { return {policy, thresholds, step, contour_nodes}; }
};

namespace detail {

inline std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline void check_keys(const json& obj, const std::string& path, const std::vector<std::string>& allowed) {
  require(obj.is_object(), ErrorKind::Config, (path.empty() ? "config" : path) + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
    std::string best;
    std::size_t best_d = 4;
    for (const auto& a : allowed) {
      const auto d = edit_distance(key, a);
      if (d < best_d) best_d = d, best = a;
    }
    const std::string where = path.empty() ? key : path + "." + key;
    throw Error(ErrorKind::Config,
                "unknown key '" + where + "'" + (best.empty() ? std::string() : "; did you mean '" + best + "'?"));
  }
}

template <class T>
void read(const json& obj, const std::string& path, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::Config, "field '" + path + (path.empty() ? "" : ".") + key + "' has the wrong type");
  }
}

inline void in_range(bool ok, const std::string& field, const std::string& rule) {
  require(ok, ErrorKind::Config, "field '" + field + "' out of range: " + rule);
}

inline std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') ++line, col = 1;
    else ++col;
  }
  return {line, col};
}

}  // namespace detail

inline RunConfig config_from_json(const json& j) {
  using detail::check_keys;
  using detail::in_range;
  using detail::read;
  check_keys(j, "", {"schema", "domain", "potential", "window", "eta", "probes", "thresholds", "contour_nodes",
                     "output", "threads", "seed"});
  std::string schema;
  read(j, "", "schema", schema);
  require(schema == config_schema, ErrorKind::Config,
          "unsupported schema '" + schema + "' (expected '" + config_schema + "')");
  require(j.contains("domain"), ErrorKind::Config, "missing required field 'domain'");

  RunConfig c;
  const json& d = j.at("domain");
  check_keys(d, "domain", {"kind", "h", "L", "a"});
  std::string kind = "halfline1d";
  read(d, "domain", "kind", kind);
  require(kind == "halfline1d" || kind == "exterior2d", ErrorKind::Config,
          "field 'domain.kind' must be 'halfline1d' or 'exterior2d'");
  c.domain.kind = kind == "halfline1d" ? DomainKind::HalfLine1d : DomainKind::Exterior2d;
  read(d, "domain", "h", c.domain.h);
  read(d, "domain", "L", c.domain.L);
  read(d, "domain", "a", c.domain.a);
  in_range(c.domain.h > 0.0, "domain.h", "must be > 0");
  in_range(c.domain.L > c.domain.h, "domain.L", "must exceed domain.h");
  if (c.domain.kind == DomainKind::Exterior2d)
    in_range(c.domain.a > 0.0 && c.domain.a < c.domain.L, "domain.a", "must satisfy 0 < a < L");

  if (j.contains("potential")) {
    const json& p = j.at("potential");
    check_keys(p, "potential", {"kind", "value", "depth", "width", "interior", "boundary", "bound"});
    read(p, "potential", "kind", c.potential.kind);
    read(p, "potential", "value", c.potential.value);
    read(p, "potential", "depth", c.potential.depth);
    read(p, "potential", "width", c.potential.width);
    read(p, "potential", "interior", c.potential.interior);
    read(p, "potential", "boundary", c.potential.boundary);
    read(p, "potential", "bound", c.potential.bound);
    const auto& k = c.potential.kind;
    require(k == "zero" || k == "constant" || k == "well" || k == "tabulated", ErrorKind::Config,
            "field 'potential.kind' must be one of zero, constant, well, tabulated");
    if (k == "well") in_range(c.potential.width > 0.0, "potential.width", "must be > 0");
    if (k == "tabulated") in_range(c.potential.bound >= 0.0, "potential.bound", "must be >= 0");
  }

  if (j.contains("window")) {
    const json& w = j.at("window");
    check_keys(w, "window", {"a", "b", "step"});
    read(w, "window", "a", c.window_a);
    read(w, "window", "b", c.window_b);
    read(w, "window", "step", c.step);
  }
  in_range(c.window_a < c.window_b, "window.b", "must exceed window.a");
  in_range(c.step > 0.0, "window.step", "must be > 0");

  if (j.contains("eta")) {
    const json& e = j.at("eta");
    check_keys(e, "eta", {"eta0", "ratio", "count", "floor", "floor_ratio", "floor_count", "retries"});
    read(e, "eta", "eta0", c.policy.eta0);
    read(e, "eta", "ratio", c.policy.ratio);
    read(e, "eta", "count", c.policy.count);
    read(e, "eta", "floor", c.policy.eta_floor);
    read(e, "eta", "floor_ratio", c.policy.floor_ratio);
    read(e, "eta", "floor_count", c.policy.floor_count);
    read(e, "eta", "retries", c.policy.retries);
  }
  in_range(c.policy.eta0 >= 0.0, "eta.eta0", "must be >= 0 (0 selects 0.1 x mean level spacing)");
  in_range(c.policy.ratio > 0.0 && c.policy.ratio < 1.0, "eta.ratio", "must lie in (0,1)");
  in_range(c.policy.count >= 3, "eta.count", "must be >= 3");
  in_range(c.policy.eta_floor >= 0.0, "eta.floor", "must be >= 0");
  in_range(c.policy.floor_ratio > 0.0 && c.policy.floor_ratio < 1.0, "eta.floor_ratio", "must lie in (0,1)");
  in_range(c.policy.floor_count >= 3, "eta.floor_count", "must be >= 3");
  in_range(c.policy.retries >= 0, "eta.retries", "must be >= 0");

  if (j.contains("probes")) {
    const json& p = j.at("probes");
    check_keys(p, "probes", {"kind", "seed", "count"});
    read(p, "probes", "kind", c.probes.kind);
    read(p, "probes", "seed", c.probes.seed);
    read(p, "probes", "count", c.probes.count);
    require(c.probes.kind == "basis" || c.probes.kind == "random", ErrorKind::Config,
            "field 'probes.kind' must be 'basis' or 'random'");
    in_range(c.probes.count >= 1, "probes.count", "must be >= 1");
  }

  if (j.contains("thresholds")) {
    const json& t = j.at("thresholds");
    check_keys(t, "thresholds", {"tau_eig", "tau_ac", "null_fraction", "tolerance", "divergence_ratio"});
    read(t, "thresholds", "tau_eig", c.thresholds.tau_eig);
    read(t, "thresholds", "tau_ac", c.thresholds.tau_ac);
    read(t, "thresholds", "null_fraction", c.thresholds.null_fraction);
    read(t, "thresholds", "tolerance", c.policy.tolerance);
    read(t, "thresholds", "divergence_ratio", c.policy.divergence_ratio);
  }
  c.thresholds.tolerance = c.policy.tolerance;
  in_range(c.thresholds.tau_eig > 0.0 && c.thresholds.tau_eig < 1.0, "thresholds.tau_eig", "must lie in (0,1)");
  in_range(c.thresholds.tau_ac > 0.0 && c.thresholds.tau_ac < 1.0, "thresholds.tau_ac", "must lie in (0,1)");
  in_range(c.thresholds.null_fraction >= 0.0 && c.thresholds.null_fraction < 1.0, "thresholds.null_fraction",
           "must lie in [0,1)");
  in_range(c.policy.tolerance > 0.0, "thresholds.tolerance", "must be > 0");
  in_range(c.policy.divergence_ratio > 1.0, "thresholds.divergence_ratio", "must be > 1");

  read(j, "", "contour_nodes", c.contour_nodes);
  in_range(c.contour_nodes >= 16 && c.contour_nodes % 2 == 0, "contour_nodes", "must be even and >= 16");
  read(j, "", "output", c.output);
  read(j, "", "threads", c.threads);
  in_range(c.threads >= 1 && c.threads <= 1024, "threads", "must lie in [1,1024]");
  read(j, "", "seed", c.seed);
  return c;
}

inline RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = detail::line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string why = e.what();
    if (const auto at = why.find(": ", why.find("column")); at != std::string::npos) why = why.substr(at + 2);
    throw Error(ErrorKind::Config,
                "parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + why);
  }
  return config_from_json(j);
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Config, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.detail());
  }
}

inline json config_to_json(const RunConfig& c) {
  json j;
  j["schema"] = config_schema;
  j["domain"] = {{"kind", to_string(c.domain.kind)}, {"h", c.domain.h}, {"L", c.domain.L}, {"a", c.domain.a}};
  json p = {{"kind", c.potential.kind}};
  if (c.potential.kind == "constant") p["value"] = c.potential.value;
  if (c.potential.kind == "well") p["depth"] = c.potential.depth, p["width"] = c.potential.width;
  if (c.potential.kind == "tabulated")
    p["interior"] = c.potential.interior, p["boundary"] = c.potential.boundary, p["bound"] = c.potential.bound;
  j["potential"] = p;
  j["window"] = {{"a", c.window_a}, {"b", c.window_b}, {"step", c.step}};
  j["eta"] = {{"eta0", c.policy.eta0},           {"ratio", c.policy.ratio},
              {"count", c.policy.count},         {"floor", c.policy.eta_floor},
              {"floor_ratio", c.policy.floor_ratio}, {"floor_count", c.policy.floor_count},
              {"retries", c.policy.retries}};
  j["probes"] = {{"kind", c.probes.kind}, {"seed", c.probes.seed}, {"count", c.probes.count}};
  j["thresholds"] = {{"tau_eig", c.thresholds.tau_eig},
                     {"tau_ac", c.thresholds.tau_ac},
                     {"null_fraction", c.thresholds.null_fraction},
                     {"tolerance", c.policy.tolerance},
                     {"divergence_ratio", c.policy.divergence_ratio}};
  j["contour_nodes"] = c.contour_nodes;
  j["output"] = c.output;
  j["threads"] = c.threads;
  j["seed"] = c.seed;
  return j;
}

/// The operator a config describes.
struct Model {
  std::shared_ptr<const DiscreteDomain> domain;
  std::shared_ptr<const PotentialField> potential;
  DirichletOperator op;
};

inline Model build_model(const RunConfig& c) {
  auto dom = std::make_shared<const DiscreteDomain>(build_domain(c.domain));
  PotentialField q;
  const auto& p = c.potential;
  if (p.kind == "zero") q = constant_potential(*dom, 0.0);
  else if (p.kind == "constant") q = constant_potential(*dom, p.value);
  else if (p.kind == "well") q = well_potential(*dom, p.depth, p.width, c.domain.a);
  else {
    require(p.interior.size() == dom->interior_count() && p.boundary.size() == dom->boundary_count(),
            ErrorKind::Config,
            "tabulated potential needs " + std::to_string(dom->interior_count()) + " interior and " +
                std::to_string(dom->boundary_count()) + " boundary values");
    q = make_potential(Eigen::Map<const VecR>(p.interior.data(), static_cast<Eigen::Index>(p.interior.size())),
                       Eigen::Map<const VecR>(p.boundary.data(), static_cast<Eigen::Index>(p.boundary.size())),
                       p.bound);
  }
  auto pot = std::make_shared<const PotentialField>(std::move(q));
  Model m{dom, pot, assemble_operator(dom, pot)};
  return m;
}

inline MatC build_probes(const RunConfig& c, const DirichletOperator& op) {
  if (c.probes.kind == "basis") return basis_probes(op);
  return random_probes(op, c.probes.seed, c.probes.count);
}

}  // namespace dtnspec
