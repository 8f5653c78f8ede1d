#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "corona/function_spec.hpp"
#include "corona/grid.hpp"
#include "corona/pipeline.hpp"

namespace corona {

/// Named compiled-in problem.
struct Demo {
  std::string name;
  std::vector<std::string> functions;
  double epsilon;
};

inline const std::vector<Demo>& demos() {
  static const std::vector<Demo> all{
      {"wolff-trivial", {"poly:0,1", "poly:1,-1"}, 0.4},
      {"squares", {"poly:0,0,1", "poly:1,-2,1"}, 0.16},
      {"triple", {"poly:0,0,1", "poly:1,-2,1", "poly:-1,-2i,1"}, 0.36},
      {"single", {"poly:2"}, 1.0},
  };
  return all;
}

inline const Demo& find_demo(const std::string& name) {
  for (const auto& d : demos())
    if (d.name == name) return d;
  std::string known;
  for (const auto& d : demos()) known += (known.empty() ? "" : ", ") + d.name;
  throw CoronaError("unknown demo '" + name + "' (known: " + known + ")");
}

/// Settings of one run; keys of the config file are exactly these field names.
struct RunConfig {
  std::vector<std::string> functions;
  double epsilon = 0.0;
  int n_r = 128;
  int n_theta = 256;
  double sigma = 0.5;
  double margin = 0.05;
  double r_int = 0.9;
  std::string output_dir = ".";
  bool dump_fields = false;
  std::optional<std::string> demo;

  void validate() const {
    if (functions.empty()) throw CoronaError("config key 'functions': no functions given");
    if (!(epsilon > 0.0)) throw CoronaError("config key 'epsilon': must be > 0, got " + format_real(epsilon));
    if (!(r_int > 0.0 && r_int < 1.0)) throw CoronaError("config key 'r_int': must lie in (0, 1)");
    if (n_r < 2) throw CoronaError("config key 'n_r': must be >= 2");
    if (n_theta < 4) throw CoronaError("config key 'n_theta': must be >= 4");
    if (!(sigma > 0.0)) throw CoronaError("config key 'sigma': must be > 0");
    if (!(margin >= 0.0)) throw CoronaError("config key 'margin': must be >= 0");
  }

  PolarGrid grid() const { return PolarGrid(n_r, n_theta); }

  PipelineConfig pipeline() const {
    PipelineConfig p;
    p.sigma = sigma;
    p.margin = margin;
    p.r_int = r_int;
    return p;
  }

  CoronaProblem problem() const {
    std::vector<FunctionSpec> specs;
    for (const auto& s : functions) specs.push_back(FunctionSpec::parse(s));
    return make_problem(std::move(specs), epsilon, grid());
  }

  static RunConfig from_demo(const std::string& name) {
    const Demo& d = find_demo(name);
    RunConfig c;
    c.functions = d.functions;
    c.epsilon = d.epsilon;
    c.demo = d.name;
    return c;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double config_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw CoronaError("config key '" + key + "': not a number: '" + v + "'");
  }
}

inline int config_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw CoronaError("config key '" + key + "': not an integer: '" + v + "'");
  }
}

inline bool config_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw CoronaError("config key '" + key + "': not a boolean: '" + v + "'");
}

}  // namespace detail

/**
 * Applies `key = value` assignments in order. A `demo` key loads the preset
 * first, so explicit keys override it regardless of their position.
 * `functions` takes specs separated by '|'.
 */
inline RunConfig parse_config(const std::vector<std::pair<std::string, std::string>>& assignments) {
  RunConfig c;
  for (const auto& [k, v] : assignments)
    if (k == "demo") c = RunConfig::from_demo(v);
  for (const auto& [k, v] : assignments) {
    if (k == "demo") continue;
    if (k == "functions") {
      c.functions.clear();
      std::stringstream ss(v);
      std::string part;
      while (std::getline(ss, part, '|')) {
        part = detail::trim(part);
        if (part.empty()) throw CoronaError("config key 'functions': empty entry");
        try {
          FunctionSpec::parse(part);
        } catch (const CoronaError& e) {
          throw CoronaError(std::string("config key 'functions': ") + e.what());
        }
        c.functions.push_back(part);
      }
    } else if (k == "epsilon") {
      c.epsilon = detail::config_real(k, v);
    } else if (k == "n_r") {
      c.n_r = detail::config_int(k, v);
    } else if (k == "n_theta") {
      c.n_theta = detail::config_int(k, v);
    } else if (k == "sigma") {
      c.sigma = detail::config_real(k, v);
    } else if (k == "margin") {
      c.margin = detail::config_real(k, v);
    } else if (k == "r_int") {
      c.r_int = detail::config_real(k, v);
    } else if (k == "output_dir") {
      c.output_dir = v;
    } else if (k == "dump_fields") {
      c.dump_fields = detail::config_bool(k, v);
    } else {
      throw CoronaError("unknown config key '" + k + "'");
    }
  }
  c.validate();
  return c;
}

/// Splits `key = value` lines; '#' starts a comment.
inline std::vector<std::pair<std::string, std::string>> read_assignments(std::istream& is,
                                                                         const std::string& source = "<config>") {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw CoronaError(source + ": line " + std::to_string(line_no) + ": expected key = value");
    }
    out.emplace_back(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return out;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw CoronaError("cannot open config " + path);
  return parse_config(read_assignments(is, path));
}

}  // namespace corona
