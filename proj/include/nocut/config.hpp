#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nocut/study.hpp"

namespace nocut {

/// section -> key -> raw value; the empty section holds global keys.
using ConfigMap = std::map<std::string, std::map<std::string, std::string>>;

namespace detail {

inline std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return (b == std::string::npos) ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace detail

/// Minimal INI reader: "key = value" lines, optional [section] headers,
/// '#' comments. Section names match the study subcommands.
inline ConfigMap read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read config file " + path);
  ConfigMap config;
  std::string line, section;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::strip(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = detail::strip(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: expected 'key = value', got: " + line);
    config[section][detail::strip(line.substr(0, eq))] = detail::strip(line.substr(eq + 1));
  }
  return config;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::strip(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(std::stod(item));
  return out;
}

inline std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split_list(s)) out.push_back(std::stoi(item));
  return out;
}

/// Applies the global section and then the named section of a parsed config
/// file onto a StudyConfig. Parameter keys may hold comma-separated lists
/// (grids for param sweeps); the first entry becomes the base value.
inline void apply_config(StudyConfig& config, const ConfigMap& file, const std::string& section) {
  const auto apply = [&](const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
      if (key == "scheme") config.scheme = parse_scheme(value);
      else if (key == "problem") config.problem = value;
      else if (key == "n") config.levels = parse_ints(value);
      else if (key == "theta0") config.theta0_list = parse_doubles(value);
      else if (key == "gamma") config.gamma_list = parse_doubles(value);
      else if (key == "sigma") config.sigma_list = parse_doubles(value);
      else if (key == "gamma_div") config.gamma_div_list = parse_doubles(value);
      else if (key == "gamma1") config.gamma1_list = parse_doubles(value);
      else if (key == "kappa") config.params.kappa = std::stod(value);
      else if (key == "graddiv_scaling")
        config.params.graddiv_scaling =
            (value == "h2") ? GradDivScaling::HSquared : GradDivScaling::Constant;
      else if (key == "R") config.R = std::stod(value);
      else if (key == "radius") config.radius = std::stod(value);
      else if (key == "out") config.out_dir = value;
      else if (key == "threads") config.threads = std::stoi(value);
      else if (key == "seed") config.seed = static_cast<unsigned>(std::stoul(value));
      else if (key == "angles") config.angles = std::stoi(value);
      else if (key == "compare_with") config.compare_with = parse_scheme(value);
      else throw std::runtime_error("config: unknown key '" + key + "'");
    }
  };
  if (const auto it = file.find(""); it != file.end()) apply(it->second);
  if (const auto it = file.find(section); it != file.end()) apply(it->second);
}

/// Base scheme parameters pick up the first entry of each parameter list.
inline void finalize_param_lists(StudyConfig& config) {
  if (!config.gamma_list.empty()) config.params.gamma = config.gamma_list.front();
  if (!config.sigma_list.empty()) config.params.sigma = config.sigma_list.front();
  if (!config.gamma_div_list.empty()) config.params.gamma_div = config.gamma_div_list.front();
  if (!config.gamma1_list.empty()) config.params.gamma_1 = config.gamma1_list.front();
}

}  // namespace nocut
