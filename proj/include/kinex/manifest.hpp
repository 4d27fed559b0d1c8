#pragma once

// Resolution of a command-line run: built-in defaults, then a named preset,
// then the JSON config file, then command-line flags (highest precedence).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kinex/errors.hpp"
#include "kinex/experiments.hpp"

namespace kinex {

enum class Command { equilibrium, sweep_tax, sweep_welfare, baseline, fit };
enum class OutputFormat { csv, json };

/// Values given on the command line. Unset fields leave the lower layers alone.
struct ConfigOverrides {
  std::optional<int> n;
  std::optional<double> spacing;
  std::optional<double> transaction;
  std::optional<double> mu;
  std::optional<double> tau_min;
  std::optional<double> tau_max;
  std::optional<double> gamma;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<double> dt;
  std::optional<double> max_time;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<unsigned> jobs;
  std::optional<std::string> pairs;
  std::optional<std::string> gammas;
  std::optional<std::string> preset;
  std::optional<std::string> records;
  std::optional<std::string> abscissa;
  bool fit = false;
};

struct RunManifest {
  Command command = Command::equilibrium;
  ScenarioConfig config;
  std::vector<TaxPair> pairs;
  std::vector<double> gammas;
  std::optional<std::filesystem::path> out_dir;
  OutputFormat format = OutputFormat::csv;
  unsigned jobs = 0;  // 0 = all available processors
  bool fit = false;
  std::optional<std::string> records_path;
  std::optional<Abscissa> abscissa;
};

/// "table1" / "table2" (same grid) or a list like "0.30:0.45,0.25:0.50".
inline std::vector<TaxPair> parse_pairs(const std::string& spec) {
  if (spec == "table1" || spec == "table2") return presets::tax_pairs();
  if (spec.empty()) throw InvalidArgument("--pairs: empty list");
  std::vector<TaxPair> out;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw InvalidArgument("--pairs: expected tau_min:tau_max, got '" + item + "'");
    }
    try {
      std::size_t a = 0, b = 0;
      const std::string lo = item.substr(0, colon), hi = item.substr(colon + 1);
      TaxPair p{std::stod(lo, &a), std::stod(hi, &b)};
      if (a != lo.size() || b != hi.size()) throw std::invalid_argument(item);
      out.push_back(p);
    } catch (const std::exception&) {
      throw InvalidArgument("--pairs: malformed entry '" + item + "'");
    }
  }
  if (out.empty()) throw InvalidArgument("--pairs: empty list");
  return out;
}

/// "table3" / "table4" (same grid), "start:stop:count" (inclusive, evenly
/// spaced) or a comma-separated list.
inline std::vector<double> parse_gammas(const std::string& spec) {
  if (spec == "table3" || spec == "table4") return presets::welfare_gammas();
  if (spec.empty()) throw InvalidArgument("--gammas: empty list");
  auto number = [](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("--gammas: malformed value '" + s + "'");
    }
    if (used != s.size()) throw InvalidArgument("--gammas: malformed value '" + s + "'");
    return v;
  };
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw InvalidArgument("--gammas: expected start:stop:count");
    const double start = number(parts[0]), stop = number(parts[1]);
    const double count_d = number(parts[2]);
    const auto count = static_cast<int>(count_d);
    if (count < 2 || count != count_d) throw InvalidArgument("--gammas: count must be an integer >= 2");
    for (int i = 0; i < count; ++i) {
      out.push_back(start + (stop - start) * static_cast<double>(i) / (count - 1));
    }
    out.back() = stop;
    return out;
  }
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(number(item));
  if (out.empty()) throw InvalidArgument("--gammas: empty list");
  return out;
}

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw InvalidArgument("--format: expected csv or json, got '" + s + "'");
}

inline Abscissa parse_abscissa(const std::string& s) {
  if (s == "delta_tau") return Abscissa::delta_tau;
  if (s == "w_ratio") return Abscissa::w_ratio;
  throw InvalidArgument("--abscissa: expected delta_tau or w_ratio, got '" + s + "'");
}

/// Applies a named reference grid: table1..table4 or fig3.
inline void apply_preset(RunManifest& m, const std::string& name) {
  if (name == "table1" || name == "table3" || name == "fig3") {
    m.config.mu_target = presets::kExample1Mu;
  } else if (name == "table2" || name == "table4") {
    m.config.mu_target = presets::kExample2Mu;
  } else {
    throw InvalidArgument("preset: unknown name '" + name + "'");
  }
  // Reference runs: equal welfare for tax sweeps, 30%/45% for welfare sweeps.
  m.config.tau_min = 0.30;
  m.config.tau_max = 0.45;
  m.config.gamma = 0.5;
  m.pairs = presets::tax_pairs();
  m.gammas = presets::welfare_gammas();
}

inline nlohmann::json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("config file '" + path.string() + "': " + e.what());
  }
}

namespace detail {

template <typename T>
T config_field(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument(std::string("config field '") + key + "': wrong type");
  }
}

inline void apply_config_json(RunManifest& m, const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("config: top level must be an object");
  static const char* const known[] = {"n",        "spacing", "S",      "tau_min", "tau_max",
                                      "gamma",    "mu_target", "seed", "tol",     "dt",
                                      "max_time", "pairs",   "gammas", "preset",  "out",
                                      "format",   "jobs"};
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw InvalidArgument("config: unknown field '" + key + "'");
  }
  auto& c = m.config;
  if (j.contains("n")) c.n = config_field<int>(j, "n");
  if (j.contains("spacing")) c.spacing = config_field<double>(j, "spacing");
  if (j.contains("S")) c.transaction = config_field<double>(j, "S");
  if (j.contains("tau_min")) c.tau_min = config_field<double>(j, "tau_min");
  if (j.contains("tau_max")) c.tau_max = config_field<double>(j, "tau_max");
  if (j.contains("gamma")) c.gamma = config_field<double>(j, "gamma");
  if (j.contains("mu_target")) c.mu_target = config_field<double>(j, "mu_target");
  if (j.contains("seed")) c.seed = config_field<std::uint64_t>(j, "seed");
  if (j.contains("tol")) c.solver.tol = config_field<double>(j, "tol");
  if (j.contains("dt")) c.solver.dt = config_field<double>(j, "dt");
  if (j.contains("max_time")) c.solver.max_time = config_field<double>(j, "max_time");
  if (j.contains("pairs")) {
    const auto& p = j.at("pairs");
    if (p.is_string()) {
      m.pairs = parse_pairs(p.get<std::string>());
    } else {
      m.pairs.clear();
      for (const auto& e : p) {
        if (!e.is_array() || e.size() != 2) {
          throw InvalidArgument("config field 'pairs': entries must be [tau_min, tau_max]");
        }
        m.pairs.push_back({e[0].get<double>(), e[1].get<double>()});
      }
      if (m.pairs.empty()) throw InvalidArgument("config field 'pairs': empty list");
    }
  }
  if (j.contains("gammas")) {
    const auto& g = j.at("gammas");
    m.gammas = g.is_string() ? parse_gammas(g.get<std::string>())
                             : config_field<std::vector<double>>(j, "gammas");
    if (m.gammas.empty()) throw InvalidArgument("config field 'gammas': empty list");
  }
  if (j.contains("out")) m.out_dir = config_field<std::string>(j, "out");
  if (j.contains("format")) m.format = parse_format(config_field<std::string>(j, "format"));
  if (j.contains("jobs")) m.jobs = config_field<unsigned>(j, "jobs");
}

}  // namespace detail

/// Builds the fully resolved manifest and validates the scenario.
inline RunManifest resolve_manifest(Command command, const std::optional<nlohmann::json>& file,
                                    const ConfigOverrides& flags) {
  RunManifest m;
  m.command = command;
  m.pairs = presets::tax_pairs();
  m.gammas = presets::welfare_gammas();

  std::optional<std::string> preset = flags.preset;
  if (!preset && file && file->contains("preset")) {
    preset = detail::config_field<std::string>(*file, "preset");
  }
  if (preset) apply_preset(m, *preset);
  if (file) detail::apply_config_json(m, *file);

  auto& c = m.config;
  if (flags.n) c.n = *flags.n;
  if (flags.spacing) c.spacing = *flags.spacing;
  if (flags.transaction) c.transaction = *flags.transaction;
  if (flags.mu) c.mu_target = *flags.mu;
  if (flags.tau_min) c.tau_min = *flags.tau_min;
  if (flags.tau_max) c.tau_max = *flags.tau_max;
  if (flags.gamma) c.gamma = *flags.gamma;
  if (flags.seed) c.seed = *flags.seed;
  if (flags.tol) c.solver.tol = *flags.tol;
  if (flags.dt) c.solver.dt = *flags.dt;
  if (flags.max_time) c.solver.max_time = *flags.max_time;
  if (flags.out) m.out_dir = *flags.out;
  if (flags.format) m.format = parse_format(*flags.format);
  if (flags.jobs) m.jobs = *flags.jobs;
  if (flags.pairs) m.pairs = parse_pairs(*flags.pairs);
  if (flags.gammas) m.gammas = parse_gammas(*flags.gammas);
  if (flags.records) m.records_path = *flags.records;
  if (flags.abscissa) m.abscissa = parse_abscissa(*flags.abscissa);
  m.fit = flags.fit;

  if (command != Command::fit || !m.records_path) c.validate();
  return m;
}

}  // namespace kinex
