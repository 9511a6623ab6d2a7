#include "acg/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "acg/errors.hpp"

namespace acg {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

const std::map<std::string, std::map<std::string, double>>& unit_tables() {
  static const std::map<std::string, std::map<std::string, double>> tables = {
      {"length",
       {{"nm", 1e-9}, {"um", 1e-6}, {"µm", 1e-6}, {"mm", 1e-3},
        {"cm", 1e-2}, {"m", 1.0}}},
      {"current", {{"uA", 1e-6}, {"µA", 1e-6}, {"mA", 1e-3}, {"A", 1.0}}},
      {"field",
       {{"mG", 1e-7}, {"G", 1e-4}, {"uT", 1e-6}, {"µT", 1e-6},
        {"mT", 1e-3}, {"T", 1.0}}},
      {"temperature",
       {{"nK", 1e-9}, {"uK", 1e-6}, {"µK", 1e-6}, {"mK", 1e-3}, {"K", 1.0}}},
      {"frequency", {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}}},
      {"time", {{"us", 1e-6}, {"µs", 1e-6}, {"ms", 1e-3}, {"s", 1.0}}},
      {"gradient", {{"G/cm", 1e-2}, {"T/m", 1.0}}},
  };
  return tables;
}

double parse_quantity(const std::string& key, const std::string& raw,
                      const std::string& dimension) {
  auto it = unit_tables().find(dimension);
  if (it == unit_tables().end())
    throw ConfigError("unknown dimension '" + dimension + "'");

  std::istringstream iss(raw);
  double value = 0.0;
  std::string unit, extra;
  if (!(iss >> value))
    throw ConfigError("key '" + key + "': cannot parse number from '" + raw + "'");
  if (!(iss >> unit))
    throw ConfigError("key '" + key + "': physical quantity '" + raw +
                      "' lacks a unit suffix (expected a " + dimension + " unit)");
  if (iss >> extra)
    throw ConfigError("key '" + key + "': trailing text after unit in '" + raw + "'");
  auto uit = it->second.find(unit);
  if (uit == it->second.end())
    throw ConfigError("key '" + key + "': unit '" + unit + "' is not a " +
                      dimension + " unit");
  return value * uit->second;
}

}  // namespace

ConfigMap ConfigMap::parse_string(const std::string& text) {
  ConfigMap cm;
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> stack;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line == "}") {
      if (stack.empty())
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unmatched '}'");
      stack.pop_back();
      continue;
    }
    if (line.back() == '{') {
      std::string name = trim(line.substr(0, line.size() - 1));
      if (name.empty() || name.find('=') != std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": malformed section header");
      stack.push_back(name);
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key or value");
    std::string full;
    for (const auto& s : stack) full += s + ".";
    full += key;
    if (cm.values_.count(full))
      throw ConfigError("duplicate config key '" + full + "'");
    cm.values_[full] = value;
  }
  if (!stack.empty()) throw ConfigError("config ends inside a '{' block");
  return cm;
}

ConfigMap ConfigMap::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

bool ConfigMap::has(const std::string& key) const { return values_.count(key) > 0; }

double ConfigMap::quantity(const std::string& key, const std::string& dimension) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  read_.insert(key);
  return parse_quantity(key, it->second, dimension);
}

double ConfigMap::quantity_or(const std::string& key, const std::string& dimension,
                              double fallback_si) const {
  if (!has(key)) return fallback_si;
  return quantity(key, dimension);
}

std::vector<double> ConfigMap::quantity_list(const std::string& key,
                                             const std::string& dimension) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  read_.insert(key);
  std::vector<double> out;
  std::string item;
  std::istringstream ss(it->second);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_quantity(key, item, dimension));
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

double ConfigMap::number(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  read_.insert(key);
  std::istringstream iss(it->second);
  double v = 0.0;
  std::string extra;
  if (!(iss >> v) || (iss >> extra))
    throw ConfigError("key '" + key + "': expected a bare number, got '" +
                      it->second + "'");
  return v;
}

double ConfigMap::number_or(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  return number(key);
}

std::uint64_t ConfigMap::integer(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  read_.insert(key);
  std::istringstream iss(it->second);
  std::uint64_t v = 0;
  std::string extra;
  if (!(iss >> v) || (iss >> extra))
    throw ConfigError("key '" + key + "': expected an integer, got '" +
                      it->second + "'");
  return v;
}

std::uint64_t ConfigMap::integer_or(const std::string& key,
                                    std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  return integer(key);
}

std::string ConfigMap::text(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  read_.insert(key);
  return it->second;
}

std::string ConfigMap::text_or(const std::string& key,
                               const std::string& fallback) const {
  if (!has(key)) return fallback;
  return text(key);
}

std::vector<std::string> ConfigMap::unread_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (!read_.count(k)) out.push_back(k);
  return out;
}

void ScenarioConfig::validate() const {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  check(seed_set, "seed is mandatory (no wall-clock seeding)");
  check(std::abs(central_current) < 1.0 && std::abs(bias_current) < 1.0 &&
            std::abs(h_current) < 1.0,
        "currents must stay below 1 A");
  check(std::abs(ioffe_field) < 1e-2 && std::abs(residual_bx) < 1e-2 &&
            std::abs(residual_by) < 1e-2,
        "fields must stay below 100 G");
  check(ioffe_field > 0.0, "ioffe field must be positive");
  check(pair_spacing > 0.0 && wire_length > 0.0, "trap geometry must be positive");
  check(temperature > 0.0 && temperature < 1e-3,
        "ensemble temperature must lie in (0, 1 mK)");
  check(atoms > 0, "ensemble size must be positive");
  check(kind != ScenarioKind::Ac || modulation_frequency > 0.0,
        "modulated scenario needs a positive modulation frequency");
  check(edge_rms >= 0.0 && grid_step > 0.0 && z_extent > 0.0,
        "roughness parameters must be positive");
  check(target_roughness >= 0.0, "roughness calibration target must be >= 0");
  check(t_max > 0.0 && sample_interval > 0.0 && escape_radius > 0.0,
        "integrator parameters must be positive");
  check(dt >= 0.0, "dt must be >= 0 (0 derives it from the stability rule)");
  for (double f : scan_frequencies)
    check(f > 0.0, "scan frequencies must be positive");
}

ScenarioConfig load_scenario(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override,
                             std::optional<std::filesystem::path> out_override) {
  ScenarioConfig sc;
  if (!path.empty()) {
    ConfigMap cm = ConfigMap::parse_file(path);

    std::string kind = cm.text_or("scenario.kind", "ac");
    if (kind == "dc_positive")
      sc.kind = ScenarioKind::DcPositive;
    else if (kind == "dc_negative")
      sc.kind = ScenarioKind::DcNegative;
    else if (kind == "ac")
      sc.kind = ScenarioKind::Ac;
    else
      throw ConfigError("scenario.kind must be dc_positive, dc_negative or ac");

    sc.pair_spacing = cm.quantity_or("trap.pair_spacing", "length", sc.pair_spacing);
    sc.wire_length = cm.quantity_or("trap.wire_length", "length", sc.wire_length);
    sc.central_current =
        cm.quantity_or("trap.central_current", "current", sc.central_current);
    sc.bias_current = cm.quantity_or("trap.bias_current", "current", sc.bias_current);
    sc.ioffe_field = cm.quantity_or("trap.ioffe_field", "field", sc.ioffe_field);
    sc.h_current = cm.quantity_or("trap.h_current", "current", sc.h_current);
    sc.residual_bx = cm.quantity_or("trap.residual_bx", "field", sc.residual_bx);
    sc.residual_by = cm.quantity_or("trap.residual_by", "field", sc.residual_by);
    sc.modulation_frequency = cm.quantity_or("trap.modulation_frequency", "frequency",
                                             sc.modulation_frequency);

    sc.edge_rms = cm.quantity_or("roughness.edge_rms", "length", sc.edge_rms);
    sc.grid_step = cm.quantity_or("roughness.grid_step", "length", sc.grid_step);
    sc.z_extent = cm.quantity_or("roughness.z_extent", "length", sc.z_extent);
    sc.target_roughness =
        cm.quantity_or("roughness.target_rms", "temperature", sc.target_roughness);
    sc.realizations = static_cast<std::size_t>(
        cm.integer_or("roughness.realizations", sc.realizations));

    sc.atoms = static_cast<std::size_t>(cm.integer_or("ensemble.atoms", sc.atoms));
    sc.temperature =
        cm.quantity_or("ensemble.temperature", "temperature", sc.temperature);
    sc.displacement =
        cm.quantity_or("ensemble.displacement", "length", sc.displacement);

    sc.dt = cm.quantity_or("integrator.dt", "time", sc.dt);
    sc.t_max = cm.quantity_or("integrator.t_max", "time", sc.t_max);
    sc.sample_interval =
        cm.quantity_or("integrator.sample_interval", "time", sc.sample_interval);
    sc.escape_radius =
        cm.quantity_or("integrator.escape_radius", "length", sc.escape_radius);

    sc.psf_sigma = cm.quantity_or("analysis.psf_sigma", "length", sc.psf_sigma);
    sc.pixel = cm.quantity_or("analysis.pixel", "length", sc.pixel);
    sc.time_of_flight =
        cm.quantity_or("analysis.time_of_flight", "time", sc.time_of_flight);
    sc.noise_counts = cm.number_or("analysis.noise_counts", sc.noise_counts);

    if (cm.has("lifetime.frequencies"))
      sc.scan_frequencies = cm.quantity_list("lifetime.frequencies", "frequency");

    if (cm.has("seed")) {
      sc.seed = cm.integer("seed");
      sc.seed_set = true;
    }
    if (cm.has("output.dir")) sc.out_dir = cm.text("output.dir");

    auto leftover = cm.unread_keys();
    if (!leftover.empty())
      throw ConfigError("unknown config key '" + leftover.front() + "'");
  }

  if (seed_override) {
    sc.seed = *seed_override;
    sc.seed_set = true;
  }
  if (out_override) sc.out_dir = *out_override;
  sc.validate();
  return sc;
}

}  // namespace acg
