#include "quadnls/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "quadnls/io.hpp"

namespace quadnls {
namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::Config, key + ": " + why);
}

double to_double(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(t, &used);
  } catch (const std::exception&) {
    bad(key, "expected a number, got '" + t + "'");
  }
  if (used != t.size()) bad(key, "expected a number, got '" + t + "'");
  return x;
}

int to_int(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(t, &used);
  } catch (const std::exception&) {
    bad(key, "expected an integer, got '" + t + "'");
  }
  if (used != t.size() || x < INT32_MIN || x > INT32_MAX) bad(key, "expected an integer, got '" + t + "'");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  bad(key, "expected true or false, got '" + t + "'");
}

std::vector<double> to_list(const std::string& key, std::string text) {
  text = trim(text);
  if (!text.empty() && text.front() == '[' && text.back() == ']') text = text.substr(1, text.size() - 2);
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  return out;
}

std::string list_text(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + format_double(xs[i]);
  return s;
}

using Setter = std::function<void(CliConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"grid.d", [](CliConfig& c, auto& k, auto& v) { c.grid.d = to_int(k, v); }},
      {"grid.R", [](CliConfig& c, auto& k, auto& v) { c.grid.R = to_double(k, v); }},
      {"grid.N", [](CliConfig& c, auto& k, auto& v) { c.grid.N = to_int(k, v); }},
      {"ground.omega", [](CliConfig& c, auto& k, auto& v) { c.ground.omega = to_double(k, v); }},
      {"ground.tau", [](CliConfig& c, auto& k, auto& v) { c.ground.tau = to_double(k, v); }},
      {"ground.max_iters", [](CliConfig& c, auto& k, auto& v) { c.ground.max_iters = to_int(k, v); }},
      {"ground.residual_tol", [](CliConfig& c, auto& k, auto& v) { c.ground.residual_tol = to_double(k, v); }},
      {"ground.init_a", [](CliConfig& c, auto& k, auto& v) { c.ground.init_a = to_double(k, v); }},
      {"ground.init_b", [](CliConfig& c, auto& k, auto& v) { c.ground.init_b = to_double(k, v); }},
      {"ground.init_width", [](CliConfig& c, auto& k, auto& v) { c.ground.init_width = to_double(k, v); }},
      {"evolve.kappa", [](CliConfig& c, auto& k, auto& v) { c.evolve.kappa = to_double(k, v); }},
      {"evolve.t_max", [](CliConfig& c, auto& k, auto& v) { c.evolve.t_max = to_double(k, v); }},
      {"evolve.dt_init", [](CliConfig& c, auto& k, auto& v) { c.evolve.dt_init = to_double(k, v); }},
      {"evolve.dt_min", [](CliConfig& c, auto& k, auto& v) { c.evolve.dt_min = to_double(k, v); }},
      {"evolve.cfl_safety", [](CliConfig& c, auto& k, auto& v) { c.evolve.cfl_safety = to_double(k, v); }},
      {"evolve.blowup_kinetic_ratio",
       [](CliConfig& c, auto& k, auto& v) { c.evolve.blowup_kinetic_ratio = to_double(k, v); }},
      {"evolve.sponge_enabled", [](CliConfig& c, auto& k, auto& v) { c.evolve.sponge_enabled = to_bool(k, v); }},
      {"evolve.sponge_width", [](CliConfig& c, auto& k, auto& v) { c.evolve.sponge_width = to_double(k, v); }},
      {"evolve.sample_every", [](CliConfig& c, auto& k, auto& v) { c.evolve.sample_every = to_int(k, v); }},
      {"experiment.gamma_values",
       [](CliConfig& c, auto& k, auto& v) { c.experiment.gamma_values = to_list(k, v); }},
      {"experiment.omega_values",
       [](CliConfig& c, auto& k, auto& v) { c.experiment.omega_values = to_list(k, v); }},
      {"experiment.horizon", [](CliConfig& c, auto& k, auto& v) { c.experiment.horizon = to_double(k, v); }},
      {"output.dir", [](CliConfig& c, auto&, auto& v) { c.output.dir = trim(v); }},
      {"output.emit_plots", [](CliConfig& c, auto& k, auto& v) { c.output.emit_plots = to_bool(k, v); }},
  };
  return table;
}

void require(bool ok, const std::string& key, const std::string& why) {
  if (!ok) bad(key, why);
}

bool positive(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

Grid CliConfig::make_grid() const { return quadnls::make_grid(grid.d, grid.R, grid.N); }

GroundStateConfig CliConfig::ground_config() const {
  GroundStateConfig g;
  g.omega = ground.omega;
  g.grid = make_grid();
  g.tau = ground.tau;
  g.max_iters = ground.max_iters;
  g.residual_tol = ground.residual_tol;
  g.init_a = ground.init_a;
  g.init_b = ground.init_b;
  g.init_width = ground.init_width;
  return g;
}

void CliConfig::validate() const {
  require(grid.d >= 1, "grid.d", "must be >= 1");
  require(positive(grid.R), "grid.R", "must be positive");
  require(grid.N >= 16, "grid.N", "must be >= 16");
  require(positive(ground.omega), "ground.omega", "must be positive");
  require(positive(ground.tau), "ground.tau", "must be positive");
  require(ground.max_iters > 0, "ground.max_iters", "must be positive");
  require(positive(ground.residual_tol) && ground.residual_tol < 1.0, "ground.residual_tol", "must lie in (0, 1)");
  require(positive(ground.init_a), "ground.init_a", "must be positive");
  require(positive(ground.init_b), "ground.init_b", "must be positive");
  require(positive(ground.init_width), "ground.init_width", "must be positive");
  require(positive(evolve.kappa), "evolve.kappa", "must be positive");
  require(positive(evolve.t_max), "evolve.t_max", "must be positive");
  require(positive(evolve.dt_init), "evolve.dt_init", "must be positive");
  require(positive(evolve.dt_min) && evolve.dt_min < evolve.dt_init, "evolve.dt_min",
          "must be positive and smaller than dt_init");
  require(positive(evolve.cfl_safety) && evolve.cfl_safety <= 1.0, "evolve.cfl_safety", "must lie in (0, 1]");
  require(evolve.blowup_kinetic_ratio > 1.0 && std::isfinite(evolve.blowup_kinetic_ratio),
          "evolve.blowup_kinetic_ratio", "must exceed 1");
  require(evolve.sponge_width > 0.0 && evolve.sponge_width < 1.0, "evolve.sponge_width", "must lie in (0, 1)");
  require(evolve.sample_every >= 1, "evolve.sample_every", "must be >= 1");
  require(!experiment.gamma_values.empty(), "experiment.gamma_values", "must not be empty");
  for (double g : experiment.gamma_values) require(positive(g), "experiment.gamma_values", "entries must be positive");
  require(!experiment.omega_values.empty(), "experiment.omega_values", "must not be empty");
  for (double w : experiment.omega_values) require(positive(w), "experiment.omega_values", "entries must be positive");
  require(positive(experiment.horizon), "experiment.horizon", "must be positive");
  require(!output.dir.empty(), "output.dir", "must not be empty");
  try {
    evolve.validate();
  } catch (const Error& e) {
    bad("evolve", e.what());
  }
}

bool CliConfig::operator==(const CliConfig& o) const { return serialize_config(*this) == serialize_config(o); }

CliConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::Config, std::string("malformed config: ") + e.what());
  }
  CliConfig cfg;
  const auto& table = setters();
  static const std::set<std::string> sections = {"grid", "ground", "evolve", "experiment", "output"};
  for (const auto& [section, body] : tree) {
    if (!body.data().empty() || !sections.count(section))
      bad(section, sections.count(section) ? "keys must appear inside a [section]" : "unknown section");
    for (const auto& [key, value] : body) {
      const auto full = section + "." + key;
      const auto it = table.find(full);
      if (it == table.end()) bad(full, "unknown key");
      it->second(cfg, full, value.data());
    }
  }
  cfg.validate();
  return cfg;
}

CliConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw Error(ErrorKind::Config, "cannot read config file " + path.string());
  return parse_config(read_file(path));
}

std::string serialize_config(const CliConfig& c) {
  auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  std::ostringstream o;
  o << "[grid]\n"
    << "d = " << c.grid.d << "\n"
    << "R = " << format_double(c.grid.R) << "\n"
    << "N = " << c.grid.N << "\n\n"
    << "[ground]\n"
    << "omega = " << format_double(c.ground.omega) << "\n"
    << "tau = " << format_double(c.ground.tau) << "\n"
    << "max_iters = " << c.ground.max_iters << "\n"
    << "residual_tol = " << format_double(c.ground.residual_tol) << "\n"
    << "init_a = " << format_double(c.ground.init_a) << "\n"
    << "init_b = " << format_double(c.ground.init_b) << "\n"
    << "init_width = " << format_double(c.ground.init_width) << "\n\n"
    << "[evolve]\n"
    << "kappa = " << format_double(c.evolve.kappa) << "\n"
    << "t_max = " << format_double(c.evolve.t_max) << "\n"
    << "dt_init = " << format_double(c.evolve.dt_init) << "\n"
    << "dt_min = " << format_double(c.evolve.dt_min) << "\n"
    << "cfl_safety = " << format_double(c.evolve.cfl_safety) << "\n"
    << "blowup_kinetic_ratio = " << format_double(c.evolve.blowup_kinetic_ratio) << "\n"
    << "sponge_enabled = " << b(c.evolve.sponge_enabled) << "\n"
    << "sponge_width = " << format_double(c.evolve.sponge_width) << "\n"
    << "sample_every = " << c.evolve.sample_every << "\n\n"
    << "[experiment]\n"
    << "gamma_values = " << list_text(c.experiment.gamma_values) << "\n"
    << "omega_values = " << list_text(c.experiment.omega_values) << "\n"
    << "horizon = " << format_double(c.experiment.horizon) << "\n\n"
    << "[output]\n"
    << "dir = " << c.output.dir << "\n"
    << "emit_plots = " << b(c.output.emit_plots) << "\n";
  return o.str();
}

}  // namespace quadnls
