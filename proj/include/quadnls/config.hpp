#pragma once

// Sectioned key = value run configuration:
//
//   [grid]        d, R, N
//   [ground]      omega, tau, max_iters, residual_tol, init_a, init_b, init_width
//   [evolve]      kappa, t_max, dt_init, dt_min, cfl_safety, blowup_kinetic_ratio,
//                 sponge_enabled, sponge_width, sample_every
//   [experiment]  gamma_values, omega_values (comma separated), horizon
//   [output]      dir, emit_plots
//
// Omitted keys keep their defaults; unknown sections or keys are errors.

#include <filesystem>
#include <string>
#include <vector>

#include "quadnls/evolution.hpp"

namespace quadnls {

struct CliConfig {
  struct {
    int d = 5;
    double R = 30.0;
    int N = 4096;
  } grid;
  struct {
    double omega = 1.0;
    double tau = 0.1;
    int max_iters = 50000;
    double residual_tol = 1e-10;
    double init_a = 2.0;
    double init_b = 1.0;
    double init_width = 1.0;
  } ground;
  EvolveConfig evolve{.sample_every = 10};
  struct {
    std::vector<double> gamma_values{0.9, 1.0, 1.05, 1.1, 1.2, 1.5};
    std::vector<double> omega_values{0.5, 1.0, 2.0, 4.0};
    double horizon = 20.0;
  } experiment;
  struct {
    std::string dir = "out";
    bool emit_plots = true;
  } output;

  Grid make_grid() const;
  GroundStateConfig ground_config() const;
  /// Throws Error(Config) naming the offending key.
  void validate() const;

  bool operator==(const CliConfig& other) const;
};

CliConfig parse_config(const std::string& text);
/// Throws Error(Config) naming the path when it cannot be read.
CliConfig load_config(const std::filesystem::path& path);
/// Every key, with doubles at full precision, so that parsing the result
/// reproduces the configuration exactly.
std::string serialize_config(const CliConfig& cfg);

}  // namespace quadnls
