// quadnls: ground states, evolution and instability studies from a config file.
//
// Exit codes: 0 success, 2 configuration or input error, 3 solver failure,
// 4 certification or invariant failure, 5 evolution aborted.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "quadnls/config.hpp"
#include "quadnls/io.hpp"
#include "quadnls/log.hpp"
#include "quadnls/plots.hpp"

namespace fs = std::filesystem;
using namespace quadnls;

namespace {

enum Exit { kOk = 0, kConfig = 2, kSolver = 3, kCertification = 4, kAborted = 5 };

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::GridMismatch:
    case ErrorKind::Config:
    case ErrorKind::UnknownSchema:
      return kConfig;
    case ErrorKind::DomainTooSmall:
      return kCertification;
    default:
      return kSolver;
  }
}

std::string gamma_tag(double g) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", g);
  return buf;
}

void maybe_plot(const CliConfig& cfg, const fs::path& input) {
  if (!cfg.output.emit_plots) return;
  for (const auto& p : emit_plot_script(input)) spdlog::info("wrote {}", p.string());
}

int cmd_groundstate(const CliConfig& cfg) {
  const auto rep = certify_ground_state(cfg.ground_config());
  const fs::path dir = cfg.output.dir;
  write_file_atomic(dir / "ground_state_profile.csv", profile_csv(rep.result.state));
  write_file_atomic(dir / "ground_state.json", dump(to_json(rep)));
  maybe_plot(cfg, dir / "ground_state.json");
  for (const auto& c : rep.checks)
    std::printf("%-32s %-5s value=%.6e threshold=%.3e%s\n", c.name.c_str(), c.passed ? "pass" : "FAIL", c.value,
                c.threshold, c.gating ? "" : " (diagnostic)");
  std::printf("d(omega=%g) = %.12g\n", rep.result.omega, rep.result.d_omega);
  return rep.all_passed ? kOk : kCertification;
}

int cmd_evolve(const CliConfig& cfg, const std::string& initial, std::optional<double> gamma,
               const std::string& state_path) {
  const auto grid = cfg.make_grid();
  std::optional<GroundStateResult> ground;
  PairState s0;
  if (initial == "ground") {
    ground = solve_ground_state(cfg.ground_config());
    s0 = ground->state;
  } else if (initial == "file") {
    const fs::path p = state_path.empty() ? fs::path(cfg.output.dir) / "ground_state.json" : fs::path(state_path);
    const auto doc = Json::parse(read_file(p), nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorKind::Config, p.string() + " is not valid JSON");
    ground = ground_state_from_json(doc, grid);
    s0 = ground->state;
  } else {
    const double w2 = 2.0 * cfg.ground.init_width * cfg.ground.init_width;
    s0 = PairState(sample(grid, [&](double r) { return cfg.ground.init_a * std::exp(-r * r / w2); }),
                   sample(grid, [&](double r) { return cfg.ground.init_b * std::exp(-r * r / w2); }));
  }
  const double g = gamma.value_or(1.0);
  if (!(g > 0.0) || !std::isfinite(g)) throw Error(ErrorKind::Config, "--gamma must be positive");
  if (g != 1.0) s0 = scale(s0, g);

  const auto run = evolve(s0, cfg.evolve);
  const auto& rows = run.trace.rows;
  const fs::path dir = cfg.output.dir;
  const fs::path trace_path = dir / "evolve_trace.csv";
  write_file_atomic(trace_path, trace_csv(run.trace));

  Json side;
  side["trace"] = trace_path.filename().string();
  side["initial"] = initial;
  side["gamma"] = g;
  side["outcome"] = to_json(run.trace.outcome);
  side["steps"] = run.trace.steps;
  side["rejected_steps"] = run.trace.rejected_steps;
  side["config"] = to_json(cfg.evolve);
  const auto& last = rows.back();
  if (std::isfinite(last.mass)) {
    side["mass_drift"] = std::abs(last.mass - rows.front().mass) / rows.front().mass;
    side["energy_drift"] = std::abs(last.energy - rows.front().energy) / std::abs(rows.front().energy);
  }
  if (ground) {
    const double omega = ground->omega;
    const auto f = report(s0, omega);
    side["omega"] = omega;
    side["d_omega"] = ground->d_omega;
    side["S_omega"] = f.action;
    side["Q"] = f.virial_q;
    side["delta"] = 2.0 * (ground->d_omega - f.action);
    side["in_B_omega"] = in_blowup_set(s0, omega, ground->d_omega);
    if (g == 1.0 && run.trace.outcome.kind == OutcomeKind::Completed)
      side["standing_wave_error"] = standing_wave_error(run.state, *ground, last.t);
  }
  write_file_atomic(dir / "evolve_trace.json", dump(side));
  maybe_plot(cfg, trace_path);

  std::printf("outcome %s", to_string(run.trace.outcome.kind).c_str());
  if (run.trace.outcome.kind == OutcomeKind::BlowupDetected) std::printf(" t*=%.9g", run.trace.outcome.t_star);
  if (run.trace.outcome.kind == OutcomeKind::Aborted) std::printf(" (%s)", run.trace.outcome.reason.c_str());
  std::printf(" after %d steps\n", run.trace.steps);
  return run.trace.outcome.kind == OutcomeKind::Aborted ? kAborted : kOk;
}

int cmd_instability(const CliConfig& cfg) {
  auto rep = run_instability(cfg.ground.omega, cfg.experiment.gamma_values, cfg.experiment.horizon,
                             cfg.ground_config(), cfg.evolve);
  const fs::path dir = cfg.output.dir;
  bool ok = rep.t_star_monotone;
  for (auto& r : rep.records) {
    if (r.error) {
      ok = false;
      std::printf("gamma=%-6g error: %s\n", r.gamma, r.error->c_str());
      continue;
    }
    const auto name = "instability_gamma_" + gamma_tag(r.gamma) + ".csv";
    r.trace_path = name;
    write_file_atomic(dir / name, trace_csv(r.trace));
    Json side{{"trace", name},
              {"gamma", r.gamma},
              {"outcome", to_json(*r.outcome)},
              {"delta", r.delta},
              {"config", to_json(cfg.evolve)}};
    write_file_atomic(dir / ("instability_gamma_" + gamma_tag(r.gamma) + ".json"), dump(side));
    if (cfg.output.emit_plots) emit_plot_script(dir / name);

    const bool expect_b = r.gamma > 1.0;
    if (r.in_blowup_set != expect_b) ok = false;
    if (r.in_blowup_set && (!r.q_negative_along_run || !r.action_below_d_along_resolved_run)) ok = false;
    if (r.outcome->kind == OutcomeKind::Aborted) ok = false;
    std::printf("gamma=%-6g S-d=%+.6e Q=%+.6e in_B=%d outcome=%s", r.gamma, r.action - rep.d_omega, r.virial_q,
                r.in_blowup_set, to_string(r.outcome->kind).c_str());
    if (r.t_star) std::printf(" t*=%.6g", *r.t_star);
    std::printf("\n");
  }
  write_file_atomic(dir / "instability_report.json", dump(to_json(rep)));
  maybe_plot(cfg, dir / "instability_report.json");
  return ok ? kOk : kCertification;
}

int cmd_omega_study(const CliConfig& cfg) {
  const auto rep = run_omega_study(cfg.experiment.omega_values, cfg.ground_config());
  write_file_atomic(fs::path(cfg.output.dir) / "omega_study.json", dump(to_json(rep)));
  bool ok = true;
  std::printf("%-8s %-16s %-16s\n", "omega", "d(omega)", "d/sqrt(omega)");
  for (const auto& r : rep.records) {
    if (r.error) {
      ok = false;
      std::printf("%-8g error: %s\n", r.omega, r.error->c_str());
    } else {
      std::printf("%-8g %-16.10g %-16.10g\n", r.omega, *r.d_omega, *r.d_over_sqrt_omega);
    }
  }
  if (rep.max_pairwise_deviation) std::printf("max pairwise deviation %.3e\n", *rep.max_pairwise_deviation);
  if (rep.sqrt_law_holds && !*rep.sqrt_law_holds) ok = false;
  return ok ? kOk : kCertification;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Ground states and blow-up of a mass-resonant quadratic Schrodinger system"};
  app.require_subcommand(1);
  std::string config_path;

  auto* gs = app.add_subcommand("groundstate", "solve and certify the ground state");
  gs->add_option("-c,--config", config_path, "config file")->required();

  std::string initial = "ground", state_path;
  std::optional<double> gamma;
  auto* ev = app.add_subcommand("evolve", "evolve an initial state and write its trace");
  ev->add_option("-c,--config", config_path, "config file")->required();
  ev->add_option("--initial", initial, "initial state")->check(CLI::IsMember({"ground", "file", "gaussian"}));
  ev->add_option("--gamma", gamma, "dilation applied to the initial state");
  ev->add_option("--state", state_path, "ground-state JSON for --initial file (default <dir>/ground_state.json)");

  auto* in = app.add_subcommand("instability", "dilation sweep of the ground state");
  in->add_option("-c,--config", config_path, "config file")->required();

  auto* om = app.add_subcommand("omega-study", "ground states across omega");
  om->add_option("-c,--config", config_path, "config file")->required();

  std::string plot_input;
  auto* pl = app.add_subcommand("plot", "write gnuplot scripts for a report or trace");
  pl->add_option("input", plot_input, "ground_state.json, trace CSV or instability report")->required();

  app.add_subcommand("print-config", "print the default configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (app.got_subcommand("print-config")) {
      std::cout << serialize_config(CliConfig{});
      return kOk;
    }
    if (pl->parsed()) {
      for (const auto& p : emit_plot_script(plot_input)) std::printf("%s\n", p.string().c_str());
      return kOk;
    }
    const auto cfg = load_config(config_path);
    if (gs->parsed()) return cmd_groundstate(cfg);
    if (ev->parsed()) return cmd_evolve(cfg, initial, gamma, state_path);
    if (in->parsed()) return cmd_instability(cfg);
    if (om->parsed()) return cmd_omega_study(cfg);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kSolver;
  }
  return kOk;
}
