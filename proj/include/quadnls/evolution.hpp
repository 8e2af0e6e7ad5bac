#pragma once

// Time stepping for the radial system
//
//   i u_t + L u = -2 v conj(u),   i v_t + kappa L v = -u^2
//
// by Strang splitting: half a step of the pointwise interaction ODE, a full
// Crank-Nicolson step of the dispersive part, another half interaction step.

#include <optional>
#include <string>
#include <vector>

#include "quadnls/ground_state.hpp"

namespace quadnls {

struct EvolveConfig {
  double kappa = 0.5;
  double t_max = 1.0;
  double dt_init = 1e-3;
  double dt_min = 1e-9;
  double cfl_safety = 0.5;
  double blowup_kinetic_ratio = 1e3;
  bool sponge_enabled = false;
  double sponge_width = 0.15;  ///< fraction of R
  int sample_every = 1;
  /// Test hook: drop the interaction substep to obtain free dispersion.
  bool interaction_enabled = true;

  void validate() const;
};

enum class OutcomeKind { Completed, BlowupDetected, Aborted };

struct Outcome {
  OutcomeKind kind = OutcomeKind::Completed;
  double t_star = 0.0;  ///< first crossing time, BlowupDetected only
  std::string reason;   ///< Aborted only

  static Outcome completed() { return {}; }
  static Outcome blowup(double t) { return {OutcomeKind::BlowupDetected, t, {}}; }
  static Outcome aborted(std::string why) { return {OutcomeKind::Aborted, 0.0, std::move(why)}; }
};

std::string to_string(OutcomeKind kind);

struct TraceRow {
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double kinetic = 0.0;  ///< |u'|^2 + kappa |v'|^2
  double interaction = 0.0;
  double virial_q = 0.0;  ///< kinetic - d/2 P
  double second_moment = 0.0;
  double max_amplitude = 0.0;
  double mass_drift = 0.0;  ///< |M(t) - M(0)| / M(0)
};

struct EvolutionTrace {
  std::vector<TraceRow> rows;
  Outcome outcome;
  double kappa = 0.5;
  int steps = 0;
  int rejected_steps = 0;
};

struct EvolveResult {
  PairState state;
  EvolutionTrace trace;
};

EvolveResult evolve(const PairState& initial, const EvolveConfig& cfg);

/// Pointwise interaction flow u' = 2i v conj(u), v' = i u^2, classical RK4
/// with sub-cycling wherever dt * max(|u|, |v|) > 0.1. dt may be negative.
PairState nonlinear_substep(const PairState& s, double dt);

/// Crank-Nicolson step of u' = i L u, v' = i kappa L v. dt may be negative.
PairState linear_substep(const PairState& s, double dt, double kappa);

/// One Strang step (no sponge, interaction on).
PairState strang_step(const PairState& s, double dt, double kappa);

/// Monitors kinetic growth and step-size collapse during a run.
class BlowupDetector {
 public:
  BlowupDetector(double initial_kinetic, double initial_amplitude, double kinetic_ratio)
      : k0_(initial_kinetic), a0_(initial_amplitude), ratio_(kinetic_ratio) {}

  /// BlowupDetected(t) once kinetic / initial kinetic exceeds the ratio.
  std::optional<Outcome> observe(double t, double kinetic) const;
  /// Called when the step size has fallen to dt_min: a singularity if the
  /// amplitude has grown, otherwise an abort.
  Outcome on_dt_collapse(double t, double amplitude, const std::string& why) const;

 private:
  double k0_, a0_, ratio_;
};

/// Re-derives the outcome of a finished or partial trace from its rows.
Outcome detect_blowup(const EvolutionTrace& trace, double kinetic_ratio, double dt_min);

/// max over interior uniformly resampled times of
/// |V'' - 8Q| / (|8Q| + 1e-8 K(0)), with V'' by centred differences.
double virial_residual(const EvolutionTrace& trace);

/// Least-squares quadratic fit of the second moment over rows with t <= t_end;
/// returns the fitted second derivative.
double fitted_moment_curvature(const EvolutionTrace& trace, double t_end);

/// max(|u - e^{i w t} phi| / |phi|, |v - e^{2 i w t} psi| / |psi|) in L^2.
double standing_wave_error(const PairState& final_state, const GroundStateResult& ground, double t);

}  // namespace quadnls
