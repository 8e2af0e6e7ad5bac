#pragma once

// End-to-end studies: ground-state certification, the dilation (gamma) sweep
// that exhibits strong instability, and the omega-scaling study.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quadnls/evolution.hpp"

namespace quadnls {

struct Provenance {
  std::string config_hash;  ///< FNV-1a of the canonical input description
  std::string library_version;
};

struct CheckItem {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
  bool gating = true;  ///< non-gating items are diagnostics and never fail a certification
  std::string detail;
};

struct CertificationReport {
  GroundStateResult result;
  std::vector<CheckItem> checks;
  bool all_passed = false;
  Provenance provenance;
};

/// Smooth positive trial pairs used for the variational lower-bound checks,
/// with amplitudes set so the Q = 0 dilations lie in [0.7, 1.4].
/// Deterministic for a given seed.
std::vector<PairState> trial_pairs(const Grid& grid, int count, std::uint64_t seed);

/// Solves the ground state and runs the verification battery. Propagates the
/// solver's NoConvergence, NonProjectable and DomainTooSmall errors.
CertificationReport certify_ground_state(const GroundStateConfig& cfg, std::uint64_t seed = 20240517, int trials = 20);

struct GammaRecord {
  double gamma = 1.0;
  double action = 0.0;
  double virial_q = 0.0;
  bool in_blowup_set = false;
  double delta = 0.0;  ///< 2 (d - S_w(gamma))
  double initial_h1_distance = 0.0;
  std::optional<Outcome> outcome;
  std::optional<double> t_star;
  /// Second derivative of V(t) from a quadratic fit over the resolved span.
  std::optional<double> fitted_curvature;
  /// End of the resolved span: last sample with kinetic <= 10 K(0).
  double resolved_until = 0.0;
  bool q_negative_along_run = false;
  bool action_below_d_along_resolved_run = false;
  std::optional<std::string> error;
  EvolutionTrace trace;  ///< not serialised; the CLI writes it next to the report
  std::string trace_path;
};

struct InstabilityReport {
  double omega = 1.0;
  double d_omega = 0.0;
  std::vector<double> gamma_values;
  std::vector<GammaRecord> records;
  /// t* non-increasing over the gamma > 1 records that blew up.
  bool t_star_monotone = true;
  Provenance provenance;
};

/// Solves the ground state once, then evolves scale(ground, gamma) for every
/// gamma (in parallel) with kappa = 1/2 up to `horizon`. Per-gamma failures are
/// recorded on the record and do not abort the sweep.
InstabilityReport run_instability(double omega, const std::vector<double>& gammas, double horizon,
                                  const GroundStateConfig& ground_cfg, const EvolveConfig& evolve_cfg);

struct OmegaRecord {
  double omega = 1.0;
  std::optional<double> d_omega;
  std::optional<double> d_over_sqrt_omega;
  std::optional<PohozaevResiduals> pohozaev;
  int iterations = 0;
  /// From omega_rescale of the smallest-omega solution.
  std::optional<double> rescaled_d;
  std::optional<double> rescaled_residual;
  std::optional<double> rescaled_l2_distance;
  std::optional<std::string> error;
};

struct OmegaStudyReport {
  std::vector<OmegaRecord> records;
  /// max over pairs of |a - b| / min(a, b) for d / sqrt(omega); empty for < 2 solutions.
  std::optional<double> max_pairwise_deviation;
  std::optional<bool> sqrt_law_holds;  ///< deviation <= 1%
  /// Rescaled vs direct profiles agree to 1e-3 (regression only).
  std::optional<bool> rescale_agreement;
  Provenance provenance;
};

OmegaStudyReport run_omega_study(const std::vector<double>& omegas, const GroundStateConfig& ground_cfg);

/// Relative L^2 distance max(|u_a - u_b|/|u_b|, |v_a - v_b|/|v_b|) after aligning
/// the global phase (e^{i t} u, e^{2 i t} v) of `a` to `b`.
double aligned_l2_distance(const PairState& a, const PairState& b);

std::string library_version();
std::string fnv1a_hex(const std::string& text);

}  // namespace quadnls
