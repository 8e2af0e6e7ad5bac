#pragma once

#include <optional>

#include "quadnls/functionals.hpp"

namespace quadnls {

struct GroundStateConfig {
  double omega = 1.0;
  Grid grid;
  double tau = 0.1;  ///< pseudo-time step of the gradient flow
  int max_iters = 50000;
  double residual_tol = 1e-10;
  double init_a = 2.0;
  double init_b = 1.0;
  double init_width = 1.0;

  void validate() const;
};

struct PohozaevResiduals {
  double kinetic = 0.0;   ///< |2K - 5P| / K
  double mass = 0.0;      ///< |2 w M - P| / P
  double combined = 0.0;  ///< |K + w M - 3P| / P

  bool within(double tol) const { return kinetic <= tol && mass <= tol && combined <= tol; }
};

struct DecayRates {
  double phi = 0.0;
  double psi = 0.0;
};

/// Fraction-of-R window for the exponential tail fit.
struct FitWindow {
  double lo = 0.5;
  double hi = 0.8;
};

struct GroundStateResult {
  PairState state;
  double omega = 1.0;
  double d_omega = 0.0;
  double residual = 0.0;
  PohozaevResiduals pohozaev;
  /// Empty when the default tail window underflows (see fit_decay).
  std::optional<DecayRates> decay_rates;
  int iterations = 0;
  double boundary_leak = 0.0;
  double max_amplitude = 0.0;
  int monotonicity_violations = 0;
};

/// Semi-implicit gradient flow with Nehari projection:
///   (1 + tau(-L + w)) u* = u + 2 tau v conj(u),  (1 + tau(-L/2 + 2w)) v* = v + tau u^2,
///   (u, v) <- nehari_project(u*, v*).
/// Stops on the relative elliptic residual. Throws NoConvergence,
/// NonProjectable or DomainTooSmall.
GroundStateResult solve_ground_state(const GroundStateConfig& cfg);

/// max of the two relative residuals of the elliptic system.
double elliptic_residual(const PairState& s, double omega);

PohozaevResiduals verify_pohozaev(const GroundStateResult& res);
PohozaevResiduals pohozaev_residuals(const PairState& s, double omega);

double estimate_d(const GroundStateResult& res);

/// (l phi(sqrt(l) r), l psi(sqrt(l) r)) with l = omega_new / omega: the
/// scaling closure of the elliptic system.
PairState omega_rescale(const GroundStateResult& res, double omega_new);

/// Least-squares slope of log|phi| and log|psi| over the given windows.
/// Throws DecayWindowUnderflow if a window holds samples below 1e-14.
DecayRates fit_decay(const GroundStateResult& res, FitWindow phi_window = {}, FitWindow psi_window = {0.25, 0.4});

/// <K_w'(phi, psi), (phi, psi)> = 2 H_w - 9P, which equals -3P on the Nehari manifold.
double lagrange_pairing(const PairState& s, double omega);

/// Max |u|, |v| over r >= 0.95 R.
double boundary_magnitude(const PairState& s);
double max_amplitude(const PairState& s);

}  // namespace quadnls
