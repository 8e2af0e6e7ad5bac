#pragma once

// Conserved quantities and variational functionals of the mass-resonant
// quadratic system (kappa = 1/2):
//
//   M = |u|^2 + 2|v|^2             K = |u'|^2 + 1/2 |v'|^2
//   P = Re \int conj(v) u^2        E = K/2 - P
//   S_w = E + w/2 M                K_w = K + w M - 3P   (Nehari)
//   H_w = K + w M                  Q = K - d/2 P        (virial)

#include "quadnls/radial_domain.hpp"

namespace quadnls {

struct FunctionalReport {
  double mass = 0.0;
  double kinetic = 0.0;
  double interaction = 0.0;
  double energy = 0.0;
  double action = 0.0;
  double nehari = 0.0;
  double h_omega = 0.0;
  double virial_q = 0.0;
  double omega = 1.0;
};

double mass(const PairState& s);
double kinetic(const PairState& s);
double interaction(const PairState& s);
double energy(const PairState& s);
double action(const PairState& s, double omega);
double nehari(const PairState& s, double omega);
double h_omega(const PairState& s, double omega);
double virial_q(const PairState& s);

/// Evaluates M, K and P once and assembles every derived functional from them.
FunctionalReport report(const PairState& s, double omega);
FunctionalReport report_from_parts(double mass, double kinetic, double interaction, double omega, int dim = 5);

/// Mass-invariant dilation (gamma^{d/2} u(gamma r), gamma^{d/2} v(gamma r)),
/// resampled on the original grid by cubic interpolation.
PairState scale(const PairState& s, double gamma);

struct NehariProjection {
  PairState state;
  double gamma = 1.0;  ///< amplitude factor H_w / (3P)
};

/// Amplitude scaling onto K_w = 0. Throws NonProjectable when P <= 0.
NehariProjection nehari_project(const PairState& s, double omega);

/// The dilation factor (2K / 5P)^2 at which Q of the dilated state vanishes.
double virial_critical_gamma(const PairState& s);

/// Membership in {S_w < d(w), Q < 0}.
bool in_blowup_set(const PairState& s, double omega, double d_omega);

/// sqrt(K + M) of the difference pair.
double h1_distance(const PairState& a, const PairState& b);

PairState operator-(const PairState& a, const PairState& b);
PairState operator*(Complex c, const PairState& s);

}  // namespace quadnls
