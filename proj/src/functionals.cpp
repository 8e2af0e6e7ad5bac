#include "quadnls/functionals.hpp"

#include <cmath>

namespace quadnls {
namespace {

void require_omega(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw Error(ErrorKind::InvalidArgument, "omega must be positive, got " + std::to_string(omega));
}

const GridSpec& checked_grid(const PairState& s) {
  if (!s.u.grid || !s.v.grid) throw Error(ErrorKind::InvalidArgument, "state without grid");
  require_same_grid(*s.u.grid, *s.v.grid);
  return *s.u.grid;
}

}  // namespace

double mass(const PairState& s) {
  checked_grid(s);
  return norm_sq(s.u) + 2.0 * norm_sq(s.v);
}

double kinetic(const PairState& s) {
  checked_grid(s);
  return gradient_norm_sq(s.u) + 0.5 * gradient_norm_sq(s.v);
}

double interaction(const PairState& s) {
  const auto& g = checked_grid(s);
  double acc = 0.0;
  for (int j = 0; j < g.nodes; ++j) {
    const Complex u = s.u.values[j];
    acc += g.weight[j] * (std::conj(s.v.values[j]) * u * u).real();
  }
  return acc;
}

FunctionalReport report_from_parts(double m, double k, double p, double omega, int dim) {
  FunctionalReport r;
  r.omega = omega;
  r.mass = m;
  r.kinetic = k;
  r.interaction = p;
  r.energy = 0.5 * k - p;
  r.action = r.energy + 0.5 * omega * m;
  r.nehari = k + omega * m - 3.0 * p;
  r.h_omega = k + omega * m;
  r.virial_q = k - 0.5 * dim * p;
  return r;
}

FunctionalReport report(const PairState& s, double omega) {
  require_omega(omega);
  return report_from_parts(mass(s), kinetic(s), interaction(s), omega, checked_grid(s).dim);
}

double energy(const PairState& s) { return 0.5 * kinetic(s) - interaction(s); }

double action(const PairState& s, double omega) { return report(s, omega).action; }

double nehari(const PairState& s, double omega) { return report(s, omega).nehari; }

double h_omega(const PairState& s, double omega) {
  require_omega(omega);
  return kinetic(s) + omega * mass(s);
}

double virial_q(const PairState& s) {
  const auto& g = checked_grid(s);
  return kinetic(s) - 0.5 * g.dim * interaction(s);
}

PairState scale(const PairState& s, double gamma) {
  const auto& g = checked_grid(s);
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw Error(ErrorKind::InvalidArgument, "scaling factor must be positive, got " + std::to_string(gamma));
  if (gamma == 1.0) return s;
  const double amp = std::pow(gamma, 0.5 * g.dim);
  PairState out(s.grid());
  for (int j = 0; j < g.nodes; ++j) {
    const double x = gamma * g.r[j];
    out.u.values[j] = amp * interpolate(s.u, x);
    out.v.values[j] = amp * interpolate(s.v, x);
  }
  return out;
}

NehariProjection nehari_project(const PairState& s, double omega) {
  require_omega(omega);
  const double p = interaction(s);
  if (!(p > 0.0))
    throw Error(ErrorKind::NonProjectable, "interaction P = " + std::to_string(p) + " is not positive");
  const double factor = h_omega(s, omega) / (3.0 * p);
  return {Complex(factor) * s, factor};
}

double virial_critical_gamma(const PairState& s) {
  const double p = interaction(s);
  if (!(p > 0.0))
    throw Error(ErrorKind::NonProjectable, "interaction P = " + std::to_string(p) + " is not positive");
  const double ratio = 2.0 * kinetic(s) / (checked_grid(s).dim * p);
  return ratio * ratio;
}

bool in_blowup_set(const PairState& s, double omega, double d_omega) {
  if (!(d_omega > 0.0)) throw Error(ErrorKind::InvalidArgument, "d(omega) must be positive");
  const auto r = report(s, omega);
  return r.action < d_omega && r.virial_q < 0.0;
}

double h1_distance(const PairState& a, const PairState& b) {
  const auto diff = a - b;
  return std::sqrt(kinetic(diff) + mass(diff));
}

PairState operator-(const PairState& a, const PairState& b) {
  require_same_grid(checked_grid(a), checked_grid(b));
  PairState out(a.grid());
  for (std::size_t j = 0; j < a.u.size(); ++j) {
    out.u.values[j] = a.u.values[j] - b.u.values[j];
    out.v.values[j] = a.v.values[j] - b.v.values[j];
  }
  return out;
}

PairState operator*(Complex c, const PairState& s) {
  PairState out(s.grid());
  for (std::size_t j = 0; j < s.u.size(); ++j) {
    out.u.values[j] = c * s.u.values[j];
    out.v.values[j] = c * s.v.values[j];
  }
  return out;
}

}  // namespace quadnls
