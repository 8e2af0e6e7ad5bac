#include "quadnls/evolution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "quadnls/log.hpp"

namespace quadnls {
namespace {

constexpr double kSubcycleBound = 0.1;
constexpr double kSpongeStrength = 10.0;
constexpr Complex kI{0.0, 1.0};

// RK4 for u' = 2i v conj(u), v' = i u^2 at a single node.
void interaction_rk4(Complex& u, Complex& v, double dt) {
  auto rhs_u = [](Complex a, Complex b) { return 2.0 * kI * b * std::conj(a); };
  auto rhs_v = [](Complex a, Complex) { return kI * a * a; };
  const Complex k1u = rhs_u(u, v), k1v = rhs_v(u, v);
  const Complex u2 = u + 0.5 * dt * k1u, v2 = v + 0.5 * dt * k1v;
  const Complex k2u = rhs_u(u2, v2), k2v = rhs_v(u2, v2);
  const Complex u3 = u + 0.5 * dt * k2u, v3 = v + 0.5 * dt * k2v;
  const Complex k3u = rhs_u(u3, v3), k3v = rhs_v(u3, v3);
  const Complex u4 = u + dt * k3u, v4 = v + dt * k3v;
  const Complex k4u = rhs_u(u4, v4), k4v = rhs_v(u4, v4);
  u += dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
  v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

void nonlinear_in_place(PairState& s, double dt) {
  if (dt == 0.0) return;
  for (std::size_t j = 0; j < s.u.size(); ++j) {
    Complex& u = s.u.values[j];
    Complex& v = s.v.values[j];
    const double amp = std::max(std::abs(u), std::abs(v));
    const double reach = std::abs(dt) * amp / kSubcycleBound;
    const int sub = reach > 1.0 ? static_cast<int>(std::ceil(reach)) : 1;
    const double h = dt / sub;
    for (int k = 0; k < sub; ++k) interaction_rk4(u, v, h);
  }
}

// (1 - i dt/2 c L) x+ = (1 + i dt/2 c L) x-
void crank_nicolson_in_place(RadialField& f, const Tridiagonal<double>& lap, double dt, double coeff) {
  if (dt == 0.0) return;
  const std::size_t n = f.size();
  const Complex half = 0.5 * dt * coeff * kI;
  Tridiagonal<Complex> implicit(n);
  std::vector<Complex> rhs(n);
  for (std::size_t j = 0; j < n; ++j) {
    implicit.lower[j] = -half * lap.lower[j];
    implicit.diag[j] = 1.0 - half * lap.diag[j];
    implicit.upper[j] = -half * lap.upper[j];
    Complex lx = lap.diag[j] * f.values[j];
    if (j > 0) lx += lap.lower[j] * f.values[j - 1];
    if (j + 1 < n) lx += lap.upper[j] * f.values[j + 1];
    rhs[j] = f.values[j] + half * lx;
  }
  TridiagonalLU<Complex>(implicit).solve_in_place<Complex>(rhs);
  f.values = std::move(rhs);
}

class SplitStepper {
 public:
  SplitStepper(const Grid& grid, const EvolveConfig& cfg)
      : lap_(laplacian_matrix(*grid)), kappa_(cfg.kappa), interaction_(cfg.interaction_enabled) {
    if (cfg.sponge_enabled) {
      sponge_.resize(grid->nodes, 0.0);
      const double start = (1.0 - cfg.sponge_width) * grid->radius;
      const double span = cfg.sponge_width * grid->radius;
      for (int j = 0; j < grid->nodes; ++j) {
        if (grid->r[j] <= start) continue;
        const double x = (grid->r[j] - start) / span;
        sponge_[j] = kSpongeStrength * x * x;
      }
    }
  }

  PairState step(const PairState& s, double dt) const {
    PairState out = s;
    if (interaction_) nonlinear_in_place(out, 0.5 * dt);
    crank_nicolson_in_place(out.u, lap_, dt, 1.0);
    crank_nicolson_in_place(out.v, lap_, dt, kappa_);
    if (!sponge_.empty()) {
      for (std::size_t j = 0; j < sponge_.size(); ++j) {
        const double damp = std::exp(-std::abs(dt) * sponge_[j]);
        out.u.values[j] *= damp;
        out.v.values[j] *= damp;
      }
    }
    if (interaction_) nonlinear_in_place(out, 0.5 * dt);
    return out;
  }

 private:
  Tridiagonal<double> lap_;
  double kappa_;
  bool interaction_;
  std::vector<double> sponge_;
};

TraceRow measure(const PairState& s, double t, double dt, double kappa, double mass0) {
  TraceRow row;
  row.t = t;
  row.dt = dt;
  row.mass = mass(s);
  row.kinetic = gradient_norm_sq(s.u) + kappa * gradient_norm_sq(s.v);
  row.interaction = interaction(s);
  row.energy = 0.5 * row.kinetic - row.interaction;
  row.virial_q = row.kinetic - 0.5 * s.grid()->dim * row.interaction;
  row.second_moment = second_moment(s);
  row.max_amplitude = max_amplitude(s);
  row.mass_drift = mass0 > 0.0 ? std::abs(row.mass - mass0) / mass0 : std::abs(row.mass);
  return row;
}

bool finite(const PairState& s) { return s.u.all_finite() && s.v.all_finite(); }

// Cubic Lagrange interpolation of column `get` at time x over the rows.
template <typename Get>
double interp_column(const std::vector<TraceRow>& rows, double x, Get get) {
  const std::size_t n = rows.size();
  auto it = std::upper_bound(rows.begin(), rows.end(), x, [](double v, const TraceRow& r) { return v < r.t; });
  std::size_t hi = static_cast<std::size_t>(it - rows.begin());
  std::size_t start = hi >= 2 ? hi - 2 : 0;
  if (start + 4 > n) start = n - 4;
  double acc = 0.0;
  for (std::size_t a = start; a < start + 4; ++a) {
    double w = 1.0;
    for (std::size_t b = start; b < start + 4; ++b)
      if (b != a) w *= (x - rows[b].t) / (rows[a].t - rows[b].t);
    acc += w * get(rows[a]);
  }
  return acc;
}

}  // namespace

std::string to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::Completed: return "Completed";
    case OutcomeKind::BlowupDetected: return "BlowupDetected";
    case OutcomeKind::Aborted: return "Aborted";
  }
  return "Unknown";
}

void EvolveConfig::validate() const {
  auto positive = [](double x, const char* key) {
    if (!(x > 0.0) || !std::isfinite(x)) throw Error(ErrorKind::InvalidArgument, std::string(key) + " must be positive");
  };
  positive(kappa, "kappa");
  positive(t_max, "t_max");
  positive(dt_init, "dt_init");
  positive(dt_min, "dt_min");
  positive(blowup_kinetic_ratio, "blowup_kinetic_ratio");
  if (!(dt_min < dt_init)) throw Error(ErrorKind::InvalidArgument, "dt_min must be smaller than dt_init");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw Error(ErrorKind::InvalidArgument, "cfl_safety must lie in (0, 1]");
  if (!(sponge_width > 0.0 && sponge_width < 1.0))
    throw Error(ErrorKind::InvalidArgument, "sponge_width must lie in (0, 1)");
  if (sample_every < 1) throw Error(ErrorKind::InvalidArgument, "sample_every must be >= 1");
}

PairState nonlinear_substep(const PairState& s, double dt) {
  PairState out = s;
  nonlinear_in_place(out, dt);
  return out;
}

PairState linear_substep(const PairState& s, double dt, double kappa) {
  const auto lap = laplacian_matrix(*s.grid());
  PairState out = s;
  crank_nicolson_in_place(out.u, lap, dt, 1.0);
  crank_nicolson_in_place(out.v, lap, dt, kappa);
  return out;
}

PairState strang_step(const PairState& s, double dt, double kappa) {
  EvolveConfig cfg;
  cfg.kappa = kappa;
  return SplitStepper(s.grid(), cfg).step(s, dt);
}

std::optional<Outcome> BlowupDetector::observe(double t, double kinetic) const {
  if (k0_ > 0.0 && kinetic > ratio_ * k0_) return Outcome::blowup(t);
  return std::nullopt;
}

Outcome BlowupDetector::on_dt_collapse(double t, double amplitude, const std::string& why) const {
  if (amplitude > a0_) return Outcome::blowup(t);
  return Outcome::aborted(why);
}

EvolveResult evolve(const PairState& initial, const EvolveConfig& cfg) {
  cfg.validate();
  if (!initial.u.grid || !initial.v.grid) throw Error(ErrorKind::InvalidArgument, "initial state without grid");
  require_same_grid(*initial.u.grid, *initial.v.grid);
  if (!finite(initial)) throw Error(ErrorKind::InvalidArgument, "initial state has non-finite samples");

  const SplitStepper stepper(initial.grid(), cfg);
  EvolveResult out;
  out.trace.kappa = cfg.kappa;
  PairState s = initial;

  const double mass0 = mass(s);
  auto planned_dt = [&](double amplitude) {
    const double limit = amplitude > 0.0 ? kSubcycleBound / amplitude : std::numeric_limits<double>::infinity();
    return cfg.cfl_safety * std::min(cfg.dt_init, limit);
  };

  TraceRow row = measure(s, 0.0, planned_dt(max_amplitude(s)), cfg.kappa, mass0);
  out.trace.rows.push_back(row);
  const BlowupDetector detector(row.kinetic, row.max_amplitude, cfg.blowup_kinetic_ratio);

  double t = 0.0;
  const double t_end = cfg.t_max * (1.0 - 1e-14);
  while (t < t_end) {
    const double amplitude = row.max_amplitude;
    double dt = planned_dt(amplitude);
    if (dt < cfg.dt_min) {
      out.trace.outcome = detector.on_dt_collapse(t, amplitude, "StepCollapse");
      break;
    }
    // land on t_max; a remainder within rounding of dt is absorbed rather than
    // left for a vanishing final step
    if (cfg.t_max - t <= dt * (1.0 + 1e-6)) dt = cfg.t_max - t;

    PairState next;
    bool accepted = false;
    try {
      while (true) {
        next = stepper.step(s, dt);
        if (finite(next)) {
          accepted = true;
          break;
        }
        ++out.trace.rejected_steps;
        dt *= 0.5;
        if (dt < cfg.dt_min) break;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::LinearSolve) throw;
      out.trace.outcome = Outcome::aborted("LinearSolve");
      break;
    }
    if (!accepted) {
      out.trace.outcome = detector.on_dt_collapse(t, amplitude, "NonFinite");
      if (out.trace.outcome.kind == OutcomeKind::Aborted) out.trace.outcome.reason = "NonFinite";
      break;
    }

    s = std::move(next);
    t += dt;
    ++out.trace.steps;
    // full diagnostics only on sampled steps; kinetic and amplitude every step
    const double kin = gradient_norm_sq(s.u) + cfg.kappa * gradient_norm_sq(s.v);
    if (auto hit = detector.observe(t, kin)) {
      out.trace.rows.push_back(measure(s, t, dt, cfg.kappa, mass0));
      out.trace.outcome = *hit;
      spdlog::info("evolve: blow-up detected at t = {:.6g} after {} steps", t, out.trace.steps);
      break;
    }
    if (out.trace.steps % cfg.sample_every == 0 || t >= t_end) {
      row = measure(s, t, dt, cfg.kappa, mass0);
      out.trace.rows.push_back(row);
    } else {
      row.max_amplitude = max_amplitude(s);
    }
  }
  if (out.trace.outcome.kind == OutcomeKind::BlowupDetected) {
    s.u.post_blowup = true;
    s.v.post_blowup = true;
  }
  out.state = std::move(s);
  return out;
}

Outcome detect_blowup(const EvolutionTrace& trace, double kinetic_ratio, double dt_min) {
  if (trace.rows.empty()) return Outcome::completed();
  const auto& first = trace.rows.front();
  const BlowupDetector detector(first.kinetic, first.max_amplitude, kinetic_ratio);
  for (std::size_t k = 1; k < trace.rows.size(); ++k) {
    const auto& r = trace.rows[k];
    if (auto hit = detector.observe(r.t, r.kinetic)) return *hit;
    if (r.dt <= dt_min && r.max_amplitude > first.max_amplitude) return Outcome::blowup(r.t);
  }
  return Outcome::completed();
}

double virial_residual(const EvolutionTrace& trace) {
  const auto& rows = trace.rows;
  if (rows.size() < 5) throw Error(ErrorKind::TooFewSamples, "virial residual needs at least 5 trace samples");
  if (trace.outcome.kind != OutcomeKind::Completed)
    throw Error(ErrorKind::InvalidArgument, "virial residual needs a completed run");
  const std::size_t n = rows.size();
  const double t0 = rows.front().t, t1 = rows.back().t;
  const double step = (t1 - t0) / static_cast<double>(n - 1);
  std::vector<double> v(n), q(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = k + 1 == n ? t1 : t0 + step * k;
    v[k] = interp_column(rows, t, [](const TraceRow& r) { return r.second_moment; });
    q[k] = interp_column(rows, t, [](const TraceRow& r) { return r.virial_q; });
  }
  const double floor = 1e-8 * rows.front().kinetic;
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double second = (v[k + 1] - 2.0 * v[k] + v[k - 1]) / (step * step);
    worst = std::max(worst, std::abs(second - 8.0 * q[k]) / (std::abs(8.0 * q[k]) + floor));
  }
  return worst;
}

double fitted_moment_curvature(const EvolutionTrace& trace, double t_end) {
  // normal equations for V = c0 + c1 t + c2 t^2
  std::array<double, 5> pw{};
  std::array<double, 3> rhs{};
  int count = 0;
  for (const auto& r : trace.rows) {
    if (r.t > t_end) break;
    double p = 1.0;
    for (int k = 0; k < 5; ++k) {
      pw[k] += p;
      if (k < 3) rhs[k] += p * r.second_moment;
      p *= r.t;
    }
    ++count;
  }
  if (count < 3) throw Error(ErrorKind::TooFewSamples, "curvature fit needs at least 3 samples");
  double a[3][4];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) a[i][j] = pw[i + j];
    a[i][3] = rhs[i];
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int i = c + 1; i < 3; ++i)
      if (std::abs(a[i][c]) > std::abs(a[piv][c])) piv = i;
    for (int j = 0; j < 4; ++j) std::swap(a[c][j], a[piv][j]);
    for (int i = 0; i < 3; ++i) {
      if (i == c) continue;
      const double f = a[i][c] / a[c][c];
      for (int j = c; j < 4; ++j) a[i][j] -= f * a[c][j];
    }
  }
  return 2.0 * a[2][3] / a[2][2];
}

double standing_wave_error(const PairState& final_state, const GroundStateResult& ground, double t) {
  require_same_grid(*final_state.grid(), *ground.state.grid());
  const Complex phase_u = std::exp(kI * (ground.omega * t));
  const Complex phase_v = std::exp(kI * (2.0 * ground.omega * t));
  RadialField du(final_state.grid()), dv(final_state.grid());
  for (std::size_t j = 0; j < du.size(); ++j) {
    du.values[j] = final_state.u.values[j] - phase_u * ground.state.u.values[j];
    dv.values[j] = final_state.v.values[j] - phase_v * ground.state.v.values[j];
  }
  return std::max(std::sqrt(norm_sq(du) / norm_sq(ground.state.u)), std::sqrt(norm_sq(dv) / norm_sq(ground.state.v)));
}

}  // namespace quadnls
