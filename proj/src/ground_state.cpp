#include "quadnls/ground_state.hpp"

#include <algorithm>
#include <cmath>

#include "quadnls/log.hpp"

namespace quadnls {
namespace {

constexpr double kTailUnderflow = 1e-14;
constexpr double kLeakBound = 1e-10;
constexpr int kMonotoneTransient = 100;
constexpr int kMonotonePersistent = 200;

TridiagonalLU<double> shifted_operator(const Tridiagonal<double>& lap, double tau, double diffusion, double shift) {
  Tridiagonal<double> m = lap;
  for (std::size_t j = 0; j < m.size(); ++j) {
    m.lower[j] = -tau * diffusion * lap.lower[j];
    m.upper[j] = -tau * diffusion * lap.upper[j];
    m.diag[j] = 1.0 + tau * (shift - diffusion * lap.diag[j]);
  }
  return TridiagonalLU<double>(m);
}

// Rotate (u, v) -> (e^{-i theta} u, e^{-2 i theta} v) so that \int u dx is real positive.
void align_phase(PairState& s) {
  const auto& g = *s.grid();
  Complex total{};
  for (int j = 0; j < g.nodes; ++j) total += g.weight[j] * s.u.values[j];
  if (std::abs(total) == 0.0) return;
  const Complex rot = std::conj(total) / std::abs(total);
  for (int j = 0; j < g.nodes; ++j) {
    s.u.values[j] *= rot;
    s.v.values[j] *= rot * rot;
  }
}

double slope_fit(const GridSpec& g, const RadialField& f, FitWindow w, const char* name) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int j = 0; j < g.nodes; ++j) {
    const double r = g.r[j];
    if (r < w.lo * g.radius || r > w.hi * g.radius) continue;
    const double a = std::abs(f.values[j]);
    if (!(a >= kTailUnderflow))
      throw Error(ErrorKind::DecayWindowUnderflow, std::string(name) + " falls below 1e-14 at r = " + std::to_string(r) +
                                                       "; shrink R or the fit window");
    const double y = std::log(a);
    sx += r;
    sy += y;
    sxx += r * r;
    sxy += r * y;
    ++n;
  }
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "decay window contains fewer than two nodes");
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -slope;
}

}  // namespace

void GroundStateConfig::validate() const {
  auto positive = [](double x, const char* key) {
    if (!(x > 0.0) || !std::isfinite(x)) throw Error(ErrorKind::InvalidArgument, std::string(key) + " must be positive");
  };
  positive(omega, "omega");
  positive(tau, "tau");
  positive(residual_tol, "residual_tol");
  positive(init_a, "init_a");
  positive(init_b, "init_b");
  positive(init_width, "init_width");
  if (residual_tol >= 1.0) throw Error(ErrorKind::InvalidArgument, "residual_tol must be < 1");
  if (max_iters <= 0) throw Error(ErrorKind::InvalidArgument, "max_iters must be positive");
  if (!grid) throw Error(ErrorKind::InvalidArgument, "ground-state config has no grid");
}

double elliptic_residual(const PairState& s, double omega) {
  const auto lu = laplacian(s.u);
  const auto lv = laplacian(s.v);
  RadialField lin_u(s.grid()), lin_v(s.grid()), res_u(s.grid()), res_v(s.grid());
  for (std::size_t j = 0; j < s.u.size(); ++j) {
    const Complex u = s.u.values[j], v = s.v.values[j];
    lin_u.values[j] = -lu.values[j] + omega * u;
    lin_v.values[j] = -0.5 * lv.values[j] + 2.0 * omega * v;
    res_u.values[j] = lin_u.values[j] - 2.0 * v * std::conj(u);
    res_v.values[j] = lin_v.values[j] - u * u;
  }
  const double nu = norm_sq(lin_u), nv = norm_sq(lin_v);
  if (nu == 0.0 || nv == 0.0) return std::numeric_limits<double>::infinity();
  return std::max(std::sqrt(norm_sq(res_u) / nu), std::sqrt(norm_sq(res_v) / nv));
}

double max_amplitude(const PairState& s) {
  double m = 0.0;
  for (std::size_t j = 0; j < s.u.size(); ++j) m = std::max({m, std::abs(s.u.values[j]), std::abs(s.v.values[j])});
  return m;
}

double boundary_magnitude(const PairState& s) {
  const auto& g = *s.grid();
  double m = 0.0;
  for (int j = 0; j < g.nodes; ++j)
    if (g.r[j] >= 0.95 * g.radius) m = std::max({m, std::abs(s.u.values[j]), std::abs(s.v.values[j])});
  return m;
}

GroundStateResult solve_ground_state(const GroundStateConfig& cfg) {
  cfg.validate();
  const auto& grid = cfg.grid;
  const int n = grid->nodes;
  const double omega = cfg.omega, tau = cfg.tau;

  const auto lap = laplacian_matrix(*grid);
  const auto solve_u = shifted_operator(lap, tau, 1.0, omega);
  const auto solve_v = shifted_operator(lap, tau, 0.5, 2.0 * omega);

  const double w2 = 2.0 * cfg.init_width * cfg.init_width;
  PairState s(sample(grid, [&](double r) { return cfg.init_a * std::exp(-r * r / w2); }),
              sample(grid, [&](double r) { return cfg.init_b * std::exp(-r * r / w2); }));
  s = nehari_project(s, omega).state;

  GroundStateResult res;
  res.omega = omega;
  double prev_action = action(s, omega);
  int consecutive_violations = 0;
  double residual = elliptic_residual(s, omega);

  int it = 0;
  while (residual > cfg.residual_tol) {
    if (it >= cfg.max_iters)
      throw Error(ErrorKind::NoConvergence, "ground state: residual " + std::to_string(residual) + " after " +
                                                std::to_string(it) + " iterations");
    ++it;
    std::vector<Complex> nu(n), nv(n);
    for (int j = 0; j < n; ++j) {
      const Complex u = s.u.values[j], v = s.v.values[j];
      nu[j] = u + 2.0 * tau * v * std::conj(u);
      nv[j] = v + tau * u * u;
    }
    solve_u.solve_in_place<Complex>(nu);
    solve_v.solve_in_place<Complex>(nv);
    s = nehari_project(PairState(RadialField(grid, std::move(nu)), RadialField(grid, std::move(nv))), omega).state;
    if (!s.u.all_finite() || !s.v.all_finite())
      throw Error(ErrorKind::NoConvergence, "ground state iterate became non-finite at iteration " + std::to_string(it));

    const double a = action(s, omega);
    if (it > kMonotoneTransient && a > prev_action + 1e-12 * std::abs(prev_action)) {
      ++res.monotonicity_violations;
      spdlog::debug("ground state: action increased at iteration {} by {:.3e}", it, a - prev_action);
      if (++consecutive_violations > kMonotonePersistent)
        throw Error(ErrorKind::NoConvergence, "ground state: action increasing persistently");
    } else {
      consecutive_violations = 0;
    }
    prev_action = a;
    residual = elliptic_residual(s, omega);
    if (it % 1000 == 0) spdlog::debug("ground state: iteration {} residual {:.3e} action {:.12g}", it, residual, a);
  }

  align_phase(s);
  res.state = std::move(s);
  res.iterations = it;
  res.residual = residual;
  res.max_amplitude = max_amplitude(res.state);
  res.boundary_leak = boundary_magnitude(res.state);
  if (res.boundary_leak > kLeakBound * res.max_amplitude)
    throw Error(ErrorKind::DomainTooSmall, "profile magnitude " + std::to_string(res.boundary_leak) +
                                               " near r = R exceeds 1e-10 of the peak; enlarge R");
  res.d_omega = action(res.state, omega);
  res.pohozaev = pohozaev_residuals(res.state, omega);
  try {
    res.decay_rates = fit_decay(res);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DecayWindowUnderflow) throw;
    spdlog::info("ground state: {}", e.what());
  }
  spdlog::info("ground state: omega={} converged in {} iterations, d={:.10g}", omega, it, res.d_omega);
  return res;
}

PohozaevResiduals pohozaev_residuals(const PairState& s, double omega) {
  const auto r = report(s, omega);
  if (!(r.kinetic > 0.0) || !(r.interaction > 0.0))
    throw Error(ErrorKind::InvalidArgument, "Pohozaev identities need K > 0 and P > 0 (not a ground state)");
  PohozaevResiduals p;
  p.kinetic = std::abs(2.0 * r.kinetic - 5.0 * r.interaction) / r.kinetic;
  p.mass = std::abs(2.0 * omega * r.mass - r.interaction) / r.interaction;
  p.combined = std::abs(r.kinetic + omega * r.mass - 3.0 * r.interaction) / r.interaction;
  return p;
}

PohozaevResiduals verify_pohozaev(const GroundStateResult& res) { return pohozaev_residuals(res.state, res.omega); }

double estimate_d(const GroundStateResult& res) { return action(res.state, res.omega); }

PairState omega_rescale(const GroundStateResult& res, double omega_new) {
  if (!(omega_new > 0.0) || !std::isfinite(omega_new))
    throw Error(ErrorKind::InvalidArgument, "target omega must be positive");
  const double ratio = omega_new / res.omega;
  if (ratio == 1.0) return res.state;
  const double stretch = std::sqrt(ratio);
  const auto& g = *res.state.grid();
  PairState out(res.state.grid());
  for (int j = 0; j < g.nodes; ++j) {
    out.u.values[j] = ratio * interpolate(res.state.u, stretch * g.r[j]);
    out.v.values[j] = ratio * interpolate(res.state.v, stretch * g.r[j]);
  }
  return out;
}

DecayRates fit_decay(const GroundStateResult& res, FitWindow phi_window, FitWindow psi_window) {
  const auto& g = *res.state.grid();
  return {slope_fit(g, res.state.u, phi_window, "phi"), slope_fit(g, res.state.v, psi_window, "psi")};
}

double lagrange_pairing(const PairState& s, double omega) {
  const auto r = report(s, omega);
  return 2.0 * r.h_omega - 9.0 * r.interaction;
}

}  // namespace quadnls
