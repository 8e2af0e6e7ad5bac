#include "quadnls/experiments.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <future>
#include <random>
#include <sstream>

#include "quadnls/io.hpp"
#include "quadnls/log.hpp"

namespace quadnls {
namespace {

constexpr double kResolvedKineticRatio = 10.0;

std::string describe(const GridSpec& g) {
  return "grid(" + std::to_string(g.dim) + "," + format_double(g.radius) + "," + std::to_string(g.nodes) + ")";
}

std::string describe(const GroundStateConfig& c) {
  return "ground(" + format_double(c.omega) + "," + format_double(c.tau) + "," + std::to_string(c.max_iters) + "," +
         format_double(c.residual_tol) + "," + format_double(c.init_a) + "," + format_double(c.init_b) + "," +
         format_double(c.init_width) + ")" + describe(*c.grid);
}

std::string describe(const EvolveConfig& c) {
  return "evolve(" + format_double(c.kappa) + "," + format_double(c.t_max) + "," + format_double(c.dt_init) + "," +
         format_double(c.dt_min) + "," + format_double(c.cfl_safety) + "," + format_double(c.blowup_kinetic_ratio) + "," +
         std::to_string(c.sponge_enabled) + "," + format_double(c.sponge_width) + "," + std::to_string(c.sample_every) +
         ")";
}

std::string describe(const std::vector<double>& xs) {
  std::string s = "[";
  for (double x : xs) s += format_double(x) + ";";
  return s + "]";
}

Provenance make_provenance(const std::string& canonical) { return {fnv1a_hex(canonical), library_version()}; }

// A smooth positive profile pair
//   u = (1 + c r^2/w^2) exp(-r^2 / 2w^2),  v = b exp(-r^2 / 2w_v^2),
// dilated analytically: gamma^{d/2} f(gamma r) scaled by amplitude alpha.
struct TrialProfile {
  double c, w, b, wv;

  PairState sample_at(const Grid& g, double alpha, double gamma) const {
    const double pref = alpha * std::pow(gamma, 0.5 * g->dim);
    return PairState(sample(g,
                            [&](double r) {
                              const double x = gamma * r / w;
                              return pref * (1.0 + c * x * x) * std::exp(-0.5 * x * x);
                            }),
                     sample(g, [&](double r) {
                       const double x = gamma * r / wv;
                       return pref * b * std::exp(-0.5 * x * x);
                     }));
  }
};

std::vector<TrialProfile> trial_profiles(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<TrialProfile> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    TrialProfile p;
    p.c = 0.5 * unit(rng);
    p.w = 0.5 + 1.5 * unit(rng);
    p.b = 0.3 + 1.7 * unit(rng);
    p.wv = p.w * (0.6 + 0.8 * unit(rng));
    out.push_back(p);
  }
  return out;
}

// Amplitude giving trial k of `count` a virial-critical dilation spread over [0.7, 1.4].
double amplitude_for(const TrialProfile& p, const Grid& g, std::size_t index, std::size_t count) {
  const double target = 0.7 + 0.7 * (static_cast<double>(index) + 0.5) / static_cast<double>(count);
  const auto base = p.sample_at(g, 1.0, 1.0);
  const double k = kinetic(base), pp = interaction(base);
  return 2.0 * k / (5.0 * pp * std::sqrt(target));
}

// Dilation of the analytic profile at which the discrete Q vanishes (secant
// iteration started from the continuous scaling law).
PairState virial_zero(const TrialProfile& p, const Grid& g, double alpha) {
  auto q_at = [&](double gamma) { return virial_q(p.sample_at(g, alpha, gamma)); };
  double g0 = virial_critical_gamma(p.sample_at(g, alpha, 1.0));
  double g1 = g0 * (1.0 + 1e-3);
  double q0 = q_at(g0), q1 = q_at(g1);
  for (int it = 0; it < 30 && q1 != q0; ++it) {
    const double g2 = g1 - q1 * (g1 - g0) / (q1 - q0);
    g0 = g1;
    q0 = q1;
    g1 = g2;
    q1 = q_at(g1);
    if (std::abs(g1 - g0) <= 1e-14 * g1) break;
  }
  return p.sample_at(g, alpha, g1);
}

CheckItem check(std::string name, double value, double threshold, bool passed, std::string detail = {},
                bool gating = true) {
  return {std::move(name), value, threshold, passed, gating, std::move(detail)};
}

double row_action(const TraceRow& r, double omega) { return r.energy + 0.5 * omega * r.mass; }

}  // namespace

std::string library_version() { return std::string("quadnls ") + QUADNLS_VERSION; }

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::vector<PairState> trial_pairs(const Grid& grid, int count, std::uint64_t seed) {
  const auto profiles = trial_profiles(count, seed);
  std::vector<PairState> out;
  for (std::size_t k = 0; k < profiles.size(); ++k)
    out.push_back(profiles[k].sample_at(grid, amplitude_for(profiles[k], grid, k, profiles.size()), 1.0));
  return out;
}

CertificationReport certify_ground_state(const GroundStateConfig& cfg, std::uint64_t seed, int trials) {
  CertificationReport rep;
  rep.result = solve_ground_state(cfg);
  const auto& res = rep.result;
  const auto& s = res.state;
  const double omega = res.omega;
  const auto f = report(s, omega);
  auto& out = rep.checks;

  const auto& poh = res.pohozaev;
  out.push_back(check("pohozaev_kinetic", poh.kinetic, 1e-3, poh.kinetic <= 1e-3, "|2K - 5P| / K"));
  out.push_back(check("pohozaev_mass", poh.mass, 1e-3, poh.mass <= 1e-3, "|2wM - P| / P"));
  out.push_back(check("pohozaev_combined", poh.combined, 1e-3, poh.combined <= 1e-3, "|K + wM - 3P| / P"));

  const double d_vs_p = std::abs(res.d_omega - 0.5 * f.interaction) / res.d_omega;
  out.push_back(check("action_equals_half_interaction", d_vs_p, 1e-8, d_vs_p <= 1e-8,
                      "d = " + format_double(res.d_omega) + ", P = " + format_double(f.interaction)));
  out.push_back(check("action_positive", res.d_omega, 0.0, res.d_omega > 0.0));

  const double neh = std::abs(f.nehari) / f.h_omega;
  out.push_back(check("nehari_zero", neh, 1e-10, neh <= 1e-10, "|K_w| / H_w"));
  const double qres = std::abs(f.virial_q) / f.kinetic;
  out.push_back(check("virial_zero", qres, 1e-3, qres <= 1e-3, "|Q| / K"));

  const double lag = std::abs(lagrange_pairing(s, omega) + 3.0 * f.interaction) / (3.0 * f.interaction);
  out.push_back(check("lagrange_identity", lag, 1e-8, lag <= 1e-8, "|(2H - 9P) + 3P| / 3P"));

  out.push_back(check("residual", res.residual, cfg.residual_tol, res.residual <= cfg.residual_tol));
  const double leak = res.boundary_leak / res.max_amplitude;
  out.push_back(check("boundary_leak", leak, 1e-10, leak <= 1e-10, "max |.| over r >= 0.95R / peak"));

  double imag = 0.0, negative = 0.0;
  for (std::size_t j = 0; j < s.u.size(); ++j) {
    imag = std::max({imag, std::abs(s.u.values[j].imag()), std::abs(s.v.values[j].imag())});
    negative = std::max({negative, -s.u.values[j].real(), -s.v.values[j].real()});
  }
  const double pos = std::max(imag, negative) / res.max_amplitude;
  out.push_back(check("positivity", pos, 1e-8, pos <= 1e-8, "max(imaginary part, negative part) / peak"));
  out.push_back(check("monotone_action", res.monotonicity_violations, 0, true,
                      "isolated increases after the transient (logged, non-persistent)", false));

  if (res.decay_rates) {
    const auto& dr = *res.decay_rates;
    out.push_back(check("decay_phi_integrable", dr.phi, 0.6, dr.phi >= 0.6, "rate must exceed 1/2 with margin"));
    out.push_back(check("decay_psi_vs_phi", dr.psi, 0.9 * dr.phi, dr.psi >= 0.9 * dr.phi));
    const double rel = std::abs(dr.phi - std::sqrt(omega)) / std::sqrt(omega);
    out.push_back(check("decay_phi_near_sqrt_omega", rel, 0.1, rel <= 0.1,
                        "diagnostic; the algebraic prefactor biases the fitted rate upward", false));
  } else {
    out.push_back(check("decay_fit", 0.0, 1e-14, false, "tail window underflows; shrink R or the window"));
  }

  const auto profiles = trial_profiles(trials, seed);
  double worst_nehari = std::numeric_limits<double>::infinity();
  double worst_virial = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    const double alpha = amplitude_for(profiles[k], cfg.grid, k, profiles.size());
    const auto trial = profiles[k].sample_at(cfg.grid, alpha, 1.0);
    const double sn = action(nehari_project(trial, omega).state, omega);
    const double sq = action(virial_zero(profiles[k], cfg.grid, alpha), omega);
    worst_nehari = std::min(worst_nehari, sn - res.d_omega);
    worst_virial = std::min(worst_virial, sq - res.d_omega);
  }
  out.push_back(check("trial_nehari_above_d", worst_nehari, -1e-6, worst_nehari >= -1e-6,
                      "min over trials of S_w(nehari_project(trial)) - d"));
  out.push_back(check("trial_virial_above_d", worst_virial, -1e-6, worst_virial >= -1e-6,
                      "min over trials of S_w(trial dilated to Q = 0) - d"));

  rep.all_passed = std::all_of(out.begin(), out.end(), [](const CheckItem& c) { return c.passed || !c.gating; });
  rep.provenance = make_provenance("certify|" + describe(cfg) + "|seed=" + std::to_string(seed) +
                                   "|trials=" + std::to_string(trials));
  return rep;
}

InstabilityReport run_instability(double omega, const std::vector<double>& gammas, double horizon,
                                  const GroundStateConfig& ground_cfg, const EvolveConfig& evolve_cfg) {
  if (gammas.empty()) throw Error(ErrorKind::InvalidArgument, "gamma_values must not be empty");
  for (double g : gammas)
    if (!(g > 0.0) || !std::isfinite(g)) throw Error(ErrorKind::InvalidArgument, "gamma values must be positive");
  if (!(horizon > 0.0)) throw Error(ErrorKind::InvalidArgument, "horizon must be positive");

  GroundStateConfig gc = ground_cfg;
  gc.omega = omega;
  EvolveConfig ec = evolve_cfg;
  ec.kappa = 0.5;
  ec.t_max = horizon;
  ec.sponge_enabled = false;
  ec.validate();

  InstabilityReport rep;
  rep.omega = omega;
  rep.gamma_values = gammas;
  const auto ground = solve_ground_state(gc);
  rep.d_omega = ground.d_omega;

  auto run_one = [&](double gamma) {
    GammaRecord rec;
    rec.gamma = gamma;
    try {
      const auto s0 = scale(ground.state, gamma);
      const auto f = report(s0, omega);
      rec.action = f.action;
      rec.virial_q = f.virial_q;
      rec.in_blowup_set = f.action < rep.d_omega && f.virial_q < 0.0;
      rec.delta = 2.0 * (rep.d_omega - f.action);
      rec.initial_h1_distance = h1_distance(s0, ground.state);

      auto run = evolve(s0, ec);
      rec.outcome = run.trace.outcome;
      if (run.trace.outcome.kind == OutcomeKind::BlowupDetected) rec.t_star = run.trace.outcome.t_star;

      const auto& rows = run.trace.rows;
      const double k0 = rows.front().kinetic;
      const double t_limit = rec.t_star ? *rec.t_star : std::numeric_limits<double>::infinity();
      rec.q_negative_along_run = true;
      rec.action_below_d_along_resolved_run = true;
      for (const auto& r : rows) {
        if (r.t > t_limit) break;
        if (!(r.virial_q < 0.0)) rec.q_negative_along_run = false;
        if (r.kinetic <= kResolvedKineticRatio * k0) {
          rec.resolved_until = r.t;
          if (!(row_action(r, omega) < rep.d_omega)) rec.action_below_d_along_resolved_run = false;
        }
      }
      int resolved_rows = 0;
      for (const auto& r : rows) resolved_rows += r.t <= rec.resolved_until;
      if (resolved_rows >= 5) rec.fitted_curvature = fitted_moment_curvature(run.trace, rec.resolved_until);
      rec.trace = std::move(run.trace);
    } catch (const std::exception& e) {
      rec.error = e.what();
      spdlog::warn("instability: gamma={} failed: {}", gamma, e.what());
    }
    return rec;
  };

  std::vector<std::future<GammaRecord>> jobs;
  for (double g : gammas) jobs.push_back(std::async(std::launch::async, run_one, g));
  for (auto& j : jobs) rep.records.push_back(j.get());

  std::vector<std::pair<double, double>> blown;
  for (const auto& r : rep.records)
    if (r.gamma > 1.0 && r.t_star) blown.emplace_back(r.gamma, *r.t_star);
  std::sort(blown.begin(), blown.end());
  for (std::size_t i = 1; i < blown.size(); ++i)
    if (blown[i].second > blown[i - 1].second) rep.t_star_monotone = false;

  rep.provenance = make_provenance("instability|" + format_double(omega) + "|" + describe(gammas) + "|" +
                                   format_double(horizon) + "|" + describe(gc) + "|" + describe(ec));
  return rep;
}

double aligned_l2_distance(const PairState& a, const PairState& b) {
  require_same_grid(*a.grid(), *b.grid());
  const auto& g = *a.grid();
  // Candidate global phases come from the overlaps of each component.
  Complex cu{}, cv{};
  for (int j = 0; j < g.nodes; ++j) {
    cu += g.weight[j] * std::conj(a.u.values[j]) * b.u.values[j];
    cv += g.weight[j] * std::conj(a.v.values[j]) * b.v.values[j];
  }
  auto dist = [&](double t) {
    const Complex e1 = std::polar(1.0, t), e2 = e1 * e1;
    double du = 0, dv = 0, nu = 0, nv = 0;
    for (int j = 0; j < g.nodes; ++j) {
      du += g.weight[j] * std::norm(e1 * a.u.values[j] - b.u.values[j]);
      dv += g.weight[j] * std::norm(e2 * a.v.values[j] - b.v.values[j]);
      nu += g.weight[j] * std::norm(b.u.values[j]);
      nv += g.weight[j] * std::norm(b.v.values[j]);
    }
    return std::max(std::sqrt(du / nu), std::sqrt(dv / nv));
  };
  double best_t = std::arg(cu), best = dist(best_t);
  for (double t : {best_t + M_PI, 0.5 * std::arg(cv), 0.5 * std::arg(cv) + M_PI}) {
    const double d = dist(t);
    if (d < best) best = d, best_t = t;
  }
  return best;
}

OmegaStudyReport run_omega_study(const std::vector<double>& omegas, const GroundStateConfig& ground_cfg) {
  if (omegas.empty()) throw Error(ErrorKind::InvalidArgument, "omega_values must not be empty");
  for (double w : omegas)
    if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorKind::InvalidArgument, "omega values must be positive");

  struct Solved {
    std::optional<GroundStateResult> result;
    std::optional<std::string> error;
  };
  auto solve_one = [&](double w) {
    Solved s;
    try {
      GroundStateConfig c = ground_cfg;
      c.omega = w;
      s.result = solve_ground_state(c);
    } catch (const std::exception& e) {
      s.error = e.what();
      spdlog::warn("omega study: omega={} failed: {}", w, e.what());
    }
    return s;
  };
  std::vector<std::future<Solved>> jobs;
  for (double w : omegas) jobs.push_back(std::async(std::launch::async, solve_one, w));
  std::vector<Solved> solved;
  for (auto& j : jobs) solved.push_back(j.get());

  OmegaStudyReport rep;
  const auto base_it = std::min_element(omegas.begin(), omegas.end());
  const auto& base = solved[base_it - omegas.begin()];

  std::vector<double> ratios;
  bool agreement = true;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    OmegaRecord rec;
    rec.omega = omegas[i];
    rec.error = solved[i].error;
    if (const auto& r = solved[i].result) {
      rec.d_omega = r->d_omega;
      rec.d_over_sqrt_omega = r->d_omega / std::sqrt(r->omega);
      rec.pohozaev = r->pohozaev;
      rec.iterations = r->iterations;
      ratios.push_back(*rec.d_over_sqrt_omega);
      if (base.result) {
        try {
          const auto rescaled = omega_rescale(*base.result, rec.omega);
          rec.rescaled_d = action(rescaled, rec.omega);
          rec.rescaled_residual = elliptic_residual(rescaled, rec.omega);
          rec.rescaled_l2_distance = aligned_l2_distance(rescaled, r->state);
          if (*rec.rescaled_l2_distance > 1e-3) agreement = false;
        } catch (const std::exception& e) {
          rec.error = e.what();
        }
      }
    }
    rep.records.push_back(std::move(rec));
  }

  if (ratios.size() >= 2) {
    double dev = 0.0;
    for (std::size_t a = 0; a < ratios.size(); ++a)
      for (std::size_t b = a + 1; b < ratios.size(); ++b)
        dev = std::max(dev, std::abs(ratios[a] - ratios[b]) / std::min(ratios[a], ratios[b]));
    rep.max_pairwise_deviation = dev;
    rep.sqrt_law_holds = dev <= 0.01;
    rep.rescale_agreement = agreement;
  }
  rep.provenance = make_provenance("omega|" + describe(omegas) + "|" + describe(ground_cfg));
  return rep;
}

}  // namespace quadnls
