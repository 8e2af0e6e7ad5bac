#include "quadnls/ground_state.hpp"

#include "support.hpp"

using namespace quadnls;
using namespace testing_support;

namespace {

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("default ground state is certified by its structural identities") {
  const auto& gs = default_ground();
  const auto f = report(gs.state, gs.omega);
  CHECK(gs.residual <= 1e-10);
  CHECK(gs.iterations > 0);
  CHECK(gs.d_omega > 0.0);
  CHECK(gs.d_omega == doctest::Approx(estimate_d(gs)).epsilon(1e-15));
  CHECK(std::abs(gs.d_omega - 0.5 * f.interaction) <= 1e-8 * gs.d_omega);

  const auto p = verify_pohozaev(gs);
  CHECK(p.kinetic <= 1e-3);
  CHECK(p.mass <= 1e-3);
  CHECK(p.combined <= 1e-3);
  CHECK(p.within(1e-3));
  CHECK(std::abs(f.nehari) <= 1e-10 * f.h_omega);
  CHECK(std::abs(f.virial_q) <= 1e-3 * f.kinetic);
  CHECK(std::abs(lagrange_pairing(gs.state, gs.omega) + 3.0 * f.interaction) <= 1e-8 * 3.0 * f.interaction);
  CHECK(gs.boundary_leak <= 1e-10 * gs.max_amplitude);
  CHECK(gs.monotonicity_violations == 0);
}

TEST_CASE("ground state is real and positive after phase alignment") {
  const auto& gs = default_ground();
  double worst = 0.0;
  for (std::size_t j = 0; j < gs.state.u.size(); ++j) {
    worst = std::max({worst, std::abs(gs.state.u.values[j].imag()), std::abs(gs.state.v.values[j].imag()),
                      -gs.state.u.values[j].real(), -gs.state.v.values[j].real()});
  }
  CHECK(worst <= 1e-8 * gs.max_amplitude);
  // the profile peaks at the origin and decreases
  CHECK(std::abs(gs.state.u.values[0]) == doctest::Approx(gs.max_amplitude).epsilon(1e-12));
  for (int j = 1; j < gs.state.grid()->nodes; ++j)
    CHECK(std::abs(gs.state.u.values[j]) <= std::abs(gs.state.u.values[j - 1]) + 1e-300);
}

TEST_CASE("the elliptic residual vanishes at the solution and detects perturbations") {
  const auto& gs = default_ground();
  CHECK(elliptic_residual(gs.state, gs.omega) <= 1e-10);
  CHECK(elliptic_residual(gs.state, 1.2 * gs.omega) > 1e-2);
  CHECK(elliptic_residual(Complex(1.1) * gs.state, gs.omega) > 1e-2);
}

TEST_CASE("Pohozaev residuals fire on a constructed violation") {
  const auto& gs = default_ground();
  const auto g = gs.state.grid();
  // extra kinetic energy in v, supported far out where u is negligible
  const auto bump = sample(g, [](double r) { return std::exp(-(r - 20.0) * (r - 20.0)); });
  const double k = kinetic(gs.state);
  const double a = std::sqrt(2.0 * k / gradient_norm_sq(bump));
  PairState s = gs.state;
  for (std::size_t j = 0; j < s.v.size(); ++j) s.v.values[j] += a * bump.values[j];
  CHECK(kinetic(s) == doctest::Approx(2.0 * k).epsilon(1e-6));
  CHECK(interaction(s) == doctest::Approx(interaction(gs.state)).epsilon(1e-9));
  CHECK(pohozaev_residuals(s, gs.omega).kinetic == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(pohozaev_residuals(PairState(g), 1.0), Error);
}

TEST_CASE("tail decay rates") {
  const auto& gs = default_ground();
  REQUIRE(gs.decay_rates.has_value());
  const auto dr = *gs.decay_rates;
  CHECK(dr.phi >= 0.6);
  CHECK(dr.psi >= 0.9 * dr.phi);
  // The linearised tail is r^{-(d-1)/2} e^{-sqrt(w) r}; removing the algebraic
  // factor leaves the exponential rate itself.
  const auto& grid = *gs.state.grid();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int j = 0; j < grid.nodes; ++j) {
    const double r = grid.r[j];
    if (r < 0.5 * grid.radius || r > 0.8 * grid.radius) continue;
    const double y = std::log(r * r * std::abs(gs.state.u.values[j]));
    sx += r, sy += y, sxx += r * r, sxy += r * y, ++n;
  }
  const double corrected = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(corrected == doctest::Approx(std::sqrt(gs.omega)).epsilon(0.02));
}

TEST_CASE("decay fit reports underflow instead of fitting noise") {
  GroundStateConfig cfg;
  cfg.omega = 4.0;
  cfg.grid = make_grid(5, 30.0, 4096);
  const auto res = solve_ground_state(cfg);
  CHECK_FALSE(res.decay_rates.has_value());
  CHECK(kind_of([&] { fit_decay(res); }) == ErrorKind::DecayWindowUnderflow);
  const auto narrow = fit_decay(res, {0.1, 0.2}, {0.05, 0.1});
  CHECK(narrow.phi > 1.0);
}

TEST_CASE("omega rescaling") {
  const auto& gs = default_ground();
  const auto same = omega_rescale(gs, gs.omega);
  for (std::size_t j = 0; j < same.u.size(); j += 101) CHECK(same.u.values[j] == gs.state.u.values[j]);
  for (double w : {0.5, 2.0}) {
    CAPTURE(w);
    const auto s = omega_rescale(gs, w);
    CHECK(elliptic_residual(s, w) <= 1e-3);
    CHECK(action(s, w) == doctest::Approx(std::sqrt(w / gs.omega) * gs.d_omega).epsilon(0.01));
  }
  CHECK_THROWS_AS(omega_rescale(gs, 0.0), Error);
  CHECK_THROWS_AS(omega_rescale(gs, -1.0), Error);
}

TEST_CASE("rescaled residual is a discretisation effect") {
  // The residual of a rescaled profile shrinks at second order with the grid.
  auto residual = [](int n) {
    GroundStateConfig cfg;
    cfg.grid = make_grid(5, 30.0, n);
    return elliptic_residual(omega_rescale(solve_ground_state(cfg), 2.0), 2.0);
  };
  const double coarse = residual(1024), fine = residual(2048);
  CHECK(std::log2(coarse / fine) > 1.8);
}

TEST_CASE("solver failure modes") {
  GroundStateConfig cfg;
  cfg.grid = make_grid(5, 5.0, 1024);
  CHECK(kind_of([&] { solve_ground_state(cfg); }) == ErrorKind::DomainTooSmall);

  cfg.grid = make_grid(5, 30.0, 1024);
  cfg.max_iters = 5;
  CHECK(kind_of([&] { solve_ground_state(cfg); }) == ErrorKind::NoConvergence);

  GroundStateConfig bad;
  CHECK_THROWS_AS(solve_ground_state(bad), Error);  // no grid
  bad.grid = make_grid(5, 30.0, 256);
  bad.tau = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.tau = 0.1;
  bad.residual_tol = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.residual_tol = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.residual_tol = 1e-10;
  bad.init_b = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.init_b = 1.0;
  bad.omega = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("different initial data reach the same action") {
  GroundStateConfig cfg;
  cfg.grid = make_grid(5, 30.0, 2048);
  const double d0 = solve_ground_state(cfg).d_omega;
  cfg.init_a = 0.5;
  cfg.init_b = 3.0;
  cfg.init_width = 2.0;
  CHECK(solve_ground_state(cfg).d_omega == doctest::Approx(d0).epsilon(1e-9));
}
