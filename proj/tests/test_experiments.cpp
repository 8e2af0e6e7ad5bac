#include <set>

#include "quadnls/experiments.hpp"
#include "quadnls/io.hpp"

#include "support.hpp"

using namespace quadnls;
using namespace testing_support;

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
  CHECK(library_version().rfind("quadnls ", 0) == 0);
}

TEST_CASE("trial pairs are deterministic, positive and varied") {
  const auto g = make_grid(5, 30.0, 1024);
  const auto a = trial_pairs(g, 5, 7), b = trial_pairs(g, 5, 7), c = trial_pairs(g, 5, 8);
  REQUIRE(a.size() == 5);
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t j = 0; j < a[k].u.size(); ++j) {
      CHECK(a[k].u.values[j] == b[k].u.values[j]);
      CHECK(a[k].u.values[j].real() >= 0.0);
      CHECK(a[k].v.values[j].real() >= 0.0);
    }
    CHECK(interaction(a[k]) > 0.0);
  }
  CHECK(a[0].u.values[0] != c[0].u.values[0]);
  CHECK(a[0].u.values[0] != a[1].u.values[0]);
}

TEST_CASE("aligned distance removes the orbit phase") {
  const auto& gs = default_ground();
  PairState rotated = gs.state;
  for (std::size_t j = 0; j < rotated.u.size(); ++j) {
    rotated.u.values[j] *= std::polar(1.0, 0.8);
    rotated.v.values[j] *= std::polar(1.0, 1.6);
  }
  CHECK(aligned_l2_distance(rotated, gs.state) < 1e-13);
  CHECK(aligned_l2_distance(scale(gs.state, 1.05), gs.state) > 1e-2);
}

TEST_CASE("certification report is complete") {
  GroundStateConfig cfg;
  cfg.grid = make_grid(5, 30.0, 4096);
  const auto rep = certify_ground_state(cfg, 20240517, 6);
  CHECK(rep.all_passed);
  std::set<std::string> names;
  for (const auto& c : rep.checks) {
    names.insert(c.name);
    if (c.gating) CHECK_MESSAGE(c.passed, c.name << " value " << c.value << " threshold " << c.threshold);
  }
  for (const char* n : {"pohozaev_kinetic", "pohozaev_mass", "pohozaev_combined", "action_equals_half_interaction",
                        "nehari_zero", "virial_zero", "lagrange_identity", "positivity", "trial_nehari_above_d",
                        "trial_virial_above_d"})
    CHECK_MESSAGE(names.count(n) == 1, n);
  CHECK(rep.provenance.config_hash.size() == 16);

  const auto again = certify_ground_state(cfg, 20240517, 6);
  CHECK(dump(to_json(again)) == dump(to_json(rep)));
  const auto doc = to_json(rep);
  for (const char* k : {"grid", "state", "omega", "d_omega", "residual", "pohozaev_residuals", "decay_rates",
                        "iterations", "boundary_leak", "functionals", "certification", "provenance"})
    CHECK_MESSAGE(doc.contains(k), k);
}

TEST_CASE("omega study edge cases") {
  GroundStateConfig cfg;
  cfg.grid = make_grid(5, 30.0, 1024);
  const auto one = run_omega_study({1.0}, cfg);
  REQUIRE(one.records.size() == 1);
  CHECK(one.records[0].d_omega.has_value());
  CHECK_FALSE(one.max_pairwise_deviation.has_value());
  CHECK_FALSE(one.sqrt_law_holds.has_value());

  const auto two = run_omega_study({1.0, 2.0}, cfg);
  REQUIRE(two.max_pairwise_deviation.has_value());
  CHECK(*two.max_pairwise_deviation <= 1e-2);
  CHECK(two.records[1].rescaled_d.has_value());
  CHECK(*two.records[1].rescaled_d == doctest::Approx(*two.records[1].d_omega).epsilon(1e-2));

  CHECK_THROWS_AS(run_omega_study({}, cfg), Error);
  CHECK_THROWS_AS(run_omega_study({1.0, -1.0}, cfg), Error);
}

TEST_CASE("instability sweep on a short horizon") {
  GroundStateConfig gcfg;
  gcfg.grid = make_grid(5, 30.0, 2048);
  EvolveConfig ecfg;
  ecfg.sample_every = 10;
  const auto rep = run_instability(1.0, {0.9, 1.2}, 0.1, gcfg, ecfg);
  REQUIRE(rep.records.size() == 2);
  const auto& sub = rep.records[0];
  const auto& sup = rep.records[1];
  CHECK_FALSE(sub.error.has_value());
  CHECK_FALSE(sub.in_blowup_set);
  CHECK(sub.virial_q > 0.0);
  CHECK(sub.outcome->kind == OutcomeKind::Completed);
  CHECK(sup.in_blowup_set);
  CHECK(sup.virial_q < 0.0);
  CHECK(sup.action < rep.d_omega);
  CHECK(sup.delta == doctest::Approx(2.0 * (rep.d_omega - sup.action)));
  CHECK(sup.q_negative_along_run);
  CHECK(sup.action_below_d_along_resolved_run);
  CHECK(sup.trace.rows.back().t == doctest::Approx(0.1));
  CHECK(sup.initial_h1_distance > 0.0);

  CHECK_THROWS_AS(run_instability(1.0, {}, 1.0, gcfg, ecfg), Error);
  CHECK_THROWS_AS(run_instability(1.0, {1.1}, -1.0, gcfg, ecfg), Error);
}
