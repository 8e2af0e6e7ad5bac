#include <charconv>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "quadnls/config.hpp"
#include "quadnls/io.hpp"
#include "quadnls/plots.hpp"

#include "support.hpp"

using namespace quadnls;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("quadnls_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("default config round-trips through text") {
  const CliConfig def;
  CHECK_NOTHROW(def.validate());
  const auto text = serialize_config(def);
  CHECK(parse_config(text) == def);
  CHECK(parse_config("") == def);
}

TEST_CASE("config values survive serialisation exactly") {
  CliConfig c;
  c.grid.R = 17.3;
  c.grid.N = 777;
  c.ground.omega = 0.1 + 0.2;
  c.ground.tau = 1.0 / 3.0;
  c.evolve.dt_init = 2.5e-4;
  c.evolve.sponge_enabled = true;
  c.experiment.gamma_values = {1.0 / 7.0, 2.0};
  c.experiment.omega_values = {3.0};
  c.output.dir = "some dir/with spaces";
  c.output.emit_plots = false;
  const auto back = parse_config(serialize_config(c));
  CHECK(back == c);
  CHECK(back.ground.omega == 0.1 + 0.2);
  CHECK(back.experiment.gamma_values[0] == 1.0 / 7.0);
}

TEST_CASE("partial configs keep defaults") {
  const auto c = parse_config("[ground]\nomega = 2.5\n\n[experiment]\ngamma_values = 1.1,1.3\n");
  CHECK(c.ground.omega == 2.5);
  CHECK(c.experiment.gamma_values == std::vector<double>{1.1, 1.3});
  CHECK(c.grid.N == 4096);
  CHECK(c.evolve.sample_every == 10);
}

TEST_CASE("config errors name the key") {
  CHECK(kind_of([] { parse_config("[grid]\nbogus = 1\n"); }) == ErrorKind::Config);
  CHECK(message_of([] { parse_config("[grid]\nbogus = 1\n"); }).find("bogus") != std::string::npos);
  CHECK(kind_of([] { parse_config("[nowhere]\nx = 1\n"); }) == ErrorKind::Config);
  CHECK(message_of([] { parse_config("[grid]\nN = many\n"); }).find("N") != std::string::npos);
  CHECK(message_of([] { parse_config("[experiment]\ngamma_values =\n"); }).find("gamma_values") != std::string::npos);
  CHECK(message_of([] { parse_config("[ground]\nomega = -1\n"); }).find("omega") != std::string::npos);
  CHECK(kind_of([] { parse_config("[grid]\nd = 0\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { parse_config("[evolve]\nkappa = 0\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { parse_config("[evolve]\ndt_min = 0.01\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { parse_config("[output]\nemit_plots = perhaps\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { parse_config("not an ini [\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { load_config("/definitely/not/here.ini"); }) == ErrorKind::Config);
  CHECK(message_of([] { load_config("/definitely/not/here.ini"); }).find("/definitely/not/here.ini") != std::string::npos);
}

TEST_CASE("shipped config parses to the defaults") {
  CHECK(load_config(fs::path(QUADNLS_SOURCE_DIR) / "configs" / "default.ini") == CliConfig{});
}

TEST_CASE("shortest round-trip number formatting") {
  for (double x : {0.0, 1.0, 0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 5e-324})
  {
    const auto text = format_double(x);
    double back = 1.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(back == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-9) == "1e-09");
}

TEST_CASE("atomic writes leave no temporary behind") {
  TempDir tmp;
  const auto p = tmp.path / "nested" / "file.txt";
  write_file_atomic(p, "first");
  write_file_atomic(p, "second");
  CHECK(read_file(p) == "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(p.parent_path())) ++entries;
  CHECK(entries == 1);
  CHECK(kind_of([&] { read_file(tmp.path / "missing"); }) == ErrorKind::Config);
}

TEST_CASE("trace CSV layout") {
  EvolutionTrace tr;
  TraceRow r;
  r.t = 0.5;
  r.dt = 1e-3;
  r.mass = 1.0 / 3.0;
  r.max_amplitude = 7.0;
  tr.rows = {r, r};
  const auto csv = trace_csv(tr);
  CHECK(csv.substr(0, csv.find('\n')) == "t,dt,mass,energy,kinetic,interaction,virial_q,second_moment,max_amplitude");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find("0.5,0.001,0.3333333333333333,0,0,0,0,0,7\n") != std::string::npos);
}

TEST_CASE("ground-state document round-trip") {
  const auto g = make_grid(5, 10.0, 64);
  GroundStateResult res;
  res.state = gaussian_pair(g, 1.0 / 3.0, 0.7);
  res.state.u.values[3] = Complex(0.25, -1e-17);
  res.omega = 1.0;
  res.d_omega = 12.345678901234567;
  res.residual = 3e-11;
  res.pohozaev = {1e-5, 2e-6};
  res.decay_rates = DecayRates{0.91, 0.97};
  res.iterations = 42;
  res.boundary_leak = 1e-20;

  const auto doc = Json::parse(dump(to_json(res)));
  const auto back = ground_state_from_json(doc, g);
  CHECK(back.d_omega == res.d_omega);
  CHECK(back.decay_rates->psi == 0.97);
  CHECK(back.iterations == 42);
  for (std::size_t j = 0; j < res.state.u.size(); ++j) {
    CHECK(back.state.u.values[j] == res.state.u.values[j]);
    CHECK(back.state.v.values[j] == res.state.v.values[j]);
  }

  res.decay_rates.reset();
  CHECK_FALSE(ground_state_from_json(Json::parse(dump(to_json(res))), g).decay_rates.has_value());

  CHECK(kind_of([&] { ground_state_from_json(doc, make_grid(5, 10.0, 128)); }) == ErrorKind::GridMismatch);
  CHECK(kind_of([&] { ground_state_from_json(doc, make_grid(5, 11.0, 64)); }) == ErrorKind::GridMismatch);
  auto broken = doc;
  broken["state"]["u"][5][0] = 99.0;
  CHECK(kind_of([&] { ground_state_from_json(broken, g); }) == ErrorKind::GridMismatch);
  broken = doc;
  broken.erase("omega");
  CHECK(kind_of([&] { ground_state_from_json(broken, g); }) == ErrorKind::Config);
}

TEST_CASE("non-finite values become null") {
  Outcome o = Outcome::blowup(std::numeric_limits<double>::infinity());
  const auto j = to_json(o);
  CHECK(j["kind"] == "BlowupDetected");
  CHECK(dump(j).find("inf") == std::string::npos);
  OmegaStudyReport rep;
  rep.records.push_back(OmegaRecord{.omega = 2.0, .error = std::string("NoConvergence")});
  const auto doc = to_json(rep);
  CHECK(doc["records"][0]["d_omega"].is_null());
  CHECK(doc["max_pairwise_deviation"].is_null());
}

TEST_CASE("plot scripts follow the input schema") {
  TempDir tmp;
  EvolutionTrace tr;
  for (int k = 0; k < 3; ++k) {
    TraceRow r;
    r.t = 0.1 * k;
    r.mass = 1.0;
    r.energy = -2.0;
    r.second_moment = 5.0 - k;
    tr.rows.push_back(r);
  }
  const auto trace = tmp.path / "run.csv";
  write_file_atomic(trace, trace_csv(tr));
  auto scripts = emit_plot_script(trace);
  REQUIRE(scripts.size() == 2);
  CHECK(scripts[0].filename() == "run_conservation.gp");
  CHECK(scripts[1].filename() == "run_virial.gp");
  CHECK(read_file(scripts[1]).find("delta") == std::string::npos);

  write_file_atomic(tmp.path / "run.json", R"({"trace": "run.csv", "delta": 0.25})");
  scripts = emit_plot_script(tmp.path / "run.json");
  REQUIRE(scripts.size() == 2);
  CHECK(read_file(scripts[1]).find("delta = 0.25") != std::string::npos);

  const auto g = make_grid(5, 10.0, 16);
  GroundStateResult res;
  res.state = gaussian_pair(g, 1.0, 1.0);
  write_file_atomic(tmp.path / "gs.json", dump(to_json(res)));
  CHECK(kind_of([&] { emit_plot_script(tmp.path / "gs.json"); }) == ErrorKind::UnknownSchema);
  write_file_atomic(tmp.path / "gs_profile.csv", profile_csv(res.state));
  scripts = emit_plot_script(tmp.path / "gs.json");
  REQUIRE(scripts.size() == 1);
  CHECK(scripts[0].filename() == "gs_profiles.gp");
  CHECK(read_file(scripts[0]).find("gs_profile.csv") != std::string::npos);

  InstabilityReport ir;
  ir.gamma_values = {1.1, 1.2};
  GammaRecord a, b;
  a.gamma = 1.1;
  a.outcome = Outcome::blowup(3.0);
  a.t_star = 3.0;
  b.gamma = 1.2;
  b.outcome = Outcome::completed();
  ir.records = {a, b};
  write_file_atomic(tmp.path / "inst.json", dump(to_json(ir)));
  scripts = emit_plot_script(tmp.path / "inst.json");
  REQUIRE(scripts.size() == 1);
  CHECK(read_file(tmp.path / "inst_tstar.csv") == "gamma,t_star\n1.1,3\n");

  write_file_atomic(tmp.path / "junk.txt", "hello\n");
  CHECK(kind_of([&] { emit_plot_script(tmp.path / "junk.txt"); }) == ErrorKind::UnknownSchema);
  write_file_atomic(tmp.path / "other.json", R"({"a": 1})");
  CHECK(kind_of([&] { emit_plot_script(tmp.path / "other.json"); }) == ErrorKind::UnknownSchema);
}
