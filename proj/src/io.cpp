#include "quadnls/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace quadnls {
namespace {

// JSON has no inf/nan; post-blow-up numbers are emitted as null.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

template <typename T>
Json optional_number(const std::optional<T>& x) {
  return x ? number(static_cast<double>(*x)) : Json(nullptr);
}

Json provenance_json(const Provenance& p) {
  return {{"config_hash", p.config_hash}, {"library_version", p.library_version}};
}

RadialField field_from_json(const Json& arr, const Grid& grid, const char* name) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != grid->nodes)
    throw Error(ErrorKind::GridMismatch, std::string(name) + " profile has " + std::to_string(arr.size()) +
                                             " samples, the configured grid has " + std::to_string(grid->nodes));
  RadialField f(grid);
  for (int j = 0; j < grid->nodes; ++j) {
    const auto& row = arr[j];
    const double r = row.at(0).get<double>();
    if (std::abs(r - grid->r[j]) > 1e-9 * grid->radius)
      throw Error(ErrorKind::GridMismatch, std::string(name) + " profile radius " + format_double(r) + " at node " +
                                               std::to_string(j) + " does not match the configured grid");
    f.values[j] = Complex(row.at(1).get<double>(), row.at(2).get<double>());
  }
  return f;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorKind::InvalidArgument, "write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

Json to_json(const RadialField& f) {
  Json arr = Json::array();
  for (std::size_t j = 0; j < f.size(); ++j)
    arr.push_back(Json::array({f.grid->r[j], number(f.values[j].real()), number(f.values[j].imag())}));
  return arr;
}

Json to_json(const GroundStateResult& res) {
  const auto& g = *res.state.grid();
  Json doc;
  doc["grid"] = {{"d", g.dim}, {"R", g.radius}, {"N", g.nodes}};
  doc["state"] = {{"u", to_json(res.state.u)}, {"v", to_json(res.state.v)}};
  doc["omega"] = res.omega;
  doc["d_omega"] = res.d_omega;
  doc["residual"] = res.residual;
  doc["pohozaev_residuals"] = {{"kinetic", res.pohozaev.kinetic}, {"mass", res.pohozaev.mass}};
  doc["decay_rates"] = res.decay_rates ? Json{{"phi", res.decay_rates->phi}, {"psi", res.decay_rates->psi}}
                                       : Json(nullptr);
  doc["iterations"] = res.iterations;
  doc["boundary_leak"] = res.boundary_leak;
  return doc;
}

GroundStateResult ground_state_from_json(const Json& doc, const Grid& expected) {
  try {
    const auto& g = doc.at("grid");
    if (g.at("d").get<int>() != expected->dim || g.at("N").get<int>() != expected->nodes ||
        g.at("R").get<double>() != expected->radius)
      throw Error(ErrorKind::GridMismatch,
                  "state file grid (d=" + std::to_string(g.at("d").get<int>()) + ", R=" + format_double(g.at("R").get<double>()) +
                      ", N=" + std::to_string(g.at("N").get<int>()) + ") differs from the configured grid (d=" +
                      std::to_string(expected->dim) + ", R=" + format_double(expected->radius) +
                      ", N=" + std::to_string(expected->nodes) + ")");
    GroundStateResult res;
    res.state = PairState(field_from_json(doc.at("state").at("u"), expected, "u"),
                          field_from_json(doc.at("state").at("v"), expected, "v"));
    res.omega = doc.at("omega").get<double>();
    res.d_omega = doc.at("d_omega").get<double>();
    res.residual = doc.at("residual").get<double>();
    res.pohozaev.kinetic = doc.at("pohozaev_residuals").at("kinetic").get<double>();
    res.pohozaev.mass = doc.at("pohozaev_residuals").at("mass").get<double>();
    if (const auto& dr = doc.at("decay_rates"); !dr.is_null())
      res.decay_rates = DecayRates{dr.at("phi").get<double>(), dr.at("psi").get<double>()};
    res.iterations = doc.at("iterations").get<int>();
    res.boundary_leak = doc.at("boundary_leak").get<double>();
    res.max_amplitude = max_amplitude(res.state);
    return res;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed ground-state document: ") + e.what());
  }
}

Json to_json(const Outcome& o) {
  Json doc{{"kind", to_string(o.kind)}};
  doc["t_star"] = o.kind == OutcomeKind::BlowupDetected ? Json(o.t_star) : Json(nullptr);
  doc["reason"] = o.kind == OutcomeKind::Aborted ? Json(o.reason) : Json(nullptr);
  return doc;
}

Json to_json(const EvolveConfig& c) {
  return {{"kappa", c.kappa},
          {"t_max", c.t_max},
          {"dt_init", c.dt_init},
          {"dt_min", c.dt_min},
          {"cfl_safety", c.cfl_safety},
          {"blowup_kinetic_ratio", c.blowup_kinetic_ratio},
          {"sponge_enabled", c.sponge_enabled},
          {"sponge_width", c.sponge_width},
          {"sample_every", c.sample_every}};
}

Json to_json(const CertificationReport& rep) {
  Json checks = Json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name},
                      {"value", number(c.value)},
                      {"threshold", c.threshold},
                      {"passed", c.passed},
                      {"gating", c.gating},
                      {"detail", c.detail}});
  const auto f = report(rep.result.state, rep.result.omega);
  Json doc = to_json(rep.result);
  doc["functionals"] = {{"mass", f.mass},         {"kinetic", f.kinetic}, {"interaction", f.interaction},
                        {"energy", f.energy},     {"action", f.action},   {"nehari", f.nehari},
                        {"h_omega", f.h_omega},   {"virial_q", f.virial_q}};
  doc["certification"] = {{"all_passed", rep.all_passed}, {"checks", checks}};
  doc["provenance"] = provenance_json(rep.provenance);
  return doc;
}

Json to_json(const InstabilityReport& rep) {
  Json records = Json::array();
  for (const auto& r : rep.records) {
    Json j;
    j["gamma"] = r.gamma;
    if (r.error) {
      j["error"] = *r.error;
    } else {
      j["S_omega"] = r.action;
      j["Q"] = r.virial_q;
      j["in_B_omega"] = r.in_blowup_set;
      j["delta"] = r.delta;
      j["outcome"] = r.outcome ? to_json(*r.outcome) : Json(nullptr);
      j["t_star"] = optional_number(r.t_star);
      j["initial_H1_distance"] = r.initial_h1_distance;
      j["fitted_V_curvature"] = optional_number(r.fitted_curvature);
      j["concavity_reference"] = -8.0 * r.delta;
      j["resolved_until"] = r.resolved_until;
      j["Q_negative_along_run"] = r.q_negative_along_run;
      j["S_below_d_along_resolved_run"] = r.action_below_d_along_resolved_run;
      j["steps"] = r.trace.steps;
    }
    j["trace"] = r.trace_path.empty() ? Json(nullptr) : Json(r.trace_path);
    records.push_back(std::move(j));
  }
  return {{"omega", rep.omega},
          {"d_omega", rep.d_omega},
          {"gamma_values", rep.gamma_values},
          {"records", records},
          {"t_star_monotone", rep.t_star_monotone},
          {"provenance", provenance_json(rep.provenance)}};
}

Json to_json(const OmegaStudyReport& rep) {
  Json records = Json::array();
  for (const auto& r : rep.records) {
    Json j;
    j["omega"] = r.omega;
    j["d_omega"] = optional_number(r.d_omega);
    j["d_over_sqrt_omega"] = optional_number(r.d_over_sqrt_omega);
    j["pohozaev_residuals"] =
        r.pohozaev ? Json{{"kinetic", r.pohozaev->kinetic}, {"mass", r.pohozaev->mass}} : Json(nullptr);
    j["iterations"] = r.iterations;
    j["rescaled_d_omega"] = optional_number(r.rescaled_d);
    j["rescaled_residual"] = optional_number(r.rescaled_residual);
    j["rescaled_l2_distance"] = optional_number(r.rescaled_l2_distance);
    j["error"] = r.error ? Json(*r.error) : Json(nullptr);
    records.push_back(std::move(j));
  }
  auto opt_bool = [](const std::optional<bool>& b) { return b ? Json(*b) : Json(nullptr); };
  return {{"records", records},
          {"max_pairwise_deviation", optional_number(rep.max_pairwise_deviation)},
          {"sqrt_omega_law_holds", opt_bool(rep.sqrt_law_holds)},
          {"rescale_agreement", opt_bool(rep.rescale_agreement)},
          {"provenance", provenance_json(rep.provenance)}};
}

std::string trace_csv(const EvolutionTrace& trace) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const auto& r : trace.rows) {
    for (double x : {r.t, r.dt, r.mass, r.energy, r.kinetic, r.interaction, r.virial_q, r.second_moment}) {
      out += format_double(x);
      out += ',';
    }
    out += format_double(r.max_amplitude);
    out += '\n';
  }
  return out;
}

std::string profile_csv(const PairState& s) {
  std::string out = "r,re_u,im_u,re_v,im_v\n";
  const auto& g = *s.grid();
  for (int j = 0; j < g.nodes; ++j) {
    out += format_double(g.r[j]) + ',' + format_double(s.u.values[j].real()) + ',' + format_double(s.u.values[j].imag()) + ',' +
           format_double(s.v.values[j].real()) + ',' + format_double(s.v.values[j].imag()) + '\n';
  }
  return out;
}

}  // namespace quadnls
