#pragma once

// Serialisation of results, traces and reports. Every file is written to a
// temporary sibling and renamed into place.

#include <filesystem>
#include <string>

#include "json.hpp"
#include "quadnls/experiments.hpp"

namespace quadnls {

using Json = nlohmann::ordered_json;

inline constexpr const char* kTraceHeader = "t,dt,mass,energy,kinetic,interaction,virial_q,second_moment,max_amplitude";

void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

Json to_json(const RadialField& f);
Json to_json(const GroundStateResult& res);
Json to_json(const Outcome& o);
Json to_json(const CertificationReport& rep);
Json to_json(const InstabilityReport& rep);
Json to_json(const OmegaStudyReport& rep);
Json to_json(const EvolveConfig& cfg);

/// Reads the document written by to_json(GroundStateResult). The profile
/// radii must match `expected` node for node, otherwise GridMismatch.
GroundStateResult ground_state_from_json(const Json& doc, const Grid& expected);

std::string trace_csv(const EvolutionTrace& trace);
/// Columns r, Re(u), Im(u), Re(v), Im(v).
std::string profile_csv(const PairState& s);

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

/// JSON text with full double precision and a trailing newline.
std::string dump(const Json& doc);

}  // namespace quadnls
