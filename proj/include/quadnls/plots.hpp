#pragma once

// gnuplot scripts for the figures of a run. Scripts reference their data by
// file name and are meant to be run from the directory holding them:
//
//   cd out && gnuplot ground_state_profiles.gp

#include <filesystem>
#include <vector>

namespace quadnls {

/// Inspects `input` and writes the matching script(s) next to it:
///   ground_state.json or a profile CSV  -> profiles (linear and log scale)
///   evolution trace CSV                 -> conservation drift and V(t); the
///                                          sidecar JSON supplies delta if present
///   instability report JSON             -> t* against gamma
/// Returns the written paths. Throws Error(UnknownSchema) otherwise.
std::vector<std::filesystem::path> emit_plot_script(const std::filesystem::path& input);

}  // namespace quadnls
