#pragma once

// File surfaces: scenario configs (JSON), named presets, trajectory and
// region CSV emission, spectral report serialization, and run manifests.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "liesync/lincoord.hpp"
#include "liesync/region.hpp"
#include "liesync/sim.hpp"

namespace liesync::io {

/// Parse a scenario from JSON text / a file.  Throws ConfigError with a
/// field or position diagnostic on malformed input.
sim::Scenario parse_scenario_text(const std::string& json_text);
sim::Scenario load_scenario_file(const std::string& path);

/// Lossless serialization (round-trips through parse_scenario_text to a
/// scenario producing bitwise-identical trajectories).
std::string scenario_to_text(const sim::Scenario& sc);

std::vector<std::string> preset_names();
sim::Scenario make_preset(const std::string& name);

/// Six-agent triangular demo Laplacian (spectrum on the diagonal).
RealMat demo_triangular_laplacian();

/// Graph files: {"N":…, "edges":[[i,j,w],…]} (1-based) or {"laplacian":[[…]]}.
graph::CommGraph load_graph_file(const std::string& path);
graph::CommGraph parse_graph_text(const std::string& json_text);

/// Trajectory CSV: header step,time,pair,err_norm,omega_max,
/// membership_residual; one row per (step, pair); intersample rows carry
/// fractional times.  All values printed with %.17g.
std::string trajectory_csv(const sim::Scenario& sc, const sim::Trajectory& tr);

/// Region boundary CSV: header locus,sigma,omega,g.
std::string region_csv(const std::vector<region::RegionPoint>& points);

std::string spectral_report_json(const lincoord::SpectralReport& rep);

std::uint64_t fnv1a64(std::string_view data);

struct RunManifest {
  std::string json;                // manifest document
  std::vector<std::string> files;  // files written (relative to the output dir)
};

/// Writes trajectory.csv and manifest.json into `outdir` (created if
/// needed); CSV content is fully materialized before any file is touched.
RunManifest write_run(const sim::Scenario& sc, const sim::Trajectory& tr,
                      const std::string& outdir, const std::string& source,
                      double wall_seconds);

}  // namespace liesync::io
