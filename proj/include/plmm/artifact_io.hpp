#pragma once

#include "plmm/modes.hpp"
#include "plmm/solver.hpp"
#include "plmm/spec_io.hpp"

#include <iosfwd>
#include <span>
#include <string>

namespace plmm {

/// Shortest exact decimal form used in every numeric text output (%.17g).
std::string format_double(double v);

/// Write via a sibling temp file and rename over the target, so readers
/// never observe a half-written file. Raises IoError.
void write_file_atomic(const std::string& path, const std::string& content);

/// Artifact bundle: mesh.csv (vertex and tet tables), values.csv (per-vertex
/// psi and objective values), metadata.json (embedded canonical spec plus
/// mesh counts). The bundle carries no timestamps; regenerating it from the
/// same spec yields byte-identical files.
void write_artifact(const std::string& dir, const ProblemSpecFile& spec, const Problem& prob);

struct LoadedArtifact {
    ProblemSpecFile spec;
    Problem problem;
};

/// Rebuilds the problem from the spec embedded in metadata.json and checks
/// the mesh counts recorded there still match.
LoadedArtifact load_artifact(const std::string& dir);

/// Constant-z cross-section: one row per mesh vertex on the plane, then one
/// row per mesh edge strictly crossing it (values interpolated along the
/// edge, objectives applied after interpolation).
void write_slice_csv(std::ostream& out, const Problem& prob, double z);

struct AnalyzeSummary {
    int mode_count = 0;
    std::size_t signature_count = 0;
    int depth = 0;
};

/// modes.csv, signatures.csv, hierarchy.csv under dir.
AnalyzeSummary write_analysis(const std::string& dir, const Problem& prob,
                              DescentRule rule = DescentRule::Admissible);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

void write_runs_csv(std::ostream& out, std::span<const Trajectory> runs,
                    std::span<const std::uint64_t> seeds);

} // namespace plmm
