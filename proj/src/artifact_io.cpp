#include "plmm/artifact_io.hpp"
#include "plmm/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace plmm {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) raise(ErrorCode::IoError, "cannot open for writing: " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) raise(ErrorCode::IoError, "write failed: " + tmp);
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) raise(ErrorCode::IoError, "rename failed: " + path + " (" + ec.message() + ")");
}

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) raise(ErrorCode::IoError, "cannot create directory: " + dir + " (" + ec.message() + ")");
}

std::string values_csv(const Problem& prob) {
    std::ostringstream out;
    out << "index,psi1,psi2,f1,f2\n";
    for (std::size_t v = 0; v < prob.psi.values.size(); ++v)
        out << v << ',' << format_double(prob.psi.values[v][0]) << ','
            << format_double(prob.psi.values[v][1]) << ','
            << format_double(prob.objectives.values[v][0]) << ','
            << format_double(prob.objectives.values[v][1]) << '\n';
    return out.str();
}

json metadata_json(const ProblemSpecFile& spec, const Problem& prob) {
    json meta;
    meta["schema_version"] = "1";
    meta["refinement"] = prob.refinement;
    meta["vertex_count"] = prob.mesh->vertex_count();
    meta["tet_count"] = prob.mesh->tet_count();
    meta["spec"] = json::parse(canonical_spec(spec));
    return meta;
}

} // namespace

void write_artifact(const std::string& dir, const ProblemSpecFile& spec, const Problem& prob) {
    ensure_dir(dir);

    std::ostringstream mesh;
    prob.mesh->write_csv(mesh);
    write_file_atomic(dir + "/mesh.csv", mesh.str());
    write_file_atomic(dir + "/values.csv", values_csv(prob));
    write_file_atomic(dir + "/metadata.json", metadata_json(spec, prob).dump(2) + "\n");
}

LoadedArtifact load_artifact(const std::string& dir) {
    const std::string meta_path = dir + "/metadata.json";
    std::ifstream in(meta_path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open artifact metadata: " + meta_path);
    std::ostringstream ss;
    ss << in.rdbuf();

    json meta;
    try {
        meta = json::parse(ss.str());
    } catch (const json::parse_error&) {
        raise(ErrorCode::ParseError, "artifact metadata is not valid JSON: " + meta_path);
    }
    if (!meta.is_object() || !meta.contains("spec"))
        raise(ErrorCode::ParseError, "artifact metadata has no \"spec\": " + meta_path);

    LoadedArtifact art{parse_spec(meta["spec"].dump()), {}};
    art.problem = build_problem(art.spec);

    if (meta.contains("vertex_count") &&
        meta["vertex_count"].get<std::size_t>() != art.problem.mesh->vertex_count())
        raise(ErrorCode::SpecValidation,
              "ArtifactMismatch: rebuilt mesh vertex count differs from metadata");
    if (meta.contains("tet_count") &&
        meta["tet_count"].get<std::size_t>() != art.problem.mesh->tet_count())
        raise(ErrorCode::SpecValidation,
              "ArtifactMismatch: rebuilt mesh tet count differs from metadata");
    return art;
}

void write_slice_csv(std::ostream& out, const Problem& prob, double z) {
    const Box3& box = prob.mesh->box();
    if (z < box.min.z - 1e-9 || z > box.max.z + 1e-9)
        raise(ErrorCode::OutOfDomain, "slice height " + format_double(z) + " is outside the domain");

    out << "x,y,z,source,psi1,psi2,f1,f2\n";
    const auto& verts = prob.mesh->vertices();
    auto row = [&](const Vec3& p, const char* source, const std::array<double, 2>& psi) {
        const auto f = prob.chain.apply(psi);
        out << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.z) << ','
            << source << ',' << format_double(psi[0]) << ',' << format_double(psi[1]) << ','
            << format_double(f[0]) << ',' << format_double(f[1]) << '\n';
    };

    for (std::size_t v = 0; v < verts.size(); ++v)
        if (std::abs(verts[v].z - z) <= 1e-9)
            row(verts[v], "vertex", prob.psi.values[v]);

    const auto& adj = prob.mesh->vertex_adjacency();
    for (std::uint32_t v = 0; v < verts.size(); ++v)
        for (const std::uint32_t w : adj[v]) {
            if (w <= v) continue;
            const double a = verts[v].z - z, b = verts[w].z - z;
            if (!(a < 0.0 && b > 0.0) && !(a > 0.0 && b < 0.0)) continue;
            if (std::abs(verts[v].z - z) <= 1e-9 || std::abs(verts[w].z - z) <= 1e-9) continue;
            const double t = (z - verts[v].z) / (verts[w].z - verts[v].z);
            const Vec3 p{verts[v].x + t * (verts[w].x - verts[v].x),
                         verts[v].y + t * (verts[w].y - verts[v].y), z};
            const std::array<double, 2> psi{
                prob.psi.values[v][0] + t * (prob.psi.values[w][0] - prob.psi.values[v][0]),
                prob.psi.values[v][1] + t * (prob.psi.values[w][1] - prob.psi.values[v][1])};
            row(p, "edge", psi);
        }
}

AnalyzeSummary write_analysis(const std::string& dir, const Problem& prob, DescentRule rule) {
    ensure_dir(dir);
    const ModeHierarchy mh = mode_regions(prob, rule);

    std::ostringstream modes;
    modes << "component,representative,x,y,z,f1,f2\n";
    for (const ModeId& m : mh.modes) {
        const Vec3& p = prob.mesh->vertices()[m.representative];
        const auto& f = prob.objectives.values[m.representative];
        modes << m.component << ',' << m.representative << ',' << format_double(p.x) << ','
              << format_double(p.y) << ',' << format_double(p.z) << ',' << format_double(f[0])
              << ',' << format_double(f[1]) << '\n';
    }
    write_file_atomic(dir + "/modes.csv", modes.str());

    std::ostringstream sigs;
    sigs << "signature,volume,modes\n";
    for (std::size_t i = 0; i < mh.signatures.size(); ++i) {
        sigs << i << ',' << format_double(mh.signature_volume[i]) << ',';
        for (std::size_t k = 0; k < mh.signatures[i].size(); ++k) {
            if (k) sigs << '|';
            sigs << mh.signatures[i][k];
        }
        sigs << '\n';
    }
    write_file_atomic(dir + "/signatures.csv", sigs.str());

    std::ostringstream hier;
    hier << "sub,super\n";
    for (const auto& [a, b] : mh.inclusion_edges) hier << a << ',' << b << '\n';
    write_file_atomic(dir + "/hierarchy.csv", hier.str());

    return {static_cast<int>(mh.modes.size()), mh.signatures.size(), mh.depth};
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "step,x,y,z,f1,f2\n";
    for (std::size_t i = 0; i < traj.steps.size(); ++i) {
        const auto& s = traj.steps[i];
        out << i << ',' << format_double(s.position.x) << ',' << format_double(s.position.y)
            << ',' << format_double(s.position.z) << ',' << format_double(s.objectives[0]) << ','
            << format_double(s.objectives[1]) << '\n';
    }
}

void write_runs_csv(std::ostream& out, std::span<const Trajectory> runs,
                    std::span<const std::uint64_t> seeds) {
    out << "run,seed,iterations,steps,x,y,z,f1,f2,terminal_modes\n";
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const Trajectory& t = runs[r];
        const TrajectoryStep& last = t.steps.back();
        out << r << ',' << seeds[r] << ',' << t.iterations << ',' << t.steps.size() << ','
            << format_double(last.position.x) << ',' << format_double(last.position.y) << ','
            << format_double(last.position.z) << ',' << format_double(last.objectives[0]) << ','
            << format_double(last.objectives[1]) << ',';
        for (std::size_t k = 0; k < t.terminal_modes.size(); ++k) {
            if (k) out << '|';
            out << t.terminal_modes[k];
        }
        out << '\n';
    }
}

} // namespace plmm
