#include "plmm.h"

#include "plmm/artifact_io.hpp"
#include "plmm/errors.hpp"
#include "plmm/modes.hpp"
#include "plmm/solver.hpp"
#include "plmm/spec_io.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <string>

struct plmm_problem {
    plmm::ProblemSpecFile spec;
    plmm::Problem problem;
};

struct plmm_trajectory {
    plmm::Trajectory traj;
};

namespace {

thread_local std::string g_last_error;

plmm_status status_from_exit(int code) {
    switch (code) {
    case 2: return PLMM_ERROR_PARSE;
    case 3: return PLMM_ERROR_VALIDATION;
    default: return PLMM_ERROR_RUNTIME;
    }
}

template <typename F>
plmm_status guarded(F&& body) {
    try {
        return body();
    } catch (const plmm::Error& e) {
        g_last_error = e.what();
        return status_from_exit(e.exit_code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PLMM_ERROR_RUNTIME;
    } catch (...) {
        g_last_error = "unknown error";
        return PLMM_ERROR_RUNTIME;
    }
}

plmm_status invalid_argument(const char* msg) {
    g_last_error = msg;
    return PLMM_ERROR_RUNTIME;
}

plmm_status batch_evaluate(const plmm_problem* p, const double* xyz, size_t n, double* out,
                           uint8_t* out_status, bool raw_psi) {
    if (!p || (n > 0 && (!xyz || !out))) return invalid_argument("null pointer argument");
    return guarded([&]() -> plmm_status {
        for (size_t i = 0; i < n; ++i) {
            const plmm::Vec3 q{xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]};
            if (!p->problem.mesh->box().contains(q, 1e-9)) {
                if (!out_status)
                    plmm::raise(plmm::ErrorCode::OutOfDomain,
                                "point outside the domain and no status buffer given");
                out_status[i] = 1;
                out[2 * i] = out[2 * i + 1] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            const auto f = raw_psi ? p->problem.evaluate_psi(q) : p->problem.evaluate(q);
            out[2 * i] = f[0];
            out[2 * i + 1] = f[1];
            if (out_status) out_status[i] = 0;
        }
        return PLMM_OK;
    });
}

} // namespace

extern "C" {

int32_t plmm_abi_version(void) { return 1; }

const char* plmm_last_error(void) { return g_last_error.c_str(); }

plmm_status plmm_problem_create_from_spec_text(const char* json_text, plmm_problem** out) {
    if (!json_text || !out) return invalid_argument("null pointer argument");
    return guarded([&]() -> plmm_status {
        auto p = std::make_unique<plmm_problem>();
        p->spec = plmm::parse_spec(json_text);
        p->problem = plmm::build_problem(p->spec);
        *out = p.release();
        return PLMM_OK;
    });
}

plmm_status plmm_problem_create_from_spec_file(const char* path, plmm_problem** out) {
    if (!path || !out) return invalid_argument("null pointer argument");
    return guarded([&]() -> plmm_status {
        auto p = std::make_unique<plmm_problem>();
        p->spec = plmm::load_spec_file(path);
        p->problem = plmm::build_problem(p->spec);
        *out = p.release();
        return PLMM_OK;
    });
}

plmm_status plmm_problem_open_artifact(const char* dir, plmm_problem** out) {
    if (!dir || !out) return invalid_argument("null pointer argument");
    return guarded([&]() -> plmm_status {
        auto art = plmm::load_artifact(dir);
        auto p = std::make_unique<plmm_problem>();
        p->spec = std::move(art.spec);
        p->problem = std::move(art.problem);
        *out = p.release();
        return PLMM_OK;
    });
}

void plmm_problem_destroy(plmm_problem* p) { delete p; }

plmm_status plmm_problem_domain(const plmm_problem* p, double out_min[3], double out_max[3]) {
    if (!p || !out_min || !out_max) return invalid_argument("null pointer argument");
    const plmm::Box3& b = p->problem.mesh->box();
    out_min[0] = b.min.x;
    out_min[1] = b.min.y;
    out_min[2] = b.min.z;
    out_max[0] = b.max.x;
    out_max[1] = b.max.y;
    out_max[2] = b.max.z;
    return PLMM_OK;
}

plmm_status plmm_problem_counts(const plmm_problem* p, uint64_t* out_vertices,
                                uint64_t* out_tets) {
    if (!p) return invalid_argument("null pointer argument");
    if (out_vertices) *out_vertices = p->problem.mesh->vertex_count();
    if (out_tets) *out_tets = p->problem.mesh->tet_count();
    return PLMM_OK;
}

plmm_status plmm_evaluate(const plmm_problem* p, const double* xyz, size_t n, double* out_f,
                          uint8_t* out_status) {
    return batch_evaluate(p, xyz, n, out_f, out_status, false);
}

plmm_status plmm_evaluate_psi(const plmm_problem* p, const double* xyz, size_t n,
                              double* out_psi, uint8_t* out_status) {
    return batch_evaluate(p, xyz, n, out_psi, out_status, true);
}

plmm_status plmm_write_artifact(const plmm_problem* p, const char* dir) {
    if (!p || !dir) return invalid_argument("null pointer argument");
    return guarded([&]() -> plmm_status {
        plmm::write_artifact(dir, p->spec, p->problem);
        return PLMM_OK;
    });
}

plmm_status plmm_slice_csv(const plmm_problem* p, double z, const char* path) {
    if (!p || !path) return invalid_argument("null pointer argument");
    return guarded([&]() -> plmm_status {
        std::ostringstream out;
        plmm::write_slice_csv(out, p->problem, z);
        plmm::write_file_atomic(path, out.str());
        return PLMM_OK;
    });
}

plmm_status plmm_analyze(const plmm_problem* p, const char* dir, int32_t strict_descent,
                         int32_t* out_modes, uint64_t* out_signatures, int32_t* out_depth) {
    if (!p || !dir) return invalid_argument("null pointer argument");
    return guarded([&]() -> plmm_status {
        const plmm::AnalyzeSummary s = plmm::write_analysis(
            dir, p->problem,
            strict_descent ? plmm::DescentRule::StrictDescent : plmm::DescentRule::Admissible);
        if (out_modes) *out_modes = s.mode_count;
        if (out_signatures) *out_signatures = s.signature_count;
        if (out_depth) *out_depth = s.depth;
        return PLMM_OK;
    });
}

plmm_status plmm_mode_set(const plmm_problem* p, const double xyz[3], int32_t* out_modes,
                          size_t cap, size_t* out_count) {
    if (!p || !xyz || !out_count || (cap > 0 && !out_modes))
        return invalid_argument("null pointer argument");
    return guarded([&]() -> plmm_status {
        const plmm::ModeSet ms = plmm::mode_set(p->problem, {xyz[0], xyz[1], xyz[2]});
        *out_count = ms.size();
        for (size_t i = 0; i < ms.size() && i < cap; ++i)
            out_modes[i] = static_cast<int32_t>(ms[i]);
        return PLMM_OK;
    });
}

plmm_status plmm_solve(const plmm_problem* p, const double start[3], uint64_t seed,
                       plmm_trajectory** out) {
    if (!p || !start || !out) return invalid_argument("null pointer argument");
    return guarded([&]() -> plmm_status {
        plmm::SolveParams params;
        params.seed = seed;
        auto t = std::make_unique<plmm_trajectory>();
        t->traj = plmm::descent_solver(p->problem, {start[0], start[1], start[2]}, params);
        *out = t.release();
        return PLMM_OK;
    });
}

void plmm_trajectory_destroy(plmm_trajectory* t) { delete t; }

size_t plmm_trajectory_length(const plmm_trajectory* t) { return t ? t->traj.steps.size() : 0; }

int32_t plmm_trajectory_iterations(const plmm_trajectory* t) {
    return t ? t->traj.iterations : 0;
}

plmm_status plmm_trajectory_step(const plmm_trajectory* t, size_t index, double out_xyz[3],
                                 double out_f[2]) {
    if (!t || !out_xyz || !out_f) return invalid_argument("null pointer argument");
    if (index >= t->traj.steps.size()) return invalid_argument("trajectory index out of range");
    const plmm::TrajectoryStep& s = t->traj.steps[index];
    out_xyz[0] = s.position.x;
    out_xyz[1] = s.position.y;
    out_xyz[2] = s.position.z;
    out_f[0] = s.objectives[0];
    out_f[1] = s.objectives[1];
    return PLMM_OK;
}

plmm_status plmm_trajectory_terminal_modes(const plmm_trajectory* t, int32_t* out_modes,
                                           size_t cap, size_t* out_count) {
    if (!t || !out_count || (cap > 0 && !out_modes))
        return invalid_argument("null pointer argument");
    *out_count = t->traj.terminal_modes.size();
    for (size_t i = 0; i < t->traj.terminal_modes.size() && i < cap; ++i)
        out_modes[i] = static_cast<int32_t>(t->traj.terminal_modes[i]);
    return PLMM_OK;
}

plmm_status plmm_generate(const char* spec_path, const char* artifact_dir) {
    if (!spec_path || !artifact_dir) return invalid_argument("null pointer argument");
    return guarded([&]() -> plmm_status {
        plmm::ProblemSpecFile spec = plmm::load_spec_file(spec_path);
        const plmm::Problem prob = plmm::build_problem(spec);
        plmm::write_artifact(artifact_dir, spec, prob);
        return PLMM_OK;
    });
}

} // extern "C"
