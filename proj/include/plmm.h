/* Piecewise-linear multimodal benchmark problems: C interface.
 *
 * Every function that can fail returns a plmm_status; on failure a
 * human-readable message is available from plmm_last_error() until the next
 * call on the same thread. No exceptions cross this boundary.
 */
#ifndef PLMM_H
#define PLMM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct plmm_problem plmm_problem;
typedef struct plmm_trajectory plmm_trajectory;

typedef enum plmm_status {
    PLMM_OK = 0,
    PLMM_ERROR_PARSE = 2,      /* malformed spec or artifact text */
    PLMM_ERROR_VALIDATION = 3, /* well-formed but violates an invariant */
    PLMM_ERROR_RUNTIME = 4     /* I/O failures, out-of-domain queries, ... */
} plmm_status;

int32_t plmm_abi_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* plmm_last_error(void);

plmm_status plmm_problem_create_from_spec_text(const char* json_text, plmm_problem** out);
plmm_status plmm_problem_create_from_spec_file(const char* path, plmm_problem** out);

/* Open a generated artifact directory; the problem is rebuilt from the spec
 * embedded in metadata.json. */
plmm_status plmm_problem_open_artifact(const char* dir, plmm_problem** out);

void plmm_problem_destroy(plmm_problem* p);

plmm_status plmm_problem_domain(const plmm_problem* p, double out_min[3], double out_max[3]);
plmm_status plmm_problem_counts(const plmm_problem* p, uint64_t* out_vertices,
                                uint64_t* out_tets);

/* Batch evaluation of n points (xyz, row-major, 3 doubles each).
 * out_f receives 2 doubles per point (the transformed objectives),
 * out_status one byte per point: 0 = evaluated, 1 = outside the domain
 * (the corresponding out_f entries are set to NaN). out_status may be NULL
 * only if every point is inside. */
plmm_status plmm_evaluate(const plmm_problem* p, const double* xyz, size_t n, double* out_f,
                          uint8_t* out_status);

/* Same, but the raw landscape pair (psi1, psi2) before the transform. */
plmm_status plmm_evaluate_psi(const plmm_problem* p, const double* xyz, size_t n,
                              double* out_psi, uint8_t* out_status);

/* mesh.csv, values.csv, metadata.json into dir (created if needed). */
plmm_status plmm_write_artifact(const plmm_problem* p, const char* dir);

/* Constant-z cross-section table written to path. */
plmm_status plmm_slice_csv(const plmm_problem* p, double z, const char* path);

/* Mode decomposition: writes modes.csv, signatures.csv, hierarchy.csv into
 * dir and reports the counts. strict_descent != 0 forbids sideways moves in
 * the reachability walk. Any output pointer may be NULL. */
plmm_status plmm_analyze(const plmm_problem* p, const char* dir, int32_t strict_descent,
                         int32_t* out_modes, uint64_t* out_signatures, int32_t* out_depth);

/* Modes reachable from a query point. Fills up to cap component indices and
 * stores the true count in out_count (call again with a larger buffer if
 * cap was too small). */
plmm_status plmm_mode_set(const plmm_problem* p, const double xyz[3], int32_t* out_modes,
                          size_t cap, size_t* out_count);

/* Seeded stochastic descent from start; deterministic per (problem, seed). */
plmm_status plmm_solve(const plmm_problem* p, const double start[3], uint64_t seed,
                       plmm_trajectory** out);

void plmm_trajectory_destroy(plmm_trajectory* t);
size_t plmm_trajectory_length(const plmm_trajectory* t);
int32_t plmm_trajectory_iterations(const plmm_trajectory* t);
plmm_status plmm_trajectory_step(const plmm_trajectory* t, size_t index, double out_xyz[3],
                                 double out_f[2]);
plmm_status plmm_trajectory_terminal_modes(const plmm_trajectory* t, int32_t* out_modes,
                                           size_t cap, size_t* out_count);

/* Convenience: spec file in, artifact directory out. */
plmm_status plmm_generate(const char* spec_path, const char* artifact_dir);

#ifdef __cplusplus
}
#endif

#endif /* PLMM_H */
