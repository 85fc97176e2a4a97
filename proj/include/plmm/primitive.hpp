#pragma once

#include "plmm/geometry.hpp"
#include "plmm/mesh.hpp"

#include <span>
#include <vector>

namespace plmm {

/// One local optimum of the psi2 landscape on the bottom slice.
struct Optimum {
    Vec2 position;              ///< (x, y) on the z=0 slice, a grid corner
    double base_value = 0.0;    ///< psi2 at the optimum on the bottom slice
    double slope = 1.0;         ///< l1 cone slope around the optimum
    int rank = 0;               ///< total-order position; the maximum is the global optimum
    bool persists_at_top = false; ///< whether the optimum still exists on the z=1 slice
};

/// A primitive landscape: a box domain plus its slice optima. psi1 is the z
/// coordinate; psi2 blends the bottom-slice cone field into the top-slice
/// cone field (which keeps only the persistent optima) affinely along z.
struct PrimitiveSpec {
    Box3 box = standard_box();
    std::vector<Optimum> optima = standard_optima();
    Vec3 spacing{1.0, 1.0, 1.0};

    static Box3 standard_box() { return {{0.0, -1.0, 0.0}, {4.0, 1.0, 1.0}}; }
    /// Major optimum at (1,0) (value 0, slope 1, persists) and minor at
    /// (3,0) (value 0.5, slope 0.5, disappears at the top).
    static std::vector<Optimum> standard_optima();
    static PrimitiveSpec standard() { return {}; }

    /// Structural and geometric checks; throws SpecValidation.
    void validate() const;
};

double l1_distance(Vec2 a, Vec2 b);

/// The optimum whose cone value base + slope * l1(a, position) is minimal at
/// a; ties go to the greater rank. optima must be non-empty.
const Optimum& dominant_optimum(Vec2 a, std::span<const Optimum> optima);

/// Bottom-slice value: the dominant optimum's cone evaluated at a.
double slice_value_z0(Vec2 a, std::span<const Optimum> optima);

/// Top-slice value: same, restricted to optima with persists_at_top.
/// Throws NoPersistentOptimum if the restriction is empty.
double slice_value_z1(Vec2 a, std::span<const Optimum> optima);

/// Vertex formula: affine blend of the two slice values along the box z.
double primitive_psi2(const PrimitiveSpec& spec, const Vec3& p);

/// psi2 value where the cones of a and b meet on the segment between them
/// (with consistent slopes this is the value at their midpoint).
double pair_saddle_value(const Optimum& a, const Optimum& b);

/// Depth of an optimum's basin: lowest meeting value with any other optimum
/// minus its base value. With no other optima, the landscape has a single
/// basin and the depth is taken as +infinity.
double basin_depth(const Optimum& a, std::span<const Optimum> optima);

/// Builds (psi1, psi2) vertex values on an fc24 mesh of the spec's box.
PLFieldPair build_primitive_field(const PrimitiveSpec& spec);

} // namespace plmm
