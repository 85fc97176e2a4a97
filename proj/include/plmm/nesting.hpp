#pragma once

#include "plmm/mesh.hpp"
#include "plmm/primitive.hpp"
#include "plmm/transform.hpp"

#include <limits>
#include <memory>
#include <vector>

namespace plmm {

struct NestingNode;

/// Placement of a child landscape: anchored at one of the parent optima,
/// optionally shifted by an xy offset.
struct Anchor {
    int optimum_index = 0;
    Vec2 offset{0.0, 0.0};
};

/// One nested child. scale shrinks the child box in xy; rotation is a
/// quarter-turn multiple; value_gain compresses the child value range into
/// the anchor basin (NaN means "derive the default": 0.4 * basin depth /
/// child value range). Children always span the parent's full z extent.
struct ChildLink {
    double scale = 0.25;
    int rotation_degrees = 0;
    double value_gain = std::numeric_limits<double>::quiet_NaN();
    Anchor anchor{};
    std::unique_ptr<NestingNode> child;
};

/// A primitive landscape plus recursively nested children.
struct NestingNode {
    PrimitiveSpec primitive{};
    std::vector<ChildLink> children;
};

/// Where a child region ended up inside the root mesh, in root coordinates.
/// Recorded during composition, outermost first (depth-first order).
struct PlacedChild {
    Box3 region;        ///< xy footprint of the child, full z span
    double gain = 0.0;  ///< resolved value gain
    double anchor_base = 0.0;
    int level = 1;      ///< nesting depth, root children are level 1
};

struct ParetoStructure;

/// Fully composed benchmark problem. psi carries the raw landscape pair
/// (psi1 = z, psi2 = composed multimodal field); objectives carries the
/// transform chain baked at the vertices. Off-vertex evaluation interpolates
/// psi first and applies the chain to the interpolated values.
struct Problem {
    std::shared_ptr<const TetMesh> mesh;
    PLFieldPair psi;
    PLFieldPair objectives;
    TransformChain chain{};
    int refinement = 1;
    std::vector<PlacedChild> placements;

    mutable std::shared_ptr<const ParetoStructure> pareto_cache;

    std::array<double, 2> evaluate_psi(const Vec3& p) const { return psi.interpolate(p); }
    std::array<double, 2> evaluate(const Vec3& p) const {
        return chain.apply(psi.interpolate(p));
    }
};

/// Smallest power-of-two refinement m (up to 64) of the root spacing such
/// that every structural xy point of the whole tree, mapped to root
/// coordinates, lands on the refined corner lattice within 1e-9. Structural
/// points per node: optima, pairwise optimum midpoints, box xy corners, box
/// xy center, and each child's anchor-plus-offset. Throws IrrationalScale
/// when no admissible m exists.
int plan_refinement(const NestingNode& root);

/// Compose the whole tree into a single problem on the refined root mesh.
Problem compose_problem(const NestingNode& root, const TransformChain& chain);

} // namespace plmm
