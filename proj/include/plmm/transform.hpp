#pragma once

#include "plmm/mesh.hpp"

#include <array>

namespace plmm {

/// Strictly increasing scalar maps applied per objective after rotation.
/// power uses the odd extension sign(x)*|x|^gamma so it stays strictly
/// increasing on all of R; log1p_scale is log(1 + k*x)/k and requires the
/// objective range to stay above -1/k.
struct MonotoneMap {
    enum class Kind { Identity, Power, Affine, Log1pScale };

    Kind kind = Kind::Identity;
    double a = 1.0; ///< gamma for Power, scale for Affine, k for Log1pScale
    double b = 0.0; ///< offset for Affine

    double apply(double x) const;
    /// Parameter sanity; throws SpecValidation.
    void validate() const;
    /// Domain check against the actual objective range; throws SpecValidation.
    void validate_on_range(double lo, double hi) const;
};

/// Rotation of the objective pair followed by per-objective monotone maps.
/// The default -45 degree rotation turns the locally optimal psi2 structure
/// into local Pareto structure of (f1, f2); both objectives are minimized.
struct TransformChain {
    double rotation_degrees = -45.0;
    std::array<MonotoneMap, 2> maps{};

    std::array<double, 2> rotate(std::array<double, 2> psi) const;
    std::array<double, 2> apply(std::array<double, 2> psi) const;
};

/// Per-vertex rotation of a field pair (exact for PL fields: the rotation is
/// linear, so rotating vertex values commutes with interpolation).
PLFieldPair rotate_objectives(const PLFieldPair& field, double degrees);

/// Per-vertex application of monotone maps. Off-vertex evaluation of a
/// transformed problem applies the maps to interpolated values instead
/// (transform after interpolate); vertex values agree between both readings.
PLFieldPair apply_monotone(const PLFieldPair& field, const std::array<MonotoneMap, 2>& maps);

} // namespace plmm
