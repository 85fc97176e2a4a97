#include "plmm/primitive.hpp"

#include "plmm/errors.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <string>

namespace plmm {

namespace {

constexpr double kValueTol = 1e-9;

std::string pt(Vec2 a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%g, %g)", a.x, a.y);
    return buf;
}

bool on_lattice(double value, double origin, double h) {
    const double t = (value - origin) / h;
    return std::abs(t - std::round(t)) * h <= kValueTol;
}

} // namespace

std::vector<Optimum> PrimitiveSpec::standard_optima() {
    return {
        {{1.0, 0.0}, 0.0, 1.0, 1, true},
        {{3.0, 0.0}, 0.5, 0.5, 0, false},
    };
}

double l1_distance(Vec2 a, Vec2 b) {
    return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

const Optimum& dominant_optimum(Vec2 a, std::span<const Optimum> optima) {
    const Optimum* best = &optima[0];
    double best_value = best->base_value + best->slope * l1_distance(a, best->position);
    for (std::size_t i = 1; i < optima.size(); ++i) {
        const Optimum& o = optima[i];
        const double v = o.base_value + o.slope * l1_distance(a, o.position);
        if (v < best_value || (v == best_value && o.rank > best->rank)) {
            best = &o;
            best_value = v;
        }
    }
    return *best;
}

double slice_value_z0(Vec2 a, std::span<const Optimum> optima) {
    const Optimum& o = dominant_optimum(a, optima);
    return o.base_value + o.slope * l1_distance(a, o.position);
}

double slice_value_z1(Vec2 a, std::span<const Optimum> optima) {
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (const Optimum& o : optima) {
        if (!o.persists_at_top) continue;
        found = true;
        best = std::min(best, o.base_value + o.slope * l1_distance(a, o.position));
    }
    if (!found)
        raise(ErrorCode::NoPersistentOptimum, "no optimum persists at the top slice");
    return best;
}

double primitive_psi2(const PrimitiveSpec& spec, const Vec3& p) {
    const Vec2 a{p.x, p.y};
    const double t = (p.z - spec.box.min.z) / (spec.box.max.z - spec.box.min.z);
    return (1.0 - t) * slice_value_z0(a, spec.optima) + t * slice_value_z1(a, spec.optima);
}

double pair_saddle_value(const Optimum& a, const Optimum& b) {
    return a.base_value + a.slope * l1_distance(a.position, b.position) / 2.0;
}

double basin_depth(const Optimum& a, std::span<const Optimum> optima) {
    double lowest = std::numeric_limits<double>::infinity();
    for (const Optimum& o : optima) {
        if (&o == &a || (o.position == a.position && o.rank == a.rank)) continue;
        lowest = std::min(lowest, pair_saddle_value(a, o));
    }
    return lowest - a.base_value;
}

void PrimitiveSpec::validate() const {
    if (optima.empty())
        raise(ErrorCode::SpecValidation, "EmptyOptima: a primitive needs at least one optimum");

    std::set<int> ranks;
    const Optimum* global = &optima[0];
    for (const Optimum& o : optima) {
        if (!(o.slope > 0.0))
            raise(ErrorCode::SpecValidation, "NonPositiveSlope: optimum at " + pt(o.position));
        if (!ranks.insert(o.rank).second)
            raise(ErrorCode::SpecValidation, "DuplicateRank: optimum at " + pt(o.position));
        if (o.rank > global->rank) global = &o;

        if (!(o.position.x > box.min.x && o.position.x < box.max.x && o.position.y > box.min.y &&
              o.position.y < box.max.y))
            raise(ErrorCode::SpecValidation,
                  "OptimumOutsideSlice: optimum at " + pt(o.position) +
                      " must lie strictly inside the slice rectangle");
        if (!on_lattice(o.position.x, box.min.x, spacing.x) ||
            !on_lattice(o.position.y, box.min.y, spacing.y))
            raise(ErrorCode::SpecValidation,
                  "OptimumOffGrid: optimum at " + pt(o.position) + " is not a grid corner");
    }

    for (const Optimum& o : optima)
        if (&o != global && !(global->base_value < o.base_value))
            raise(ErrorCode::SpecValidation,
                  "RankOrderMismatch: the maximal-rank optimum must have the strictly "
                  "smallest base value");

    bool any_persistent = false;
    for (const Optimum& o : optima) any_persistent |= o.persists_at_top;
    if (!any_persistent)
        raise(ErrorCode::SpecValidation, "NoPersistentOptimum: the top slice would be empty");

    for (std::size_t i = 0; i < optima.size(); ++i)
        for (std::size_t j = i + 1; j < optima.size(); ++j) {
            const Optimum& a = optima[i];
            const Optimum& b = optima[j];
            if (a.position == b.position)
                raise(ErrorCode::SpecValidation,
                      "DuplicateOptimumPosition: two optima at " + pt(a.position));
            // Cone contours of a pair must meet at their midpoint wherever the
            // pair actually forms the local meeting locus (no third optimum
            // strictly below both there).
            const Vec2 mid = 0.5 * (a.position + b.position);
            const double va = a.base_value + a.slope * l1_distance(mid, a.position);
            const double vb = b.base_value + b.slope * l1_distance(mid, b.position);
            const double global_min = slice_value_z0(mid, optima);
            if (std::min(va, vb) <= global_min + kValueTol && std::abs(va - vb) > kValueTol)
                raise(ErrorCode::SpecValidation,
                      "SaddleInconsistency: cone values of the optima at " + pt(a.position) +
                          " and " + pt(b.position) + " disagree at their midpoint");
        }
}

PLFieldPair build_primitive_field(const PrimitiveSpec& spec) {
    spec.validate();
    auto mesh = std::make_shared<TetMesh>(TetMesh::build_fc24(spec.box, spec.spacing));

    PLFieldPair field;
    field.values.resize(mesh->vertex_count());
    const double z0 = spec.box.min.z;
    const double zext = spec.box.max.z - spec.box.min.z;
    for (std::uint32_t v = 0; v < mesh->vertex_count(); ++v) {
        const Vec3& p = mesh->vertices()[v];
        const double t = (p.z - z0) / zext;
        const Vec2 a{p.x, p.y};
        const double s0 = slice_value_z0(a, spec.optima);
        const double s1 = slice_value_z1(a, spec.optima);
        field.values[v] = {p.z, (1.0 - t) * s0 + t * s1};
    }
    field.mesh = std::move(mesh);
    return field;
}

} // namespace plmm
