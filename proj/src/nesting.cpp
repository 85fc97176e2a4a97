#include "plmm/nesting.hpp"
#include "plmm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>

namespace plmm {

namespace {

constexpr double kTol = 1e-9;

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

Vec2 quarter_rot(int deg, Vec2 v) {
    switch (deg) {
    case 90: return {-v.y, v.x};
    case 180: return {-v.x, -v.y};
    case 270: return {v.y, -v.x};
    default: return v;
    }
}

/// xy map x -> t + s * R(rot) * x with rot a quarter-turn multiple, so that
/// lattice alignment survives composition exactly.
struct Affine2 {
    Vec2 t{0.0, 0.0};
    double s = 1.0;
    int rot = 0;

    Vec2 apply(Vec2 v) const {
        const Vec2 r = quarter_rot(rot, v);
        return {t.x + s * r.x, t.y + s * r.y};
    }
};

Affine2 compose(const Affine2& outer, const Affine2& inner) {
    return {outer.apply(inner.t), outer.s * inner.s, (outer.rot + inner.rot) % 360};
}

void validate_link(const NestingNode& node, const ChildLink& link) {
    if (!link.child)
        raise(ErrorCode::SpecValidation, "MissingChildNode: child link has no landscape");
    if (!(link.scale > 0.0) || !(link.scale < 1.0))
        raise(ErrorCode::SpecValidation,
              fmt("ScaleOutOfRange: child scale %g must lie in (0, 1)", link.scale));
    const int r = link.rotation_degrees;
    if (r != 0 && r != 90 && r != 180 && r != 270)
        raise(ErrorCode::SpecValidation,
              fmt("InvalidRotation: rotation %d must be one of 0, 90, 180, 270", r));
    if (!std::isnan(link.value_gain) && !(link.value_gain > 0.0))
        raise(ErrorCode::SpecValidation,
              fmt("NonPositiveGain: value gain %g must be positive", link.value_gain));
    const int n = static_cast<int>(node.primitive.optima.size());
    if (link.anchor.optimum_index < 0 || link.anchor.optimum_index >= n)
        raise(ErrorCode::SpecValidation,
              fmt("AnchorIndexOutOfRange: optimum index %d not in [0, %d)",
                  link.anchor.optimum_index, n));
}

Vec2 box_xy_center(const Box3& b) {
    return {(b.min.x + b.max.x) / 2.0, (b.min.y + b.max.y) / 2.0};
}

/// child->parent xy frame for one link.
Affine2 link_frame(const ChildLink& link, Vec2 anchor_point) {
    const Vec2 cc = box_xy_center(link.child->primitive.box);
    Affine2 f;
    f.s = link.scale;
    f.rot = link.rotation_degrees;
    const Vec2 rc = quarter_rot(f.rot, cc);
    f.t = {anchor_point.x - f.s * rc.x, anchor_point.y - f.s * rc.y};
    return f;
}

void collect_structural_xy(const NestingNode& node, const Affine2& to_root,
                           std::vector<Vec2>& pts) {
    const auto& optima = node.primitive.optima;
    for (const auto& o : optima) pts.push_back(to_root.apply(o.position));
    for (std::size_t i = 0; i < optima.size(); ++i)
        for (std::size_t j = i + 1; j < optima.size(); ++j) {
            const Vec2 mid{(optima[i].position.x + optima[j].position.x) / 2.0,
                           (optima[i].position.y + optima[j].position.y) / 2.0};
            pts.push_back(to_root.apply(mid));
        }
    const Box3& b = node.primitive.box;
    const Vec2 corners[4] = {{b.min.x, b.min.y}, {b.min.x, b.max.y},
                             {b.max.x, b.min.y}, {b.max.x, b.max.y}};
    for (const Vec2& c : corners) pts.push_back(to_root.apply(c));
    pts.push_back(to_root.apply(box_xy_center(b)));

    for (const auto& link : node.children) {
        validate_link(node, link);
        const Vec2 anchor = optima[link.anchor.optimum_index].position + link.anchor.offset;
        pts.push_back(to_root.apply(anchor));
        collect_structural_xy(*link.child, compose(to_root, link_frame(link, anchor)), pts);
    }
}

bool on_lattice(double coord, double step) {
    return std::abs(coord - std::round(coord / step) * step) <= kTol;
}

struct SubField {
    std::shared_ptr<const TetMesh> mesh;
    std::vector<std::array<double, 2>> values;
};

/// Integer-exact vertex lookup: classify each axis of p as an integer or
/// half-integer lattice site of m and resolve through the class index map.
std::uint32_t lookup_lattice_vertex(const TetMesh& m, const Vec3& p) {
    const Box3& b = m.box();
    const Vec3& h = m.spacing();
    int idx[3], half[3];
    for (int a = 0; a < 3; ++a) {
        const double u = 2.0 * (p[a] - b.min[a]) / h[a];
        const double k = std::round(u);
        if (std::abs(u - k) * h[a] * 0.5 > kTol)
            raise(ErrorCode::MisalignedChild,
                  fmt("child vertex (%g, %g, %g) is off the parent lattice", p.x, p.y, p.z));
        const long long ki = static_cast<long long>(k);
        half[a] = static_cast<int>(ki & 1);
        idx[a] = static_cast<int>(half[a] ? (ki - 1) / 2 : ki / 2);
    }
    VertexClass cls;
    const int pattern = half[0] * 4 + half[1] * 2 + half[2];
    switch (pattern) {
    case 0b000: cls = VertexClass::Corner; break;
    case 0b011: cls = VertexClass::XFace; break;
    case 0b101: cls = VertexClass::YFace; break;
    case 0b110: cls = VertexClass::ZFace; break;
    case 0b111: cls = VertexClass::Body; break;
    default:
        raise(ErrorCode::MisalignedChild,
              fmt("point (%g, %g, %g) is an edge site, not a vertex of the lattice", p.x, p.y,
                  p.z));
    }
    const auto v = m.find_vertex(cls, idx[0], idx[1], idx[2]);
    if (!v)
        raise(ErrorCode::MisalignedChild,
              fmt("lattice site (%g, %g, %g) is outside the child mesh", p.x, p.y, p.z));
    return *v;
}

SubField compose_node(const NestingNode& node, const Vec3& spacing, const Affine2& to_root,
                      int child_level, std::vector<PlacedChild>& placements) {
    node.primitive.validate();
    auto mesh = std::make_shared<const TetMesh>(TetMesh::build_fc24(node.primitive.box, spacing));
    const auto& optima = node.primitive.optima;
    const Box3& pb = node.primitive.box;

    std::vector<std::array<double, 2>> vals(mesh->vertex_count());
    for (std::uint32_t v = 0; v < vals.size(); ++v) {
        const Vec3& p = mesh->vertices()[v];
        const double t = (p.z - pb.min.z) / (pb.max.z - pb.min.z);
        const double s0 = slice_value_z0({p.x, p.y}, optima);
        const double s1 = slice_value_z1({p.x, p.y}, optima);
        vals[v] = {p.z, (1.0 - t) * s0 + t * s1};
    }

    // children blend against the field as it was before any embedding
    std::vector<double> base(vals.size());
    double base_max = -std::numeric_limits<double>::infinity();
    for (std::uint32_t v = 0; v < vals.size(); ++v) {
        base[v] = vals[v][1];
        base_max = std::max(base_max, base[v]);
    }

    for (const auto& link : node.children) {
        validate_link(node, link);
        const Optimum& a = optima[link.anchor.optimum_index];
        const Vec2 center_p = a.position + link.anchor.offset;
        const Box3& cb = link.child->primitive.box;

        double hx = link.scale * (cb.max.x - cb.min.x) / 2.0;
        double hy = link.scale * (cb.max.y - cb.min.y) / 2.0;
        if (link.rotation_degrees == 90 || link.rotation_degrees == 270) std::swap(hx, hy);
        const double rx0 = center_p.x - hx, rx1 = center_p.x + hx;
        const double ry0 = center_p.y - hy, ry1 = center_p.y + hy;

        if (rx0 < pb.min.x - kTol || rx1 > pb.max.x + kTol || ry0 < pb.min.y - kTol ||
            ry1 > pb.max.y + kTol)
            raise(ErrorCode::SpecValidation,
                  fmt("ChildOutsideDomain: child footprint [%g, %g]x[%g, %g] leaves the parent "
                      "box",
                      rx0, rx1, ry0, ry1));

        double radius = std::numeric_limits<double>::infinity();
        for (const auto& o : optima)
            if (&o != &a) radius = std::min(radius, l1_distance(a.position, o.position) / 2.0);
        if (std::isfinite(radius)) {
            const Vec2 rc[4] = {{rx0, ry0}, {rx0, ry1}, {rx1, ry0}, {rx1, ry1}};
            for (const Vec2& c : rc)
                if (l1_distance(c, a.position) > radius + kTol)
                    raise(ErrorCode::SpecValidation,
                          fmt("ChildOutsideAnchorBasin: footprint corner (%g, %g) is %g from the "
                              "anchor, basin radius is %g",
                              c.x, c.y, l1_distance(c, a.position), radius));
        }

        Vec3 cs;
        if (link.rotation_degrees == 90 || link.rotation_degrees == 270) {
            cs.x = spacing.y / link.scale;
            cs.y = spacing.x / link.scale;
        } else {
            cs.x = spacing.x / link.scale;
            cs.y = spacing.y / link.scale;
        }
        const double zscale = (pb.max.z - pb.min.z) / (cb.max.z - cb.min.z);
        cs.z = spacing.z / zscale;

        const std::size_t placed = placements.size();
        {
            PlacedChild pc;
            const Vec2 q0 = to_root.apply({rx0, ry0});
            const Vec2 q1 = to_root.apply({rx1, ry1});
            pc.region.min = {std::min(q0.x, q1.x), std::min(q0.y, q1.y), 0.0};
            pc.region.max = {std::max(q0.x, q1.x), std::max(q0.y, q1.y), 0.0};
            pc.anchor_base = a.base_value;
            pc.level = child_level;
            placements.push_back(pc);
        }

        const Affine2 frame = link_frame(link, center_p);
        const SubField sub =
            compose_node(*link.child, cs, compose(to_root, frame), child_level + 1, placements);

        double cmin = std::numeric_limits<double>::infinity(), cmax = -cmin;
        for (const auto& vv : sub.values) {
            cmin = std::min(cmin, vv[1]);
            cmax = std::max(cmax, vv[1]);
        }
        const double range = cmax - cmin;

        double depth = basin_depth(a, optima);
        double gain = link.value_gain;
        if (std::isnan(gain)) {
            if (!std::isfinite(depth)) depth = base_max - a.base_value;
            if (range <= 1e-12)
                raise(ErrorCode::SpecValidation,
                      "DegenerateChildRange: child landscape is flat, no default gain exists");
            gain = 0.4 * depth / range;
        } else if (std::isfinite(depth) && gain * range > depth + kTol) {
            raise(ErrorCode::SpecValidation,
                  fmt("GainExceedsBasinDepth: gain %g spans %g of the child range, basin depth "
                      "is %g",
                      gain, gain * range, depth));
        }
        placements[placed].gain = gain;

        const int inv_rot = (360 - link.rotation_degrees) % 360;
        for (std::uint32_t v = 0; v < vals.size(); ++v) {
            const Vec3& p = mesh->vertices()[v];
            if (p.x < rx0 - kTol || p.x > rx1 + kTol || p.y < ry0 - kTol || p.y > ry1 + kTol)
                continue;
            const double dx = std::min(p.x - rx0, rx1 - p.x) / spacing.x;
            const double dy = std::min(p.y - ry0, ry1 - p.y) / spacing.y;
            const double w = std::clamp(std::min(dx, dy), 0.0, 1.0);
            if (w <= 0.0) {
                vals[v][1] = base[v];
                continue;
            }
            const Vec2 rel = quarter_rot(inv_rot, {p.x - center_p.x, p.y - center_p.y});
            const Vec3 q{box_xy_center(cb).x + rel.x / link.scale,
                         box_xy_center(cb).y + rel.y / link.scale,
                         cb.min.z + (p.z - pb.min.z) / zscale};
            const std::uint32_t cv = lookup_lattice_vertex(*sub.mesh, q);
            const Vec3& cp = sub.mesh->vertices()[cv];
            const Vec2 fwd = frame.apply({cp.x, cp.y});
            const double fz = pb.min.z + (cp.z - cb.min.z) * zscale;
            if (std::abs(fwd.x - p.x) > kTol || std::abs(fwd.y - p.y) > kTol ||
                std::abs(fz - p.z) > kTol)
                raise(ErrorCode::MisalignedChild,
                      fmt("child vertex maps to (%g, %g, %g), expected (%g, %g, %g)", fwd.x,
                          fwd.y, fz, p.x, p.y, p.z));
            vals[v][1] =
                (1.0 - w) * base[v] + w * (a.base_value + gain * sub.values[cv][1]);
        }
    }

    return {std::move(mesh), std::move(vals)};
}

} // namespace

int plan_refinement(const NestingNode& root) {
    const Vec3& h = root.primitive.spacing;
    if (!(h.x > 0.0) || !(h.y > 0.0) || !(h.z > 0.0))
        raise(ErrorCode::ZeroSpacing, "root spacing must be positive in every axis");

    std::vector<Vec2> pts;
    collect_structural_xy(root, Affine2{}, pts);

    const Box3& b = root.primitive.box;
    for (int m = 1; m <= 64; m *= 2) {
        bool ok = true;
        for (const Vec2& p : pts)
            if (!on_lattice(p.x - b.min.x, h.x / m) || !on_lattice(p.y - b.min.y, h.y / m)) {
                ok = false;
                break;
            }
        if (ok) return m;
    }
    raise(ErrorCode::IrrationalScale,
          "no power-of-two refinement up to 64 aligns the nested structure with the root "
          "lattice");
}

Problem compose_problem(const NestingNode& root, const TransformChain& chain) {
    const int m = plan_refinement(root);
    const Vec3 h = root.primitive.spacing;
    const Vec3 refined{h.x / m, h.y / m, h.z / m};

    std::vector<PlacedChild> placements;
    SubField f = compose_node(root, refined, Affine2{}, 1, placements);
    for (auto& pc : placements) {
        pc.region.min.z = root.primitive.box.min.z;
        pc.region.max.z = root.primitive.box.max.z;
    }

    Problem prob;
    prob.mesh = f.mesh;
    prob.psi.mesh = f.mesh;
    prob.psi.values = std::move(f.values);
    prob.chain = chain;
    prob.refinement = m;
    prob.placements = std::move(placements);

    // bake the chain at the vertices: rotate, check the monotone maps against
    // the actual rotated range, then apply them
    std::vector<std::array<double, 2>> rotated(prob.psi.values.size());
    double lo[2] = {std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
    double hi[2] = {-lo[0], -lo[1]};
    for (std::size_t i = 0; i < rotated.size(); ++i) {
        rotated[i] = chain.rotate(prob.psi.values[i]);
        for (int c = 0; c < 2; ++c) {
            lo[c] = std::min(lo[c], rotated[i][c]);
            hi[c] = std::max(hi[c], rotated[i][c]);
        }
    }
    for (int c = 0; c < 2; ++c) chain.maps[c].validate_on_range(lo[c], hi[c]);

    prob.objectives.mesh = prob.mesh;
    prob.objectives.values.resize(rotated.size());
    for (std::size_t i = 0; i < rotated.size(); ++i)
        prob.objectives.values[i] = {chain.maps[0].apply(rotated[i][0]),
                                     chain.maps[1].apply(rotated[i][1])};
    return prob;
}

} // namespace plmm
