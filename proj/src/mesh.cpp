#include "plmm/mesh.hpp"

#include "plmm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace plmm {

namespace {

constexpr double kBoundaryTol = 1e-9;

int checked_cell_count(double extent, double h, const char* axis) {
    if (!(h > 0.0))
        raise(ErrorCode::ZeroSpacing, std::string("spacing along ") + axis + " must be positive");
    if (!(extent > 0.0))
        raise(ErrorCode::InvalidBox, std::string("box extent along ") + axis + " must be positive");
    const double n = std::round(extent / h);
    if (n < 0.5 || std::abs(extent - n * h) > kBoundaryTol)
        raise(ErrorCode::NonDivisibleExtent,
              std::string("box extent along ") + axis + " is not an integer multiple of the spacing");
    return static_cast<int>(n);
}

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return dot(cross(b - a, c - a), d - a) / 6.0;
}

} // namespace

const char* vertex_kind_name(VertexKind k) {
    switch (k) {
    case VertexKind::Corner: return "corner";
    case VertexKind::FaceCenter: return "face-center";
    case VertexKind::BodyCenter: return "body-center";
    }
    return "?";
}

std::uint32_t TetMesh::corner_id(int i, int j, int k) const {
    return (static_cast<std::uint32_t>(i) * (ny_ + 1) + j) * (nz_ + 1) + k;
}

std::optional<std::uint32_t> TetMesh::find_vertex(VertexClass c, int i, int j, int k) const {
    auto in = [](int v, int lo, int hi) { return v >= lo && v <= hi; };
    switch (c) {
    case VertexClass::Corner:
        if (!in(i, 0, nx_) || !in(j, 0, ny_) || !in(k, 0, nz_)) return std::nullopt;
        return corner_id(i, j, k);
    case VertexClass::XFace:
        if (!in(i, 0, nx_) || !in(j, 0, ny_ - 1) || !in(k, 0, nz_ - 1)) return std::nullopt;
        return off_xface_ + (static_cast<std::uint32_t>(i) * ny_ + j) * nz_ + k;
    case VertexClass::YFace:
        if (!in(i, 0, nx_ - 1) || !in(j, 0, ny_) || !in(k, 0, nz_ - 1)) return std::nullopt;
        return off_yface_ + (static_cast<std::uint32_t>(i) * (ny_ + 1) + j) * nz_ + k;
    case VertexClass::ZFace:
        if (!in(i, 0, nx_ - 1) || !in(j, 0, ny_ - 1) || !in(k, 0, nz_)) return std::nullopt;
        return off_zface_ + (static_cast<std::uint32_t>(i) * ny_ + j) * (nz_ + 1) + k;
    case VertexClass::Body:
        if (!in(i, 0, nx_ - 1) || !in(j, 0, ny_ - 1) || !in(k, 0, nz_ - 1)) return std::nullopt;
        return off_body_ + (static_cast<std::uint32_t>(i) * ny_ + j) * nz_ + k;
    }
    return std::nullopt;
}

VertexClass TetMesh::vertex_class(std::uint32_t v) const {
    if (v < off_xface_) return VertexClass::Corner;
    if (v < off_yface_) return VertexClass::XFace;
    if (v < off_zface_) return VertexClass::YFace;
    if (v < off_body_) return VertexClass::ZFace;
    return VertexClass::Body;
}

VertexKind TetMesh::vertex_kind(std::uint32_t v) const {
    switch (vertex_class(v)) {
    case VertexClass::Corner: return VertexKind::Corner;
    case VertexClass::Body: return VertexKind::BodyCenter;
    default: return VertexKind::FaceCenter;
    }
}

std::array<int, 3> TetMesh::vertex_lattice(std::uint32_t v) const {
    auto split = [](std::uint32_t r, int b, int c) {
        const int k = static_cast<int>(r % c);
        r /= c;
        const int j = static_cast<int>(r % b);
        const int i = static_cast<int>(r / b);
        return std::array<int, 3>{i, j, k};
    };
    switch (vertex_class(v)) {
    case VertexClass::Corner: return split(v, ny_ + 1, nz_ + 1);
    case VertexClass::XFace: return split(v - off_xface_, ny_, nz_);
    case VertexClass::YFace: return split(v - off_yface_, ny_ + 1, nz_);
    case VertexClass::ZFace: return split(v - off_zface_, ny_, nz_ + 1);
    case VertexClass::Body: return split(v - off_body_, ny_, nz_);
    }
    return {0, 0, 0};
}

void TetMesh::append_cube_tets(int i, int j, int k) {
    const std::uint32_t body = *find_vertex(VertexClass::Body, i, j, k);

    auto c = [&](int di, int dj, int dk) { return corner_id(i + di, j + dj, k + dk); };

    struct Face {
        std::uint32_t center;
        std::array<std::uint32_t, 4> cycle; // corner loop around the face
    };

    const std::array<Face, 6> faces = {{
        {*find_vertex(VertexClass::XFace, i, j, k), {c(0, 0, 0), c(0, 1, 0), c(0, 1, 1), c(0, 0, 1)}},
        {*find_vertex(VertexClass::XFace, i + 1, j, k), {c(1, 0, 0), c(1, 1, 0), c(1, 1, 1), c(1, 0, 1)}},
        {*find_vertex(VertexClass::YFace, i, j, k), {c(0, 0, 0), c(1, 0, 0), c(1, 0, 1), c(0, 0, 1)}},
        {*find_vertex(VertexClass::YFace, i, j + 1, k), {c(0, 1, 0), c(1, 1, 0), c(1, 1, 1), c(0, 1, 1)}},
        {*find_vertex(VertexClass::ZFace, i, j, k), {c(0, 0, 0), c(1, 0, 0), c(1, 1, 0), c(0, 1, 0)}},
        {*find_vertex(VertexClass::ZFace, i, j, k + 1), {c(0, 0, 1), c(1, 0, 1), c(1, 1, 1), c(0, 1, 1)}},
    }};

    for (const Face& f : faces) {
        for (int e = 0; e < 4; ++e) {
            std::uint32_t a = f.cycle[e];
            std::uint32_t b = f.cycle[(e + 1) % 4];
            if (signed_volume(vertices_[a], vertices_[b], vertices_[f.center], vertices_[body]) < 0.0)
                std::swap(a, b);
            tets_.push_back({a, b, f.center, body});
        }
    }
}

TetMesh TetMesh::build_fc24(const Box3& box, const Vec3& spacing) {
    for (int a = 0; a < 3; ++a)
        if (!(box.min[a] < box.max[a]))
            raise(ErrorCode::InvalidBox, "box min must be strictly below max in every axis");

    TetMesh m;
    m.box_ = box;
    m.spacing_ = spacing;
    const Vec3 e = box.extent();
    m.nx_ = checked_cell_count(e.x, spacing.x, "x");
    m.ny_ = checked_cell_count(e.y, spacing.y, "y");
    m.nz_ = checked_cell_count(e.z, spacing.z, "z");

    const int nx = m.nx_, ny = m.ny_, nz = m.nz_;
    const std::uint32_t n_corner = (nx + 1u) * (ny + 1u) * (nz + 1u);
    const std::uint32_t n_xf = (nx + 1u) * ny * nz;
    const std::uint32_t n_yf = nx * (ny + 1u) * nz;
    const std::uint32_t n_zf = nx * ny * (nz + 1u);
    const std::uint32_t n_body = static_cast<std::uint32_t>(nx) * ny * nz;

    m.off_xface_ = n_corner;
    m.off_yface_ = m.off_xface_ + n_xf;
    m.off_zface_ = m.off_yface_ + n_yf;
    m.off_body_ = m.off_zface_ + n_zf;

    m.vertices_.reserve(m.off_body_ + n_body);
    const Vec3 o = box.min;
    const Vec3 h = spacing;
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j <= ny; ++j)
            for (int k = 0; k <= nz; ++k)
                m.vertices_.push_back({o.x + i * h.x, o.y + j * h.y, o.z + k * h.z});
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k)
                m.vertices_.push_back({o.x + i * h.x, o.y + (j + 0.5) * h.y, o.z + (k + 0.5) * h.z});
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j <= ny; ++j)
            for (int k = 0; k < nz; ++k)
                m.vertices_.push_back({o.x + (i + 0.5) * h.x, o.y + j * h.y, o.z + (k + 0.5) * h.z});
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k <= nz; ++k)
                m.vertices_.push_back({o.x + (i + 0.5) * h.x, o.y + (j + 0.5) * h.y, o.z + k * h.z});
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k)
                m.vertices_.push_back({o.x + (i + 0.5) * h.x, o.y + (j + 0.5) * h.y, o.z + (k + 0.5) * h.z});

    m.tets_.reserve(static_cast<std::size_t>(m.cube_count()) * 24u);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k)
                m.append_cube_tets(i, j, k);

    return m;
}

std::array<double, 4> TetMesh::barycentric(std::uint32_t tet, const Vec3& p) const {
    const auto& t = tets_[tet];
    const Vec3 v0 = vertices_[t[0]];
    const Vec3 e1 = vertices_[t[1]] - v0;
    const Vec3 e2 = vertices_[t[2]] - v0;
    const Vec3 e3 = vertices_[t[3]] - v0;
    const Vec3 r = p - v0;
    const double det = dot(cross(e1, e2), e3);
    const double l1 = dot(cross(r, e2), e3) / det;
    const double l2 = dot(cross(e1, r), e3) / det;
    const double l3 = dot(cross(e1, e2), r) / det;
    return {1.0 - l1 - l2 - l3, l1, l2, l3};
}

BaryCoords TetMesh::locate(const Vec3& p) const {
    if (!box_.contains(p, kBoundaryTol)) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "point (%g, %g, %g) is outside the mesh box", p.x, p.y, p.z);
        raise(ErrorCode::OutOfDomain, buf);
    }

    // Candidate cells per axis: the cell the point falls in, plus the lower
    // neighbour when the point sits on (or within tolerance of) a grid plane.
    std::array<std::array<int, 2>, 3> cand{};
    std::array<int, 3> ncand{};
    const std::array<int, 3> dims = {nx_, ny_, nz_};
    for (int a = 0; a < 3; ++a) {
        const double t = (p[a] - box_.min[a]) / spacing_[a];
        int lo = static_cast<int>(std::floor(t - kBoundaryTol));
        int hi = static_cast<int>(std::floor(t + kBoundaryTol));
        lo = std::clamp(lo, 0, dims[a] - 1);
        hi = std::clamp(hi, 0, dims[a] - 1);
        cand[a][0] = lo;
        ncand[a] = (hi != lo) ? 2 : 1;
        cand[a][1] = hi;
    }

    for (int ai = 0; ai < ncand[0]; ++ai)
        for (int bi = 0; bi < ncand[1]; ++bi)
            for (int ci = 0; ci < ncand[2]; ++ci) {
                const std::uint32_t cube = cube_linear(cand[0][ai], cand[1][bi], cand[2][ci]);
                const std::uint32_t t0 = first_tet_of_cube(cube);
                for (std::uint32_t t = t0; t < t0 + 24u; ++t) {
                    auto w = barycentric(t, p);
                    const double wmin = std::min(std::min(w[0], w[1]), std::min(w[2], w[3]));
                    if (wmin >= -kBoundaryTol) {
                        double sum = 0.0;
                        for (double& wi : w) {
                            if (wi < 0.0) wi = 0.0;
                            sum += wi;
                        }
                        for (double& wi : w) wi /= sum;
                        return {t, w};
                    }
                }
            }
    raise(ErrorCode::OutOfDomain, "point location failed despite in-box coordinates");
}

double TetMesh::tet_volume(std::uint32_t t) const {
    const auto& v = tets_[t];
    return signed_volume(vertices_[v[0]], vertices_[v[1]], vertices_[v[2]], vertices_[v[3]]);
}

double TetMesh::total_volume() const {
    double s = 0.0;
    for (std::uint32_t t = 0; t < tets_.size(); ++t) s += tet_volume(t);
    return s;
}

const std::vector<std::vector<std::uint32_t>>& TetMesh::vertex_adjacency() const {
    if (adjacency_.empty()) {
        adjacency_.assign(vertices_.size(), {});
        constexpr int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
        for (const auto& t : tets_)
            for (const auto& pr : pairs) {
                adjacency_[t[pr[0]]].push_back(t[pr[1]]);
                adjacency_[t[pr[1]]].push_back(t[pr[0]]);
            }
        for (auto& nbrs : adjacency_) {
            std::sort(nbrs.begin(), nbrs.end());
            nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        }
    }
    return adjacency_;
}

const std::vector<double>& TetMesh::dual_volumes() const {
    if (dual_volumes_.empty()) {
        dual_volumes_.assign(vertices_.size(), 0.0);
        for (std::uint32_t t = 0; t < tets_.size(); ++t) {
            const double q = tet_volume(t) / 4.0;
            for (const std::uint32_t v : tets_[t]) dual_volumes_[v] += q;
        }
    }
    return dual_volumes_;
}

void TetMesh::write_csv(std::ostream& out) const {
    char buf[96];
    out << "# vertices\nindex,x,y,z,kind\n";
    for (std::uint32_t v = 0; v < vertices_.size(); ++v) {
        const Vec3& p = vertices_[v];
        std::snprintf(buf, sizeof buf, "%u,%.17g,%.17g,%.17g,", v, p.x, p.y, p.z);
        out << buf << vertex_kind_name(vertex_kind(v)) << '\n';
    }
    out << "# tets\nindex,v0,v1,v2,v3\n";
    for (std::uint32_t t = 0; t < tets_.size(); ++t) {
        const auto& v = tets_[t];
        std::snprintf(buf, sizeof buf, "%u,%u,%u,%u,%u\n", t, v[0], v[1], v[2], v[3]);
        out << buf;
    }
}

std::array<double, 2> PLFieldPair::value_at(const BaryCoords& bc) const {
    const auto& t = mesh->tets()[bc.tet];
    std::array<double, 2> r = {0.0, 0.0};
    for (int i = 0; i < 4; ++i) {
        r[0] += bc.weights[i] * values[t[i]][0];
        r[1] += bc.weights[i] * values[t[i]][1];
    }
    return r;
}

std::array<double, 2> PLFieldPair::interpolate(const Vec3& p) const {
    return value_at(mesh->locate(p));
}

} // namespace plmm
