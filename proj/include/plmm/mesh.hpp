#pragma once

#include "plmm/geometry.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

namespace plmm {

/// Coarse vertex role, as exported.
enum class VertexKind : std::uint8_t { Corner, FaceCenter, BodyCenter };

/// Fine vertex role; face centers keep their plane orientation so that
/// lattice-aligned submeshes can be matched vertex-for-vertex.
enum class VertexClass : std::uint8_t { Corner, XFace, YFace, ZFace, Body };

const char* vertex_kind_name(VertexKind k);

/// Point location result: a tet index plus the four barycentric weights of
/// the query point with respect to that tet's vertices. Weights are
/// nonnegative and sum to 1 (clamped within 1e-12).
struct BaryCoords {
    std::uint32_t tet = 0;
    std::array<double, 4> weights{};
};

/// Tetrahedral mesh of an axis-aligned box, built by splitting every grid
/// cube into 24 tets: each of the 6 faces contributes 4 triangles around its
/// face center, and each triangle is joined to the cube's body center.
/// The subdivision is face-conforming between neighbouring cubes because the
/// shared face is triangulated identically from both sides, and it contains
/// every cube corner, face center and body center as a mesh vertex.
///
/// Vertex order: all grid corners in lexicographic (i,j,k) order, then face
/// centers (x-planes, y-planes, z-planes, each lexicographic), then body
/// centers. Tets are emitted cube by cube (lexicographic), 24 per cube, in a
/// fixed face/edge order, and every tet is oriented to positive signed
/// volume. Two builds from identical inputs are bit-identical.
class TetMesh {
public:
    /// Throws InvalidBox, ZeroSpacing or NonDivisibleExtent.
    static TetMesh build_fc24(const Box3& box, const Vec3& spacing);

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<std::array<std::uint32_t, 4>>& tets() const { return tets_; }
    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t tet_count() const { return tets_.size(); }

    VertexKind vertex_kind(std::uint32_t v) const;
    VertexClass vertex_class(std::uint32_t v) const;
    /// Lattice coordinates of a vertex within its class block.
    std::array<int, 3> vertex_lattice(std::uint32_t v) const;

    const Box3& box() const { return box_; }
    const Vec3& spacing() const { return spacing_; }
    std::array<int, 3> grid_dims() const { return {nx_, ny_, nz_}; }

    std::uint32_t cube_count() const { return static_cast<std::uint32_t>(nx_) * ny_ * nz_; }
    std::uint32_t cube_linear(int i, int j, int k) const {
        return (static_cast<std::uint32_t>(i) * ny_ + j) * nz_ + k;
    }
    /// The 24 tets of a cube occupy indices [24*cube, 24*cube + 24).
    std::uint32_t first_tet_of_cube(std::uint32_t cube) const { return cube * 24u; }

    /// Vertex id for a lattice position of the given class, if it exists.
    std::optional<std::uint32_t> find_vertex(VertexClass c, int i, int j, int k) const;

    /// Locates the tet containing p (inclusive boundary, tolerance 1e-9).
    /// On shared faces/edges the containing tet with the lowest index wins.
    /// Throws OutOfDomain.
    BaryCoords locate(const Vec3& p) const;

    /// Raw barycentric weights of p in a given tet (no clamping).
    std::array<double, 4> barycentric(std::uint32_t tet, const Vec3& p) const;

    double tet_volume(std::uint32_t t) const;
    double total_volume() const;

    /// Symmetric vertex adjacency from tet edges; neighbour lists are sorted.
    /// Built once on first use; the mesh itself is immutable.
    const std::vector<std::vector<std::uint32_t>>& vertex_adjacency() const;

    /// Dual volume per vertex: sum of incident tet volumes / 4. The dual
    /// volumes partition the box volume exactly.
    const std::vector<double>& dual_volumes() const;

    /// Plain-text dump: a vertex table (index,x,y,z,kind) and a tet table.
    void write_csv(std::ostream& out) const;

private:
    TetMesh() = default;

    Box3 box_{};
    Vec3 spacing_{};
    int nx_ = 0, ny_ = 0, nz_ = 0;
    std::vector<Vec3> vertices_;
    std::vector<std::array<std::uint32_t, 4>> tets_;
    // class block offsets into the vertex array, in declaration order
    std::uint32_t off_xface_ = 0, off_yface_ = 0, off_zface_ = 0, off_body_ = 0;

    // lazy caches, built on first use (empty means "not built yet")
    mutable std::vector<std::vector<std::uint32_t>> adjacency_;
    mutable std::vector<double> dual_volumes_;

    std::uint32_t corner_id(int i, int j, int k) const;
    void append_cube_tets(int i, int j, int k);
};

/// Paired piecewise-linear scalar fields (psi1, psi2) over a shared mesh:
/// one value pair per vertex, evaluated anywhere by barycentric
/// interpolation within the containing tet.
struct PLFieldPair {
    std::shared_ptr<const TetMesh> mesh;
    std::vector<std::array<double, 2>> values;

    std::array<double, 2> value_at(const BaryCoords& bc) const;
    std::array<double, 2> interpolate(const Vec3& p) const;
};

} // namespace plmm
