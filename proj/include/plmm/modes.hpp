#pragma once

#include "plmm/nesting.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace plmm {

/// Admissible allows sideways moves (equal objective pairs); StrictDescent
/// requires a strict improvement in at least one objective.
enum class DescentRule { Admissible, StrictDescent };

struct ModeId {
    int component = 0;
    std::uint32_t representative = 0; ///< smallest vertex index in the component
};

/// Sorted component indices.
using ModeSet = std::vector<int>;

/// Vertex-level Pareto structure of a problem. A vertex is weakly locally
/// Pareto-optimal when no graph neighbour weakly dominates it (<= in both
/// objectives, < in at least one, exact comparisons). Modes are the connected
/// components of that vertex set, indexed in ascending order of their
/// smallest member so that mode identity is canonical for the problem.
struct ParetoStructure {
    std::vector<std::uint32_t> pareto_vertices; ///< ascending
    std::vector<int> component_of;              ///< per vertex, -1 outside the set
    std::vector<ModeId> modes;
};

std::vector<std::uint32_t> local_pareto_vertices(const Problem& prob);

/// Computed once per problem and cached on it.
const ParetoStructure& pareto_structure(const Problem& prob);

/// Closure of the seed vertices under admissible moves: breadth-first walk
/// along mesh edges v -> w with f(w) <= f(v) componentwise (rule-dependent
/// tie handling). Returns the visited set, ascending.
std::vector<std::uint32_t> admissible_from_seeds(const Problem& prob,
                                                 std::span<const std::uint32_t> seeds,
                                                 DescentRule rule);

/// Modes reachable from a query point: the closure is seeded with the
/// vertices of the containing tet whose barycentric weight exceeds 1e-9, so
/// a query at a vertex seeds that vertex alone.
ModeSet mode_set(const Problem& prob, const Vec3& p, DescentRule rule = DescentRule::Admissible);

/// Decomposition of the whole domain by reachable-mode signature, plus the
/// subset partial order between the occurring signatures.
struct ModeHierarchy {
    std::vector<ModeId> modes;
    std::vector<ModeSet> signatures;        ///< distinct, lexicographically sorted
    std::vector<int> vertex_signature;      ///< per vertex, index into signatures
    std::vector<double> signature_volume;   ///< summed vertex dual volumes
    std::vector<std::pair<int, int>> inclusion_edges; ///< Hasse cover pairs (sub, super)
    int depth = 0;                          ///< longest inclusion chain, in edges
};

ModeHierarchy mode_regions(const Problem& prob, DescentRule rule = DescentRule::Admissible);

} // namespace plmm
