#include "plmm/modes.hpp"
#include "plmm/errors.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>

namespace plmm {

namespace {

using Pair = std::array<double, 2>;

bool weakly_dominates(const Pair& a, const Pair& b) {
    return a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1]);
}

bool admissible_step(const Pair& from, const Pair& to, DescentRule rule) {
    if (!(to[0] <= from[0] && to[1] <= from[1])) return false;
    if (rule == DescentRule::StrictDescent) return to[0] < from[0] || to[1] < from[1];
    return true;
}

struct Dsu {
    std::vector<std::uint32_t> parent;
    explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
    std::uint32_t find(std::uint32_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

} // namespace

std::vector<std::uint32_t> local_pareto_vertices(const Problem& prob) {
    const auto& adj = prob.mesh->vertex_adjacency();
    const auto& f = prob.objectives.values;
    std::vector<std::uint32_t> out;
    for (std::uint32_t v = 0; v < f.size(); ++v) {
        bool dominated = false;
        for (const std::uint32_t w : adj[v])
            if (weakly_dominates(f[w], f[v])) {
                dominated = true;
                break;
            }
        if (!dominated) out.push_back(v);
    }
    return out;
}

const ParetoStructure& pareto_structure(const Problem& prob) {
    if (prob.pareto_cache) return *prob.pareto_cache;

    auto ps = std::make_shared<ParetoStructure>();
    ps->pareto_vertices = local_pareto_vertices(prob);
    ps->component_of.assign(prob.mesh->vertex_count(), -1);

    std::vector<char> in_set(prob.mesh->vertex_count(), 0);
    for (const std::uint32_t v : ps->pareto_vertices) in_set[v] = 1;

    const auto& adj = prob.mesh->vertex_adjacency();
    for (const std::uint32_t root : ps->pareto_vertices) {
        if (ps->component_of[root] >= 0) continue;
        const int c = static_cast<int>(ps->modes.size());
        ps->modes.push_back({c, root});
        std::queue<std::uint32_t> q;
        q.push(root);
        ps->component_of[root] = c;
        while (!q.empty()) {
            const std::uint32_t v = q.front();
            q.pop();
            for (const std::uint32_t w : adj[v])
                if (in_set[w] && ps->component_of[w] < 0) {
                    ps->component_of[w] = c;
                    q.push(w);
                }
        }
    }

    prob.pareto_cache = std::move(ps);
    return *prob.pareto_cache;
}

std::vector<std::uint32_t> admissible_from_seeds(const Problem& prob,
                                                 std::span<const std::uint32_t> seeds,
                                                 DescentRule rule) {
    const auto& adj = prob.mesh->vertex_adjacency();
    const auto& f = prob.objectives.values;
    std::vector<char> visited(prob.mesh->vertex_count(), 0);
    std::queue<std::uint32_t> q;
    for (const std::uint32_t s : seeds)
        if (!visited[s]) {
            visited[s] = 1;
            q.push(s);
        }
    while (!q.empty()) {
        const std::uint32_t v = q.front();
        q.pop();
        for (const std::uint32_t w : adj[v])
            if (!visited[w] && admissible_step(f[v], f[w], rule)) {
                visited[w] = 1;
                q.push(w);
            }
    }
    std::vector<std::uint32_t> out;
    for (std::uint32_t v = 0; v < visited.size(); ++v)
        if (visited[v]) out.push_back(v);
    return out;
}

ModeSet mode_set(const Problem& prob, const Vec3& p, DescentRule rule) {
    const BaryCoords bc = prob.mesh->locate(p);
    const auto& tet = prob.mesh->tets()[bc.tet];
    std::vector<std::uint32_t> seeds;
    for (int i = 0; i < 4; ++i)
        if (bc.weights[i] > 1e-9) seeds.push_back(tet[i]);

    const ParetoStructure& ps = pareto_structure(prob);
    const auto closure = admissible_from_seeds(prob, seeds, rule);
    ModeSet ms;
    for (const std::uint32_t v : closure)
        if (ps.component_of[v] >= 0) ms.push_back(ps.component_of[v]);
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    return ms;
}

ModeHierarchy mode_regions(const Problem& prob, DescentRule rule) {
    const ParetoStructure& ps = pareto_structure(prob);
    const auto& adj = prob.mesh->vertex_adjacency();
    const auto& f = prob.objectives.values;
    const std::size_t n = prob.mesh->vertex_count();
    const std::size_t words = (ps.modes.size() + 63) / 64;

    // vertices with exactly equal objective pairs that are adjacent can reach
    // each other under the admissible rule, so they share one signature
    Dsu dsu(n);
    if (rule == DescentRule::Admissible)
        for (std::uint32_t v = 0; v < n; ++v)
            for (const std::uint32_t w : adj[v])
                if (w > v && f[v] == f[w]) dsu.unite(v, w);

    std::vector<std::uint32_t> reps;
    reps.reserve(n);
    for (std::uint32_t v = 0; v < n; ++v)
        if (dsu.find(v) == v) reps.push_back(v);
    std::sort(reps.begin(), reps.end(), [&](std::uint32_t a, std::uint32_t b) {
        return f[a] < f[b]; // lexicographic; admissible moves never increase it
    });

    std::vector<std::vector<std::uint32_t>> members(n);
    for (std::uint32_t v = 0; v < n; ++v) members[dsu.find(v)].push_back(v);

    // signature bits per representative, filled in ascending value order so
    // every admissible out-neighbour cluster is already final
    std::vector<std::uint64_t> sig(n * words, 0);
    auto sig_of = [&](std::uint32_t rep) { return sig.data() + std::size_t(rep) * words; };
    for (const std::uint32_t r : reps) {
        std::uint64_t* s = sig_of(r);
        for (const std::uint32_t v : members[r]) {
            if (ps.component_of[v] >= 0) {
                const int c = ps.component_of[v];
                s[c / 64] |= std::uint64_t(1) << (c % 64);
            }
            for (const std::uint32_t w : adj[v])
                if (f[w] != f[v] && admissible_step(f[v], f[w], rule)) {
                    const std::uint64_t* t = sig_of(dsu.find(w));
                    for (std::size_t k = 0; k < words; ++k) s[k] |= t[k];
                }
        }
    }

    ModeHierarchy mh;
    mh.modes = ps.modes;

    // deduplicate masks, then order the distinct signatures lexicographically
    std::map<std::vector<std::uint64_t>, int> index;
    for (const std::uint32_t r : reps)
        index.emplace(std::vector<std::uint64_t>(sig_of(r), sig_of(r) + words), -1);

    std::vector<ModeSet> distinct;
    distinct.reserve(index.size());
    for (const auto& [mask, _] : index) {
        ModeSet ms;
        for (std::size_t c = 0; c < ps.modes.size(); ++c)
            if (mask[c / 64] >> (c % 64) & 1) ms.push_back(static_cast<int>(c));
        distinct.push_back(std::move(ms));
    }
    std::sort(distinct.begin(), distinct.end());
    mh.signatures = std::move(distinct);

    auto signature_index = [&](const ModeSet& ms) {
        return static_cast<int>(
            std::lower_bound(mh.signatures.begin(), mh.signatures.end(), ms) -
            mh.signatures.begin());
    };
    std::vector<int> rep_to_sig(n, -1);
    for (const std::uint32_t r : reps) {
        ModeSet ms;
        const std::uint64_t* m = sig_of(r);
        for (std::size_t c = 0; c < ps.modes.size(); ++c)
            if (m[c / 64] >> (c % 64) & 1) ms.push_back(static_cast<int>(c));
        rep_to_sig[r] = signature_index(ms);
    }

    mh.vertex_signature.assign(n, -1);
    for (std::uint32_t v = 0; v < n; ++v) mh.vertex_signature[v] = rep_to_sig[dsu.find(v)];

    const auto& dual = prob.mesh->dual_volumes();
    mh.signature_volume.assign(mh.signatures.size(), 0.0);
    for (std::uint32_t v = 0; v < n; ++v) mh.signature_volume[mh.vertex_signature[v]] += dual[v];

    // Hasse diagram of the subset order between occurring signatures. Subset
    // tests run on bitmasks; an edge i -> j survives only if no other proper
    // subset of j contains i (cover relation).
    const std::size_t s = mh.signatures.size();
    std::vector<std::uint64_t> masks(s * words, 0);
    for (std::size_t i = 0; i < s; ++i)
        for (const int c : mh.signatures[i])
            masks[i * words + c / 64] |= std::uint64_t(1) << (c % 64);
    const auto is_proper_subset = [&](std::size_t i, std::size_t j) {
        if (mh.signatures[i].size() >= mh.signatures[j].size()) return false;
        const std::uint64_t* a = masks.data() + i * words;
        const std::uint64_t* b = masks.data() + j * words;
        for (std::size_t k = 0; k < words; ++k)
            if (a[k] & ~b[k]) return false;
        return true;
    };
    std::vector<std::size_t> cand;
    for (std::size_t j = 0; j < s; ++j) {
        cand.clear();
        for (std::size_t i = 0; i < s; ++i)
            if (is_proper_subset(i, j)) cand.push_back(i);
        for (const std::size_t i : cand) {
            bool covered = false;
            for (const std::size_t k : cand)
                if (k != i && is_proper_subset(i, k)) {
                    covered = true;
                    break;
                }
            if (!covered) mh.inclusion_edges.push_back({static_cast<int>(i), static_cast<int>(j)});
        }
    }

    // longest chain: DP over the cover relation in ascending size order
    std::vector<int> depth(s, 0);
    std::vector<int> order(s);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return mh.signatures[a].size() < mh.signatures[b].size(); });
    for (const int j : order)
        for (const auto& [a, b] : mh.inclusion_edges)
            if (b == j) depth[j] = std::max(depth[j], depth[a] + 1);
    for (const int d : depth) mh.depth = std::max(mh.depth, d);

    return mh;
}

} // namespace plmm
