#include "specdec/reference_decoder.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

namespace specdec {

namespace {

constexpr int kUnset = std::numeric_limits<int>::max();

struct DefectSet {
    std::vector<int> nodes;
    std::vector<int> db;                // boundary distance per defect
    std::vector<std::vector<int>> dist;  // pairwise
};

DefectSet measure(const DecodingGraph& g, const std::vector<int>& nodes) {
    DefectSet ds;
    ds.nodes = nodes;
    const std::size_t k = nodes.size();
    ds.db.resize(k);
    ds.dist.assign(k, std::vector<int>(k, 0));
    for (std::size_t i = 0; i < k; ++i) {
        ds.db[i] = g.boundary_distance(nodes[i]);
        for (std::size_t j = 0; j < i; ++j) ds.dist[i][j] = ds.dist[j][i] = g.distance(nodes[i], nodes[j]);
    }
    return ds;
}

// Partner index per defect (-1 = boundary).
using Assignment = std::vector<int>;

// Bitmask DP over one component. Ties go to the lowest partner id, boundary last.
void solve_exact(const DefectSet& ds, const std::vector<int>& comp, Assignment& partner) {
    const int k = static_cast<int>(comp.size());
    const int full = (1 << k) - 1;
    std::vector<int> best(full + 1, kUnset);
    std::vector<int> choice(full + 1, -1);
    best[0] = 0;
    // Masks are solved in increasing order; every sub-mask is smaller.
    for (int mask = 1; mask <= full; ++mask) {
        const int i = __builtin_ctz(static_cast<unsigned>(mask));
        const int rest = mask & ~(1 << i);
        for (int j = i + 1; j < k; ++j) {
            if (!(rest & (1 << j))) continue;
            const int cost = ds.dist[comp[i]][comp[j]] + best[rest & ~(1 << j)];
            if (cost < best[mask]) {
                best[mask] = cost;
                choice[mask] = j;
            }
        }
        const int cost = ds.db[comp[i]] + best[rest];
        if (cost < best[mask]) {
            best[mask] = cost;
            choice[mask] = -1;
        }
    }
    for (int mask = full; mask;) {
        const int i = __builtin_ctz(static_cast<unsigned>(mask));
        const int j = choice[mask];
        if (j < 0) {
            partner[comp[i]] = -1;
            mask &= ~(1 << i);
        } else {
            partner[comp[i]] = comp[j];
            partner[comp[j]] = comp[i];
            mask &= ~((1 << i) | (1 << j));
        }
    }
}

void solve_greedy(const DefectSet& ds, const std::vector<int>& comp, Assignment& partner) {
    // (weight, first node, second node or INT_MAX for boundary)
    std::vector<std::tuple<int, int, int, int, int>> options;
    const int k = static_cast<int>(comp.size());
    for (int a = 0; a < k; ++a) {
        const int i = comp[a];
        options.emplace_back(ds.db[i], ds.nodes[i], kUnset, i, -1);
        for (int b = a + 1; b < k; ++b) {
            const int j = comp[b];
            int ni = ds.nodes[i], nj = ds.nodes[j];
            options.emplace_back(ds.dist[i][j], std::min(ni, nj), std::max(ni, nj), i, j);
        }
    }
    std::sort(options.begin(), options.end());
    std::vector<char> done(ds.nodes.size(), 0);
    for (const auto& [w, n1, n2, i, j] : options) {
        if (done[i] || (j >= 0 && done[j])) continue;
        done[i] = 1;
        partner[i] = j;
        if (j >= 0) {
            done[j] = 1;
            partner[j] = i;
        }
    }
}

std::vector<std::vector<int>> components(const DefectSet& ds, int link_radius) {
    const int k = static_cast<int>(ds.nodes.size());
    std::vector<int> parent(k);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    // A pair at distance >= db(u) + db(v) is never needed: sending both to the
    // boundary is no more expensive.
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < i; ++j)
            if (ds.dist[i][j] < ds.db[i] + ds.db[j] && ds.dist[i][j] <= link_radius) parent[find(i)] = find(j);
    std::vector<std::vector<int>> out;
    std::vector<int> slot(k, -1);
    for (int i = 0; i < k; ++i) {
        const int r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(out.size());
            out.emplace_back();
        }
        out[slot[r]].push_back(i);
    }
    return out;
}

}  // namespace

ExactCapExceeded::ExactCapExceeded(int defects, int cap)
    : std::runtime_error("exact decoding: component of " + std::to_string(defects) + " defects exceeds cap " +
                         std::to_string(cap)),
      defects_(defects) {}

std::vector<int> Matching::correction() const {
    std::vector<int> all;
    for (const auto& p : pairs) all.insert(all.end(), p.path.begin(), p.path.end());
    std::sort(all.begin(), all.end());
    std::vector<int> out;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j] == all[i]) ++j;
        if ((j - i) % 2) out.push_back(all[i]);
        i = j;
    }
    return out;
}

Matching decode(const DecodingGraph& g, const Syndrome& s, DecodeMode mode, const DecoderOptions& options) {
    const DefectSet ds = measure(g, s.lit_nodes());
    const int k = static_cast<int>(ds.nodes.size());
    Assignment partner(k, -1);

    if (mode == DecodeMode::Greedy) {
        std::vector<int> all(k);
        std::iota(all.begin(), all.end(), 0);
        solve_greedy(ds, all, partner);
    } else {
        const int radius =
            mode == DecodeMode::LocalExact ? options.local_link_radius : std::numeric_limits<int>::max();
        for (const auto& comp : components(ds, radius)) {
            if (static_cast<int>(comp.size()) > options.exact_cap) {
                if (mode == DecodeMode::Exact) throw ExactCapExceeded(static_cast<int>(comp.size()), options.exact_cap);
                solve_greedy(ds, comp, partner);
            } else {
                solve_exact(ds, comp, partner);
            }
        }
    }

    Matching m;
    for (int i = 0; i < k; ++i) {
        const int j = partner[i];
        if (j >= 0 && j < i) continue;
        MatchedPair pair;
        pair.a = ds.nodes[i];
        pair.b = j < 0 ? g.virtual_node() : ds.nodes[j];
        pair.path = g.path(pair.a, pair.b);
        m.weight += j < 0 ? ds.db[i] : ds.dist[i][j];
        m.pairs.push_back(std::move(pair));
    }
    return m;
}

DependencyBits extract_dependency_bits(const DecodingGraph& g, const Matching& m, int plane) {
    return crossings_to_bits(g, plane, m.correction());
}

std::vector<int> commit_corrections(const DecodingGraph& g, const Matching& m) {
    std::vector<int> out;
    for (int e : m.correction())
        if (g.commit_edge(e)) out.push_back(e);
    return out;
}

}  // namespace specdec
