#include "specdec/predictor.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace specdec {

namespace {

int other_end(const Edge& e, int n) { return e.u == n ? e.v : e.u; }

void toggle(std::vector<int>& acc, const std::vector<int>& nodes) { acc.insert(acc.end(), nodes.begin(), nodes.end()); }

DependencyBits finish_bits(int plane, std::vector<int> hits) {
    std::sort(hits.begin(), hits.end());
    DependencyBits bits{plane, {}};
    for (std::size_t i = 0; i < hits.size();) {
        std::size_t j = i;
        while (j < hits.size() && hits[j] == hits[i]) ++j;
        if ((j - i) % 2) bits.toggled.push_back(hits[i]);
        i = j;
    }
    return bits;
}

int crossing_toggle(const BoundaryShape& shape, int edge) {
    auto it = std::lower_bound(shape.crossing_edges.begin(), shape.crossing_edges.end(), edge);
    if (it == shape.crossing_edges.end() || *it != edge) return -1;
    return shape.crossing_toggle[it - shape.crossing_edges.begin()];
}

struct Local {
    int u, v;
};

Local ends(const BoundaryView& v, int edge) {
    const Edge& e = v.graph->edges()[edge];
    return {v.shape->local[e.u], v.shape->local[e.v]};
}

// Runs phases 1 and 2 of the two-step logic in place on `cnt`.
void two_step(const BoundaryView& v, std::vector<int>& cnt, Prediction& out, std::vector<int>& hits) {
    const BoundaryShape& shape = *v.shape;
    std::vector<int> candidates;
    for (int e : shape.near_edges) {
        const Local l = ends(v, e);
        if (v.counters[l.u] && v.counters[l.v]) candidates.push_back(e);
    }
    for (int e : candidates) {
        const Local l = ends(v, e);
        ++cnt[l.u];
        ++cnt[l.v];
    }
    std::array<std::vector<int>, kBinCount> bins;
    for (int e : candidates) {
        const Local l = ends(v, e);
        bins[std::min(cnt[l.u] + cnt[l.v], kBinCount - 1)].push_back(e);
    }
    // Every bin is a phase whether or not it holds candidates.
    for (auto& bin : bins) {
        for (int e : bin) {
            const Local l = ends(v, e);
            if (!cnt[l.u] || !cnt[l.v]) continue;
            cnt[l.u] = cnt[l.v] = 0;
            out.declared_edges.push_back(e);
            if (int n = crossing_toggle(shape, e); n >= 0) hits.push_back(n);
        }
    }
    out.phases_executed = 1 + kBinCount;
}

}  // namespace

std::string_view to_string(PredictorKind kind) {
    switch (kind) {
        case PredictorKind::OneStep: return "1-step";
        case PredictorKind::TwoStep: return "2-step";
        case PredictorKind::ThreeStep: return "3-step";
    }
    return "?";
}

BoundaryShape make_boundary_shape(const DecodingGraph& g, int plane_id) {
    const BoundaryPlane& plane = g.plane(plane_id);
    BoundaryShape shape;
    shape.plane = plane_id;
    shape.near_nodes = plane.near_nodes;
    shape.local.assign(g.node_capacity() + 1, -1);
    for (std::size_t i = 0; i < shape.near_nodes.size(); ++i) shape.local[shape.near_nodes[i]] = static_cast<int>(i);
    shape.crossing_edges = plane.crossing_edges;
    for (int e : shape.crossing_edges) {
        const Edge& ed = g.edges()[e];
        shape.crossing_toggle.push_back(g.in_commit(ed.u) ? ed.u : ed.v);
    }
    for (int e = 0; e < static_cast<int>(g.edges().size()); ++e) {
        const Edge& ed = g.edges()[e];
        if (!g.is_virtual(ed.v) && shape.local[ed.u] >= 0 && shape.local[ed.v] >= 0) shape.near_edges.push_back(e);
    }

    // Weight-2 pairs: near nodes two edges apart whose canonical chain crosses the plane.
    for (int a : shape.near_nodes) {
        std::vector<int> reach;
        for (int e1 : g.incident()[a]) {
            const int m = other_end(g.edges()[e1], a);
            if (g.is_virtual(m)) continue;
            for (int e2 : g.incident()[m]) {
                const int b = other_end(g.edges()[e2], m);
                if (g.is_virtual(b) || b <= a || shape.local[b] < 0) continue;
                reach.push_back(b);
            }
        }
        std::sort(reach.begin(), reach.end());
        reach.erase(std::unique(reach.begin(), reach.end()), reach.end());
        for (int b : reach) {
            if (g.distance(a, b) != 2) continue;
            DependencyBits bits = crossings_to_bits(g, plane_id, g.path(a, b));
            if (bits.toggled.empty()) continue;
            shape.weight2_pairs.push_back({a, b, std::move(bits.toggled)});
        }
    }
    return shape;
}

BoundaryView make_view(const DecodingGraph& g, std::shared_ptr<const BoundaryShape> shape, const Syndrome& s) {
    BoundaryView v;
    v.graph = &g;
    v.counters.reserve(shape->near_nodes.size());
    for (int n : shape->near_nodes) v.counters.push_back(s.bits[n] ? 1 : 0);
    v.shape = std::move(shape);
    return v;
}

Prediction predict_1step(const BoundaryView& v) {
    Prediction out;
    std::vector<int> hits;
    const BoundaryShape& shape = *v.shape;
    for (std::size_t i = 0; i < shape.crossing_edges.size(); ++i) {
        const Local l = ends(v, shape.crossing_edges[i]);
        if (v.counters[l.u] && v.counters[l.v]) {
            out.declared_edges.push_back(shape.crossing_edges[i]);
            hits.push_back(shape.crossing_toggle[i]);
        }
    }
    out.bits = finish_bits(shape.plane, std::move(hits));
    out.phases_executed = 1;
    return out;
}

Prediction predict_2step(const BoundaryView& v) {
    Prediction out;
    std::vector<int> hits;
    std::vector<int> cnt(v.counters.begin(), v.counters.end());
    two_step(v, cnt, out, hits);
    out.bits = finish_bits(v.shape->plane, std::move(hits));
    return out;
}

Prediction predict_3step(const BoundaryView& v) {
    Prediction out;
    std::vector<int> hits;
    std::vector<int> cnt(v.counters.begin(), v.counters.end());
    two_step(v, cnt, out, hits);
    const BoundaryShape& shape = *v.shape;
    // All pair checks read the same snapshot.
    std::vector<const Weight2Pair*> fired;
    for (const Weight2Pair& p : shape.weight2_pairs)
        if (cnt[shape.local[p.a]] && cnt[shape.local[p.b]]) fired.push_back(&p);
    for (const Weight2Pair* p : fired) {
        cnt[shape.local[p->a]] = cnt[shape.local[p->b]] = 0;
        out.declared_pairs.emplace_back(p->a, p->b);
        toggle(hits, p->toggled);
    }
    out.bits = finish_bits(shape.plane, std::move(hits));
    out.phases_executed += 1;
    return out;
}

Prediction predict(const BoundaryView& v, PredictorKind kind) {
    switch (kind) {
        case PredictorKind::OneStep: return predict_1step(v);
        case PredictorKind::TwoStep: return predict_2step(v);
        case PredictorKind::ThreeStep: return predict_3step(v);
    }
    throw std::invalid_argument("predict: unknown predictor");
}

Classification classify(const Prediction& pred, const DependencyBits& truth) {
    if (pred.bits.plane != truth.plane) throw std::invalid_argument("classify: plane mismatch");
    Classification c;
    const auto& p = pred.bits.toggled;
    const auto& t = truth.toggled;
    std::vector<int> diff;
    std::set_difference(p.begin(), p.end(), t.begin(), t.end(), std::back_inserter(diff));
    c.false_positives = static_cast<int>(diff.size());
    diff.clear();
    std::set_difference(t.begin(), t.end(), p.begin(), p.end(), std::back_inserter(diff));
    c.false_negatives = static_cast<int>(diff.size());
    c.correct = c.false_positives == 0 && c.false_negatives == 0;
    return c;
}

}  // namespace specdec
