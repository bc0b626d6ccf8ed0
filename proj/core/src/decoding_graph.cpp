#include "specdec/decoding_graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace specdec {

namespace {

constexpr int kInf = std::numeric_limits<int>::max() / 4;

int sign(int x) { return (x > 0) - (x < 0); }

bool contains_sorted(const std::vector<int>& v, int x) { return std::binary_search(v.begin(), v.end(), x); }

}  // namespace

DecodingGraph::DecodingGraph(int d, int commit_rounds, std::vector<BufferSpec> buffers)
    : d_(d), commit_rounds_(commit_rounds), buffers_(std::move(buffers)) {
    if (d < 3 || d % 2 == 0) throw std::invalid_argument("window graph: d must be odd and >= 3");
    if (commit_rounds < 1) throw std::invalid_argument("window graph: commit_rounds must be >= 1");
    for (std::size_t i = 0; i < buffers_.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (buffers_[i] == buffers_[j])
                throw std::invalid_argument("window graph: unsupported buffer combination (two buffers on one face)");

    auto has = [&](Orientation o, Side s) {
        return std::find(buffers_.begin(), buffers_.end(), BufferSpec{o, s}) != buffers_.end();
    };
    past_open_ = has(Orientation::Temporal, Side::Low);
    future_open_ = has(Orientation::Temporal, Side::High);
    const bool left = has(Orientation::Spatial, Side::Low);
    const bool right = has(Orientation::Spatial, Side::High);

    commit_t0_ = past_open_ ? d : 0;
    rounds_ = commit_t0_ + commit_rounds + (future_open_ ? d : 0);
    commit_c0_ = left ? d : 0;
    commit_c1_ = commit_c0_ + d;
    cols_ = commit_c1_ + (right ? d : 0);

    site_lookup_.assign((d + 1) * (cols_ + 1), -1);
    for (int r = 0; r <= d; ++r)
        for (int c = 1; c < cols_; ++c)
            if ((r + c) % 2 == 0) {
                site_lookup_[r * (cols_ + 1) + c] = static_cast<int>(sites_.size());
                sites_.push_back({r, c});
            }

    const int S = sites_per_round();
    const int commit_t1 = commit_t0_ + commit_rounds;
    // Seam corners (shared by commit and buffer data columns) belong to the buffer,
    // so a commit round always holds (d^2 - 1) / 2 checks.
    auto commit_col = [&](int c) { return c > commit_c0_ && c < commit_c1_; };
    region_.assign(rounds_ * S, kAbsent);
    for (int t = 0; t < rounds_; ++t) {
        const bool commit_t = t >= commit_t0_ && t < commit_t1;
        for (int s = 0; s < S; ++s) {
            const int c = sites_[s].second;
            int tag = kAbsent;
            if (commit_t && commit_col(c)) {
                tag = kCommitRegion;
            } else {
                for (std::size_t k = 0; k < buffers_.size() && tag == kAbsent; ++k) {
                    const BufferSpec& b = buffers_[k];
                    bool in = false;
                    if (b.orientation == Orientation::Temporal)
                        in = commit_col(c) && (b.side == Side::Low ? t < commit_t0_ : t >= commit_t1);
                    else
                        in = commit_t && (b.side == Side::Low ? c <= commit_c0_ : c >= commit_c1_);
                    if (in) tag = static_cast<int>(k) + 1;
                }
            }
            region_[t * S + s] = tag;
            if (tag != kAbsent) ++present_count_;
        }
    }
    box_ = present_count_ == node_capacity();

    incident_.assign(node_capacity() + 1, {});
    spatial_edge_.assign(rounds_ * d * cols_, -1);
    for (int t = 0; t < rounds_; ++t)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < cols_; ++j) {
                int a, b;
                if ((i + j) % 2 == 0) {
                    a = data_endpoint(t, i, j);
                    b = data_endpoint(t, i + 1, j + 1);
                } else {
                    a = data_endpoint(t, i, j + 1);
                    b = data_endpoint(t, i + 1, j);
                }
                if (a < 0 && b < 0) continue;
                spatial_edge_[(t * d + i) * cols_ + j] =
                    add_edge(a < 0 ? virtual_node() : a, b < 0 ? virtual_node() : b, EdgeKind::DataError);
            }
    temporal_edge_.assign((rounds_ + 1) * S, -1);
    for (int g = 0; g <= rounds_; ++g) {
        if (g == 0 && !past_open_) continue;
        if (g == rounds_ && !future_open_) continue;
        for (int s = 0; s < S; ++s) {
            const int a = g > 0 && present((g - 1) * S + s) ? (g - 1) * S + s : -1;
            const int b = g < rounds_ && present(g * S + s) ? g * S + s : -1;
            if (a < 0 && b < 0) continue;
            temporal_edge_[g * S + s] =
                add_edge(a < 0 ? virtual_node() : a, b < 0 ? virtual_node() : b, EdgeKind::MeasurementError);
        }
    }

    for (std::size_t k = 0; k < buffers_.size(); ++k) {
        BoundaryPlane plane;
        plane.id = static_cast<int>(k);
        plane.orientation = buffers_[k].orientation;
        plane.side = buffers_[k].side;
        const int tag = static_cast<int>(k) + 1;
        for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
            const Edge& ed = edges_[e];
            if (is_virtual(ed.v)) continue;
            const int ru = region_[ed.u], rv = region_[ed.v];
            if (ru == kCommitRegion && rv == tag) {
                plane.crossing_edges.push_back(e);
                plane.plane_nodes.push_back(ed.u);
            } else if (rv == kCommitRegion && ru == tag) {
                plane.crossing_edges.push_back(e);
                plane.plane_nodes.push_back(ed.v);
            }
        }
        std::sort(plane.plane_nodes.begin(), plane.plane_nodes.end());
        plane.plane_nodes.erase(std::unique(plane.plane_nodes.begin(), plane.plane_nodes.end()),
                                plane.plane_nodes.end());

        std::vector<int> depth(node_capacity(), -1);
        std::deque<int> queue;
        for (int n : plane.plane_nodes) {
            depth[n] = 0;
            queue.push_back(n);
        }
        while (!queue.empty()) {
            const int n = queue.front();
            queue.pop_front();
            plane.near_nodes.push_back(n);
            if (depth[n] == 2) continue;
            for (int e : incident_[n]) {
                const int m = edges_[e].u == n ? edges_[e].v : edges_[e].u;
                if (is_virtual(m) || depth[m] >= 0) continue;
                depth[m] = depth[n] + 1;
                queue.push_back(m);
            }
        }
        std::sort(plane.near_nodes.begin(), plane.near_nodes.end());
        planes_.push_back(std::move(plane));
    }
}

int DecodingGraph::site_of(int r, int c) const {
    if (r < 0 || r > d_ || c < 0 || c > cols_) return -1;
    return site_lookup_[r * (cols_ + 1) + c];
}

int DecodingGraph::data_endpoint(int t, int r, int c) const { return node_at(t, r, c); }

int DecodingGraph::node_at(int t, int r, int c) const {
    if (t < 0 || t >= rounds_) return -1;
    const int s = site_of(r, c);
    if (s < 0) return -1;
    const int n = t * sites_per_round() + s;
    return present(n) ? n : -1;
}

NodeCoord DecodingGraph::coord(int n) const {
    const int S = sites_per_round();
    return {n / S, sites_[n % S].first, sites_[n % S].second};
}

int DecodingGraph::add_edge(int u, int v, EdgeKind kind) {
    if (u > v) std::swap(u, v);
    const int id = static_cast<int>(edges_.size());
    edges_.push_back({u, v, kind, 1.0});
    incident_[u].push_back(id);
    if (v != u) incident_[v].push_back(id);
    return id;
}

bool DecodingGraph::commit_edge(int e) const {
    const Edge& ed = edges_[e];
    if (!in_commit(ed.u)) return false;
    return is_virtual(ed.v) || in_commit(ed.v);
}

double DecodingGraph::volume() const {
    return static_cast<double>(commit_rounds_) / d_ + static_cast<double>(buffers_.size());
}

int DecodingGraph::boundary_distance(int u) const {
    if (!box_) return bfs_distances(u, false)[virtual_node()];
    const NodeCoord p = coord(u);
    int best = std::min(p.c, cols_ - p.c);
    if (past_open_) best = std::min(best, p.t + 1);
    if (future_open_) best = std::min(best, rounds_ - p.t);
    return best;
}

int DecodingGraph::distance(int u, int v) const {
    if (u == v) return 0;
    if (is_virtual(u)) std::swap(u, v);
    if (is_virtual(v)) return boundary_distance(u);
    if (!box_) return bfs_distances(u, false)[v];
    const NodeCoord a = coord(u), b = coord(v);
    return std::abs(a.t - b.t) + std::max(std::abs(a.r - b.r), std::abs(a.c - b.c));
}

std::vector<int> DecodingGraph::path(int u, int v) const {
    std::vector<int> out;
    if (u == v) return out;
    if (is_virtual(u)) std::swap(u, v);
    if (!box_) return bfs_path(u, v);
    if (is_virtual(v))
        box_boundary_path(u, out);
    else
        box_path(u, v, out);
    return out;
}

// Diagonal steps toward the target; when one axis is already aligned the path
// zigzags across it.
void DecodingGraph::spatial_steps(int t, int r, int c, int r2, int c2, std::vector<int>& out) const {
    while (r != r2 || c != c2) {
        int dr = sign(r2 - r), dc = sign(c2 - c);
        if (dr == 0) dr = r + 1 <= d_ ? 1 : -1;
        if (dc == 0) dc = c + 1 <= cols_ - 1 ? 1 : -1;
        const int i = std::min(r, r + dr), j = std::min(c, c + dc);
        out.push_back(spatial_edge_[(t * d_ + i) * cols_ + j]);
        r += dr;
        c += dc;
    }
}

void DecodingGraph::box_path(int u, int v, std::vector<int>& out) const {
    NodeCoord a = coord(u), b = coord(v);
    if (b.t < a.t || (b.t == a.t && v < u)) std::swap(a, b);
    const int S = sites_per_round();
    const int s = site_of(a.r, a.c);
    for (int g = a.t + 1; g <= b.t; ++g) out.push_back(temporal_edge_[g * S + s]);
    spatial_steps(b.t, a.r, a.c, b.r, b.c, out);
}

void DecodingGraph::box_boundary_path(int u, std::vector<int>& out) const {
    const NodeCoord p = coord(u);
    const int S = sites_per_round();
    const int s = site_of(p.r, p.c);
    const int options[4] = {p.c, cols_ - p.c, past_open_ ? p.t + 1 : kInf, future_open_ ? rounds_ - p.t : kInf};
    const int pick = static_cast<int>(std::min_element(options, options + 4) - options);
    if (pick == 2) {
        for (int g = p.t; g >= 0; --g) out.push_back(temporal_edge_[g * S + s]);
        return;
    }
    if (pick == 3) {
        for (int g = p.t + 1; g <= rounds_; ++g) out.push_back(temporal_edge_[g * S + s]);
        return;
    }
    const int dc = pick == 0 ? -1 : 1;
    const int target = pick == 0 ? 0 : cols_;
    int r = p.r, c = p.c;
    bool up = r < d_;
    while (c != target) {
        const int dr = up ? 1 : -1;
        out.push_back(spatial_edge_[(p.t * d_ + std::min(r, r + dr)) * cols_ + std::min(c, c + dc)]);
        r += dr;
        c += dc;
        up = r == 0 || (r < d_ && !up);
    }
}

std::vector<int> DecodingGraph::bfs_distances(int source, bool through_virtual) const {
    std::vector<int> dist(node_capacity() + 1, kInf);
    std::deque<int> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
        const int n = queue.front();
        queue.pop_front();
        if (is_virtual(n) && !through_virtual && n != source) continue;
        for (int e : incident_[n]) {
            const int m = edges_[e].u == n ? edges_[e].v : edges_[e].u;
            if (dist[m] != kInf) continue;
            dist[m] = dist[n] + 1;
            queue.push_back(m);
        }
    }
    return dist;
}

std::vector<int> DecodingGraph::bfs_path(int u, int v) const {
    std::vector<int> parent_edge(node_capacity() + 1, -1);
    std::vector<char> seen(node_capacity() + 1, 0);
    std::deque<int> queue{u};
    seen[u] = 1;
    while (!queue.empty() && !seen[v]) {
        const int n = queue.front();
        queue.pop_front();
        if (is_virtual(n) && n != u) continue;
        for (int e : incident_[n]) {
            const int m = edges_[e].u == n ? edges_[e].v : edges_[e].u;
            if (seen[m]) continue;
            seen[m] = 1;
            parent_edge[m] = e;
            queue.push_back(m);
        }
    }
    std::vector<int> out;
    if (!seen[v]) return out;
    for (int n = v; n != u;) {
        const int e = parent_edge[n];
        out.push_back(e);
        n = edges_[e].u == n ? edges_[e].v : edges_[e].u;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

DecodingGraph build_window_graph(int d, int commit_rounds, const std::vector<BufferSpec>& buffers) {
    return DecodingGraph(d, commit_rounds, buffers);
}

int Syndrome::lit_count() const { return static_cast<int>(std::count(bits.begin(), bits.end(), 1)); }

std::vector<int> Syndrome::lit_nodes() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(bits.size()); ++i)
        if (bits[i]) out.push_back(i);
    return out;
}

Syndrome syndrome_of(const DecodingGraph& g, const ErrorSet& errors) {
    Syndrome s;
    s.bits.assign(g.node_capacity(), 0);
    for (int e : errors) {
        const Edge& ed = g.edges()[e];
        if (!g.is_virtual(ed.u)) s.bits[ed.u] ^= 1;
        if (!g.is_virtual(ed.v)) s.bits[ed.v] ^= 1;
    }
    return s;
}

int virtual_incidences(const DecodingGraph& g, const ErrorSet& errors) {
    int n = 0;
    for (int e : errors) n += g.is_virtual(g.edges()[e].v);
    return n;
}

Sample sample_errors(const DecodingGraph& g, double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_errors: p must lie in [0, 1]");
    Sample out;
    const long long m = static_cast<long long>(g.edges().size());
    if (p >= 1.0) {
        for (long long e = 0; e < m; ++e) out.errors.push_back(static_cast<int>(e));
    } else if (p > 0.0) {
        std::mt19937_64 rng(seed);
        std::geometric_distribution<long long> skip(p);
        for (long long e = skip(rng); e < m; e += skip(rng) + 1) out.errors.push_back(static_cast<int>(e));
    }
    out.syndrome = syndrome_of(g, out.errors);
    return out;
}

Syndrome apply_dependency_bits(const DecodingGraph& g, const Syndrome& s, const DependencyBits& bits) {
    const BoundaryPlane& plane = g.plane(bits.plane);
    Syndrome out = s;
    for (int n : bits.toggled) {
        if (!contains_sorted(plane.plane_nodes, n))
            throw std::invalid_argument("apply_dependency_bits: node " + std::to_string(n) + " is not on plane " +
                                        std::to_string(bits.plane));
        out.bits[n] ^= 1;
    }
    return out;
}

DependencyBits crossings_to_bits(const DecodingGraph& g, int plane_id, const std::vector<int>& edges) {
    const BoundaryPlane& plane = g.plane(plane_id);
    std::vector<int> hits;
    for (int e : edges) {
        if (!contains_sorted(plane.crossing_edges, e)) continue;
        const Edge& ed = g.edges()[e];
        hits.push_back(g.in_commit(ed.u) ? ed.u : ed.v);
    }
    std::sort(hits.begin(), hits.end());
    DependencyBits bits{plane_id, {}};
    for (std::size_t i = 0; i < hits.size();) {
        std::size_t j = i;
        while (j < hits.size() && hits[j] == hits[i]) ++j;
        if ((j - i) % 2) bits.toggled.push_back(hits[i]);
        i = j;
    }
    return bits;
}

std::string graph_to_json(const DecodingGraph& g) {
    using nlohmann::json;
    json doc;
    doc["d"] = g.distance_param();
    doc["commit_rounds"] = g.commit_rounds();
    doc["rounds"] = g.rounds();
    doc["columns"] = g.columns();
    doc["volume"] = g.volume();
    doc["virtual"] = g.virtual_node();
    json nodes = json::array();
    for (int n = 0; n < g.node_capacity(); ++n) {
        if (!g.present(n)) continue;
        const NodeCoord p = g.coord(n);
        nodes.push_back({{"id", n}, {"t", p.t}, {"r", p.r}, {"c", p.c}, {"region", g.region(n)}});
    }
    doc["nodes"] = std::move(nodes);
    json edges = json::array();
    for (const Edge& e : g.edges())
        edges.push_back({{"u", e.u}, {"v", e.v}, {"kind", e.kind == EdgeKind::DataError ? "data" : "measurement"}});
    doc["edges"] = std::move(edges);
    json planes = json::array();
    for (const BoundaryPlane& p : g.planes())
        planes.push_back({{"id", p.id},
                          {"orientation", p.orientation == Orientation::Temporal ? "temporal" : "spatial"},
                          {"side", p.side == Side::Low ? "low" : "high"},
                          {"plane_nodes", p.plane_nodes},
                          {"crossing_edges", p.crossing_edges}});
    doc["planes"] = std::move(planes);
    return doc.dump();
}

}  // namespace specdec
