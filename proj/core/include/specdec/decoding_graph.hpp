#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace specdec {

enum class Orientation { Temporal, Spatial };
// Low = earlier rounds / lower columns, High = later rounds / higher columns.
enum class Side { Low, High };

struct BufferSpec {
    Orientation orientation = Orientation::Temporal;
    Side side = Side::High;

    friend bool operator==(const BufferSpec&, const BufferSpec&) = default;
};

enum class EdgeKind { DataError, MeasurementError };

struct Edge {
    int u = 0;
    int v = 0;  // may be the virtual boundary node
    EdgeKind kind = EdgeKind::DataError;
    double weight = 1.0;
};

struct NodeCoord {
    int t = 0;
    int r = 0;
    int c = 0;
};

struct BoundaryPlane {
    int id = 0;
    Orientation orientation = Orientation::Temporal;
    Side side = Side::High;
    std::vector<int> plane_nodes;     // commit-side endpoints of crossing edges, sorted
    std::vector<int> crossing_edges;  // edge indices, sorted
    std::vector<int> near_nodes;      // non-virtual nodes within distance 2 of plane_nodes, sorted
};

// Region tags: commit nodes are 0, buffer k is tagged k + 1.
inline constexpr int kCommitRegion = 0;
inline constexpr int kAbsent = -1;

// Phenomenological Z-check graph of a rotated surface-code window. Checks sit on
// lattice corners (r, c) with r in [0, d], c in [1, W-1] and r + c even; a data
// qubit joins two diagonal corners (or one corner and the left/right boundary).
// Node id = t * sites_per_round + site; one shared virtual node.
class DecodingGraph {
public:
    DecodingGraph(int d, int commit_rounds, std::vector<BufferSpec> buffers);

    int distance_param() const { return d_; }
    int commit_rounds() const { return commit_rounds_; }
    int rounds() const { return rounds_; }
    int columns() const { return cols_; }
    int sites_per_round() const { return static_cast<int>(sites_.size()); }
    int node_capacity() const { return rounds_ * sites_per_round(); }
    int virtual_node() const { return node_capacity(); }
    bool is_virtual(int n) const { return n == virtual_node(); }
    bool present(int n) const { return n >= 0 && n < node_capacity() && region_[n] != kAbsent; }
    int node_count() const { return present_count_; }
    int region(int n) const { return region_[n]; }
    bool in_commit(int n) const { return present(n) && region_[n] == kCommitRegion; }

    NodeCoord coord(int n) const;
    int node_at(int t, int r, int c) const;  // -1 if not a present node

    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::vector<int>>& incident() const { return incident_; }  // per node, incl. virtual
    int degree(int n) const { return static_cast<int>(incident_[n].size()); }
    // Edge lies in the commit region: every non-virtual endpoint is a commit node.
    bool commit_edge(int e) const;

    const std::vector<BufferSpec>& buffers() const { return buffers_; }
    const std::vector<BoundaryPlane>& planes() const { return planes_; }
    const BoundaryPlane& plane(int id) const { return planes_.at(id); }
    // Commit volume plus one d^3 block per buffer, in units of d^3.
    double volume() const;

    // Shortest-path queries on the unit-weight graph. Real-to-real paths never
    // pass through the virtual node; path(u, virtual) is the boundary path.
    int distance(int u, int v) const;
    int boundary_distance(int u) const;
    std::vector<int> path(int u, int v) const;  // edge indices

    // Reference implementations by breadth-first search (used when the node set
    // is not a full box, and by tests as an oracle).
    std::vector<int> bfs_distances(int source, bool through_virtual) const;
    std::vector<int> bfs_path(int u, int v) const;

private:
    int site_of(int r, int c) const;
    int add_edge(int u, int v, EdgeKind kind);
    int data_endpoint(int t, int r, int c) const;
    void spatial_steps(int t, int r, int c, int r2, int c2, std::vector<int>& out) const;
    void box_path(int u, int v, std::vector<int>& out) const;
    void box_boundary_path(int u, std::vector<int>& out) const;

    int d_;
    int commit_rounds_;
    int rounds_ = 0;
    int cols_ = 0;  // data-qubit columns
    int commit_t0_ = 0;
    int commit_c0_ = 0;  // first commit data column
    int commit_c1_ = 0;  // one past last commit data column
    bool past_open_ = false;
    bool future_open_ = false;
    bool box_ = true;
    int present_count_ = 0;
    std::vector<BufferSpec> buffers_;
    std::vector<std::pair<int, int>> sites_;  // (r, c)
    std::vector<int> site_lookup_;            // r * (cols_ + 1) + c -> site or -1
    std::vector<int> region_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> incident_;
    std::vector<int> spatial_edge_;   // (t, i, j) -> edge index or -1
    std::vector<int> temporal_edge_;  // (gap, site) -> edge index or -1
    std::vector<BoundaryPlane> planes_;
};

DecodingGraph build_window_graph(int d, int commit_rounds, const std::vector<BufferSpec>& buffers);

using ErrorSet = std::vector<int>;  // sorted edge indices

struct Syndrome {
    std::vector<std::uint8_t> bits;  // indexed by node id; absent nodes stay 0

    int lit_count() const;
    std::vector<int> lit_nodes() const;
    friend bool operator==(const Syndrome&, const Syndrome&) = default;
};

struct DependencyBits {
    int plane = 0;
    std::vector<int> toggled;  // sorted plane nodes whose bit is 1

    friend bool operator==(const DependencyBits&, const DependencyBits&) = default;
};

// Parity of flipped incident edges at each node (the direct injection API).
Syndrome syndrome_of(const DecodingGraph& g, const ErrorSet& errors);
// Number of flipped edges touching the virtual node.
int virtual_incidences(const DecodingGraph& g, const ErrorSet& errors);

struct Sample {
    ErrorSet errors;
    Syndrome syndrome;
};

Sample sample_errors(const DecodingGraph& g, double p, std::uint64_t seed);

// XORs toggles into the plane-node bits. Throws std::invalid_argument for keys
// outside the plane.
Syndrome apply_dependency_bits(const DecodingGraph& g, const Syndrome& s, const DependencyBits& bits);

// XOR of the given edge set's crossings of `plane`, registered at the
// commit-side endpoint of each crossing edge.
DependencyBits crossings_to_bits(const DecodingGraph& g, int plane, const std::vector<int>& edges);

std::string graph_to_json(const DecodingGraph& g);

}  // namespace specdec
