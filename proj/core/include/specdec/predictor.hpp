#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "specdec/decoding_graph.hpp"

namespace specdec {

enum class PredictorKind { OneStep, TwoStep, ThreeStep };

std::string_view to_string(PredictorKind kind);

struct Weight2Pair {
    int a = 0;
    int b = 0;
    std::vector<int> toggled;  // registered plane nodes of the canonical chain
};

// Everything about a plane's neighbourhood that depends only on graph shape.
struct BoundaryShape {
    int plane = 0;
    std::vector<int> near_nodes;      // sorted node ids
    std::vector<int> local;           // node id -> index into near_nodes, or -1
    std::vector<int> crossing_edges;  // sorted
    std::vector<int> near_edges;      // both endpoints near and non-virtual, sorted
    std::vector<Weight2Pair> weight2_pairs;
    std::vector<int> crossing_toggle;  // parallel to crossing_edges: registered node
};

BoundaryShape make_boundary_shape(const DecodingGraph& g, int plane);

struct BoundaryView {
    std::shared_ptr<const BoundaryShape> shape;
    const DecodingGraph* graph = nullptr;
    std::vector<std::uint8_t> counters;  // per near node
};

BoundaryView make_view(const DecodingGraph& g, std::shared_ptr<const BoundaryShape> shape, const Syndrome& s);

struct Prediction {
    std::vector<int> declared_edges;                 // single-edge matches, in declaration order
    std::vector<std::pair<int, int>> declared_pairs;  // weight-2 matches
    DependencyBits bits;
    int phases_executed = 0;
};

// Number of counter-sum bins in the two-step predictor; fixed by the degree bound.
inline constexpr int kMaxDegree = 6;
inline constexpr int kBinCount = 2 * (1 + kMaxDegree) + 1;

Prediction predict_1step(const BoundaryView& v);
Prediction predict_2step(const BoundaryView& v);
Prediction predict_3step(const BoundaryView& v);
Prediction predict(const BoundaryView& v, PredictorKind kind);

struct Classification {
    bool correct = false;
    int false_positives = 0;
    int false_negatives = 0;
};

// Throws std::invalid_argument when the planes differ.
Classification classify(const Prediction& pred, const DependencyBits& truth);

}  // namespace specdec
