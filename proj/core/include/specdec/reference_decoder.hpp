#pragma once

#include <stdexcept>
#include <vector>

#include "specdec/decoding_graph.hpp"

namespace specdec {

struct MatchedPair {
    int a = 0;
    int b = 0;  // partner node, or the graph's virtual node
    std::vector<int> path;
};

struct Matching {
    std::vector<MatchedPair> pairs;  // sorted by a
    int weight = 0;

    // Symmetric difference of all pair paths (the correction), sorted.
    std::vector<int> correction() const;
};

enum class DecodeMode {
    Exact,       // minimum weight, per independent component; throws past the cap
    Greedy,      // globally closest pairs first
    LocalExact,  // exact on short-range clusters, greedy on oversized ones
};

struct DecoderOptions {
    int exact_cap = 12;
    // LocalExact only: defects farther apart than this are never linked.
    int local_link_radius = 6;
};

class ExactCapExceeded : public std::runtime_error {
public:
    ExactCapExceeded(int defects, int cap);
    int defects() const { return defects_; }

private:
    int defects_;
};

Matching decode(const DecodingGraph& g, const Syndrome& s, DecodeMode mode, const DecoderOptions& options = {});

DependencyBits extract_dependency_bits(const DecodingGraph& g, const Matching& m, int plane);

// Correction edges lying in the commit region (crossing and buffer edges dropped).
std::vector<int> commit_corrections(const DecodingGraph& g, const Matching& m);

}  // namespace specdec
