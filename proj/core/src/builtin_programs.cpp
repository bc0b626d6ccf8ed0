#include <algorithm>
#include <map>
#include <stdexcept>

#include "specdec/program.hpp"

namespace specdec {

namespace {

// Appends instructions while keeping "held" patches (logical data) contiguous in
// time by filling any gap before their next instruction with Idle.
class ProgramBuilder {
public:
    ProgramBuilder(int distance, Grid grid) {
        program_.distance = distance;
        program_.grid = grid;
    }

    void hold(PatchId p, int from_round) { held_[p] = from_round; }

    int add(InstructionKind kind, std::vector<PatchId> patches, int start, int duration,
            std::optional<int> conditional_on = std::nullopt) {
        for (const PatchId& p : patches) {
            auto it = held_.find(p);
            if (it != held_.end() && it->second < start) {
                program_.instructions.push_back(
                    {InstructionKind::Idle, {p}, it->second, start - it->second, false, std::nullopt});
            }
        }
        Instruction ins{kind, std::move(patches), start, duration, kind == InstructionKind::TTeleport,
                        conditional_on};
        for (const PatchId& p : ins.patches) {
            auto it = held_.find(p);
            if (it != held_.end()) it->second = std::max(it->second, start + duration);
        }
        program_.instructions.push_back(std::move(ins));
        return static_cast<int>(program_.instructions.size()) - 1;
    }

    Program finish() && { return std::move(program_); }

private:
    Program program_;
    std::map<PatchId, int> held_;
};

constexpr int kSGateRounds = 2;

int y_measure_rounds(int d) { return (d + 1) / 2; }

Program repeated_t(int d, int count) {
    // Magic-state patch on the even checkerboard colour, data qubit beside it.
    const PatchId magic{0, 0};
    const PatchId data{0, 1};
    ProgramBuilder b(d, Grid{1, 2});
    b.hold(data, 0);
    int t = d;
    for (int k = 0; k < count; ++k) {
        const int tel = b.add(InstructionKind::TTeleport, {data, magic}, t, d);
        t += d;
        b.add(InstructionKind::SGate, {data}, t, kSGateRounds, tel);
        t += kSGateRounds;
    }
    b.add(InstructionKind::Measure, {data}, t, 1);
    return std::move(b).finish();
}

// 16 logical patches on rows 0 and 3 (15 inputs plus the output), magic-state
// and routing patches on rows 1 and 2: a 32-patch footprint. Column merges act
// as the encoding/decoding CNOT layers around a single transversal T layer.
Program msd_15to1(int d) {
    constexpr int kCols = 8;
    constexpr int kEncodeLayers = 2;
    ProgramBuilder b(d, Grid{4, kCols});
    for (int c = 0; c < kCols; ++c) {
        b.hold({0, c}, 0);
        b.hold({3, c}, 0);
    }
    int t = d;
    auto column_layer = [&](int start) {
        for (int c = 0; c < kCols; ++c)
            b.add(InstructionKind::MergeZZ, {{0, c}, {1, c}, {2, c}, {3, c}}, start, d);
        for (int c = 0; c < kCols; ++c) b.add(InstructionKind::Split, {{0, c}, {3, c}}, start + d, 1);
        return start + d + 1;
    };
    auto t_layer = [&](int start, int data_row, int magic_row, int n) {
        for (int c = 0; c < n; ++c) {
            const int tel = b.add(InstructionKind::TTeleport, {{data_row, c}, {magic_row, c}}, start, d);
            b.add(InstructionKind::SGate, {{data_row, c}}, start + d, kSGateRounds, tel);
        }
        return start + d + kSGateRounds;
    };
    // Encode, one transversal layer of 15 T teleports, decode.
    for (int k = 0; k < kEncodeLayers; ++k) t = column_layer(t);
    t_layer(t, 0, 1, 8);
    t = t_layer(t, 3, 2, 7);
    for (int k = 0; k < kEncodeLayers; ++k) t = column_layer(t);
    for (int c = 0; c < kCols; ++c) {
        b.add(InstructionKind::Measure, {{0, c}}, t, 1);
        if (c + 1 < kCols) b.add(InstructionKind::Measure, {{3, c}}, t, 1);
    }
    b.add(InstructionKind::YMeasure, {{3, kCols - 1}}, t, y_measure_rounds(d));
    return std::move(b).finish();
}

// Cells alternate spatial and temporal adjacency: patch k is merged with its
// left neighbour for one window height, then with its right neighbour.
Program zigzag_chain(int d, int cells) {
    const int patches = (cells + 1) / 2;
    ProgramBuilder b(d, Grid{1, std::max(patches, 1)});
    if (patches == 1) {
        b.add(InstructionKind::Idle, {{0, 0}}, 0, d * cells);
        return std::move(b).finish();
    }
    b.add(InstructionKind::Idle, {{0, 0}}, 0, d);
    for (int k = 0; k + 1 < patches; ++k)
        b.add(InstructionKind::MergeZZ, {{0, k}, {0, k + 1}}, (k + 1) * d, d);
    if (cells % 2 == 0) b.add(InstructionKind::Idle, {{0, patches - 1}}, patches * d, d);
    return std::move(b).finish();
}

// Three data qubits in the middle row; magic states above and below.
Program toffoli(int d) {
    ProgramBuilder b(d, Grid{3, 3});
    for (int c = 0; c < 3; ++c) b.hold({1, c}, 0);
    // T-count 7 decomposition: T layers interleaved with CNOT (ZZ merge) layers.
    const std::vector<std::vector<int>> t_layers{{0, 1, 2}, {2}, {1, 2}, {0}};
    const std::vector<std::vector<int>> cnot_layers{{0, 1}, {1, 2}, {0, 1}};
    int t = d;
    for (std::size_t layer = 0; layer < t_layers.size(); ++layer) {
        int end = t;
        for (int q : t_layers[layer]) {
            const PatchId magic{layer % 2 == 0 ? 0 : 2, q};
            const int tel = b.add(InstructionKind::TTeleport, {{1, q}, magic}, t, d);
            b.add(InstructionKind::SGate, {{1, q}}, t + d, kSGateRounds, tel);
            end = t + d + kSGateRounds;
        }
        t = end;
        if (layer < cnot_layers.size()) {
            const auto& pair = cnot_layers[layer];
            b.add(InstructionKind::MergeZZ, {{1, pair[0]}, {1, pair[1]}}, t, d);
            t += d;
        }
    }
    for (int c = 0; c < 3; ++c) b.add(InstructionKind::Measure, {{1, c}}, t, 1);
    return std::move(b).finish();
}

}  // namespace

std::optional<BuiltinName> builtin_name_from_string(std::string_view name) {
    if (name == "repeated_t") return BuiltinName::RepeatedT;
    if (name == "msd_15to1") return BuiltinName::Msd15To1;
    if (name == "zigzag_chain") return BuiltinName::ZigzagChain;
    if (name == "toffoli") return BuiltinName::Toffoli;
    return std::nullopt;
}

std::string_view to_string(BuiltinName name) {
    switch (name) {
        case BuiltinName::RepeatedT: return "repeated_t";
        case BuiltinName::Msd15To1: return "msd_15to1";
        case BuiltinName::ZigzagChain: return "zigzag_chain";
        case BuiltinName::Toffoli: return "toffoli";
    }
    return "?";
}

Program builtin_program(BuiltinName name, const BuiltinParams& params) {
    const int d = params.distance;
    if (d < 3 || d % 2 == 0) throw std::invalid_argument("builtin: distance must be odd and >= 3");
    if (params.count < 1) throw std::invalid_argument("builtin: count must be >= 1");
    switch (name) {
        case BuiltinName::RepeatedT: return repeated_t(d, params.count);
        case BuiltinName::Msd15To1: return msd_15to1(d);
        case BuiltinName::ZigzagChain: return zigzag_chain(d, params.count);
        case BuiltinName::Toffoli: return toffoli(d);
    }
    throw std::invalid_argument("builtin: unknown program");
}

}  // namespace specdec
