#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace specdec {

/// Position of one d x d surface-code patch on the layout grid.
struct PatchId {
    int row = 0;
    int col = 0;

    friend auto operator<=>(const PatchId&, const PatchId&) = default;
};

enum class InstructionKind {
    Idle,
    MergeZZ,
    MergeXX,
    Split,
    TTeleport,
    Measure,
    SGate,
    YMeasure,
};

std::string_view to_string(InstructionKind kind);
std::optional<InstructionKind> instruction_kind_from_string(std::string_view name);

inline bool is_merge(InstructionKind kind) {
    return kind == InstructionKind::MergeZZ || kind == InstructionKind::MergeXX ||
           kind == InstructionKind::TTeleport;
}

struct Instruction {
    InstructionKind kind = InstructionKind::Idle;
    std::vector<PatchId> patches;
    int start_round = 0;
    int duration = 1;
    bool blocking = false;
    // Index of the blocking instruction this (SGate) correction is conditioned on.
    std::optional<int> conditional_on;

    int end_round() const { return start_round + duration; }

    friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct Grid {
    int rows = 1;
    int cols = 1;

    friend bool operator==(const Grid&, const Grid&) = default;
};

struct Program {
    int distance = 3;
    Grid grid;
    std::vector<Instruction> instructions;
    double round_time_us = 1.0;

    int patch_index(PatchId p) const { return p.row * grid.cols + p.col; }
    PatchId patch_at(int index) const { return {index / grid.cols, index % grid.cols}; }
    int patch_count() const { return grid.rows * grid.cols; }
    int static_end_round() const;
    int count(InstructionKind kind) const;

    friend bool operator==(const Program&, const Program&) = default;
};

struct Diagnostic {
    std::string code;
    std::string message;
    std::optional<int> instruction;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

class ProgramError : public std::runtime_error {
public:
    explicit ProgramError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

/// Empty iff every program invariant holds; one entry per violation otherwise.
std::vector<Diagnostic> validate(const Program& program);

/// Parses the versioned JSON program format and validates the result.
/// Throws ProgramError naming the offending field or instruction index.
Program parse_program(std::string_view text);
Program load_program(const std::string& path);

/// Canonical JSON form (format 1). parse_program(serialize_program(p)) == p.
std::string serialize_program(const Program& program);

enum class BuiltinName { RepeatedT, Msd15To1, ZigzagChain, Toffoli };

std::optional<BuiltinName> builtin_name_from_string(std::string_view name);
std::string_view to_string(BuiltinName name);

struct BuiltinParams {
    int distance = 7;
    int count = 1;
};

/// Pure function of (name, params). Throws std::invalid_argument on bad params.
Program builtin_program(BuiltinName name, const BuiltinParams& params);

}  // namespace specdec
