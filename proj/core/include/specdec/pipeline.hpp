#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specdec/latency.hpp"
#include "specdec/program.hpp"
#include "specdec/windowing.hpp"

namespace specdec {

enum class SpecMode { Off, Stochastic, Integrated };
enum class Recovery { Pessimistic, Adjacent, Optimistic };

std::string_view to_string(SpecMode m);
std::optional<SpecMode> spec_mode_from_string(std::string_view s);
std::string_view to_string(Recovery r);
std::optional<Recovery> recovery_from_string(std::string_view s);

struct SimConfig {
    Strategy strategy = Strategy::Parallel;
    SpecMode spec = SpecMode::Off;
    double accuracy = 0.90;
    double accuracy_adjacent = 0.86;
    int t_spec = 1;  // rounds
    Recovery recovery = Recovery::Optimistic;
    LatencyModel latency = LatencyModel::linear(1.0);
    std::optional<int> processors;  // nullopt = unlimited
    std::uint64_t seed = 1;
    std::optional<double> round_time_us;  // overrides the program's value
    double conditional_probability = 0.5;
    // Integrated speculation only.
    double physical_error_rate = 1e-3;
    int exact_cap = 12;
    // Stop the clock here (backlogged runs grow without bound); the result is marked truncated.
    std::optional<int> max_rounds;
};

// Throws std::invalid_argument for out-of-range fields.
void validate(const SimConfig& cfg);

struct BlockingOpRecord {
    int instruction = 0;
    int start = 0;
    int end = 0;       // one past the final syndrome round
    int resolved = -1;  // round at which the conditional correction can be applied; -1 if never
    int reaction() const { return resolved - end; }
};

struct TaskRecord {
    int cell = 0;
    int attempt = 0;
    int start = 0;
    int end = 0;  // completion, or abort round
    bool valid = false;
};

struct SimResult {
    int runtime_rounds = 0;
    double runtime_us = 0.0;
    std::vector<BlockingOpRecord> blocking_ops;  // in instruction order
    std::vector<int> occupancy;                  // running decode tasks per round
    long long valid_compute = 0;                 // processor-rounds
    long long wasted_compute = 0;
    int mispredictions = 0;
    int speculations = 0;
    std::vector<std::vector<int>> activity;  // [round][patch]: instruction, kStall or kInactive
    std::vector<int> instruction_start;      // actual start per instruction (-1 never)
    std::vector<char> conditional_fired;     // per instruction; 1 for unconditional ones
    std::vector<TaskRecord> tasks;
    WindowGraph windows;
    int processor_limit = -1;  // -1 = unlimited
    bool truncated = false;    // stopped at max_rounds before the program completed

    int peak_occupancy() const;
    double mean_occupancy() const;
};

// Round-level discrete-event simulation; deterministic in (program, cfg).
SimResult simulate(const Program& program, const SimConfig& cfg);

// Rounds from the op's final syndrome round to its resolution. Throws
// std::invalid_argument if `instruction` is not a blocking op of the run or
// was never resolved (truncated run).
int reaction_time(const SimResult& result, int instruction);
// Resolved ops only, in instruction order.
std::vector<int> reaction_times(const SimResult& result);

// Cells to restart after `face` (a sink face of `poisoned`) was mispredicted.
// started[c]: c's current attempt has begun; used_speculation[f]: the sink of f
// consumed speculated (unverified) bits for f.
std::vector<int> restart_set(const WindowGraph& graph, int poisoned, int face, Recovery recovery,
                             const std::vector<char>& started, const std::vector<char>& used_speculation);
std::vector<int> restart_set(const WindowGraph& graph, int poisoned, int face, Recovery recovery,
                             const std::function<bool(int)>& started,
                             const std::function<bool(int)>& used_speculation);

struct ProcessorReport {
    int peak = 0;
    double mean = 0.0;
    int limit = 0;
};

// ceil(P_max + (1 - a) * P_mean), measured with perfect speculation and no processor limit.
ProcessorReport processor_heuristic(const Program& program, const SimConfig& cfg);
int heuristic_limit(double peak, double mean, double epsilon_spec);

// Same timeline: activity, instruction starts, blocking-op resolutions, runtime.
bool same_timeline(const SimResult& a, const SimResult& b);

}  // namespace specdec
