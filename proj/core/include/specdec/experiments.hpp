#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "specdec/pipeline.hpp"
#include "specdec/predictor.hpp"
#include "specdec/reference_decoder.hpp"

namespace specdec {

// Runs fn(0..n-1) on up to `jobs` threads; the first exception is rethrown.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

// ---- predictor accuracy -------------------------------------------------------

struct PredictorEvalRow {
    int d = 0;
    double p = 0.0;
    PredictorKind predictor = PredictorKind::OneStep;
    int shots = 0;
    double accuracy = 0.0;
    double fp_rate = 0.0;  // fraction of shots with at least one false-positive bit
    double fn_rate = 0.0;
};

// One window of d commit rounds with a future temporal buffer; truth from the
// reference decoder. One row per predictor variant.
std::vector<PredictorEvalRow> predictor_eval(int d, double p, int shots, std::uint64_t seed,
                                             DecodeMode truth = DecodeMode::LocalExact);
std::string predictor_csv(const std::vector<PredictorEvalRow>& rows);

// ---- reaction time vs decode latency ---------------------------------------------

struct SweepPoint {
    Strategy strategy = Strategy::Parallel;
    SpecMode spec = SpecMode::Off;
    double accuracy = 0.9;
    double r = 1.0;
    double mean_reaction = 0.0;  // over resolved T gates and seeds
    bool truncated = false;      // some run hit the round horizon (backlog); the mean is a lower bound
};

struct SweepGrid {
    int d = 11;
    int t_count = 50;
    std::vector<Strategy> strategies{Strategy::Sliding, Strategy::Parallel, Strategy::Aligned};
    std::vector<double> accuracies{-1.0, 0.9, 1.0};  // negative: speculation off
    std::vector<double> rs{0.25, 0.5, 1.0, 2.0, 4.0};
    std::vector<std::uint64_t> seeds{1};
    int max_rounds = 200000;  // per-run horizon
    int jobs = 1;             // worker threads; grid points are independent
};

std::vector<SweepPoint> latency_sweep(const SweepGrid& grid);
std::string sweep_csv(const std::vector<SweepPoint>& rows);

// ---- recovery strategies on a zig-zag chain ------------------------------------

struct RecoveryRow {
    Recovery recovery = Recovery::Optimistic;
    int decode_cycles = 1;  // decode time in units of d rounds
    double valid = 0.0;     // mean processor-rounds per shot
    double wasted = 0.0;
};

struct RecoveryGrid {
    int d = 3;
    int windows = 100;
    Strategy strategy = Strategy::Sliding;
    double accuracy = 0.9;
    double accuracy_adjacent = 0.86;
    std::vector<int> decode_cycles{1, 2, 4, 8};
    int shots = 10000;
    std::uint64_t seed = 1;
    int jobs = 1;
};

std::vector<RecoveryRow> recovery_eval(const RecoveryGrid& grid);
std::string recovery_csv(const std::vector<RecoveryRow>& rows);

// ---- processor limit -------------------------------------------------------------

struct ProcessorComparison {
    ProcessorReport heuristic;
    int unlimited_runtime = 0;
    int limited_runtime = 0;
    int limited_peak = 0;
    // Peak concurrent decodes with perfect speculation over peak without.
    double spec_peak_ratio = 0.0;
    // Same for time-averaged concurrent decodes.
    double spec_mean_ratio = 0.0;
};

ProcessorComparison compare_processors(const Program& program, const SimConfig& cfg);
std::string processors_csv(const ProcessorComparison& c);

}  // namespace specdec
