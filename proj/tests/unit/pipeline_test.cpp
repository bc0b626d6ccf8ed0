#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "specdec/pipeline.hpp"

using namespace specdec;

namespace {

SimConfig config(Strategy s, LatencyModel latency, std::uint64_t seed = 1) {
    SimConfig cfg;
    cfg.strategy = s;
    cfg.latency = latency;
    cfg.seed = seed;
    return cfg;
}

SimConfig with_spec(SimConfig cfg, double a, double a_adj) {
    cfg.spec = SpecMode::Stochastic;
    cfg.accuracy = a;
    cfg.accuracy_adjacent = a_adj;
    return cfg;
}

// Cells 0..3. Face 0: 0 -> 1 temporal; face 1: 1 -> 2 spatial; face 2: 1 -> 3 temporal.
WindowGraph fan_graph() {
    WindowGraph g;
    g.cells.resize(4);
    for (int i = 0; i < 4; ++i) g.cells[i].id = i;
    g.faces = {{0, 0, 1, FaceAxis::Temporal}, {1, 1, 2, FaceAxis::Row, 3}, {2, 1, 3, FaceAxis::Temporal}};
    for (const Face& f : g.faces) {
        g.cells[f.source].out_faces.push_back(f.id);
        g.cells[f.sink].in_faces.push_back(f.id);
    }
    return g;
}

WindowGraph chain_graph(int n) {
    WindowGraph g;
    g.cells.resize(n);
    for (int i = 0; i < n; ++i) g.cells[i].id = i;
    for (int i = 0; i + 1 < n; ++i) {
        g.faces.push_back({i, i, i + 1, FaceAxis::Temporal});
        g.cells[i].out_faces.push_back(i);
        g.cells[i + 1].in_faces.push_back(i);
    }
    return g;
}

}  // namespace

TEST(RestartSet, ChainExamples) {
    const WindowGraph g = chain_graph(3);  // windows 1 -> 2 -> 3 are cells 0 -> 1 -> 2
    const std::vector<char> all(3, 1), none(3, 0), used(2, 1);
    EXPECT_EQ(restart_set(g, 1, 0, Recovery::Optimistic, all, used), std::vector<int>{1});
    EXPECT_EQ(restart_set(g, 1, 0, Recovery::Pessimistic, all, used), (std::vector<int>{1, 2}));
    EXPECT_EQ(restart_set(g, 1, 0, Recovery::Pessimistic, none, used), std::vector<int>{1});
    // Both faces temporal: not adjacent, so nothing beyond the poisoned cell.
    EXPECT_EQ(restart_set(g, 1, 0, Recovery::Adjacent, all, used), std::vector<int>{1});
}

TEST(RestartSet, AdjacentFaces) {
    const WindowGraph g = fan_graph();
    const std::vector<char> all(4, 1), used(3, 1);
    EXPECT_EQ(restart_set(g, 1, 0, Recovery::Adjacent, all, used), (std::vector<int>{1, 2}));
    EXPECT_EQ(restart_set(g, 1, 0, Recovery::Adjacent, all, std::vector<char>{1, 0, 1}), std::vector<int>{1});
    EXPECT_EQ(restart_set(g, 1, 0, Recovery::Pessimistic, all, used), (std::vector<int>{1, 2, 3}));
    const auto pred = restart_set(g, 1, 0, Recovery::Pessimistic, [](int c) { return c != 3; }, [](int) { return true; });
    EXPECT_EQ(pred, (std::vector<int>{1, 2}));
}

TEST(Processors, HeuristicLimit) {
    EXPECT_EQ(heuristic_limit(10, 5, 0.1), 11);
    EXPECT_EQ(heuristic_limit(10, 5, 0.0), 10);
    EXPECT_EQ(heuristic_limit(0, 0, 0.1), 1);
}

TEST(Processors, HeuristicWithPerfectSpeculation) {
    const Program p = builtin_program(BuiltinName::RepeatedT, {5, 10});
    SimConfig cfg = with_spec(config(Strategy::Parallel, LatencyModel::linear(1)), 1.0, 1.0);
    const ProcessorReport r = processor_heuristic(p, cfg);
    EXPECT_EQ(r.limit, r.peak);  // epsilon = 1 - a = 0
    cfg.processors = 2;
    EXPECT_LE(simulate(p, cfg).peak_occupancy(), 2);
}

TEST(Simulate, SpeculationOffEqualsZeroAccuracy) {
    for (auto name : {BuiltinName::RepeatedT, BuiltinName::Msd15To1})
        for (auto s : {Strategy::Sliding, Strategy::Parallel, Strategy::Aligned})
            for (std::uint64_t seed : {1, 2, 3}) {
                const Program p = builtin_program(name, {5, 6});
                const SimConfig off = config(s, LatencyModel::linear(0.7), seed);
                EXPECT_TRUE(same_timeline(simulate(p, off), simulate(p, with_spec(off, 0.0, 0.0))));
            }
}

TEST(Simulate, SlidingBacklogGrows) {
    const Program p = builtin_program(BuiltinName::RepeatedT, {5, 8});
    const auto rt = reaction_times(simulate(p, config(Strategy::Sliding, LatencyModel::linear(1.0))));
    ASSERT_EQ(rt.size(), 8u);
    for (std::size_t i = 1; i < rt.size(); ++i) EXPECT_GT(rt[i], rt[i - 1]);
    EXPECT_GE(rt.back(), 10 * rt.front());
}

TEST(Simulate, SlidingBoundedBelowHalf) {
    const Program p = builtin_program(BuiltinName::RepeatedT, {5, 40});
    const auto rt = reaction_times(simulate(p, config(Strategy::Sliding, LatencyModel::linear(0.4))));
    EXPECT_LE(*std::max_element(rt.begin(), rt.end()), 3 * rt.front());
}

TEST(Simulate, PerfectSpeculationNeverMispredicts) {
    const Program p = builtin_program(BuiltinName::Msd15To1, {5, 1});
    const SimResult r = simulate(p, with_spec(config(Strategy::Aligned, LatencyModel::fixed_d(2)), 1.0, 1.0));
    EXPECT_EQ(r.mispredictions, 0);
    EXPECT_EQ(r.wasted_compute, 0);
    EXPECT_GT(r.speculations, 0);
}

// With a_adj = a the per-speculation outcome is Bernoulli(a).
TEST(Simulate, SpeculationAccuracyMatchesSampler) {
    const Program p = builtin_program(BuiltinName::RepeatedT, {5, 100});
    long spec = 0, miss = 0;
    for (std::uint64_t seed = 1; seed <= 20 && spec < 10000; ++seed) {
        const SimResult r = simulate(p, with_spec(config(Strategy::Parallel, LatencyModel::linear(1), seed), 0.9, 0.9));
        spec += r.speculations;
        miss += r.mispredictions;
    }
    ASSERT_GE(spec, 10000);
    const double acc = 1.0 - double(miss) / spec;
    EXPECT_NEAR(acc, 0.9, 3 * std::sqrt(0.9 * 0.1 / spec));
}

TEST(Simulate, ComputeConservationAndLimit) {
    const Program p = builtin_program(BuiltinName::Msd15To1, {5, 1});
    for (auto rec : {Recovery::Optimistic, Recovery::Adjacent, Recovery::Pessimistic}) {
        SimConfig cfg = with_spec(config(Strategy::Parallel, LatencyModel::fixed_d(2), 4), 0.7, 0.66);
        cfg.recovery = rec;
        cfg.processors = 6;
        const SimResult r = simulate(p, cfg);
        long long busy = 0, valid = 0;
        for (const auto& t : r.tasks) {
            busy += t.end - t.start;
            if (t.valid) valid += t.end - t.start;
        }
        EXPECT_EQ(busy, r.valid_compute + r.wasted_compute);
        EXPECT_EQ(valid, r.valid_compute);
        EXPECT_LE(r.peak_occupancy(), 6);
        EXPECT_GT(r.mispredictions, 0);
    }
}

TEST(Simulate, Causality) {
    const Program p = builtin_program(BuiltinName::RepeatedT, {5, 10});
    const SimResult r = simulate(p, with_spec(config(Strategy::Parallel, LatencyModel::linear(1)), 0.8, 0.76));
    for (const auto& t : r.tasks) EXPECT_GE(t.start, r.windows.cells[t.cell].ready_round);
}

TEST(Simulate, Deterministic) {
    const Program p = builtin_program(BuiltinName::Msd15To1, {5, 1});
    const SimConfig cfg = with_spec(config(Strategy::Aligned, LatencyModel::linear(1), 9), 0.9, 0.86);
    const SimResult a = simulate(p, cfg), b = simulate(p, cfg);
    EXPECT_TRUE(same_timeline(a, b));
    EXPECT_EQ(a.occupancy, b.occupancy);
    EXPECT_EQ(a.mispredictions, b.mispredictions);
}

// Decode in one round with perfect speculation: the buffer generation bounds the reaction.
TEST(ReactionTime, InstantDecoderAligned) {
    const int d = 7;
    const Program p = builtin_program(BuiltinName::RepeatedT, {d, 10});
    const auto rt = reaction_times(simulate(p, with_spec(config(Strategy::Aligned, LatencyModel::fixed(1)), 1, 1)));
    for (int x : rt) {
        EXPECT_GE(x, d);
        EXPECT_LE(x, d + 3);
    }
}

// A T gate ending in a sink cell waits for its source neighbour and then itself.
TEST(ReactionTime, BaselineSinkEndingIsTwoDecodes) {
    const int d = 5, tw = 3 * d;
    const Program p = builtin_program(BuiltinName::RepeatedT, {d, 10});
    const SimResult r = simulate(p, config(Strategy::Parallel, LatencyModel::fixed(tw)));
    int sink_ending = 0;
    for (const auto& op : r.blocking_ops) {
        const Instruction& ins = p.instructions[op.instruction];
        for (const auto& c : r.windows.cells) {
            if (c.dead || c.patch != p.patch_index(ins.patches[0]) || op.end - 1 < c.t0 || op.end - 1 >= c.t1) continue;
            if (c.type == CellType::Sink) {
                EXPECT_GE(op.reaction(), 2 * tw);
                ++sink_ending;
            }
        }
        EXPECT_GE(op.reaction(), tw);
    }
    EXPECT_GT(sink_ending, 0);
}

TEST(ReactionTime, PerfectSpeculationRoughlyHalves) {
    const Program p = builtin_program(BuiltinName::RepeatedT, {7, 40});
    const SimConfig off = config(Strategy::Parallel, LatencyModel::linear(4));
    auto mean = [](const std::vector<int>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
    const double ratio = mean(reaction_times(simulate(p, with_spec(off, 1, 1)))) / mean(reaction_times(simulate(p, off)));
    EXPECT_GT(ratio, 0.4);
    EXPECT_LT(ratio, 0.65);
}

TEST(ReactionTime, Errors) {
    const Program p = builtin_program(BuiltinName::RepeatedT, {5, 3});
    const SimResult r = simulate(p, config(Strategy::Parallel, LatencyModel::linear(1)));
    EXPECT_THROW(reaction_time(r, -1), std::invalid_argument);
    int plain = 0;
    while (p.instructions[plain].blocking) ++plain;
    EXPECT_THROW(reaction_time(r, plain), std::invalid_argument);
    EXPECT_EQ(reaction_time(r, r.blocking_ops[0].instruction), r.blocking_ops[0].reaction());
}

TEST(Simulate, Truncation) {
    const Program p = builtin_program(BuiltinName::RepeatedT, {5, 30});
    SimConfig cfg = config(Strategy::Sliding, LatencyModel::linear(1.0));
    cfg.max_rounds = 400;
    const SimResult r = simulate(p, cfg);
    EXPECT_TRUE(r.truncated);
    EXPECT_LE(r.runtime_rounds, 400);
    const auto& last = r.blocking_ops.back();
    EXPECT_EQ(last.resolved, -1);
    EXPECT_THROW(reaction_time(r, last.instruction), std::invalid_argument);
    EXPECT_LT(reaction_times(r).size(), r.blocking_ops.size());
}

TEST(Simulate, IntegratedSpeculation) {
    const Program p = builtin_program(BuiltinName::RepeatedT, {3, 5});
    SimConfig cfg = config(Strategy::Parallel, LatencyModel::linear(1));
    cfg.spec = SpecMode::Integrated;
    cfg.physical_error_rate = 1e-2;
    const SimResult r = simulate(p, cfg);
    EXPECT_GT(r.speculations, 0);
    EXPECT_EQ(reaction_times(r).size(), 5u);
}

TEST(SimConfig, Validation) {
    SimConfig cfg;
    cfg.accuracy = 0.8;
    cfg.accuracy_adjacent = 0.9;
    EXPECT_THROW(validate(cfg), std::invalid_argument);
    cfg.accuracy_adjacent = 0.7;
    EXPECT_NO_THROW(validate(cfg));
    cfg.t_spec = -1;
    EXPECT_THROW(validate(cfg), std::invalid_argument);
    cfg.t_spec = 1;
    cfg.processors = 0;
    EXPECT_THROW(validate(cfg), std::invalid_argument);
    EXPECT_EQ(spec_mode_from_string("on"), SpecMode::Stochastic);
    EXPECT_FALSE(recovery_from_string("hopeful"));
}
