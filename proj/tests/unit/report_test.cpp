#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"
#include "specdec/experiments.hpp"
#include "specdec/report.hpp"

using namespace specdec;

TEST(Report, JsonAndTraces) {
    const Program p = builtin_program(BuiltinName::RepeatedT, {5, 4});
    SimConfig cfg;
    cfg.latency = LatencyModel::fixed_d(2);
    const SimResult r = simulate(p, cfg);
    const auto doc = nlohmann::json::parse(result_to_json(p, cfg, r));
    EXPECT_EQ(doc["runtime_rounds"], r.runtime_rounds);
    EXPECT_EQ(doc["blocking_ops"].size(), 4u);
    EXPECT_EQ(doc["config"]["latency"], "fixed:2d");
    EXPECT_FALSE(doc["truncated"].get<bool>());

    const std::string csv = trace_csv(p, r);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "round,patch_row,patch_col,label");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + static_cast<long>(r.activity.size()) * p.patch_count());
    EXPECT_NE(csv.find("TTeleport"), std::string::npos);

    const std::string svg = trace_svg(p, r);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("<rect"), std::string::npos);
}

TEST(Report, UnresolvedOpsAreNull) {
    const Program p = builtin_program(BuiltinName::RepeatedT, {5, 20});
    SimConfig cfg;
    cfg.strategy = Strategy::Sliding;
    cfg.max_rounds = 300;
    const SimResult r = simulate(p, cfg);
    const auto doc = nlohmann::json::parse(result_to_json(p, cfg, r));
    EXPECT_TRUE(doc["truncated"].get<bool>());
    EXPECT_TRUE(doc["blocking_ops"].back()["reaction"].is_null());
}

TEST(Experiments, PredictorEvalZeroNoise) {
    for (const auto& row : predictor_eval(5, 0.0, 50, 1)) {
        EXPECT_EQ(row.accuracy, 1.0);
        EXPECT_EQ(row.fp_rate, 0.0);
        EXPECT_EQ(row.fn_rate, 0.0);
    }
    EXPECT_EQ(predictor_csv({}), "d,p,predictor,shots,accuracy,fp_rate,fn_rate\n");
}

TEST(Experiments, RecoveryPerfectAccuracyWastesNothing) {
    RecoveryGrid grid;
    grid.windows = 20;
    grid.shots = 5;
    grid.accuracy = grid.accuracy_adjacent = 1.0;
    grid.decode_cycles = {1, 4};
    grid.jobs = 2;
    const auto rows = recovery_eval(grid);
    ASSERT_EQ(rows.size(), 6u);
    for (const auto& row : rows) {
        EXPECT_EQ(row.wasted, 0.0);
        EXPECT_GT(row.valid, 0.0);
    }
}

TEST(Experiments, SweepZeroAccuracyMatchesOff) {
    SweepGrid grid;
    grid.d = 5;
    grid.t_count = 10;
    grid.accuracies = {-1.0, 0.0};
    grid.rs = {0.4, 2.0};
    grid.seeds = {1, 2};
    grid.jobs = 3;
    const auto rows = latency_sweep(grid);
    ASSERT_EQ(rows.size(), 3u * 2 * 2);
    for (std::size_t i = 0; i < rows.size(); i += 4)
        for (int k = 0; k < 2; ++k) EXPECT_EQ(rows[i + k].mean_reaction, rows[i + 2 + k].mean_reaction);
}

TEST(Experiments, ParallelForPropagatesErrors) {
    std::vector<int> hits(50, 0);
    parallel_for(50, 4, [&](int i) { hits[i]++; });
    EXPECT_EQ(std::count(hits.begin(), hits.end(), 1), 50);
    EXPECT_THROW(parallel_for(10, 3, [](int i) { if (i == 7) throw std::runtime_error("x"); }), std::runtime_error);
}
