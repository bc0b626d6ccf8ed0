#include <benchmark/benchmark.h>

#include <memory>

#include "specdec/pipeline.hpp"
#include "specdec/predictor.hpp"
#include "specdec/reference_decoder.hpp"

using namespace specdec;

namespace {

const std::vector<BufferSpec> kFuture{{Orientation::Temporal, Side::High}};

// Per-boundary prediction cost; the phase count is constant, the work per phase grows with d^2.
void BM_Predict3Step(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const DecodingGraph g = build_window_graph(d, d, kFuture);
    const auto shape = std::make_shared<const BoundaryShape>(make_boundary_shape(g, 0));
    const BoundaryView view = make_view(g, shape, sample_errors(g, 1e-3, 7).syndrome);
    for (auto _ : state) benchmark::DoNotOptimize(predict_3step(view));
}
BENCHMARK(BM_Predict3Step)->DenseRange(5, 25, 4);

void BM_DecodeLocalExact(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const DecodingGraph g = build_window_graph(d, d, kFuture);
    std::vector<Syndrome> shots;
    for (std::uint64_t s = 0; s < 64; ++s) shots.push_back(sample_errors(g, 1e-3, s).syndrome);
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(decode(g, shots[i++ % shots.size()], DecodeMode::LocalExact));
}
BENCHMARK(BM_DecodeLocalExact)->DenseRange(5, 25, 4);

void BM_WindowTiling(benchmark::State& state) {
    const Program p = builtin_program(BuiltinName::Msd15To1, {7, 1});
    for (auto _ : state) benchmark::DoNotOptimize(assign_boundaries(p, Strategy::Aligned));
}
BENCHMARK(BM_WindowTiling);

void BM_SimulateRepeatedT(benchmark::State& state) {
    const Program p = builtin_program(BuiltinName::RepeatedT, {11, static_cast<int>(state.range(0))});
    SimConfig cfg;
    cfg.strategy = Strategy::Aligned;
    cfg.spec = SpecMode::Stochastic;
    cfg.latency = LatencyModel::linear(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(simulate(p, cfg));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SimulateRepeatedT)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_SimulateMsd(benchmark::State& state) {
    const Program p = builtin_program(BuiltinName::Msd15To1, {7, 1});
    SimConfig cfg;
    cfg.strategy = Strategy::Aligned;
    cfg.spec = SpecMode::Stochastic;
    cfg.latency = LatencyModel::fixed_d(2);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        cfg.seed = ++seed;
        benchmark::DoNotOptimize(simulate(p, cfg));
    }
}
BENCHMARK(BM_SimulateMsd);

}  // namespace

BENCHMARK_MAIN();
