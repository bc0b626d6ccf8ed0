#include "specdec/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>
#include <memory>
#include <sstream>

#include "specdec/decoding_graph.hpp"

namespace specdec {

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
    jobs = std::clamp(jobs, 1, std::max(n, 1));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (int i; (i = next++) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = n;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::vector<PredictorEvalRow> predictor_eval(int d, double p, int shots, std::uint64_t seed, DecodeMode truth_mode) {
    if (shots < 1) throw std::invalid_argument("predictor_eval: shots must be >= 1");
    const DecodingGraph g = build_window_graph(d, d, {{Orientation::Temporal, Side::High}});
    const auto shape = std::make_shared<const BoundaryShape>(make_boundary_shape(g, 0));
    const PredictorKind kinds[] = {PredictorKind::OneStep, PredictorKind::TwoStep, PredictorKind::ThreeStep};
    int ok[3] = {}, fp[3] = {}, fn[3] = {};
    std::mt19937_64 seeds(seed);
    for (int s = 0; s < shots; ++s) {
        const Sample smp = sample_errors(g, p, seeds());
        const DependencyBits truth = extract_dependency_bits(g, decode(g, smp.syndrome, truth_mode), 0);
        const BoundaryView view = make_view(g, shape, smp.syndrome);
        for (int k = 0; k < 3; ++k) {
            const Classification c = classify(predict(view, kinds[k]), truth);
            ok[k] += c.correct;
            fp[k] += c.false_positives > 0;
            fn[k] += c.false_negatives > 0;
        }
    }
    std::vector<PredictorEvalRow> rows;
    for (int k = 0; k < 3; ++k)
        rows.push_back({d, p, kinds[k], shots, double(ok[k]) / shots, double(fp[k]) / shots, double(fn[k]) / shots});
    return rows;
}

std::string predictor_csv(const std::vector<PredictorEvalRow>& rows) {
    std::ostringstream out;
    out << "d,p,predictor,shots,accuracy,fp_rate,fn_rate\n";
    for (const auto& r : rows)
        out << r.d << ',' << r.p << ',' << to_string(r.predictor) << ',' << r.shots << ',' << r.accuracy << ','
            << r.fp_rate << ',' << r.fn_rate << '\n';
    return out.str();
}

std::vector<SweepPoint> latency_sweep(const SweepGrid& grid) {
    if (grid.seeds.empty() || grid.strategies.empty() || grid.accuracies.empty() || grid.rs.empty())
        throw std::invalid_argument("latency_sweep: empty parameter grid");
    const Program prog = builtin_program(BuiltinName::RepeatedT, {grid.d, grid.t_count});
    std::vector<SweepPoint> out;
    for (Strategy s : grid.strategies)
        for (double a : grid.accuracies)
            for (double r : grid.rs) out.push_back({s, a < 0 ? SpecMode::Off : SpecMode::Stochastic, a < 0 ? 0.0 : a, r, 0.0});
    parallel_for(static_cast<int>(out.size()), grid.jobs, [&](int i) {
        SweepPoint& pt = out[i];
        SimConfig cfg;
        cfg.strategy = pt.strategy;
        cfg.latency = LatencyModel::linear(pt.r);
        cfg.spec = pt.spec;
        cfg.max_rounds = grid.max_rounds;
        if (pt.spec != SpecMode::Off) {
            cfg.accuracy = pt.accuracy;
            cfg.accuracy_adjacent = std::max(0.0, pt.accuracy - 0.04);
        }
        double sum = 0;
        long n = 0;
        for (std::uint64_t seed : grid.seeds) {
            cfg.seed = seed;
            const SimResult res = simulate(prog, cfg);
            pt.truncated = pt.truncated || res.truncated;
            for (int rt : reaction_times(res)) {
                sum += rt;
                ++n;
            }
        }
        pt.mean_reaction = n ? sum / n : 0.0;
    });
    return out;
}

std::string sweep_csv(const std::vector<SweepPoint>& rows) {
    std::ostringstream out;
    out << "strategy,spec,accuracy,r,mean_reaction,truncated\n";
    for (const auto& p : rows)
        out << to_string(p.strategy) << ',' << to_string(p.spec) << ',' << p.accuracy << ',' << p.r << ','
            << p.mean_reaction << ',' << (p.truncated ? 1 : 0) << '\n';
    return out.str();
}

std::vector<RecoveryRow> recovery_eval(const RecoveryGrid& grid) {
    if (grid.shots < 1) throw std::invalid_argument("recovery_eval: shots must be >= 1");
    const Program prog = builtin_program(BuiltinName::ZigzagChain, {grid.d, grid.windows});
    std::vector<RecoveryRow> out;
    for (int cycles : grid.decode_cycles)
        for (Recovery rec : {Recovery::Optimistic, Recovery::Adjacent, Recovery::Pessimistic})
            out.push_back({rec, cycles, 0.0, 0.0});
    parallel_for(static_cast<int>(out.size()), grid.jobs, [&](int i) {
        RecoveryRow& row = out[i];
        SimConfig cfg;
        cfg.strategy = grid.strategy;
        cfg.spec = SpecMode::Stochastic;
        cfg.accuracy = grid.accuracy;
        cfg.accuracy_adjacent = grid.accuracy_adjacent;
        cfg.recovery = row.recovery;
        cfg.latency = LatencyModel::fixed_d(row.decode_cycles);
        double valid = 0, wasted = 0;
        for (int s = 0; s < grid.shots; ++s) {
            // Same seeds across strategies: identical speculation outcomes.
            cfg.seed = grid.seed + static_cast<std::uint64_t>(s);
            const SimResult r = simulate(prog, cfg);
            valid += r.valid_compute;
            wasted += r.wasted_compute;
        }
        row.valid = valid / grid.shots;
        row.wasted = wasted / grid.shots;
    });
    return out;
}

std::string recovery_csv(const std::vector<RecoveryRow>& rows) {
    std::ostringstream out;
    out << "strategy,decode_time,valid,wasted\n";
    for (const auto& r : rows)
        out << to_string(r.recovery) << ',' << r.decode_cycles << ',' << r.valid << ',' << r.wasted << '\n';
    return out.str();
}

ProcessorComparison compare_processors(const Program& program, const SimConfig& cfg) {
    ProcessorComparison c;
    c.heuristic = processor_heuristic(program, cfg);
    SimConfig unlimited = cfg;
    unlimited.processors.reset();
    SimConfig limited = cfg;
    limited.processors = c.heuristic.limit;
    c.unlimited_runtime = simulate(program, unlimited).runtime_rounds;
    const SimResult lim = simulate(program, limited);
    c.limited_runtime = lim.runtime_rounds;
    c.limited_peak = lim.peak_occupancy();
    SimConfig off = unlimited;
    off.spec = SpecMode::Off;
    const SimResult base = simulate(program, off);
    const int off_peak = base.peak_occupancy();
    const double off_mean = base.mean_occupancy();
    c.spec_peak_ratio = off_peak > 0 ? double(c.heuristic.peak) / off_peak : 0.0;
    c.spec_mean_ratio = off_mean > 0 ? c.heuristic.mean / off_mean : 0.0;
    return c;
}

std::string processors_csv(const ProcessorComparison& c) {
    std::ostringstream out;
    out << "p_max,p_mean,limit,unlimited_runtime,limited_runtime,limited_peak,spec_peak_ratio,spec_mean_ratio\n";
    out << c.heuristic.peak << ',' << c.heuristic.mean << ',' << c.heuristic.limit << ',' << c.unlimited_runtime << ','
        << c.limited_runtime << ',' << c.limited_peak << ',' << c.spec_peak_ratio << ',' << c.spec_mean_ratio << '\n';
    return out.str();
}

}  // namespace specdec
