// Acceptance checks: one PASS/FAIL line per criterion. Exit status is nonzero
// when a criterion fails unless it is listed in --allow-fail (known misses,
// still printed as FAIL).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "specdec/experiments.hpp"
#include "specdec/pipeline.hpp"
#include "specdec/predictor.hpp"
#include "specdec/reference_decoder.hpp"

using namespace specdec;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double mean(const std::vector<int>& v, std::size_t lo, std::size_t hi) {
    return std::accumulate(v.begin() + lo, v.begin() + hi, 0.0) / double(hi - lo);
}

double mean_reaction(const Program& p, SimConfig cfg, const std::vector<std::uint64_t>& seeds) {
    double sum = 0;
    long n = 0;
    for (auto s : seeds) {
        cfg.seed = s;
        for (int rt : reaction_times(simulate(p, cfg))) sum += rt, ++n;
    }
    return sum / n;
}

// 1. Predictor accuracy at large d.
Outcome predictor_accuracy() {
    bool ok = true;
    std::string detail;
    for (int d : {13, 17, 21, 25}) {
        const auto rows = predictor_eval(d, 1e-3, 10000, 1000 + d);
        const bool pass = rows[0].accuracy > 0.70 && rows[2].accuracy > 0.90 && rows[1].fp_rate < rows[0].fp_rate;
        ok = ok && pass;
        detail += fmt("d=%d acc1=%.4f acc3=%.4f fp1=%.4f fp2=%.4f; ", d, rows[0].accuracy, rows[2].accuracy,
                      rows[0].fp_rate, rows[1].fp_rate);
    }
    return {ok, detail};
}

// 2. Phase count independent of d (and of the syndrome).
Outcome constant_phases() {
    std::set<int> seen[3];
    for (int d = 3; d <= 25; d += 2) {
        const DecodingGraph g = build_window_graph(d, d, {{Orientation::Temporal, Side::High}});
        const auto shape = std::make_shared<const BoundaryShape>(make_boundary_shape(g, 0));
        for (double p : {0.0, 1e-3, 1e-2})
            for (std::uint64_t s = 1; s <= 5; ++s) {
                const BoundaryView v = make_view(g, shape, sample_errors(g, p, s).syndrome);
                int k = 0;
                for (auto kind : {PredictorKind::OneStep, PredictorKind::TwoStep, PredictorKind::ThreeStep})
                    seen[k++].insert(predict(v, kind).phases_executed);
            }
    }
    const bool ok = seen[0].size() == 1 && seen[1].size() == 1 && seen[2].size() == 1;
    return {ok, fmt("phases 1/2/3-step = %d/%d/%d (distinct values: %zu/%zu/%zu)", *seen[0].begin(), *seen[1].begin(),
                    *seen[2].begin(), seen[0].size(), seen[1].size(), seen[2].size())};
}

// 3. Sliding backlog: bounded below r = 0.5, unbounded above.
Outcome backlog() {
    const Program p = builtin_program(BuiltinName::RepeatedT, {11, 200});
    SimConfig cfg;
    cfg.strategy = Strategy::Sliding;
    cfg.latency = LatencyModel::linear(0.4);
    const auto low = reaction_times(simulate(p, cfg));
    const int low_max = *std::max_element(low.begin(), low.end());
    const bool low_ok = low.size() == 200 && low_max <= 3 * low.front();

    cfg.latency = LatencyModel::linear(1.0);
    cfg.max_rounds = 200000;
    const SimResult high = simulate(p, cfg);
    const auto rt = reaction_times(high);
    bool high_ok = false;
    std::string high_detail;
    if (rt.size() == 200) {
        const double ratio = mean(rt, 180, 200) / mean(rt, 0, 20);
        high_ok = ratio >= 10;
        high_detail = fmt("r=1.0 decile ratio=%.1f", ratio);
    } else {
        // Each T gate doubles the backlog at r = 1, so 200 gates never finish.
        std::string growth;
        for (std::size_t i = 0; i < rt.size(); ++i) growth += (i ? "," : "") + std::to_string(rt[i]);
        high_detail = fmt("r=1.0 only %zu/200 T gates resolved within %d rounds (reactions %s)", rt.size(),
                          *cfg.max_rounds, growth.c_str());
    }
    return {low_ok && high_ok, fmt("r=0.4 first=%d max=%d; ", low.front(), low_max) + high_detail};
}

// 4. Perfect speculation roughly halves the reaction time on parallel windows.
Outcome spec_halving() {
    const Program p = builtin_program(BuiltinName::RepeatedT, {11, 100});
    const std::vector<std::uint64_t> seeds{1, 2, 3};
    bool ok = true;
    std::string detail;
    for (double r : {2.0, 4.0}) {
        SimConfig cfg;
        cfg.strategy = Strategy::Parallel;
        cfg.latency = LatencyModel::linear(r);
        const double off = mean_reaction(p, cfg, seeds);
        cfg.spec = SpecMode::Stochastic;
        cfg.accuracy = cfg.accuracy_adjacent = 1.0;
        const double on = mean_reaction(p, cfg, seeds);
        const double ratio = on / off;
        ok = ok && ratio >= 0.40 && ratio <= 0.65;
        detail += fmt("r=%.0f on=%.1f off=%.1f ratio=%.3f; ", r, on, off, ratio);
    }
    return {ok, detail};
}

// 5. Aligned windows beat parallel ones at small latency.
Outcome alignment() {
    const Program p = builtin_program(BuiltinName::RepeatedT, {11, 50});
    bool ok = true;
    std::string detail;
    for (double r : {0.05, 0.1, 0.25}) {
        SimConfig cfg;
        cfg.latency = LatencyModel::linear(r);
        cfg.strategy = Strategy::Parallel;
        const double par = mean_reaction(p, cfg, {1});
        cfg.strategy = Strategy::Aligned;
        const double ali = mean_reaction(p, cfg, {1});
        // Gate on r <= 0.1; r = 0.25 is reported only (see the decisions ledger).
        if (r <= 0.1) ok = ok && ali <= 0.6 * par;
        detail += fmt("r=%.2f ratio=%.3f%s; ", r, ali / par, r > 0.1 ? " (info)" : "");
    }
    return {ok, detail};
}

// 6. a = 0 speculation is a no-op.
Outcome baseline_equivalence() {
    int runs = 0, same = 0;
    for (auto [name, d, n] : {std::tuple{BuiltinName::RepeatedT, 7, 20}, {BuiltinName::Msd15To1, 7, 1}}) {
        const Program p = builtin_program(name, {d, n});
        for (auto st : {Strategy::Sliding, Strategy::Parallel, Strategy::Aligned})
            for (std::uint64_t seed = 1; seed <= 20; ++seed) {
                SimConfig cfg;
                cfg.strategy = st;
                cfg.latency = LatencyModel::linear(0.5);
                cfg.seed = seed;
                const SimResult off = simulate(p, cfg);
                cfg.spec = SpecMode::Stochastic;
                cfg.accuracy = cfg.accuracy_adjacent = 0.0;
                same += same_timeline(off, simulate(p, cfg));
                ++runs;
            }
    }
    return {same == runs, fmt("%d/%d identical timelines", same, runs)};
}

// 7. Distillation trace runtimes.
Outcome msd_trace() {
    const Program p = builtin_program(BuiltinName::Msd15To1, {7, 1});
    double par = 0, ali = 0;
    const int seeds = 50;
    for (int s = 1; s <= seeds; ++s) {
        SimConfig cfg;
        cfg.latency = LatencyModel::fixed_d(2);
        cfg.seed = s;
        cfg.strategy = Strategy::Parallel;
        par += simulate(p, cfg).runtime_rounds;
        cfg.strategy = Strategy::Aligned;
        cfg.spec = SpecMode::Stochastic;
        ali += simulate(p, cfg).runtime_rounds;
    }
    par /= seeds * 7.0;
    ali /= seeds * 7.0;
    const double gain = 1 - ali / par;
    const bool ok = std::abs(par / 15.1 - 1) <= 0.2 && std::abs(ali / 11.3 - 1) <= 0.2 && gain >= 0.15;
    return {ok, fmt("parallel=%.2fd aligned+spec=%.2fd improvement=%.1f%%", par, ali, 100 * gain)};
}

// 8. Recovery strategies.
Outcome recovery(int jobs) {
    RecoveryGrid grid;
    grid.decode_cycles = {1, 4, 8};
    grid.jobs = jobs;
    const auto rows = recovery_eval(grid);
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < rows.size(); i += 3) {
        const RecoveryRow &o = rows[i], &a = rows[i + 1], &pe = rows[i + 2];
        const int cycles = o.decode_cycles;
        if (cycles == 1) {
            const double t[] = {o.valid + o.wasted, a.valid + a.wasted, pe.valid + pe.wasted};
            const double spread = (*std::max_element(t, t + 3) - *std::min_element(t, t + 3)) / *std::min_element(t, t + 3);
            ok = ok && spread < 0.10;
            detail += fmt("1 cycle total spread=%.2f%%; ", 100 * spread);
        } else {
            ok = ok && o.wasted < a.wasted && a.wasted < pe.wasted;
            detail += fmt("%d cycles wasted o/a/p=%.1f/%.1f/%.1f; ", cycles, o.wasted, a.wasted, pe.wasted);
        }
    }
    return {ok, detail};
}

// 9. Processor-limit heuristic.
Outcome processors() {
    bool ok = true;
    std::string detail;
    for (auto [name, d, n] : {std::tuple{BuiltinName::RepeatedT, 11, 50}, {BuiltinName::Msd15To1, 7, 1}}) {
        const Program p = builtin_program(name, {d, n});
        for (auto st : {Strategy::Parallel, Strategy::Aligned}) {
            SimConfig cfg;
            cfg.strategy = st;
            cfg.spec = SpecMode::Stochastic;
            cfg.latency = name == BuiltinName::Msd15To1 ? LatencyModel::fixed_d(2) : LatencyModel::linear(2.0);
            const ProcessorComparison c = compare_processors(p, cfg);
            const double diff = std::abs(c.limited_runtime - c.unlimited_runtime) / double(c.unlimited_runtime);
            ok = ok && diff <= 0.01 && c.limited_peak <= c.heuristic.limit;
            detail += fmt("%s/%s limit=%d peak=%d diff=%.2f%%; ", std::string(to_string(name)).c_str(),
                          std::string(to_string(st)).c_str(), c.heuristic.limit, c.limited_peak, 100 * diff);
        }
    }
    return {ok, detail};
}

// Minimum pairing weight by exhaustive enumeration: each defect pairs with a
// later one or with the boundary.
int brute_force_weight(const DecodingGraph& g, std::vector<int>& defects, std::size_t i, std::vector<char>& used) {
    while (i < defects.size() && used[i]) ++i;
    if (i == defects.size()) return 0;
    used[i] = 1;
    int best = g.boundary_distance(defects[i]) + brute_force_weight(g, defects, i + 1, used);
    for (std::size_t j = i + 1; j < defects.size(); ++j)
        if (!used[j]) {
            used[j] = 1;
            best = std::min(best, g.distance(defects[i], defects[j]) + brute_force_weight(g, defects, i + 1, used));
            used[j] = 0;
        }
    used[i] = 0;
    return best;
}

// 10. Exact matcher against enumeration; every decode clears its syndrome.
Outcome oracle_soundness() {
    const DecodingGraph g = build_window_graph(5, 5, {});
    std::vector<int> nodes;
    for (int n = 0; n < g.node_capacity(); ++n)
        if (g.present(n)) nodes.push_back(n);
    std::mt19937_64 rng(10);
    int weight_ok = 0, cleared = 0;
    const int instances = 1000;
    for (int k = 0; k < instances; ++k) {
        std::shuffle(nodes.begin(), nodes.end(), rng);
        std::vector<int> defects(nodes.begin(), nodes.begin() + std::uniform_int_distribution(1, 8)(rng));
        Syndrome s;
        s.bits.assign(g.node_capacity(), 0);
        for (int n : defects) s.bits[n] = 1;
        std::vector<char> used(defects.size(), 0);
        const Matching exact = decode(g, s, DecodeMode::Exact);
        weight_ok += exact.weight == brute_force_weight(g, defects, 0, used);
        bool clears = true;
        for (const Matching& m : {exact, decode(g, s, DecodeMode::Greedy)}) {
            Syndrome got = syndrome_of(g, m.correction());
            clears = clears && got == s;
        }
        cleared += clears;
    }
    return {weight_ok == instances && cleared == instances,
            fmt("weights %d/%d match, %d/%d corrections clear", weight_ok, instances, cleared, instances)};
}

// 11. Speculation never delays a T gate (aligned windows, fixed decode time).
Outcome no_worse() {
    const Program p = builtin_program(BuiltinName::RepeatedT, {7, 20});
    int violations = 0, runs = 0;
    for (double a : {0.0, 0.3, 0.9, 1.0})
        for (double cycles : {0.5, 1.0, 2.0, 4.0})
            for (std::uint64_t seed = 1; seed <= 50; ++seed) {
                SimConfig cfg;
                cfg.strategy = Strategy::Aligned;
                cfg.latency = LatencyModel::fixed_d(cycles);
                cfg.seed = seed;
                const auto off = reaction_times(simulate(p, cfg));
                cfg.spec = SpecMode::Stochastic;
                cfg.accuracy = a;
                cfg.accuracy_adjacent = std::min(a, 0.86);
                const auto on = reaction_times(simulate(p, cfg));
                bool bad = on.size() != off.size();
                for (std::size_t i = 0; !bad && i < on.size(); ++i) bad = on[i] > off[i];
                violations += bad;
                ++runs;
            }
    return {violations == 0, fmt("%d/%d runs with a slower T gate", violations, runs)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::vector<int> only, allow;
    int jobs = 1;
    app.add_option("--only", only, "criteria to run (default all)");
    app.add_option("--allow-fail", allow, "criteria whose failure does not fail the exit status");
    app.add_option("--jobs", jobs);
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"predictor accuracy", predictor_accuracy},
        {"constant predictor phases", constant_phases},
        {"backlog dichotomy", backlog},
        {"speculation halving", spec_halving},
        {"alignment benefit", alignment},
        {"baseline equivalence", baseline_equivalence},
        {"distillation trace", msd_trace},
        {"recovery ordering", [&] { return recovery(jobs); }},
        {"processor heuristic", processors},
        {"oracle soundness", oracle_soundness},
        {"no-worse guarantee", no_worse},
    };
    int status = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool allowed = std::find(allow.begin(), allow.end(), id) != allow.end();
        std::printf("%s %2d %s [%.1fs]: %s%s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, secs,
                    o.detail.c_str(), !o.pass && allowed ? " (known miss)" : "");
        std::fflush(stdout);
        if (!o.pass && !allowed) status = 1;
    }
    return status;
}
