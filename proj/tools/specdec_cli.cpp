#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "specdec/experiments.hpp"
#include "specdec/pipeline.hpp"
#include "specdec/program.hpp"
#include "specdec/report.hpp"

namespace fs = std::filesystem;
using namespace specdec;

namespace {

struct SimFlags {
    std::string strategy = "parallel";
    std::string spec = "off";
    double accuracy = 0.90;
    std::optional<double> accuracy_adjacent;
    int t_spec = 1;
    std::string latency = "linear:1";
    std::string recovery = "optimistic";
    std::string processors = "unlimited";
    std::uint64_t seed = 1;
    std::optional<int> max_rounds;
    double p = 1e-3;
};

struct ProgramFlags {
    std::string builtin;
    std::string program;
    int d = 7;
    int count = 1;
};

void add_sim_flags(CLI::App* cmd, SimFlags& f) {
    cmd->add_option("--strategy", f.strategy, "sliding | parallel | aligned")->capture_default_str();
    cmd->add_option("--spec", f.spec, "off | stochastic (alias: on) | integrated")->capture_default_str();
    cmd->add_option("--accuracy", f.accuracy, "speculation accuracy a")->capture_default_str();
    cmd->add_option("--accuracy-adjacent", f.accuracy_adjacent, "accuracy when the neighbor also speculated (default a - 0.04)");
    cmd->add_option("--t-spec", f.t_spec, "speculation latency in rounds")->capture_default_str();
    cmd->add_option("--latency", f.latency, "fixed:X | fixed:Xd | linear:R | empirical:FILE")->capture_default_str();
    cmd->add_option("--recovery", f.recovery, "optimistic | adjacent | pessimistic")->capture_default_str();
    cmd->add_option("--processors", f.processors, "N | auto | unlimited")->capture_default_str();
    cmd->add_option("--seed", f.seed)->capture_default_str();
    cmd->add_option("--max-rounds", f.max_rounds, "stop backlogged runs here (result marked truncated)");
    cmd->add_option("--p", f.p, "physical error rate (integrated speculation)")->capture_default_str();
}

void add_program_flags(CLI::App* cmd, ProgramFlags& f, const std::string& default_builtin) {
    f.builtin = default_builtin;
    cmd->add_option("--builtin", f.builtin, "repeated_t | msd_15to1 | zigzag_chain | toffoli")->capture_default_str();
    cmd->add_option("--program", f.program, "program JSON file (overrides --builtin)");
    cmd->add_option("--d", f.d, "code distance")->capture_default_str();
    cmd->add_option("--count", f.count, "builtin size parameter (T gates, windows, ...)")->capture_default_str();
}

template <class T>
T parse_enum(std::optional<T> v, const std::string& flag, const std::string& text) {
    if (!v) throw std::invalid_argument(flag + ": unknown value '" + text + "'");
    return *v;
}

Program make_program(const ProgramFlags& f) {
    if (!f.program.empty()) return load_program(f.program);
    const BuiltinName name = parse_enum(builtin_name_from_string(f.builtin), "--builtin", f.builtin);
    return builtin_program(name, {f.d, f.count});
}

// Resolves --processors after everything else so "auto" sees the final config.
SimConfig make_config(const SimFlags& f, const Program& program) {
    SimConfig cfg;
    cfg.strategy = parse_enum(strategy_from_string(f.strategy), "--strategy", f.strategy);
    cfg.spec = parse_enum(spec_mode_from_string(f.spec), "--spec", f.spec);
    cfg.accuracy = f.accuracy;
    cfg.accuracy_adjacent = f.accuracy_adjacent.value_or(std::max(0.0, f.accuracy - 0.04));
    cfg.t_spec = f.t_spec;
    cfg.latency = parse_latency_model(f.latency);
    cfg.recovery = parse_enum(recovery_from_string(f.recovery), "--recovery", f.recovery);
    cfg.seed = f.seed;
    cfg.max_rounds = f.max_rounds;
    cfg.physical_error_rate = f.p;
    validate(cfg);
    if (f.processors == "auto") {
        cfg.processors = processor_heuristic(program, cfg).limit;
    } else if (f.processors != "unlimited") {
        std::size_t used = 0;
        int n = 0;
        try {
            n = std::stoi(f.processors, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != f.processors.size() || n < 1)
            throw std::invalid_argument("--processors: expected a positive integer, 'auto' or 'unlimited'");
        cfg.processors = n;
    }
    return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

// CSV to a file when --out is given, else stdout.
void emit(const std::string& out, const std::string& text) {
    if (out.empty())
        std::cout << text;
    else
        write_file(out, text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Speculative windowed-decoding pipeline simulator"};
    app.set_config("--config", "", "TOML/INI config file; flags take precedence");
    app.require_subcommand(1);
    int jobs = 1;
    app.add_option("--jobs", jobs, "worker threads for grid commands")->capture_default_str();

    // run
    SimFlags run_sim;
    ProgramFlags run_prog;
    std::string run_out = ".";
    auto* run = app.add_subcommand("run", "simulate one program; writes result.json, trace.csv, trace.svg");
    add_program_flags(run, run_prog, "msd_15to1");
    add_sim_flags(run, run_sim);
    run->add_option("--out", run_out, "output directory")->capture_default_str();

    // sweep-latency
    SweepGrid grid;
    std::vector<std::string> sweep_strategies{"sliding", "parallel", "aligned"};
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep-latency", "mean reaction time vs decode latency factor r (repeated_t)");
    sweep->add_option("--d", grid.d)->capture_default_str();
    sweep->add_option("--count", grid.t_count, "T gates")->capture_default_str();
    sweep->add_option("--strategy", sweep_strategies)->capture_default_str();
    sweep->add_option("--accuracy", grid.accuracies, "accuracies; negative = speculation off")->capture_default_str();
    sweep->add_option("--r", grid.rs, "latency factors")->capture_default_str();
    sweep->add_option("--seed,--seeds", grid.seeds)->capture_default_str();
    sweep->add_option("--max-rounds", grid.max_rounds, "per-run horizon")->capture_default_str();
    sweep->add_option("--out", sweep_out, "CSV path (default stdout)");

    // predictor-eval
    std::vector<int> pred_d{3, 5, 7, 9, 11};
    double pred_p = 1e-3;
    int pred_shots = 1000;
    std::uint64_t pred_seed = 1;
    std::string pred_out;
    auto* pred = app.add_subcommand("predictor-eval", "accuracy of the boundary predictors vs the reference decoder");
    pred->add_option("--d", pred_d)->capture_default_str();
    pred->add_option("--p", pred_p)->capture_default_str();
    pred->add_option("--shots", pred_shots)->capture_default_str();
    pred->add_option("--seed", pred_seed)->capture_default_str();
    pred->add_option("--out", pred_out, "CSV path (default stdout)");

    // recovery-eval
    RecoveryGrid rec_grid;
    std::string rec_strategy = "sliding";
    std::optional<double> rec_adjacent;
    std::string rec_out;
    auto* rec = app.add_subcommand("recovery-eval", "valid vs wasted decode compute per recovery strategy (zig-zag chain)");
    rec->add_option("--d", rec_grid.d)->capture_default_str();
    rec->add_option("--count", rec_grid.windows, "chain length")->capture_default_str();
    rec->add_option("--strategy", rec_strategy)->capture_default_str();
    rec->add_option("--accuracy", rec_grid.accuracy)->capture_default_str();
    rec->add_option("--accuracy-adjacent", rec_adjacent, "default a - 0.04");
    rec->add_option("--decode-time", rec_grid.decode_cycles, "decode times in units of d rounds")->capture_default_str();
    rec->add_option("--shots", rec_grid.shots)->capture_default_str();
    rec->add_option("--seed", rec_grid.seed)->capture_default_str();
    rec->add_option("--out", rec_out, "CSV path (default stdout)");

    // processors
    SimFlags proc_sim;
    proc_sim.spec = "stochastic";
    ProgramFlags proc_prog;
    std::string proc_out;
    auto* proc = app.add_subcommand("processors", "processor-limit heuristic and limited vs unlimited runtime");
    add_program_flags(proc, proc_prog, "repeated_t");
    add_sim_flags(proc, proc_sim);
    proc->add_option("--out", proc_out, "CSV path (default stdout)");

    // export-program
    ProgramFlags exp_prog;
    std::string exp_out;
    auto* exp = app.add_subcommand("export-program", "write a builtin (or re-normalize a program file) as JSON");
    add_program_flags(exp, exp_prog, "msd_15to1");
    exp->add_option("--out", exp_out, "JSON path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const Program program = make_program(run_prog);
            const SimConfig cfg = make_config(run_sim, program);
            const SimResult r = simulate(program, cfg);
            const fs::path dir(run_out);
            write_file(dir / "result.json", result_to_json(program, cfg, r) + "\n");
            write_file(dir / "trace.csv", trace_csv(program, r));
            write_file(dir / "trace.svg", trace_svg(program, r));
            std::cout << "runtime " << r.runtime_rounds << " rounds (" << double(r.runtime_rounds) / program.distance
                      << "d)" << (r.truncated ? " [truncated]" : "") << "\n";
        } else if (*sweep) {
            grid.strategies.clear();
            for (const auto& s : sweep_strategies)
                grid.strategies.push_back(parse_enum(strategy_from_string(s), "--strategy", s));
            grid.jobs = jobs;
            emit(sweep_out, sweep_csv(latency_sweep(grid)));
        } else if (*pred) {
            std::vector<PredictorEvalRow> rows;
            for (int d : pred_d)
                for (auto& row : predictor_eval(d, pred_p, pred_shots, pred_seed)) rows.push_back(row);
            emit(pred_out, predictor_csv(rows));
        } else if (*rec) {
            rec_grid.strategy = parse_enum(strategy_from_string(rec_strategy), "--strategy", rec_strategy);
            rec_grid.accuracy_adjacent = rec_adjacent.value_or(std::max(0.0, rec_grid.accuracy - 0.04));
            rec_grid.jobs = jobs;
            emit(rec_out, recovery_csv(recovery_eval(rec_grid)));
        } else if (*exp) {
            emit(exp_out, serialize_program(make_program(exp_prog)));
        } else if (*proc) {
            const Program program = make_program(proc_prog);
            SimConfig cfg = make_config(proc_sim, program);
            emit(proc_out, processors_csv(compare_processors(program, cfg)));
        }
    } catch (const std::exception& e) {
        std::cerr << "specdec: error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
