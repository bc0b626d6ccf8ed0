#include "specdec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>

#include "specdec/decoding_graph.hpp"
#include "specdec/predictor.hpp"
#include "specdec/reference_decoder.hpp"

namespace specdec {

std::string_view to_string(SpecMode m) {
    switch (m) {
        case SpecMode::Off: return "off";
        case SpecMode::Stochastic: return "stochastic";
        case SpecMode::Integrated: return "integrated";
    }
    return "?";
}

std::optional<SpecMode> spec_mode_from_string(std::string_view s) {
    if (s == "off") return SpecMode::Off;
    if (s == "stochastic" || s == "on") return SpecMode::Stochastic;
    if (s == "integrated") return SpecMode::Integrated;
    return std::nullopt;
}

std::string_view to_string(Recovery r) {
    switch (r) {
        case Recovery::Pessimistic: return "pessimistic";
        case Recovery::Adjacent: return "adjacent";
        case Recovery::Optimistic: return "optimistic";
    }
    return "?";
}

std::optional<Recovery> recovery_from_string(std::string_view s) {
    if (s == "pessimistic") return Recovery::Pessimistic;
    if (s == "adjacent") return Recovery::Adjacent;
    if (s == "optimistic") return Recovery::Optimistic;
    return std::nullopt;
}

void validate(const SimConfig& cfg) {
    if (!(cfg.accuracy >= 0.0 && cfg.accuracy <= 1.0)) throw std::invalid_argument("config: accuracy must lie in [0, 1]");
    if (!(cfg.accuracy_adjacent >= 0.0 && cfg.accuracy_adjacent <= cfg.accuracy))
        throw std::invalid_argument("config: adjacent accuracy must lie in [0, accuracy]");
    if (cfg.t_spec < 0) throw std::invalid_argument("config: t_spec must be >= 0");
    if (cfg.max_rounds && *cfg.max_rounds < 1) throw std::invalid_argument("config: max_rounds must be >= 1");
    if (cfg.processors && *cfg.processors < 1) throw std::invalid_argument("config: processor limit must be >= 1");
    if (cfg.round_time_us && !(*cfg.round_time_us > 0)) throw std::invalid_argument("config: round time must be positive");
    if (!(cfg.conditional_probability >= 0.0 && cfg.conditional_probability <= 1.0))
        throw std::invalid_argument("config: conditional probability must lie in [0, 1]");
}

int SimResult::peak_occupancy() const {
    return occupancy.empty() ? 0 : *std::max_element(occupancy.begin(), occupancy.end());
}

double SimResult::mean_occupancy() const {
    if (occupancy.empty()) return 0.0;
    return static_cast<double>(std::accumulate(occupancy.begin(), occupancy.end(), 0LL)) / occupancy.size();
}

std::vector<int> restart_set(const WindowGraph& graph, int poisoned, int face, Recovery recovery,
                             const std::vector<char>& started, const std::vector<char>& used_speculation) {
    return restart_set(
        graph, poisoned, face, recovery, [&](int c) { return started[c] != 0; },
        [&](int f) { return used_speculation[f] != 0; });
}

std::vector<int> restart_set(const WindowGraph& graph, int poisoned, int face, Recovery recovery,
                             const std::function<bool(int)>& started,
                             const std::function<bool(int)>& used_speculation) {
    std::vector<int> out{poisoned};
    if (recovery == Recovery::Adjacent) {
        const Face& bad = graph.faces[face];
        for (int f : graph.cells[poisoned].out_faces) {
            const Face& g = graph.faces[f];
            if (faces_adjacent(bad, g) && started(g.sink) && used_speculation(f)) out.push_back(g.sink);
        }
    } else if (recovery == Recovery::Pessimistic) {
        std::vector<char> seen(graph.cells.size(), 0);
        std::vector<int> stack{poisoned};
        seen[poisoned] = 1;
        while (!stack.empty()) {
            const int c = stack.back();
            stack.pop_back();
            for (int f : graph.cells[c].out_faces) {
                const int s = graph.faces[f].sink;
                if (seen[s]) continue;
                seen[s] = 1;
                stack.push_back(s);
                if (started(s)) out.push_back(s);
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent, timeline-agnostic random stream per (purpose, key...).
std::mt19937_64 keyed_rng(std::uint64_t seed, std::initializer_list<std::int64_t> key) {
    std::uint64_t h = mix(seed);
    for (std::int64_t k : key) h = mix(h ^ static_cast<std::uint64_t>(k));
    return std::mt19937_64(h);
}

enum Stream : std::int64_t { kSpecStream = 1, kConditionalStream = 2, kLatencyStream = 3, kSyndromeStream = 4 };

enum class Status { Waiting, Queued, Running, Done, Final };

struct CellState {
    Status status = Status::Waiting;
    bool ready = false;
    int attempt = 0;
    int start = 0;
    int end = 0;
    int latency = 0;
};

struct FaceState {
    int spec_time = -1;
    bool sampled = false;
    bool flag = true;  // speculation will verify as correct
    bool verified = false;
    bool consumed = false;  // sink's current attempt used the speculated bits
};

struct PredictorBench {
    DecodingGraph graph;
    std::shared_ptr<const BoundaryShape> shape;
};

class Engine {
public:
    Engine(const Program& program, const SimConfig& cfg)
        : prog_(program), cfg_(cfg), d_(program.distance), builder_(program, cfg.strategy) {
        const int n = static_cast<int>(prog_.instructions.size());
        const int np = prog_.patch_count();
        queue_.resize(np);
        patch_free_.assign(np, 0);
        patch_delay_.assign(np, 0);
        patch_last_.assign(np, -1);
        current_.assign(np, -1);
        start_.assign(n, -1);
        end_.assign(n, -1);
        fired_.assign(n, 1);
        resolved_.assign(n, -1);
        deps_.resize(n);

        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return prog_.instructions[a].start_round < prog_.instructions[b].start_round;
        });
        for (int i : order)
            for (const PatchId& p : prog_.instructions[i].patches) queue_[prog_.patch_index(p)].push_back(i);
        for (int i = 0; i < n; ++i) {
            const Instruction& ins = prog_.instructions[i];
            for (int j = 0; j < i; ++j) {
                const Instruction& prev = prog_.instructions[j];
                if (!prev.blocking) continue;
                const bool shared = std::any_of(ins.patches.begin(), ins.patches.end(), [&](const PatchId& p) {
                    return std::find(prev.patches.begin(), prev.patches.end(), p) != prev.patches.end();
                });
                if (shared) deps_[i].push_back(j);
            }
            if (ins.conditional_on && std::find(deps_[i].begin(), deps_[i].end(), *ins.conditional_on) == deps_[i].end())
                deps_[i].push_back(*ins.conditional_on);
            if (ins.conditional_on) {
                auto rng = keyed_rng(cfg_.seed, {kConditionalStream, i});
                fired_[i] = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < cfg_.conditional_probability;
            }
            if (ins.blocking) blocking_.push_back(i);
        }
    }

    SimResult run() {
        // With no decode in flight, fresh cells become dispatchable within a few code cycles.
        const int idle_bound = 8 * d_ + cfg_.t_spec + 16;
        int idle = 0;
        int t = 0;
        for (;; ++t) {
            idle = (running_ > 0 || !fifo_.empty()) ? 0 : idle + 1;
            if (idle > idle_bound) throw std::runtime_error("simulate: no progress (internal scheduling deadlock)");
            if (cfg_.max_rounds && t >= *cfg_.max_rounds) {
                truncated_ = true;
                break;
            }
            grow_state();
            complete(t);
            check_resolutions(t);
            if (!quiescent_) {
                if (t >= 1) {
                    builder_.ingest(activity_[t - 1]);
                    on_ready(t);
                }
                device(t);
                // The round after the last instruction has been ingested: every segment is closed.
                quiescent_ = device_done() && builder_.now() > program_end_;
            }
            dispatch(t);
            occupancy_.push_back(running_);
            if (finished()) break;
            if (quiescent_) {
                const int next = next_event(t);
                for (int u = t + 1; u < next; ++u) occupancy_.push_back(running_);
                t = next - 1;
            }
        }
        if (!truncated_) activity_.resize(program_end_);
        SimResult r;
        r.runtime_rounds = program_end_;
        r.runtime_us = program_end_ * cfg_.round_time_us.value_or(prog_.round_time_us);
        for (int i : blocking_) r.blocking_ops.push_back({i, start_[i], end_[i], resolved_[i]});
        r.occupancy = std::move(occupancy_);
        r.valid_compute = valid_;
        r.wasted_compute = wasted_;
        r.mispredictions = mispredictions_;
        r.speculations = speculations_;
        r.activity = std::move(activity_);
        r.instruction_start = start_;
        r.conditional_fired = fired_;
        r.tasks = std::move(tasks_);
        r.windows = builder_.graph();
        r.processor_limit = cfg_.processors.value_or(-1);
        r.truncated = truncated_;
        if (truncated_) {
            r.runtime_rounds = static_cast<int>(r.activity.size());
            r.runtime_us = r.runtime_rounds * cfg_.round_time_us.value_or(prog_.round_time_us);
        }
        return r;
    }

private:
    const WindowGraph& graph() const { return builder_.graph(); }

    void grow_state() {
        cells_.resize(graph().cells.size());
        faces_.resize(graph().faces.size());
    }

    // ---- decode completion, verification and recovery -------------------

    void complete(int t) {
        while (!heap_.empty() && std::get<0>(heap_.top()) <= t) {
            auto [end, cell, attempt] = heap_.top();
            heap_.pop();
            CellState& cs = cells_[cell];
            if (cs.status != Status::Running || cs.attempt != attempt) continue;
            cs.status = Status::Done;
            --running_;
            try_finalize(cell, t);
        }
    }

    void try_finalize(int cell, int t) {
        CellState& cs = cells_[cell];
        if (cs.status != Status::Done) return;
        for (int f : graph().cells[cell].in_faces)
            if (!faces_[f].verified) return;
        cs.status = Status::Final;
        valid_ += cs.latency;
        tasks_.push_back({cell, cs.attempt, cs.start, cs.end, true});
        finalized_ = true;
        for (int f : graph().cells[cell].out_faces) verify(f, t);
    }

    void verify(int f, int t) {
        FaceState& fs = faces_[f];
        fs.verified = true;
        const int sink = graph().faces[f].sink;
        const Status st = cells_[sink].status;
        if ((st == Status::Running || st == Status::Done) && fs.consumed && !fs.flag) {
            ++mispredictions_;
            auto started = [&](int c) {
                return cells_[c].status == Status::Running || cells_[c].status == Status::Done;
            };
            auto used = [&](int g) { return faces_[g].consumed && !faces_[g].verified; };
            for (int c : restart_set(graph(), sink, f, cfg_.recovery, started, used)) abort(c, t);
        }
        add_candidate(sink);
        try_finalize(sink, t);
    }

    void abort(int cell, int t) {
        CellState& cs = cells_[cell];
        if (cs.status == Status::Running) {
            wasted_ += t - cs.start;
            --running_;
            tasks_.push_back({cell, cs.attempt, cs.start, t, false});
        } else if (cs.status == Status::Done) {
            wasted_ += cs.latency;
            tasks_.push_back({cell, cs.attempt, cs.start, cs.end, false});
        } else {
            return;
        }
        cs.status = Status::Waiting;
        ++cs.attempt;
        for (int f : graph().cells[cell].in_faces) faces_[f].consumed = false;
        add_candidate(cell);
    }

    void check_resolutions(int t) {
        if (!finalized_ && !newly_ended_) return;
        finalized_ = newly_ended_ = false;
        for (int i : blocking_) {
            if (resolved_[i] >= 0 || end_[i] < 0 || end_[i] > t || builder_.now() < end_[i]) continue;
            // Cached non-final cells; a full rescan confirms once the cache drains,
            // since late re-cutting may add cells.
            auto [it, fresh] = pending_.try_emplace(i);
            auto& cells = it->second;
            for (int rescan = fresh ? 1 : 0; rescan < 2; ++rescan) {
                if (rescan == 1) {
                    cells.clear();
                    for (const PatchId& p : prog_.instructions[i].patches)
                        for (int c : builder_.cells_before(prog_.patch_index(p), end_[i])) cells.push_back(c);
                }
                std::erase_if(cells, [&](int c) { return cells_[c].status == Status::Final; });
                if (!cells.empty()) break;
            }
            if (cells.empty()) {
                resolved_[i] = t;
                pending_.erase(it);
            }
        }
    }

    // ---- readiness and speculation ----------------------------------------

    double accuracy_for(int owner, const Face& f) const {
        for (int g : graph().cells[owner].in_faces) {
            const FaceState& gs = faces_[g];
            if (gs.sampled && !gs.flag && faces_adjacent(graph().faces[g], f)) return cfg_.accuracy_adjacent;
        }
        return cfg_.accuracy;
    }

    bool integrated_flag(const WindowCell& owner, const WindowCell& sink, const Face& f) {
        const bool temporal = f.axis == FaceAxis::Temporal;
        auto& bench = temporal ? temporal_bench_ : spatial_bench_;
        if (!bench) {
            DecodingGraph g = build_window_graph(d_, d_, {{temporal ? Orientation::Temporal : Orientation::Spatial, Side::High}});
            auto shape = std::make_shared<const BoundaryShape>(make_boundary_shape(g, 0));
            bench = std::make_unique<PredictorBench>(PredictorBench{std::move(g), std::move(shape)});
        }
        auto rng = keyed_rng(cfg_.seed, {kSyndromeStream, owner.patch, owner.ordinal, sink.patch, sink.ordinal});
        const Sample s = sample_errors(bench->graph, cfg_.physical_error_rate, rng());
        DecoderOptions opts;
        opts.exact_cap = cfg_.exact_cap;
        Matching m;
        try {
            m = decode(bench->graph, s.syndrome, DecodeMode::Exact, opts);
        } catch (const ExactCapExceeded& e) {
            throw std::runtime_error(std::string("integrated speculation: ") + e.what());
        }
        const DependencyBits truth = extract_dependency_bits(bench->graph, m, 0);
        const BoundaryView view = make_view(bench->graph, bench->shape, s.syndrome);
        return classify(predict_3step(view), truth).correct;
    }

    void on_ready(int t) {
        grow_state();
        for (int c : builder_.newly_ready()) {
            const WindowCell& cell = graph().cells[c];
            CellState& cs = cells_[c];
            cs.ready = true;
            auto rng = keyed_rng(cfg_.seed, {kLatencyStream, cell.patch, cell.ordinal});
            cs.latency = decode_latency(cell.volume, d_, cfg_.latency, rng);
            if (cfg_.spec != SpecMode::Off) {
                for (int f : cell.out_faces) {
                    const Face& face = graph().faces[f];
                    const WindowCell& sink = graph().cells[face.sink];
                    FaceState& fs = faces_[f];
                    fs.spec_time = t + cfg_.t_spec;
                    if (cfg_.spec == SpecMode::Integrated) {
                        fs.flag = integrated_flag(cell, sink, face);
                    } else {
                        auto frng = keyed_rng(cfg_.seed, {kSpecStream, cell.patch, cell.ordinal, sink.patch, sink.ordinal});
                        fs.flag = std::uniform_real_distribution<double>(0.0, 1.0)(frng) < accuracy_for(c, face);
                    }
                    fs.sampled = true;
                    wake_.emplace(fs.spec_time, face.sink);
                }
            }
            add_candidate(c);
        }
    }

    // Input availability only changes on readiness, verification, abort and
    // speculation arrival; only those cells are re-examined.
    void add_candidate(int c) {
        if (cells_[c].ready) dirty_.insert(c);
    }

    bool inputs_available(int c, int t) const {
        for (int f : graph().cells[c].in_faces) {
            const FaceState& fs = faces_[f];
            if (fs.verified) continue;
            if (cfg_.spec == SpecMode::Off || fs.spec_time < 0 || fs.spec_time > t) return false;
        }
        return true;
    }

    void dispatch(int t) {
        while (!wake_.empty() && wake_.top().first <= t) {
            add_candidate(wake_.top().second);
            wake_.pop();
        }
        for (int c : dirty_)
            if (cells_[c].status == Status::Waiting && inputs_available(c, t)) {
                cells_[c].status = Status::Queued;
                fifo_.push_back(c);
            }
        dirty_.clear();
        const int cap = cfg_.processors.value_or(std::numeric_limits<int>::max());
        while (!fifo_.empty() && running_ < cap) {
            const int c = fifo_.front();
            fifo_.pop_front();
            CellState& cs = cells_[c];
            // Inputs only ever gain bits, so a queued task stays startable.
            cs.status = Status::Running;
            cs.start = t;
            cs.end = t + cs.latency;
            for (int f : graph().cells[c].in_faces) {
                faces_[f].consumed = !faces_[f].verified;
                speculations_ += faces_[f].consumed;
            }
            ++running_;
            heap_.emplace(cs.end, c, cs.attempt);
        }
    }

    // ---- device ----------------------------------------------------------------

    bool can_start(int i, int t) const {
        const Instruction& ins = prog_.instructions[i];
        int delay = 0;
        for (const PatchId& pid : ins.patches) {
            const int p = prog_.patch_index(pid);
            if (queue_[p].empty() || queue_[p].front() != i || patch_free_[p] > t) return false;
            delay = std::max(delay, patch_delay_[p]);
        }
        if (t < ins.start_round + delay) return false;
        for (int j : deps_[i])
            if (resolved_[j] < 0 || resolved_[j] > t) return false;
        return true;
    }

    void device(int t) {
        for (bool changed = true; changed;) {
            changed = false;
            for (int p = 0; p < prog_.patch_count(); ++p) {
                if (queue_[p].empty()) continue;
                const int i = queue_[p].front();
                if (!can_start(i, t)) continue;
                const Instruction& ins = prog_.instructions[i];
                start_[i] = t;
                end_[i] = t + (fired_[i] ? ins.duration : 0);
                for (const PatchId& pid : ins.patches) {
                    const int q = prog_.patch_index(pid);
                    queue_[q].pop_front();
                    patch_free_[q] = end_[i];
                    patch_delay_[q] = end_[i] - ins.end_round();
                    patch_last_[q] = i;
                    if (end_[i] > t) current_[q] = i;
                }
                program_end_ = std::max(program_end_, end_[i]);
                if (ins.blocking) newly_ended_ = true;
                changed = true;
            }
        }
        std::vector<int> round(prog_.patch_count(), WindowBuilder::kInactive);
        for (int p = 0; p < prog_.patch_count(); ++p) {
            const int cur = current_[p];
            if (cur >= 0 && start_[cur] <= t && t < end_[cur]) {
                round[p] = cur;
                continue;
            }
            current_[p] = -1;
            const int last = patch_last_[p];
            if (last >= 0 && !queue_[p].empty() &&
                prog_.instructions[last].end_round() == prog_.instructions[queue_[p].front()].start_round)
                round[p] = WindowBuilder::kStall;
        }
        activity_.push_back(std::move(round));
    }

    bool device_done() const {
        for (const auto& q : queue_)
            if (!q.empty()) return false;
        return static_cast<int>(activity_.size()) > program_end_;
    }

    bool finished() {
        if (!quiescent_ || !dirty_.empty() || !wake_.empty()) return false;
        if (running_ > 0 || !fifo_.empty()) return false;
        grow_state();
        for (std::size_t c = 0; c < cells_.size(); ++c)
            if (!graph().cells[c].dead && cells_[c].status != Status::Final) return false;
        return true;
    }

    int next_event(int t) const {
        int next = std::numeric_limits<int>::max();
        if (!heap_.empty()) next = std::get<0>(heap_.top());
        if (!wake_.empty()) next = std::min(next, wake_.top().first);
        if (!dirty_.empty()) next = t + 1;
        if (next == std::numeric_limits<int>::max()) return t + 1;
        return std::max(next, t + 1);
    }

    const Program& prog_;
    SimConfig cfg_;
    int d_;
    WindowBuilder builder_;

    std::vector<std::deque<int>> queue_;
    std::vector<int> patch_free_, patch_delay_, patch_last_, current_;
    std::vector<int> start_, end_, resolved_;
    std::vector<char> fired_;
    std::vector<std::vector<int>> deps_;
    std::vector<int> blocking_;
    std::vector<std::vector<int>> activity_;
    int program_end_ = 0;
    bool finalized_ = false;
    bool newly_ended_ = false;
    bool quiescent_ = false;
    bool truncated_ = false;
    std::map<int, std::vector<int>> pending_;  // blocking op -> cells still to finalize

    std::vector<CellState> cells_;
    std::vector<FaceState> faces_;
    std::set<int> dirty_;
    std::priority_queue<std::pair<int, int>, std::vector<std::pair<int, int>>, std::greater<>> wake_;  // (spec_time, sink)
    std::deque<int> fifo_;
    std::priority_queue<std::tuple<int, int, int>, std::vector<std::tuple<int, int, int>>, std::greater<>> heap_;
    int running_ = 0;
    std::vector<int> occupancy_;
    std::vector<TaskRecord> tasks_;
    long long valid_ = 0, wasted_ = 0;
    int mispredictions_ = 0, speculations_ = 0;
    std::unique_ptr<PredictorBench> temporal_bench_, spatial_bench_;
};

}  // namespace

SimResult simulate(const Program& program, const SimConfig& cfg) {
    validate(cfg);
    if (auto diags = validate(program); !diags.empty()) throw ProgramError(std::move(diags));
    return Engine(program, cfg).run();
}

int reaction_time(const SimResult& result, int instruction) {
    for (const auto& op : result.blocking_ops)
        if (op.instruction == instruction) {
            if (op.resolved < 0)
                throw std::invalid_argument("reaction_time: instruction " + std::to_string(instruction) + " never resolved");
            return op.reaction();
        }
    throw std::invalid_argument("reaction_time: instruction " + std::to_string(instruction) + " is not a blocking op");
}

std::vector<int> reaction_times(const SimResult& result) {
    std::vector<int> out;
    for (const auto& op : result.blocking_ops)
        if (op.resolved >= 0) out.push_back(op.reaction());
    return out;
}

int heuristic_limit(double peak, double mean, double epsilon_spec) {
    return std::max(1, static_cast<int>(std::ceil(peak + epsilon_spec * mean - 1e-9)));
}

ProcessorReport processor_heuristic(const Program& program, const SimConfig& cfg) {
    SimConfig perfect = cfg;
    perfect.spec = SpecMode::Stochastic;
    perfect.accuracy = 1.0;
    perfect.accuracy_adjacent = 1.0;
    perfect.processors.reset();
    const SimResult r = simulate(program, perfect);
    ProcessorReport rep;
    rep.peak = r.peak_occupancy();
    rep.mean = r.mean_occupancy();
    rep.limit = heuristic_limit(rep.peak, rep.mean, 1.0 - cfg.accuracy);
    return rep;
}

bool same_timeline(const SimResult& a, const SimResult& b) {
    if (a.runtime_rounds != b.runtime_rounds || a.activity != b.activity || a.instruction_start != b.instruction_start)
        return false;
    if (a.blocking_ops.size() != b.blocking_ops.size()) return false;
    for (std::size_t i = 0; i < a.blocking_ops.size(); ++i) {
        const auto &x = a.blocking_ops[i], &y = b.blocking_ops[i];
        if (x.instruction != y.instruction || x.start != y.start || x.end != y.end || x.resolved != y.resolved)
            return false;
    }
    return true;
}

}  // namespace specdec
