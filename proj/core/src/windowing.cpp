#include "specdec/windowing.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <stdexcept>

#include "json.hpp"

namespace specdec {

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::Sliding: return "sliding";
        case Strategy::Parallel: return "parallel";
        case Strategy::Aligned: return "aligned";
    }
    return "?";
}

std::optional<Strategy> strategy_from_string(std::string_view s) {
    if (s == "sliding") return Strategy::Sliding;
    if (s == "parallel") return Strategy::Parallel;
    if (s == "aligned") return Strategy::Aligned;
    return std::nullopt;
}

std::string_view to_string(CellType t) {
    switch (t) {
        case CellType::Source: return "source";
        case CellType::Sink: return "sink";
        case CellType::Sliding: return "sliding";
    }
    return "?";
}

WindowBuilder::WindowBuilder(const Program& program, Strategy strategy)
    : program_(program), strategy_(strategy), d_(program.distance), patches_(program.patch_count()) {
    graph_.strategy = strategy;
    graph_.distance = d_;
}

CellType WindowBuilder::next_type(int patch) const {
    if (strategy_ == Strategy::Sliding) return CellType::Sliding;
    const int prev = patches_[patch].last_closed;
    if (prev < 0) {
        const PatchId id = program_.patch_at(patch);
        return (id.row + id.col) % 2 == 0 ? CellType::Source : CellType::Sink;
    }
    return graph_.cells[prev].type == CellType::Source ? CellType::Sink : CellType::Source;
}

int WindowBuilder::open_cell(int patch, int t0, CellType type, int target) {
    PatchState& st = patches_[patch];
    WindowCell c;
    c.id = static_cast<int>(graph_.cells.size());
    c.patch = patch;
    c.t0 = c.t1 = t0;
    c.type = type;
    c.segment = st.segment;
    c.ordinal = st.ordinals++;
    c.target = target;
    c.prev = st.last_closed;
    if (c.prev >= 0) graph_.cells[c.prev].next = c.id;
    st.live.push_back(c.id);
    st.open = c.id;
    graph_.cells.push_back(std::move(c));
    return st.open;
}

void WindowBuilder::close_cell(int id, int t1) {
    WindowCell& c = graph_.cells[id];
    PatchState& st = patches_[c.patch];
    c.t1 = t1;
    c.closed = true;
    st.open = -1;
    st.last_closed = id;
    waiting_.push_back(id);
}

// Splits a closed source cell into a source head and a sink tail ending at the old end.
void WindowBuilder::split_cell(int id, int at) {
    PatchState& st = patches_[graph_.cells[id].patch];
    WindowCell tail;
    tail.id = static_cast<int>(graph_.cells.size());
    tail.patch = graph_.cells[id].patch;
    tail.t0 = at;
    tail.t1 = graph_.cells[id].t1;
    tail.type = CellType::Sink;
    tail.segment = graph_.cells[id].segment;
    tail.ordinal = st.ordinals++;
    tail.target = tail.t1 - tail.t0;
    tail.closed = true;
    tail.prev = id;
    tail.next = graph_.cells[id].next;
    graph_.cells[id].t1 = at;
    graph_.cells[id].next = tail.id;
    auto pos = std::find(st.live.begin(), st.live.end(), id);
    st.live.insert(pos + 1, tail.id);
    if (st.last_closed == id) st.last_closed = tail.id;
    waiting_.push_back(tail.id);
    graph_.cells.push_back(std::move(tail));
}

// A one-round source in front of a blocking instruction: fold it into the
// preceding sink, or turn it into a sink when it opens the segment.
void WindowBuilder::absorb_into_prev(int id) {
    WindowCell& c = graph_.cells[id];
    PatchState& st = patches_[c.patch];
    const int q = c.prev;
    if (q < 0 || graph_.cells[q].type != CellType::Sink || graph_.cells[q].anchored) {
        c.type = CellType::Sink;
        return;
    }
    WindowCell& prev = graph_.cells[q];
    prev.t1 = c.t1;
    prev.next = c.next;
    c.dead = true;
    st.live.erase(std::find(st.live.begin(), st.live.end(), id));
    waiting_.erase(std::remove(waiting_.begin(), waiting_.end(), id), waiting_.end());
    if (st.last_closed == id) st.last_closed = q;
}

void WindowBuilder::align_for_blocking(int patch, int round, int duration) {
    PatchState& st = patches_[patch];
    if (st.open >= 0) {
        const int o = st.open;
        const int g = round - graph_.cells[o].t0;
        const CellType type = graph_.cells[o].type;
        close_cell(o, round);
        if (type == CellType::Source) {
            if (g >= 2)
                split_cell(o, graph_.cells[o].t0 + (g + 1) / 2);
            else
                absorb_into_prev(o);
        }
    } else if (st.last_closed >= 0) {
        const int p = st.last_closed;
        const WindowCell& prev = graph_.cells[p];
        if (prev.type == CellType::Source) {
            // Two blocking instructions back to back: the earlier one keeps its alignment.
            if (prev.anchored) return;
            if (prev.length() >= 2)
                split_cell(p, prev.t0 + (prev.length() + 1) / 2);
            else
                absorb_into_prev(p);
        }
    }
    const int id = open_cell(patch, round, CellType::Source, duration);
    graph_.cells[id].anchored = true;
}

void WindowBuilder::ingest(const std::vector<int>& activity) {
    if (static_cast<int>(activity.size()) != program_.patch_count())
        throw std::invalid_argument("WindowBuilder: activity size mismatch");
    newly_ready_.clear();
    const int t = now_;
    for (int p = 0; p < program_.patch_count(); ++p) {
        PatchState& st = patches_[p];
        const int a = activity[p];
        if (a == kInactive) {
            if (st.in_segment) {
                if (st.open >= 0) close_cell(st.open, t);
                st.in_segment = false;
                segments_[st.segment].ended = true;
                segments_[st.segment].end = t;
                st.last_closed = -1;
            }
            st.last_instruction = a;
            continue;
        }
        if (!st.in_segment) {
            st.segment = static_cast<int>(segments_.size());
            segments_.push_back({p, t, -1, false});
            st.in_segment = true;
            st.last_closed = -1;
        }
        if (strategy_ == Strategy::Aligned && a >= 0 && a != st.last_instruction && program_.instructions[a].blocking)
            align_for_blocking(p, t, program_.instructions[a].duration);
        if (st.open < 0) open_cell(p, t, next_type(p), d_);
        WindowCell& c = graph_.cells[st.open];
        c.t1 = t + 1;
        if (c.length() >= c.target) close_cell(c.id, t + 1);
        st.last_instruction = a;
    }

    // Patches joined by a merge share a spatial face for every merged round.
    for (int p = 0; p < program_.patch_count(); ++p) {
        const int a = activity[p];
        if (a < 0 || !is_merge(program_.instructions[a].kind)) continue;
        const PatchId pp = program_.patch_at(p);
        for (const PatchId& qq : program_.instructions[a].patches) {
            const int q = program_.patch_index(qq);
            if (q <= p || activity[q] != a) continue;
            if (std::abs(pp.row - qq.row) + std::abs(pp.col - qq.col) != 1) continue;
            pending_.push_back({p, q, t, pp.row == qq.row ? FaceAxis::Row : FaceAxis::Column});
        }
    }
    now_ = t + 1;
    settle();
    evaluate_ready();
}

void WindowBuilder::finish() {
    std::vector<int> idle(program_.patch_count(), kInactive);
    ingest(idle);
}

int WindowBuilder::cell_at(int patch, int round) const {
    const auto& live = patches_[patch].live;
    auto it = std::upper_bound(live.begin(), live.end(), round,
                               [&](int r, int id) { return r < graph_.cells[id].t0; });
    if (it == live.begin()) return -1;
    const int id = *(it - 1);
    return round < graph_.cells[id].t1 ? id : -1;
}

std::vector<int> WindowBuilder::cells_before(int patch, int round) const {
    std::vector<int> out;
    for (int id : patches_[patch].live) {
        if (graph_.cells[id].t0 >= round) break;
        out.push_back(id);
    }
    return out;
}

bool WindowBuilder::segment_ended(int id) const { return segments_[graph_.cells[id].segment].ended; }

// Aligned re-cutting only touches unanchored cells closed within the last two rounds.
bool WindowBuilder::stable(int id) const {
    const WindowCell& c = graph_.cells[id];
    if (c.dead) return false;
    if (strategy_ != Strategy::Aligned || c.anchored) return true;
    return c.closed && (now_ >= c.t1 + 2 || segment_ended(id));
}

bool WindowBuilder::faces_complete(int id) const {
    const WindowCell& c = graph_.cells[id];
    if (!stable(id)) return false;
    auto has = [&](int a, int b) { return face_index_.count({std::min(a, b), std::max(a, b)}) > 0; };
    if (c.prev >= 0 && !has(c.prev, id)) return false;
    if (c.next >= 0 ? !has(id, c.next) : !segment_ended(id)) return false;
    for (const Contact& k : pending_)
        if ((k.p == c.patch || k.q == c.patch) && k.round >= c.t0 && k.round < c.t1) return false;
    return true;
}

bool WindowBuilder::reaches(int from, int to) const {
    std::vector<char> seen(graph_.cells.size(), 0);
    std::vector<int> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
        const int n = stack.back();
        stack.pop_back();
        if (n == to) return true;
        for (int f : graph_.cells[n].out_faces) {
            const int m = graph_.faces[f].sink;
            if (!seen[m]) {
                seen[m] = 1;
                stack.push_back(m);
            }
        }
    }
    return false;
}

void WindowBuilder::add_face(int a, int b, FaceAxis axis, bool temporal) {
    const WindowCell& ca = graph_.cells[a];
    const WindowCell& cb = graph_.cells[b];
    int owner;
    if (strategy_ == Strategy::Sliding) {
        owner = temporal ? a : (ca.patch < cb.patch ? a : b);
    } else if (ca.type == CellType::Source && cb.type != CellType::Source) {
        owner = a;
    } else if (cb.type == CellType::Source && ca.type != CellType::Source) {
        owner = b;
    } else if (temporal) {
        owner = a;
    } else {
        // Mixed cell: the checkerboard colour decides.
        const PatchId pa = program_.patch_at(ca.patch);
        owner = (pa.row + pa.col) % 2 == 0 ? a : b;
    }
    int sink = owner == a ? b : a;
    Face f;
    f.id = static_cast<int>(graph_.faces.size());
    if (reaches(sink, owner)) {
        std::swap(owner, sink);
        f.flipped = true;
    }
    f.source = owner;
    f.sink = sink;
    f.axis = axis;
    graph_.cells[owner].out_faces.push_back(f.id);
    graph_.cells[sink].in_faces.push_back(f.id);
    face_index_[{std::min(a, b), std::max(a, b)}] = f.id;
    graph_.faces.push_back(f);
}

void WindowBuilder::settle() {
    for (std::size_t i = 0; i < pending_.size();) {
        const Contact k = pending_[i];
        const int a = cell_at(k.p, k.round), b = cell_at(k.q, k.round);
        if (a < 0 || b < 0 || !stable(a) || !stable(b)) {
            ++i;
            continue;
        }
        auto it = face_index_.find({std::min(a, b), std::max(a, b)});
        const int f = it != face_index_.end() ? it->second : (add_face(a, b, k.axis, false), graph_.faces.back().id);
        ++graph_.faces[f].overlap;
        pending_.erase(pending_.begin() + static_cast<long>(i));
    }
    for (int id : waiting_) {
        const WindowCell& c = graph_.cells[id];
        for (auto [a, b] : {std::pair{c.prev, id}, std::pair{id, c.next}}) {
            if (a < 0 || b < 0 || face_index_.count({std::min(a, b), std::max(a, b)})) continue;
            // The cell after an anchored source is never re-cut at their shared boundary.
            const bool settled_after_anchor = graph_.cells[a].anchored && !graph_.cells[b].dead;
            if (stable(a) && (stable(b) || settled_after_anchor)) add_face(a, b, FaceAxis::Temporal, true);
        }
    }
}

void WindowBuilder::evaluate_ready() {
    for (std::size_t i = 0; i < waiting_.size();) {
        const int id = waiting_[i];
        WindowCell& c = graph_.cells[id];
        bool ok = faces_complete(id);
        const Segment& seg = segments_[c.segment];
        const int generated_to = seg.ended ? seg.end : now_;
        double volume = static_cast<double>(c.length()) / d_;
        for (int f : c.out_faces) {
            if (!ok) break;
            const Face& face = graph_.faces[f];
            if (face.axis != FaceAxis::Temporal) {
                volume += static_cast<double>(face.overlap) / d_;
            } else if (face.sink == c.next) {
                if (!seg.ended && now_ < c.t1 + d_) ok = false;
                volume += static_cast<double>(std::min(d_, generated_to - c.t1)) / d_;
            } else {
                volume += static_cast<double>(std::min(d_, c.t0 - seg.start)) / d_;
            }
        }
        if (!ok) {
            ++i;
            continue;
        }
        c.ready_round = now_;
        c.volume = volume;
        newly_ready_.push_back(id);
        waiting_.erase(waiting_.begin() + static_cast<long>(i));
    }
}

std::vector<std::vector<int>> static_activity(const Program& program) {
    const int horizon = program.static_end_round();
    std::vector<std::vector<int>> act(horizon, std::vector<int>(program.patch_count(), WindowBuilder::kInactive));
    for (int i = 0; i < static_cast<int>(program.instructions.size()); ++i) {
        const Instruction& ins = program.instructions[i];
        for (int t = ins.start_round; t < ins.end_round(); ++t)
            for (const PatchId& p : ins.patches) act[t][program.patch_index(p)] = i;
    }
    return act;
}

WindowGraph assign_boundaries(const Program& program, Strategy strategy) {
    WindowBuilder builder(program, strategy);
    for (const auto& round : static_activity(program)) builder.ingest(round);
    builder.finish();
    return builder.graph();
}

std::vector<WindowCell> build_window_cells(const Program& program) {
    std::vector<WindowCell> out;
    for (const WindowCell& c : assign_boundaries(program, Strategy::Sliding).cells)
        if (!c.dead) out.push_back(c);
    return out;
}

int ready_round(const WindowGraph& graph, int cell) { return graph.cells.at(cell).ready_round; }

int dependency_depth(const WindowGraph& graph) {
    std::vector<int> memo(graph.cells.size(), -1);
    std::function<int(int)> depth = [&](int id) {
        if (memo[id] >= 0) return memo[id];
        int best = 0;
        for (int f : graph.cells[id].out_faces) best = std::max(best, 1 + depth(graph.faces[f].sink));
        return memo[id] = best;
    };
    int best = 0;
    for (const WindowCell& c : graph.cells)
        if (!c.dead) best = std::max(best, depth(c.id));
    return best;
}

std::string window_graph_to_json(const WindowGraph& graph) {
    using nlohmann::json;
    json doc;
    doc["strategy"] = std::string(to_string(graph.strategy));
    doc["distance"] = graph.distance;
    json cells = json::array();
    for (const WindowCell& c : graph.cells) {
        if (c.dead) continue;
        cells.push_back({{"id", c.id},
                         {"patch", c.patch},
                         {"t0", c.t0},
                         {"t1", c.t1},
                         {"type", std::string(to_string(c.type))},
                         {"anchored", c.anchored},
                         {"ready_round", c.ready_round},
                         {"volume", c.volume}});
    }
    doc["cells"] = std::move(cells);
    json faces = json::array();
    for (const Face& f : graph.faces) {
        const char* axis = f.axis == FaceAxis::Temporal ? "temporal" : f.axis == FaceAxis::Row ? "row" : "column";
        faces.push_back({{"id", f.id},
                         {"source", f.source},
                         {"sink", f.sink},
                         {"axis", axis},
                         {"overlap", f.overlap},
                         {"flipped", f.flipped}});
    }
    doc["faces"] = std::move(faces);
    return doc.dump(2) + "\n";
}

}  // namespace specdec
