#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specdec/decoding_graph.hpp"
#include "specdec/program.hpp"

namespace specdec {

enum class Strategy { Sliding, Parallel, Aligned };

std::string_view to_string(Strategy s);
std::optional<Strategy> strategy_from_string(std::string_view s);

// Sliding cells sink their past face and source their future face.
enum class CellType { Source, Sink, Sliding };

std::string_view to_string(CellType t);

enum class FaceAxis { Temporal, Row, Column };  // spatial faces: neighbour in same row / same column

struct Face {
    int id = 0;
    int source = 0;  // buffer owner, decodes first
    int sink = 0;
    FaceAxis axis = FaceAxis::Temporal;
    int overlap = 0;  // shared rounds (spatial) or 0 (temporal)
    bool flipped = false;  // orientation reversed to keep the graph acyclic

    Orientation orientation() const { return axis == FaceAxis::Temporal ? Orientation::Temporal : Orientation::Spatial; }
};

// Faces meet at an edge of the cell: different orientations, or perpendicular spatial faces.
inline bool faces_adjacent(const Face& a, const Face& b) {
    if (a.orientation() != b.orientation()) return true;
    return a.axis != FaceAxis::Temporal && a.axis != b.axis;
}

struct WindowCell {
    int id = 0;
    int patch = 0;
    int t0 = 0;
    int t1 = 0;  // one past the last round (current extent while open)
    CellType type = CellType::Source;
    int segment = 0;
    int ordinal = 0;  // creation order within the patch; stable key for random draws
    int target = 0;   // length at which the open cell closes
    bool closed = false;
    bool dead = false;       // absorbed into a neighbour by aligned re-cutting
    bool anchored = false;   // aligned cell ending a blocking instruction
    int prev = -1;           // temporal neighbours within the activity segment
    int next = -1;
    int ready_round = -1;    // data incl. owned buffers generated and all faces known
    double volume = 0.0;     // units of d^3, fixed at ready time
    std::vector<int> in_faces;
    std::vector<int> out_faces;

    int length() const { return t1 - t0; }
};

struct WindowGraph {
    Strategy strategy = Strategy::Parallel;
    int distance = 3;
    std::vector<WindowCell> cells;  // dead cells are kept (flagged) so ids stay stable
    std::vector<Face> faces;
};

// Cuts the spacetime volume into cells online, one round at a time, and
// orients the shared faces once both sides are settled.
class WindowBuilder {
public:
    static constexpr int kInactive = -2;
    static constexpr int kStall = -1;

    WindowBuilder(const Program& program, Strategy strategy);

    // activity[p]: instruction index executing on patch p in round t, kStall for
    // an inserted idle round, kInactive when the patch holds no live qubit.
    // Rounds must be fed in order starting at 0.
    void ingest(const std::vector<int>& activity);
    // Closes every open cell (end of the program).
    void finish();

    int now() const { return now_; }
    const WindowGraph& graph() const { return graph_; }
    const WindowCell& cell(int id) const { return graph_.cells[id]; }
    const Face& face(int id) const { return graph_.faces[id]; }
    // Cells that became ready during the latest ingest/finish call.
    const std::vector<int>& newly_ready() const { return newly_ready_; }
    // Cells on `patch` with t0 below `round`, all live.
    std::vector<int> cells_before(int patch, int round) const;
    bool patch_open(int patch) const { return patches_[patch].open >= 0 || patches_[patch].in_segment; }

private:
    struct PatchState {
        bool in_segment = false;
        int segment = -1;
        int open = -1;          // open cell id
        int last_closed = -1;   // most recent closed cell in the current segment
        int last_instruction = kInactive;
        int ordinals = 0;
        std::vector<int> live;  // live cell ids in time order
    };
    struct Contact {
        int p, q, round;
        FaceAxis axis;
    };
    struct Segment {
        int patch = 0;
        int start = 0;
        int end = -1;
        bool ended = false;
    };

    int open_cell(int patch, int t0, CellType type, int target);
    void close_cell(int id, int t1);
    void split_cell(int id, int at);
    void absorb_into_prev(int id);
    void align_for_blocking(int patch, int round, int duration);
    CellType next_type(int patch) const;
    int cell_at(int patch, int round) const;
    bool stable(int id) const;
    bool segment_ended(int id) const;
    bool faces_complete(int id) const;
    void settle();
    void add_face(int a, int b, FaceAxis axis, bool temporal);
    bool reaches(int from, int to) const;
    void evaluate_ready();

    const Program& program_;
    Strategy strategy_;
    int d_;
    int now_ = 0;
    std::vector<PatchState> patches_;
    std::vector<Segment> segments_;
    std::vector<Contact> pending_;
    std::map<std::pair<int, int>, int> face_index_;
    std::vector<int> waiting_;  // closed live cells not yet ready
    std::vector<int> newly_ready_;
    WindowGraph graph_;
};

// Per-round activity of the program executed exactly as scheduled.
std::vector<std::vector<int>> static_activity(const Program& program);

// Tiles the statically scheduled program and orients all faces.
WindowGraph assign_boundaries(const Program& program, Strategy strategy);
// Tiling alone (fixed d-round cells); boundary types are those of the sliding strategy.
std::vector<WindowCell> build_window_cells(const Program& program);
int ready_round(const WindowGraph& graph, int cell);
// Longest dependency path, in edges.
int dependency_depth(const WindowGraph& graph);
std::string window_graph_to_json(const WindowGraph& graph);

}  // namespace specdec
