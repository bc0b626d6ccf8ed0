#include "specdec/report.hpp"

#include <map>
#include <sstream>

#include "json.hpp"

namespace specdec {

std::string activity_label(const Program& program, int activity) {
    if (activity == WindowBuilder::kInactive) return "inactive";
    if (activity == WindowBuilder::kStall) return "stall";
    return std::string(to_string(program.instructions.at(activity).kind));
}

std::string result_to_json(const Program& program, const SimConfig& cfg, const SimResult& r) {
    using nlohmann::json;
    json ops = json::array();
    for (const auto& op : r.blocking_ops)
        ops.push_back({{"instruction", op.instruction},
                       {"start", op.start},
                       {"end", op.end},
                       {"resolved", op.resolved >= 0 ? json(op.resolved) : json(nullptr)},
                       {"reaction", op.resolved >= 0 ? json(op.reaction()) : json(nullptr)}});
    const int d = program.distance;
    json doc = {
        {"distance", d},
        {"config",
         {{"strategy", to_string(cfg.strategy)},
          {"spec", to_string(cfg.spec)},
          {"accuracy", cfg.accuracy},
          {"accuracy_adjacent", cfg.accuracy_adjacent},
          {"t_spec", cfg.t_spec},
          {"recovery", to_string(cfg.recovery)},
          {"latency", describe(cfg.latency)},
          {"processors", r.processor_limit < 0 ? json("unlimited") : json(r.processor_limit)},
          {"seed", cfg.seed}}},
        {"truncated", r.truncated},
        {"runtime_rounds", r.runtime_rounds},
        {"runtime_d", static_cast<double>(r.runtime_rounds) / d},
        {"runtime_us", r.runtime_us},
        {"blocking_ops", ops},
        {"valid_compute", r.valid_compute},
        {"wasted_compute", r.wasted_compute},
        {"mispredictions", r.mispredictions},
        {"speculations", r.speculations},
        {"peak_occupancy", r.peak_occupancy()},
        {"mean_occupancy", r.mean_occupancy()},
        {"occupancy", r.occupancy},
        {"windows", r.windows.cells.size()},
    };
    return doc.dump(2);
}

std::string trace_csv(const Program& program, const SimResult& r) {
    std::ostringstream out;
    out << "round,patch_row,patch_col,label\n";
    for (std::size_t t = 0; t < r.activity.size(); ++t)
        for (int p = 0; p < program.patch_count(); ++p) {
            const PatchId id = program.patch_at(p);
            out << t << ',' << id.row << ',' << id.col << ',' << activity_label(program, r.activity[t][p]) << '\n';
        }
    return out.str();
}

std::string trace_svg(const Program& program, const SimResult& r) {
    static const std::map<std::string, std::string> colors = {
        {"Idle", "#c8d7e6"},    {"MergeZZ", "#f2b134"},  {"MergeXX", "#e68a2e"}, {"Split", "#9b9b9b"},
        {"TTeleport", "#d64545"}, {"Measure", "#4a7fb5"}, {"SGate", "#7b4ab5"},  {"YMeasure", "#2e9e6b"},
        {"stall", "#f5e663"},
    };
    const int cell = 4;
    const int cols = program.patch_count();
    const int rows = static_cast<int>(r.activity.size());
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * cell << "\" height=\"" << rows * cell
        << "\">\n";
    for (int t = 0; t < rows; ++t)
        for (int p = 0; p < cols; ++p) {
            const int a = r.activity[t][p];
            if (a == WindowBuilder::kInactive) continue;
            out << "<rect x=\"" << p * cell << "\" y=\"" << t * cell << "\" width=\"" << cell << "\" height=\"" << cell
                << "\" fill=\"" << colors.at(activity_label(program, a)) << "\"/>\n";
        }
    out << "</svg>\n";
    return out.str();
}

}  // namespace specdec
