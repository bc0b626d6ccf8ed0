#include "specdec/program.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace specdec {

namespace {

using nlohmann::json;

constexpr std::array<std::pair<InstructionKind, std::string_view>, 8> kKindNames{{
    {InstructionKind::Idle, "Idle"},
    {InstructionKind::MergeZZ, "MergeZZ"},
    {InstructionKind::MergeXX, "MergeXX"},
    {InstructionKind::Split, "Split"},
    {InstructionKind::TTeleport, "TTeleport"},
    {InstructionKind::Measure, "Measure"},
    {InstructionKind::SGate, "SGate"},
    {InstructionKind::YMeasure, "YMeasure"},
}};

std::string join_messages(const std::vector<Diagnostic>& diags) {
    std::ostringstream out;
    for (std::size_t i = 0; i < diags.size(); ++i) {
        if (i) out << "; ";
        out << diags[i].message;
    }
    return out.str();
}

[[noreturn]] void schema_error(std::string message, std::optional<int> index = std::nullopt) {
    throw ProgramError({Diagnostic{"schema", std::move(message), index}});
}

const json& require(const json& obj, const char* key, const std::string& where,
                    std::optional<int> index = std::nullopt) {
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(where + ": missing field '" + key + "'", index);
    return *it;
}

int require_int(const json& obj, const char* key, const std::string& where,
                std::optional<int> index = std::nullopt) {
    const json& v = require(obj, key, where, index);
    if (!v.is_number_integer()) schema_error(where + ": field '" + key + "' must be an integer", index);
    return v.get<int>();
}

}  // namespace

std::string_view to_string(InstructionKind kind) {
    for (auto [k, name] : kKindNames)
        if (k == kind) return name;
    return "?";
}

std::optional<InstructionKind> instruction_kind_from_string(std::string_view name) {
    for (auto [k, n] : kKindNames)
        if (n == name) return k;
    return std::nullopt;
}

int Program::static_end_round() const {
    int end = 0;
    for (const auto& ins : instructions) end = std::max(end, ins.end_round());
    return end;
}

int Program::count(InstructionKind kind) const {
    return static_cast<int>(std::count_if(instructions.begin(), instructions.end(),
                                          [kind](const Instruction& i) { return i.kind == kind; }));
}

ProgramError::ProgramError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join_messages(diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::vector<Diagnostic> validate(const Program& program) {
    std::vector<Diagnostic> diags;
    const int d = program.distance;
    if (d < 3) diags.push_back({"distance_min", "distance must be at least 3, got " + std::to_string(d), {}});
    if (d % 2 == 0) diags.push_back({"distance_parity", "distance must be odd, got " + std::to_string(d), {}});
    if (program.grid.rows < 1 || program.grid.cols < 1)
        diags.push_back({"grid", "grid dimensions must be positive", {}});
    if (!(program.round_time_us > 0.0)) diags.push_back({"round_time", "round_time_us must be positive", {}});

    const int n = static_cast<int>(program.instructions.size());
    // (patch index) -> list of (start, end, instruction index)
    std::map<int, std::vector<std::array<int, 3>>> occupancy;
    for (int i = 0; i < n; ++i) {
        const Instruction& ins = program.instructions[i];
        const std::string where = "instruction " + std::to_string(i);
        if (ins.duration < 1)
            diags.push_back({"duration", where + ": duration must be >= 1", i});
        if (ins.start_round < 0)
            diags.push_back({"start_round", where + ": start_round must be >= 0", i});
        if (ins.patches.empty())
            diags.push_back({"empty_patches", where + ": patch list is empty", i});
        if (ins.kind == InstructionKind::TTeleport && !ins.blocking)
            diags.push_back({"teleport_nonblocking", where + ": TTeleport must be blocking", i});
        if (ins.conditional_on) {
            if (ins.kind != InstructionKind::SGate) {
                diags.push_back({"conditional_kind", where + ": conditional_on is only allowed on SGate", i});
            } else if (*ins.conditional_on < 0 || *ins.conditional_on >= i) {
                diags.push_back({"dangling_conditional",
                                 where + ": dangling conditional reference to instruction " +
                                     std::to_string(*ins.conditional_on),
                                 i});
            } else if (!program.instructions[*ins.conditional_on].blocking) {
                diags.push_back({"conditional_target",
                                 where + ": conditional_on must name a blocking instruction", i});
            }
        }
        std::vector<PatchId> seen;
        for (const PatchId& p : ins.patches) {
            if (p.row < 0 || p.col < 0 || p.row >= program.grid.rows || p.col >= program.grid.cols) {
                diags.push_back({"patch_out_of_grid", where + ": patch (" + std::to_string(p.row) + "," +
                                                          std::to_string(p.col) + ") outside grid",
                                 i});
                continue;
            }
            if (std::find(seen.begin(), seen.end(), p) != seen.end()) {
                diags.push_back({"duplicate_patch", where + ": patch listed twice", i});
                continue;
            }
            seen.push_back(p);
            if (ins.duration >= 1)
                occupancy[program.patch_index(p)].push_back({ins.start_round, ins.end_round(), i});
        }
    }

    for (auto& [patch, spans] : occupancy) {
        std::sort(spans.begin(), spans.end());
        for (std::size_t k = 1; k < spans.size(); ++k) {
            // Compare against every earlier span still open at this start.
            for (std::size_t j = 0; j < k; ++j) {
                if (spans[j][1] > spans[k][0]) {
                    const PatchId p = program.patch_at(patch);
                    diags.push_back({"overlap",
                                     "instructions " + std::to_string(spans[j][2]) + " and " +
                                         std::to_string(spans[k][2]) + " overlap on patch (" +
                                         std::to_string(p.row) + "," + std::to_string(p.col) + ")",
                                     spans[k][2]});
                }
            }
        }
    }
    return diags;
}

Program parse_program(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        schema_error(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) schema_error("document: top level must be an object");

    const int format = require_int(doc, "format", "document");
    if (format != 1) schema_error("document: unsupported format " + std::to_string(format));

    Program program;
    program.distance = require_int(doc, "distance", "document");
    const json& grid = require(doc, "grid", "document");
    if (!grid.is_object()) schema_error("document: 'grid' must be an object");
    program.grid.rows = require_int(grid, "rows", "grid");
    program.grid.cols = require_int(grid, "cols", "grid");
    if (auto it = doc.find("round_time_us"); it != doc.end()) {
        if (!it->is_number()) schema_error("document: 'round_time_us' must be a number");
        program.round_time_us = it->get<double>();
    }

    const json& list = require(doc, "instructions", "document");
    if (!list.is_array()) schema_error("document: 'instructions' must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const int idx = static_cast<int>(i);
        const json& item = list[i];
        const std::string where = "instruction " + std::to_string(i);
        if (!item.is_object()) schema_error(where + ": must be an object", idx);

        Instruction ins;
        const json& kind = require(item, "kind", where, idx);
        if (!kind.is_string()) schema_error(where + ": 'kind' must be a string", idx);
        auto k = instruction_kind_from_string(kind.get<std::string>());
        if (!k) schema_error(where + ": unknown kind '" + kind.get<std::string>() + "'", idx);
        ins.kind = *k;

        const json& patches = require(item, "patches", where, idx);
        if (!patches.is_array()) schema_error(where + ": 'patches' must be an array", idx);
        for (const json& p : patches) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer())
                schema_error(where + ": each patch must be a [row, col] integer pair", idx);
            ins.patches.push_back({p[0].get<int>(), p[1].get<int>()});
        }
        ins.start_round = require_int(item, "start_round", where, idx);
        ins.duration = require_int(item, "duration", where, idx);
        ins.blocking = ins.kind == InstructionKind::TTeleport;
        if (auto it = item.find("blocking"); it != item.end()) {
            if (!it->is_boolean()) schema_error(where + ": 'blocking' must be a boolean", idx);
            ins.blocking = it->get<bool>();
        }
        if (auto it = item.find("conditional_on"); it != item.end() && !it->is_null()) {
            if (!it->is_number_integer()) schema_error(where + ": 'conditional_on' must be an integer", idx);
            ins.conditional_on = it->get<int>();
        }
        program.instructions.push_back(std::move(ins));
    }

    if (auto diags = validate(program); !diags.empty()) throw ProgramError(std::move(diags));
    return program;
}

Program load_program(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ProgramError({Diagnostic{"io", "cannot open program file '" + path + "'", {}}});
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_program(buf.str());
}

std::string serialize_program(const Program& program) {
    json doc;
    doc["format"] = 1;
    doc["distance"] = program.distance;
    doc["grid"] = {{"rows", program.grid.rows}, {"cols", program.grid.cols}};
    doc["round_time_us"] = program.round_time_us;
    json list = json::array();
    for (const Instruction& ins : program.instructions) {
        json item;
        item["kind"] = std::string(to_string(ins.kind));
        json patches = json::array();
        for (const PatchId& p : ins.patches) patches.push_back({p.row, p.col});
        item["patches"] = std::move(patches);
        item["start_round"] = ins.start_round;
        item["duration"] = ins.duration;
        if (ins.blocking != (ins.kind == InstructionKind::TTeleport)) item["blocking"] = ins.blocking;
        if (ins.conditional_on) item["conditional_on"] = *ins.conditional_on;
        list.push_back(std::move(item));
    }
    doc["instructions"] = std::move(list);
    return doc.dump(2) + "\n";
}

}  // namespace specdec
