#pragma once

#include <string>

#include "specdec/pipeline.hpp"
#include "specdec/program.hpp"

namespace specdec {

// Activity label of one patch in one round: instruction kind name, "stall" or "inactive".
std::string activity_label(const Program& program, int activity);

std::string result_to_json(const Program& program, const SimConfig& cfg, const SimResult& result);
// Header "round,patch_row,patch_col,label"; one row per (round, patch).
std::string trace_csv(const Program& program, const SimResult& result);
// Spacetime diagram: one column per patch, one row per round.
std::string trace_svg(const Program& program, const SimResult& result);

}  // namespace specdec
