#pragma once

#include <string>

#include "tilefuse/scheduler.hpp"

namespace tilefuse {

/// {"n", "tile_size_t", "wavefronts": [[{"i_lo","i_hi","j_list","cost"}]],
///  "fused_ratio"}
std::string schedule_to_json(const FusedSchedule& sched);

/// Inverse of schedule_to_json; throws std::runtime_error on malformed
/// input. fused_ratio is ignored on load (it is derived).
FusedSchedule schedule_from_json(const std::string& text);

}  // namespace tilefuse
