#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>

#include "dmvrp/aggregate.hpp"

namespace dmvrp {

// One panel of five sub-grids (e_over, e_under, regret_over, regret_under,
// rate), epochs top-down on the y axis, capacity buckets on the x axis,
// captioned "prof | cons | loc | rev". Self-contained deterministic SVG.
std::string render_heatmap_panel(const Setting& setting, std::string_view policy,
                                 const std::array<Heatmap, 5>& heatmaps);

// Weighted error ratio (x) against mean relative optimality gap (y), one
// point per (setting, policy); summaries without regret are omitted and
// counted in a legend note.
std::string render_scatter(std::span<const SettingSummary> summaries);

}  // namespace dmvrp
