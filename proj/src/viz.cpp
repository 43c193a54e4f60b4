#include "dmvrp/viz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace dmvrp {

namespace {

constexpr int kCell = 16;
constexpr int kGridGap = 34;
constexpr int kMarginLeft = 46;
constexpr int kMarginTop = 56;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// White -> dark blue, monotone in the normalized value.
std::string cell_color(double value, double max_value) {
    if (max_value <= 0.0) return "#ffffff";
    const double x = std::clamp(value / max_value, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(255.0 + x * (33.0 - 255.0)));
    const int g = static_cast<int>(std::lround(255.0 + x * (102.0 - 255.0)));
    const int b = static_cast<int>(std::lround(255.0 + x * (172.0 - 255.0)));
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

void append_text(std::string& svg, double x, double y, std::string_view anchor, int size,
                 std::string_view text) {
    svg += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"monospace\" font-size=\"" +
           std::to_string(size) + "\" text-anchor=\"" + std::string(anchor) + "\">" +
           std::string(text) + "</text>\n";
}

void append_rect(std::string& svg, double x, double y, double w, double h, const std::string& fill,
                 bool stroke) {
    svg += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" +
           num(h) + "\" fill=\"" + fill + "\"";
    if (stroke) svg += " stroke=\"#cccccc\" stroke-width=\"0.5\"";
    svg += "/>\n";
}

std::string policy_color(std::string_view policy) {
    if (policy == "dpc") return "#1b9e77";
    if (policy == "mcts") return "#d95f02";
    if (policy == "myopic") return "#7570b3";
    return "#666666";
}

}  // namespace

std::string render_heatmap_panel(const Setting& setting, std::string_view policy,
                                 const std::array<Heatmap, 5>& heatmaps) {
    const int T = heatmaps[0].horizon;
    const int grid_w = kCapacityBuckets * kCell;
    const int grid_h = T * kCell;
    const int width = kMarginLeft + 5 * grid_w + 4 * kGridGap + 20;
    const int height = kMarginTop + grid_h + 56;

    std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
           " " + std::to_string(height) + "\">\n";
    append_rect(svg, 0, 0, width, height, "#ffffff", false);
    append_text(svg, kMarginLeft, 20, "start", 13,
                std::string(setting.caption()) + "  (" + std::string(policy) + ")");

    for (std::size_t k = 0; k < heatmaps.size(); ++k) {
        const Heatmap& hm = heatmaps[k];
        const double x0 = kMarginLeft + static_cast<double>(k) * (grid_w + kGridGap);
        append_text(svg, x0, kMarginTop - 8, "start", 11, label(hm.metric));
        const double vmax = hm.max_value();
        for (int t = 1; t <= T; ++t) {
            for (int b = 0; b < kCapacityBuckets; ++b) {
                // Epoch 1 on top; cells never observed render light gray.
                const double x = x0 + b * kCell;
                const double y = kMarginTop + (t - 1) * kCell;
                const std::string fill =
                    hm.has_value(t, b) ? cell_color(hm.value(t, b), vmax) : "#eeeeee";
                append_rect(svg, x, y, kCell, kCell, fill, true);
            }
            if (k == 0)
                append_text(svg, x0 - 6, kMarginTop + (t - 1) * kCell + kCell * 0.72, "end", 9,
                            std::to_string(t));
        }
        append_text(svg, x0, kMarginTop + grid_h + 14, "start", 9, "0");
        append_text(svg, x0 + grid_w, kMarginTop + grid_h + 14, "end", 9, "100%");
        append_text(svg, x0 + grid_w / 2.0, kMarginTop + grid_h + 28, "middle", 9, "capacity");
        append_text(svg, x0 + grid_w, kMarginTop - 8, "end", 9, "max " + num(vmax));
    }
    append_text(svg, kMarginLeft - 34, kMarginTop + grid_h / 2.0, "middle", 9, "epoch");
    svg += "</svg>\n";
    return svg;
}

std::string render_scatter(std::span<const SettingSummary> summaries) {
    const int width = 640, height = 440;
    const double x0 = 70, y0 = 40, plot_w = 500, plot_h = 320;

    double max_gap = 0.0;
    std::map<std::string, int> omitted;
    for (const SettingSummary& sum : summaries) {
        omitted.emplace(std::string(label(sum.policy)), 0);
        if (sum.error_ratio())
            max_gap = std::max(max_gap, sum.mean_gap);
        else
            omitted[std::string(label(sum.policy))] += 1;
    }
    if (max_gap <= 0.0) max_gap = 1.0;
    max_gap *= 1.05;

    std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
           " " + std::to_string(height) + "\">\n";
    append_rect(svg, 0, 0, width, height, "#ffffff", false);
    append_rect(svg, x0, y0, plot_w, plot_h, "#fafafa", true);
    for (int i = 0; i <= 10; ++i) {
        const double gx = x0 + plot_w * i / 10.0;
        svg += "<line x1=\"" + num(gx) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(gx) + "\" y2=\"" +
               num(y0 + plot_h) + "\" stroke=\"#e0e0e0\" stroke-width=\"0.5\"/>\n";
        append_text(svg, gx, y0 + plot_h + 14, "middle", 9, num(i / 10.0));
    }
    for (int i = 0; i <= 4; ++i) {
        const double gy = y0 + plot_h - plot_h * i / 4.0;
        svg += "<line x1=\"" + num(x0) + "\" y1=\"" + num(gy) + "\" x2=\"" + num(x0 + plot_w) +
               "\" y2=\"" + num(gy) + "\" stroke=\"#e0e0e0\" stroke-width=\"0.5\"/>\n";
        append_text(svg, x0 - 6, gy + 3, "end", 9, num(max_gap * i / 4.0));
    }
    append_text(svg, x0 + plot_w / 2.0, y0 + plot_h + 30, "middle", 11, "weighted error ratio");
    append_text(svg, 16, y0 + plot_h / 2.0, "start", 11, "gap");

    for (const SettingSummary& sum : summaries) {
        const auto ratio = sum.error_ratio();
        if (!ratio) continue;
        const double cx = x0 + plot_w * std::clamp(*ratio, 0.0, 1.0);
        const double cy = y0 + plot_h - plot_h * std::clamp(sum.mean_gap / max_gap, 0.0, 1.0);
        svg += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"4\" fill=\"" +
               policy_color(label(sum.policy)) + "\" fill-opacity=\"0.75\"/>\n";
    }

    double ly = y0 + plot_h + 48;
    for (const auto& [policy, count] : omitted) {
        svg += "<circle cx=\"" + num(x0 + 6) + "\" cy=\"" + num(ly - 3) + "\" r=\"4\" fill=\"" +
               policy_color(policy) + "\"/>\n";
        std::string note = policy;
        if (count > 0) note += " (" + std::to_string(count) + " setting(s) without regret omitted)";
        append_text(svg, x0 + 16, ly, "start", 10, note);
        ly += 14;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace dmvrp
