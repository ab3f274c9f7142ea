#pragma once

#include <string>
#include <vector>

namespace lnlink {

struct ChartSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<ChartSeries> series;
    bool bars = false;  // bar chart keyed by rank instead of a polyline
    std::string manifest_hash;
};

// Self-contained deterministic SVG; an empty spec renders labeled empty axes.
std::string render_chart(const ChartSpec& spec);

inline bool chart_is_empty(const ChartSpec& spec) {
    for (const auto& s : spec.series)
        if (!s.points.empty()) return false;
    return true;
}

}  // namespace lnlink
