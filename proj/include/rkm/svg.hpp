#pragma once

// Minimal deterministic SVG line charts.

#include <string>
#include <vector>

namespace rkm::svg {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct Chart {
    std::string title;
    std::string xLabel;
    std::string yLabel;
    std::vector<Series> series;
    bool showLegend = true;
};

/// Series longer than this are thinned by stride before drawing.
inline constexpr std::size_t kMaxPoints = 1500;

/// One chart per panel, stacked vertically in a single document.
std::string render(const std::vector<Chart>& panels, int width = 720, int panelHeight = 320);
std::string render(const Chart& chart, int width = 720, int height = 320);

}  // namespace rkm::svg
