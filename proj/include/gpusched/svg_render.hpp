#pragma once

#include <string>
#include <vector>

#include "gpusched/simulator.hpp"

namespace gpusched {

/// Gantt-style timeline of a simulation: one row per core plus one GPU row.
/// Task execution is colored per task, server activity is hatched gray.
std::string gantt_svg(const SimResult& result, const std::string& title);
void write_gantt_svg(const SimResult& result, const std::string& title, const std::string& path);

/// Simple line chart (one polyline per series) used for sweep plots.
struct ChartSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;   // x, y
};

std::string line_chart_svg(const std::vector<ChartSeries>& series, const std::string& title,
                           const std::string& x_label, const std::string& y_label);
void write_line_chart_svg(const std::vector<ChartSeries>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::string& path);

} // namespace gpusched
