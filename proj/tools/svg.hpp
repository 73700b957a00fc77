#pragma once

#include <string>
#include <vector>

namespace hypcover::cli {

/// Standalone SVG line chart of ys against their index, with labelled axes.
std::string line_chart_svg(const std::vector<double>& ys, const std::string& title, const std::string& x_label,
                           const std::string& y_label);

}  // namespace hypcover::cli
