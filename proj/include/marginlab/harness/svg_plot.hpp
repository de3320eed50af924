#pragma once

#include "marginlab/harness/csv_table.hpp"

#include <string>
#include <vector>

namespace marginlab {

// Everything a plot needs besides the CSV it is drawn from.
struct PlotSpec {
    std::string title;
    std::string x;
    std::vector<std::string> y;  // one series per column, unless `group` is set
    std::string group;           // optional: one series per distinct value, drawing y[0]
    std::string err;             // optional: symmetric error bars on y[0]
    std::string filter_column;   // optional: keep rows whose filter_column equals filter_value
    std::string filter_value;
    bool log_x = false;
    bool log_y = false;
};

// Polyline plot with axes, ticks and a legend. Non-finite points are skipped.
std::string render_svg(const CsvTable& table, const PlotSpec& spec);

}  // namespace marginlab
