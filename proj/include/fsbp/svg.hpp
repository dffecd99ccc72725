#ifndef FSBP_SVG_HPP
#define FSBP_SVG_HPP

#include <string>
#include <vector>

namespace fsbp {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct AxesSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool x_log = false;
    bool y_log = false;
};

/// Standalone SVG line plot with legend. Deterministic byte output for fixed
/// input. Throws invalid_argument for empty series or non-positive values on
/// a log axis.
std::string emit_svg(const std::vector<Series>& series, const AxesSpec& axes);

void write_svg(const std::string& path, const std::vector<Series>& series,
               const AxesSpec& axes);

} // namespace fsbp

#endif
