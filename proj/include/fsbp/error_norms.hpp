#ifndef FSBP_ERROR_NORMS_HPP
#define FSBP_ERROR_NORMS_HPP

#include <string>
#include <vector>

namespace fsbp {

struct ErrorReport {
    std::vector<std::string> variables;
    std::vector<double> l2;
    std::vector<double> linf;
    std::vector<double> eoc; // between successive resolutions, may be empty
};

/// EOC_j = log(e_j / e_{j+1}) / log(r_{j+1} / r_j); resolutions must be
/// strictly increasing. Returns one value per successive pair.
std::vector<double> eoc(const std::vector<double>& errors,
                        const std::vector<double>& resolutions);

} // namespace fsbp

#endif
