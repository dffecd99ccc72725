#include "fsbp/error_norms.hpp"

#include <cmath>
#include <stdexcept>

namespace fsbp {

std::vector<double> eoc(const std::vector<double>& errors,
                        const std::vector<double>& resolutions) {
    if (errors.size() != resolutions.size())
        throw std::invalid_argument("eoc: need one error per resolution");
    for (size_t i = 1; i < resolutions.size(); ++i)
        if (!(resolutions[i - 1] < resolutions[i]))
            throw std::invalid_argument("eoc: resolutions must be strictly increasing");
    std::vector<double> orders;
    for (size_t i = 1; i < errors.size(); ++i)
        orders.push_back(std::log(errors[i - 1] / errors[i]) /
                         std::log(resolutions[i] / resolutions[i - 1]));
    return orders;
}

} // namespace fsbp
