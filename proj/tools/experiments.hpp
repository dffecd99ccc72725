#ifndef FSBP_TOOLS_EXPERIMENTS_HPP
#define FSBP_TOOLS_EXPERIMENTS_HPP

#include "fsbp/advection.hpp"
#include "fsbp/construct.hpp"
#include "fsbp/euler.hpp"
#include "fsbp/table.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fsbp::tools {

struct ExperimentConfig {
    std::string id;                 // table1 | table2 | table4 | fig2..fig5 | custom
    std::string out_dir = ".";
    std::string format = "csv";
    unsigned long seed = 0;
    // overrides; experiment defaults apply when unset
    std::optional<int> n;
    std::optional<std::vector<int>> blocks;
    std::optional<int> bandwidth;
    std::optional<int> boundary_size;
    std::optional<int> wavenumber;
    std::optional<double> t_end;
    std::optional<double> tolerance;
    std::optional<int> max_iters;

    std::string canonical() const;
};

/// Runs one reproduction recipe; returns the paths written. Simulation
/// crashes are recorded as rows, not propagated.
std::vector<std::string> run_experiment(const ExperimentConfig& config);

/// Time series of errors for one advection setup.
struct AdvectionSeries {
    std::vector<double> times;
    std::vector<double> l2;
    std::vector<double> linf;
};

AdvectionSeries advection_error_series(const SBPOperator& op, int blocks, double a,
                                       const std::function<double(double)>& u0, double t_end,
                                       int samples, bool fixed_cfl, double cfl, double tol);

/// Time series of summed-over-variables errors for one 2D Euler setup; a
/// crash truncates the series and sets crash_time.
struct EulerSeries {
    std::vector<double> times;
    std::vector<double> l2;
    std::vector<double> linf;
    std::optional<double> crash_time;
};

EulerSeries euler_error_series(const SBPOperator& op, int blocks_per_side,
                               const ManufacturedParams& params, double t_end, int samples,
                               double tol);

} // namespace fsbp::tools

#endif
