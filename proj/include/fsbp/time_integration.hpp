#ifndef FSBP_TIME_INTEGRATION_HPP
#define FSBP_TIME_INTEGRATION_HPP

#include <Eigen/Core>
#include <functional>

namespace fsbp {

using RhsFn = std::function<void(double t, const Eigen::VectorXd& u, Eigen::VectorXd& dudt)>;

/// Called after every accepted step (and once at t0).
using StepObserver = std::function<void(double t, const Eigen::VectorXd& u)>;

/// One step of the five-stage, third-order strong-stability-preserving
/// Runge-Kutta method.
Eigen::VectorXd ssprk53_step(const RhsFn& rhs, const Eigen::VectorXd& u, double t, double dt);

struct TimeIntegrationMode {
    enum class Kind { FixedCfl, Adaptive };
    Kind kind = Kind::Adaptive;
    double cfl = 0.5;
    double wavespeed = 1.0;
    double h_min = 1.0;
    double abstol = 1e-6;
    double reltol = 1e-6;

    /// dt = cfl * h_min / |wavespeed|, stepping with ssprk53.
    static TimeIntegrationMode fixed_cfl(double cfl, double wavespeed, double h_min);

    /// Embedded 5(4) Runge-Kutta pair with PI step-size control.
    static TimeIntegrationMode adaptive(double abstol, double reltol);
};

struct IntegrationStats {
    long steps = 0;
    long rejected = 0;
    double final_dt = 0.0;
};

/// Integrates u' = rhs(t, u) from t0 to t_end, landing on t_end exactly.
/// Throws StiffnessError when dt falls below 1e-14 * (t_end - t0); state
/// errors raised by the rhs propagate (in adaptive mode only after step-size
/// reduction has been exhausted).
Eigen::VectorXd integrate(const RhsFn& rhs, const Eigen::VectorXd& u0, double t0,
                          double t_end, const TimeIntegrationMode& mode,
                          const StepObserver& observer = {},
                          IntegrationStats* stats = nullptr);

} // namespace fsbp

#endif
