#include "fsbp/time_integration.hpp"

#include "fsbp/errors.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace fsbp {

Eigen::VectorXd ssprk53_step(const RhsFn& rhs, const Eigen::VectorXd& u, double t,
                             double dt) {
    // five-stage, third-order SSP scheme in low-storage Shu-Osher form
    constexpr double b10 = 0.377268915331368;
    constexpr double b21 = 0.377268915331368;
    constexpr double a32 = 0.644090224936674;
    constexpr double a30 = 1.0 - a32;
    constexpr double b32 = 0.242995220537396;
    constexpr double a43 = 0.632066208361863;
    constexpr double a40 = 1.0 - a43;
    constexpr double b43 = 0.238458932846290;
    constexpr double a54 = 0.762406163401431;
    constexpr double a52 = 1.0 - a54;
    constexpr double b54 = 0.287632146308408;

    Eigen::VectorXd k(u.size());
    rhs(t, u, k);
    Eigen::VectorXd u1 = u + (b10 * dt) * k;
    rhs(t + b10 * dt, u1, k);
    Eigen::VectorXd u2 = u1 + (b21 * dt) * k;
    const double c2 = b10 + b21;
    rhs(t + c2 * dt, u2, k);
    Eigen::VectorXd u3 = a30 * u + a32 * u2 + (b32 * dt) * k;
    const double c3 = a32 * c2 + b32;
    rhs(t + c3 * dt, u3, k);
    Eigen::VectorXd u4 = a40 * u + a43 * u3 + (b43 * dt) * k;
    const double c4 = a43 * c3 + b43;
    rhs(t + c4 * dt, u4, k);
    return a52 * u2 + a54 * u4 + (b54 * dt) * k;
}

TimeIntegrationMode TimeIntegrationMode::fixed_cfl(double cfl, double wavespeed,
                                                   double h_min) {
    if (!(cfl > 0.0) || !(wavespeed > 0.0) || !(h_min > 0.0))
        throw std::invalid_argument("fixed_cfl: cfl, wavespeed, h_min must be positive");
    TimeIntegrationMode m;
    m.kind = Kind::FixedCfl;
    m.cfl = cfl;
    m.wavespeed = wavespeed;
    m.h_min = h_min;
    return m;
}

TimeIntegrationMode TimeIntegrationMode::adaptive(double abstol, double reltol) {
    if (!(abstol > 0.0) || !(reltol > 0.0))
        throw std::invalid_argument("adaptive: tolerances must be positive");
    TimeIntegrationMode m;
    m.kind = Kind::Adaptive;
    m.abstol = abstol;
    m.reltol = reltol;
    return m;
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = b1 - 5179.0 / 57600.0, e3 = b3 - 7571.0 / 16695.0,
                 e4 = b4 - 393.0 / 640.0, e5 = b5 + 92097.0 / 339200.0,
                 e6 = b6 - 187.0 / 2100.0, e7 = -1.0 / 40.0;
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

double error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& u0,
                  const Eigen::VectorXd& u1, double abstol, double reltol) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double scale = abstol + reltol * std::max(std::abs(u0(i)), std::abs(u1(i)));
        const double q = err(i) / scale;
        sum += q * q;
    }
    return std::sqrt(sum / static_cast<double>(err.size()));
}

double initial_step(const RhsFn& rhs, const Eigen::VectorXd& u0, double t0, double span,
                    const Eigen::VectorXd& f0, double abstol, double reltol) {
    auto scaled_norm = [&](const Eigen::VectorXd& v) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double scale = abstol + reltol * std::abs(u0(i));
            sum += (v(i) / scale) * (v(i) / scale);
        }
        return std::sqrt(sum / static_cast<double>(v.size()));
    };
    const double d0 = scaled_norm(u0);
    const double d1 = scaled_norm(f0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    Eigen::VectorXd u1 = u0 + h0 * f0;
    Eigen::VectorXd f1(u0.size());
    rhs(t0 + h0, u1, f1);
    const double d2 = scaled_norm(f1 - f0) / h0;
    double h1;
    if (std::max(d1, d2) <= 1e-15)
        h1 = std::max(1e-6, h0 * 1e-3);
    else
        h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min({100.0 * h0, h1, span});
}

Eigen::VectorXd integrate_adaptive(const RhsFn& rhs, const Eigen::VectorXd& u0, double t0,
                                   double t_end, double abstol, double reltol,
                                   const StepObserver& observer, IntegrationStats* stats) {
    const double span = t_end - t0;
    const double dt_floor = 1e-14 * span;
    const Eigen::Index n = u0.size();

    Eigen::VectorXd u = u0;
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), u_new(n), err(n);
    double t = t0;
    rhs(t, u, k1); // FSAL
    double dt = initial_step(rhs, u, t, span, k1, abstol, reltol);
    double err_old = 1e-4;
    std::optional<SimulationAbort> last_abort;
    if (observer) observer(t, u);

    while (t < t_end) {
        if (dt < dt_floor) {
            if (last_abort) throw *last_abort;
            throw StiffnessError("adaptive step size underflow at t = " + std::to_string(t));
        }
        const bool last = t + dt >= t_end;
        if (last) dt = t_end - t;

        bool step_failed = false;
        double err_scaled = 0.0;
        try {
            rhs(t + c2 * dt, u + dt * (a21 * k1), k2);
            rhs(t + c3 * dt, u + dt * (a31 * k1 + a32 * k2), k3);
            rhs(t + c4 * dt, u + dt * (a41 * k1 + a42 * k2 + a43 * k3), k4);
            rhs(t + c5 * dt, u + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5);
            rhs(t + dt, u + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6);
            u_new = u + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            rhs(t + dt, u_new, k7);
            err = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            err_scaled = error_norm(err, u, u_new, abstol, reltol);
            if (!std::isfinite(err_scaled)) step_failed = true;
        } catch (const StateError&) {
            step_failed = true;
        } catch (const SimulationAbort& abort) {
            last_abort = abort;
            step_failed = true;
        }

        if (step_failed) {
            dt *= 0.25;
            if (stats) ++stats->rejected;
            continue;
        }

        if (err_scaled <= 1.0) {
            t = last ? t_end : t + dt;
            u.swap(u_new);
            k1.swap(k7); // FSAL
            last_abort.reset();
            if (observer) observer(t, u);
            if (stats) {
                ++stats->steps;
                stats->final_dt = dt;
            }
            const double safe_err = std::max(err_scaled, 1e-10);
            double fac = 0.9 * std::pow(safe_err, -0.7 / 5.0) * std::pow(err_old, 0.4 / 5.0);
            fac = std::min(5.0, std::max(0.2, fac));
            dt *= fac;
            err_old = safe_err;
        } else {
            dt *= std::max(0.1, std::min(0.5, 0.9 * std::pow(err_scaled, -0.2)));
            if (stats) ++stats->rejected;
        }
    }
    return u;
}

Eigen::VectorXd integrate_fixed(const RhsFn& rhs, const Eigen::VectorXd& u0, double t0,
                                double t_end, const TimeIntegrationMode& mode,
                                const StepObserver& observer, IntegrationStats* stats) {
    const double span = t_end - t0;
    const double dt0 = mode.cfl * mode.h_min / std::abs(mode.wavespeed);
    if (dt0 < 1e-14 * span)
        throw StiffnessError("fixed CFL step size underflow");
    Eigen::VectorXd u = u0;
    double t = t0;
    if (observer) observer(t, u);
    while (t < t_end) {
        const bool last = t_end - t <= dt0;
        const double dt = last ? t_end - t : dt0;
        u = ssprk53_step(rhs, u, t, dt);
        t = last ? t_end : t + dt;
        if (observer) observer(t, u);
        if (stats) {
            ++stats->steps;
            stats->final_dt = dt;
        }
    }
    return u;
}

} // namespace

Eigen::VectorXd integrate(const RhsFn& rhs, const Eigen::VectorXd& u0, double t0,
                          double t_end, const TimeIntegrationMode& mode,
                          const StepObserver& observer, IntegrationStats* stats) {
    if (!(t_end > t0)) throw std::invalid_argument("integrate: need t_end > t0");
    if (mode.kind == TimeIntegrationMode::Kind::FixedCfl)
        return integrate_fixed(rhs, u0, t0, t_end, mode, observer, stats);
    return integrate_adaptive(rhs, u0, t0, t_end, mode.abstol, mode.reltol, observer, stats);
}

} // namespace fsbp
