#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fsbp/errors.hpp"
#include "fsbp/time_integration.hpp"

#include <cmath>

using namespace fsbp;

TEST_CASE("ssprk53 preserves steady states") {
    RhsFn rhs = [](double, const Eigen::VectorXd& u, Eigen::VectorXd& du) {
        du = Eigen::VectorXd::Zero(u.size());
    };
    Eigen::VectorXd u = Eigen::VectorXd::Constant(3, 2.5);
    Eigen::VectorXd next = ssprk53_step(rhs, u, 0.0, 0.1);
    CHECK((next - u).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("ssprk53 single-step accuracy on exponential decay") {
    RhsFn rhs = [](double, const Eigen::VectorXd& u, Eigen::VectorXd& du) { du = -u; };
    Eigen::VectorXd u = Eigen::VectorXd::Constant(1, 1.0);
    const double dt = 0.1;
    Eigen::VectorXd next = ssprk53_step(rhs, u, 0.0, dt);
    // local error of a third-order step is O(dt^4)
    CHECK(std::abs(next(0) - std::exp(-dt)) <= 5.0 * dt * dt * dt * dt);
}

TEST_CASE("ssprk53 observed order is three") {
    // u' = cos(t), u(0) = 0, exact u(T) = sin(T)
    RhsFn rhs = [](double t, const Eigen::VectorXd&, Eigen::VectorXd& du) {
        du = Eigen::VectorXd::Constant(1, std::cos(t));
    };
    const double t_end = 2.0;
    auto solve_with = [&](double dt) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(1);
        double t = 0.0;
        const long steps = std::lround(t_end / dt);
        for (long s = 0; s < steps; ++s) {
            u = ssprk53_step(rhs, u, t, dt);
            t += dt;
        }
        return std::abs(u(0) - std::sin(t_end));
    };
    const double e1 = solve_with(0.02);
    const double e2 = solve_with(0.01);
    const double order = std::log2(e1 / e2);
    CHECK(order == doctest::Approx(3.0).epsilon(0.04));
}

TEST_CASE("fixed CFL stepping is exact for a zero rhs") {
    RhsFn rhs = [](double, const Eigen::VectorXd& u, Eigen::VectorXd& du) {
        du = Eigen::VectorXd::Zero(u.size());
    };
    Eigen::VectorXd u0 = Eigen::VectorXd::LinSpaced(5, -1.0, 3.0);
    auto u = integrate(rhs, u0, 0.0, 1.75, TimeIntegrationMode::fixed_cfl(0.5, 2.0, 0.04));
    CHECK((u - u0).cwiseAbs().maxCoeff() <= 2e-13);
}

TEST_CASE("fixed CFL lands exactly on the final time") {
    double last_t = -1.0;
    RhsFn rhs = [](double, const Eigen::VectorXd&, Eigen::VectorXd& du) {
        du = Eigen::VectorXd::Constant(1, 1.0);
    };
    StepObserver observer = [&](double t, const Eigen::VectorXd&) { last_t = t; };
    auto u = integrate(rhs, Eigen::VectorXd::Zero(1), 0.0, 1.0,
                       TimeIntegrationMode::fixed_cfl(0.5, 1.0, 0.3), observer);
    CHECK(last_t == 1.0);
    CHECK(u(0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("adaptive integration matches the exponential to tolerance") {
    const double lambda = -2.0;
    RhsFn rhs = [&](double, const Eigen::VectorXd& u, Eigen::VectorXd& du) {
        du = lambda * u;
    };
    for (double tol : {1e-6, 1e-10}) {
        auto u = integrate(rhs, Eigen::VectorXd::Constant(1, 1.0), 0.0, 1.0,
                           TimeIntegrationMode::adaptive(tol, tol));
        CHECK(std::abs(u(0) - std::exp(lambda)) <= 10.0 * tol);
    }
}

TEST_CASE("adaptive integration handles oscillatory systems") {
    RhsFn rhs = [](double, const Eigen::VectorXd& u, Eigen::VectorXd& du) {
        du.resize(2);
        du(0) = u(1);
        du(1) = -u(0);
    };
    Eigen::VectorXd u0(2);
    u0 << 1.0, 0.0;
    IntegrationStats stats;
    auto u = integrate(rhs, u0, 0.0, 10.0, TimeIntegrationMode::adaptive(1e-9, 1e-9), {},
                       &stats);
    CHECK(std::abs(u(0) - std::cos(10.0)) <= 1e-7);
    CHECK(std::abs(u(1) + std::sin(10.0)) <= 1e-7);
    CHECK(stats.steps > 10);
}

TEST_CASE("finite-time blow-up raises a stiffness error") {
    // u' = u^2 from u(0)=1 blows up at t=1
    RhsFn rhs = [](double, const Eigen::VectorXd& u, Eigen::VectorXd& du) {
        du = u.array().square();
    };
    CHECK_THROWS_AS(integrate(rhs, Eigen::VectorXd::Constant(1, 1.0), 0.0, 2.0,
                              TimeIntegrationMode::adaptive(1e-8, 1e-8)),
                    StiffnessError);
}

TEST_CASE("mode factories validate their arguments") {
    CHECK_THROWS_AS(TimeIntegrationMode::fixed_cfl(-0.5, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(TimeIntegrationMode::fixed_cfl(0.5, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(TimeIntegrationMode::adaptive(0.0, 1e-6), std::invalid_argument);
    RhsFn rhs = [](double, const Eigen::VectorXd& u, Eigen::VectorXd& du) { du = u; };
    CHECK_THROWS_AS(integrate(rhs, Eigen::VectorXd::Zero(1), 1.0, 0.5,
                              TimeIntegrationMode::adaptive(1e-6, 1e-6)),
                    std::invalid_argument);
}

TEST_CASE("observer sees monotonically advancing accepted steps") {
    RhsFn rhs = [](double t, const Eigen::VectorXd&, Eigen::VectorXd& du) {
        du = Eigen::VectorXd::Constant(1, std::sin(t));
    };
    double prev = -1.0;
    bool monotone = true;
    StepObserver observer = [&](double t, const Eigen::VectorXd&) {
        if (t <= prev) monotone = false;
        prev = t;
    };
    integrate(rhs, Eigen::VectorXd::Zero(1), 0.0, 3.0,
              TimeIntegrationMode::adaptive(1e-8, 1e-8), observer);
    CHECK(monotone);
    CHECK(prev == 3.0);
}
