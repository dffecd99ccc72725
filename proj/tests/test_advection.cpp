#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fsbp/advection.hpp"
#include "fsbp/construct.hpp"
#include "fsbp/time_integration.hpp"

#include <cmath>

using namespace fsbp;

namespace {

SBPOperator trig_operator(int n) {
    auto c = construct_operator(trigonometric_space(), equidistant_nodes(-1, 1, n),
                                SparsityPattern::banded(3, 6));
    REQUIRE(c.result.exact);
    return c.op;
}

} // namespace

TEST_CASE("constant states are steady") {
    auto op = make_classical_second_order(equidistant_nodes(-1, 1, 12));
    BlockMesh1D mesh(-1, 1, 3, op);
    Eigen::VectorXd u = Eigen::VectorXd::Ones(mesh.total_nodes());
    for (double a : {2.0, -1.5}) {
        Eigen::VectorXd rhs = advection_rhs(mesh, a, u);
        CHECK(rhs.cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("resolved modes are differentiated to solver precision") {
    auto op = trig_operator(30);
    BlockMesh1D mesh(-1, 1, 1, op);
    const double a = 2.0;
    Eigen::VectorXd u = mesh.sample([](double x) { return std::sin(M_PI * x); });
    Eigen::VectorXd rhs = advection_rhs(mesh, a, u);
    for (int i = 0; i < mesh.total_nodes(); ++i) {
        const double expected = -a * M_PI * std::cos(M_PI * mesh.node_x(0, i));
        CHECK(std::abs(rhs(i) - expected) <= 1e-10);
    }
}

TEST_CASE("total mass derivative telescopes to zero") {
    auto op = trig_operator(15);
    BlockMesh1D mesh(-1, 1, 4, op);
    Eigen::VectorXd u = mesh.sample([](double x) { return 0.3 + std::sin(M_PI * x) * 0.7; });
    for (double a : {2.0, -2.0}) {
        Eigen::VectorXd rhs = advection_rhs(mesh, a, u);
        CHECK(std::abs(advection_mass(mesh, rhs)) <= 1e-12);
    }
}

TEST_CASE("periodic conservation over a full run") {
    auto op = make_classical_second_order(equidistant_nodes(-1, 1, 20));
    BlockMesh1D mesh(-1, 1, 4, op);
    Eigen::VectorXd u = mesh.sample([](double x) { return std::sin(M_PI * x); });
    const double mass0 = advection_mass(mesh, u);
    RhsFn rhs = [&](double, const Eigen::VectorXd& v, Eigen::VectorXd& dv) {
        dv = advection_rhs(mesh, 2.0, v);
    };
    u = integrate(rhs, u, 0.0, 1.75, TimeIntegrationMode::fixed_cfl(0.5, 2.0, mesh.h_min()));
    CHECK(std::abs(advection_mass(mesh, u) - mass0) <= 1e-10);
}

TEST_CASE("upwind coupling dissipates energy") {
    auto op = make_classical_second_order(equidistant_nodes(-1, 1, 16));
    BlockMesh1D mesh(-1, 1, 2, op);
    Eigen::VectorXd u = mesh.sample([](double x) { return std::sin(2 * M_PI * x) + 0.2; });
    RhsFn rhs = [&](double, const Eigen::VectorXd& v, Eigen::VectorXd& dv) {
        dv = advection_rhs(mesh, 2.0, v);
    };
    double prev_energy = advection_energy(mesh, u);
    bool non_increasing = true;
    StepObserver observer = [&](double, const Eigen::VectorXd& state) {
        const double energy = advection_energy(mesh, state);
        if (energy > prev_energy + 1e-12 * prev_energy) non_increasing = false;
        prev_energy = energy;
    };
    integrate(rhs, u, 0.0, 1.0, TimeIntegrationMode::fixed_cfl(0.5, 2.0, mesh.h_min()),
              observer);
    CHECK(non_increasing);
}

TEST_CASE("affine block mapping commutes with solving") {
    // one block of width 1/2 versus the reference domain with rescaled time
    auto op = trig_operator(20);
    const double a = 2.0;
    const double t_ref = 0.7;

    BlockMesh1D ref_mesh(-1, 1, 1, op);
    Eigen::VectorXd u_ref = ref_mesh.sample([](double x) { return std::sin(M_PI * x); });
    RhsFn ref_rhs = [&](double, const Eigen::VectorXd& v, Eigen::VectorXd& dv) {
        dv = advection_rhs(ref_mesh, a, v);
    };
    u_ref = integrate(ref_rhs, u_ref, 0.0, t_ref,
                      TimeIntegrationMode::fixed_cfl(0.5, a, ref_mesh.h_min()));

    BlockMesh1D mapped_mesh(-1, -0.5, 1, op); // width 1/2, Jacobian 1/4
    Eigen::VectorXd u_mapped =
        mapped_mesh.sample([](double x) { return std::sin(M_PI * (4.0 * x + 3.0)); });
    RhsFn mapped_rhs = [&](double, const Eigen::VectorXd& v, Eigen::VectorXd& dv) {
        dv = advection_rhs(mapped_mesh, a, v);
    };
    u_mapped = integrate(mapped_rhs, u_mapped, 0.0, t_ref / 4.0,
                         TimeIntegrationMode::fixed_cfl(0.5, a, mapped_mesh.h_min()));

    CHECK((u_ref - u_mapped).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("block mesh geometry") {
    auto op = make_classical_second_order(equidistant_nodes(-1, 1, 5));
    BlockMesh1D mesh(-1, 1, 4, op);
    CHECK(mesh.jacobian() == doctest::Approx(0.25));
    CHECK(mesh.node_x(0, 0) == doctest::Approx(-1.0));
    CHECK(mesh.node_x(0, 4) == doctest::Approx(-0.5));
    CHECK(mesh.node_x(3, 4) == doctest::Approx(1.0));
    // interfaces conform: right node of block k is the left node of block k+1
    for (int b = 0; b + 1 < 4; ++b)
        CHECK(mesh.node_x(b, 4) == doctest::Approx(mesh.node_x(b + 1, 0)).epsilon(1e-15));
    CHECK_THROWS_AS(BlockMesh1D(-1, 1, 0, op), std::invalid_argument);
}

TEST_CASE("exact periodic transport wraps around") {
    auto u0 = [](double x) { return std::exp(-x * x / 0.1); };
    CHECK(advected_exact(u0, -1, 1, 2.0, 0.3, 0.0) == doctest::Approx(u0(0.3)));
    // after one full period the profile returns
    CHECK(advected_exact(u0, -1, 1, 2.0, 0.3, 1.0) == doctest::Approx(u0(0.3)).epsilon(1e-12));
    // half a period moves by the domain half-length
    CHECK(advected_exact(u0, -1, 1, 2.0, 0.5, 0.5) == doctest::Approx(u0(-0.5)).epsilon(1e-12));
}

TEST_CASE("advection with negative velocity uses the other upwind side") {
    auto op = make_classical_second_order(equidistant_nodes(-1, 1, 20));
    BlockMesh1D mesh(-1, 1, 4, op);
    Eigen::VectorXd u = mesh.sample([](double x) { return std::sin(M_PI * x); });
    RhsFn rhs = [&](double, const Eigen::VectorXd& v, Eigen::VectorXd& dv) {
        dv = advection_rhs(mesh, -2.0, v);
    };
    double prev_energy = advection_energy(mesh, u);
    bool non_increasing = true;
    StepObserver observer = [&](double, const Eigen::VectorXd& state) {
        const double energy = advection_energy(mesh, state);
        if (energy > prev_energy + 1e-12 * prev_energy) non_increasing = false;
        prev_energy = energy;
    };
    u = integrate(rhs, u, 0.0, 1.0, TimeIntegrationMode::fixed_cfl(0.5, 2.0, mesh.h_min()),
                  observer);
    CHECK(non_increasing);
    Eigen::VectorXd diff(mesh.total_nodes());
    for (int b = 0; b < 4; ++b)
        for (int i = 0; i < mesh.nodes_per_block(); ++i)
            diff(b * mesh.nodes_per_block() + i) =
                u(b * mesh.nodes_per_block() + i) -
                advected_exact([](double x) { return std::sin(M_PI * x); }, -1, 1, -2.0,
                               mesh.node_x(b, i), 1.0);
    CHECK(advection_l2_norm(mesh, diff) < 0.2);
}
