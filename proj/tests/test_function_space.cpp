#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fsbp/errors.hpp"
#include "fsbp/function_space.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>

using namespace fsbp;

TEST_CASE("equidistant nodes") {
    auto two = equidistant_nodes(0, 1, 2);
    CHECK(two.size() == 2);
    CHECK(two[0] == 0.0);
    CHECK(two[1] == 1.0);

    auto three = equidistant_nodes(-1, 1, 3);
    CHECK(three[0] == -1.0);
    CHECK(three[1] == 0.0);
    CHECK(three[2] == 1.0);

    auto fifty = equidistant_nodes(-1, 1, 50);
    CHECK(fifty.min_spacing() == doctest::Approx(2.0 / 49.0).epsilon(1e-14));
    CHECK(fifty[0] == -1.0);
    CHECK(fifty[49] == 1.0);

    CHECK_THROWS_AS(equidistant_nodes(0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(equidistant_nodes(1, 0, 5), std::invalid_argument);
    CHECK_THROWS_AS(equidistant_nodes(1, 1, 5), std::invalid_argument);
}

TEST_CASE("equidistant nodes are mirror symmetric") {
    for (int n : {3, 7, 50, 131}) {
        auto ns = equidistant_nodes(-0.3, 2.7, n);
        const double center2 = ns.x_left() + ns.x_right();
        for (int i = 0; i < n; ++i) {
            const double mirrored = center2 - ns[n - 1 - i];
            CHECK(std::abs(ns[i] - mirrored) <= 4e-16 * std::abs(center2 - ns.x_left()));
        }
    }
}

TEST_CASE("node set invariants") {
    CHECK_THROWS_AS(NodeSet(0, 1, {0.0, 0.5, 0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(NodeSet(0, 1, {0.1, 0.5, 1.0}), std::invalid_argument); // not boundary-inclusive
    CHECK_THROWS_AS(NodeSet(0, 1, {0.0, 0.5, 0.9}), std::invalid_argument);
    CHECK_NOTHROW(NodeSet(0, 1, {0.0, 0.9, 1.0}));
}

TEST_CASE("standard spaces") {
    auto p1 = polynomial_space(1);
    CHECK(p1.size() == 2);
    CHECK(p1.contains_constant());

    auto p3 = polynomial_space(3);
    CHECK(p3.size() == 4);

    auto trig = trigonometric_space();
    CHECK(trig.size() == 4);
    CHECK(trig.basis[2].kind() == BasisFunction::Kind::Sine);
    CHECK(trig.basis[2].parameter() == doctest::Approx(M_PI));
}

TEST_CASE("basis evaluation examples") {
    auto [v0, d0] = BasisFunction::monomial(0).evaluate(0.7);
    CHECK(v0 == 1.0);
    CHECK(d0 == 0.0);

    auto [vs, ds] = BasisFunction::sine(M_PI).evaluate(0.5);
    CHECK(vs == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(ds) < 1e-15);

    auto [vm, dm] = BasisFunction::monomial(3).evaluate(2.0);
    CHECK(vm == 8.0);
    CHECK(dm == 12.0);

    auto [ve, de] = BasisFunction::exponential(2.0).evaluate(0.5);
    CHECK(ve == doctest::Approx(std::exp(1.0)));
    CHECK(de == doctest::Approx(2.0 * std::exp(1.0)));
}

TEST_CASE("analytic derivatives match central differences") {
    std::vector<BasisFunction> fns = {
        BasisFunction::monomial(0),      BasisFunction::monomial(1),
        BasisFunction::monomial(4),      BasisFunction::sine(2.3),
        BasisFunction::cosine(0.7),      BasisFunction::exponential(0.9),
        BasisFunction::sine(M_PI),       BasisFunction::cosine(M_PI),
        BasisFunction::exponential(-1.4)};
    std::mt19937_64 rng(314);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const double h = 1e-6;
    for (const auto& f : fns) {
        for (int trial = 0; trial < 100; ++trial) {
            const double x = dist(rng);
            auto [vp, dp] = f.evaluate(x + h);
            auto [vm, dm] = f.evaluate(x - h);
            auto [v, analytic] = f.evaluate(x);
            const double fd = (vp - vm) / (2 * h);
            CHECK(std::abs(analytic - fd) <= 1e-7 * (1.0 + std::abs(analytic)));
        }
    }
}

TEST_CASE("custom basis function") {
    auto f = BasisFunction::custom(
        "tanh", [](double x) { return std::tanh(x); },
        [](double x) { double c = std::cosh(x); return 1.0 / (c * c); });
    auto [v, d] = f.evaluate(0.4);
    CHECK(v == doctest::Approx(std::tanh(0.4)));
    CHECK(d == doctest::Approx(1.0 - std::tanh(0.4) * std::tanh(0.4)));
    CHECK_THROWS_AS(BasisFunction::custom("bad", nullptr, nullptr), std::invalid_argument);
}

TEST_CASE("vandermonde examples") {
    auto nodes01 = NodeSet(0, 1, {0.0, 1.0});
    auto vp = vandermonde(polynomial_space(1), nodes01);
    CHECK(vp.v(0, 0) == 1.0);
    CHECK(vp.v(0, 1) == 0.0);
    CHECK(vp.v(1, 0) == 1.0);
    CHECK(vp.v(1, 1) == 1.0);
    CHECK(vp.v_x(0, 0) == 0.0);
    CHECK(vp.v_x(0, 1) == 1.0);
    CHECK(vp.v_x(1, 1) == 1.0);

    auto nodes = equidistant_nodes(-1, 1, 9);
    auto constant = vandermonde(polynomial_space(0), nodes);
    CHECK(constant.v.minCoeff() == 1.0);
    CHECK(constant.v.maxCoeff() == 1.0);
    CHECK(constant.v_x.cwiseAbs().maxCoeff() == 0.0);

    auto trig = vandermonde(trigonometric_space(), equidistant_nodes(-1, 1, 3));
    CHECK(trig.v(1, 0) == 1.0);
    CHECK(trig.v(1, 1) == 0.0);
    CHECK(std::abs(trig.v(1, 2)) < 1e-15);      // sin(0)
    CHECK(trig.v(1, 3) == 1.0);                 // cos(0)
    CHECK(trig.v_x(1, 0) == 0.0);
    CHECK(trig.v_x(1, 1) == 1.0);
    CHECK(trig.v_x(1, 2) == doctest::Approx(M_PI)); // pi cos(0)
    CHECK(std::abs(trig.v_x(1, 3)) < 1e-15);        // -pi sin(0)
}

TEST_CASE("vandermonde is deterministic") {
    auto nodes = equidistant_nodes(-1, 1, 20);
    auto a = vandermonde(trigonometric_space(), nodes);
    auto b = vandermonde(trigonometric_space(), nodes);
    CHECK(std::memcmp(a.v.data(), b.v.data(), sizeof(double) * a.v.size()) == 0);
    CHECK(std::memcmp(a.v_x.data(), b.v_x.data(), sizeof(double) * a.v_x.size()) == 0);
}

TEST_CASE("vandermonde reports non-finite evaluations") {
    FunctionSpace s;
    s.name = "overflow";
    s.basis = {BasisFunction::exponential(900.0)};
    auto nodes = NodeSet(0, 2, {0.0, 1.0, 2.0});
    CHECK_THROWS_AS(vandermonde(s, nodes), EvaluationError);
    try {
        vandermonde(s, nodes);
    } catch (const EvaluationError& e) {
        CHECK(std::string(e.what()).find("exponential") != std::string::npos);
    }
}

TEST_CASE("space spec grammar") {
    auto p3 = parse_space_spec("poly:3");
    CHECK(p3.size() == 4);
    auto trig = parse_space_spec("trig");
    CHECK(trig.size() == 4);

    auto inlined = parse_space_spec("sin:pi,cos:pi");
    CHECK(inlined.size() == 2);
    CHECK(inlined.basis[0].parameter() == doctest::Approx(M_PI));

    auto twopi = parse_space_spec("sin:2pi");
    CHECK(twopi.basis[0].parameter() == doctest::Approx(2 * M_PI));

    const char* path = "test_basis_file.txt";
    {
        std::ofstream out(path);
        out << "monomial 0\nmonomial 1\nsine 3.14159\n";
    }
    auto custom = parse_space_spec(std::string("custom:") + path);
    CHECK(custom.size() == 3);
    CHECK(custom.basis[2].parameter() == doctest::Approx(3.14159));
    std::remove(path);

    CHECK_THROWS_AS(parse_space_spec("nope"), std::invalid_argument);
    CHECK_THROWS_AS(parse_space_spec("custom:/does/not/exist"), std::invalid_argument);
}

TEST_CASE("node spec grammar") {
    auto ns = parse_node_spec("eq:-1,1,50");
    CHECK(ns.size() == 50);
    CHECK(ns.x_left() == -1.0);
    CHECK_THROWS_AS(parse_node_spec("grid:0,1,5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_node_spec("eq:0,1"), std::invalid_argument);
}
