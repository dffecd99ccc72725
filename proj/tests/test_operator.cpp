#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fsbp/diagnostics.hpp"
#include "fsbp/operator.hpp"

#include <random>

using namespace fsbp;

namespace {

// Unique operator exact on {1, x} for nodes {0, 1}: P = diag(1/2, 1/2),
// S = [[0, 1/2], [-1/2, 0]], D = [[-1, 1], [-1, 1]].
SBPOperator two_node_operator() {
    return SBPOperator(NodeSet(0, 1, {0.0, 1.0}), Eigen::Vector2d(0.5, 0.5),
                       SparsityPattern::dense(), Eigen::VectorXd::Constant(1, 0.5));
}

} // namespace

TEST_CASE("two-node closed form") {
    auto op = two_node_operator();
    auto d = differentiation_matrix(op);
    CHECK(d(0, 0) == -1.0);
    CHECK(d(0, 1) == 1.0);
    CHECK(d(1, 0) == -1.0);
    CHECK(d(1, 1) == 1.0);
    CHECK(sbp_defect(op) == 0.0);

    auto res = exactness_residual(op, polynomial_space(1));
    CHECK(res(0) <= 1e-14);
    CHECK(res(1) <= 1e-14);
}

TEST_CASE("quadrature") {
    auto op = two_node_operator();
    CHECK(quadrature(op, Eigen::Vector2d(1.0, 1.0)) == doctest::Approx(1.0)); // domain length
    CHECK(quadrature(op, Eigen::Vector2d(0.0, 0.0)) == 0.0);

    // 1^T P (D x) = x_R - x_L for an operator exact on {1, x}
    Eigen::VectorXd dx = op.apply(Eigen::Vector2d(0.0, 1.0));
    CHECK(quadrature(op, dx) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("operator validation") {
    CHECK_THROWS_AS(SBPOperator(NodeSet(0, 1, {0.0, 1.0}), Eigen::Vector2d(0.5, -0.5),
                                SparsityPattern::dense(), Eigen::VectorXd::Constant(1, 0.5)),
                    std::invalid_argument);
    CHECK_THROWS_AS(SBPOperator(NodeSet(0, 1, {0.0, 1.0}), Eigen::Vector2d(0.5, 0.5),
                                SparsityPattern::dense(), Eigen::VectorXd::Zero(3)),
                    std::invalid_argument);
}

TEST_CASE("boundary difference operator has identical rows") {
    auto op = make_boundary_difference_operator(5, 1e-12);
    auto d = differentiation_matrix(op);
    for (int i = 0; i < 5; ++i) {
        CHECK(d(i, 0) == doctest::Approx(-1.0).epsilon(1e-11));
        CHECK(d(i, 4) == doctest::Approx(1.0).epsilon(1e-11));
        for (int j = 1; j < 4; ++j) CHECK(std::abs(d(i, j)) <= 1e-11);
    }
    // exact for {1, x} up to O(eps)
    auto res = exactness_residual(op, polynomial_space(1));
    CHECK(res(0) <= 1e-10);
    CHECK(res(1) <= 1e-10);
    // structural SBP property still holds exactly
    CHECK(sbp_defect(op) == 0.0);
}

TEST_CASE("boundary difference operator with eps=1e-8 stays near-exact") {
    auto op = make_boundary_difference_operator(8, 1e-8);
    auto res = exactness_residual(op, polynomial_space(1));
    CHECK(res(0) <= 1e-7);
    CHECK(res(1) <= 1e-7);

    // the deviation from exactness scales like (N - 2) eps
    auto grown = exactness_residual(make_boundary_difference_operator(8, 1e-6),
                                    polynomial_space(1));
    CHECK(grown(0) == doctest::Approx(res(0) * 100.0).epsilon(1e-3));
}

TEST_CASE("row sums of D equal the constant-exactness residual") {
    auto op = make_classical_second_order(equidistant_nodes(-1, 1, 9));
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(9);
    CHECK(op.apply(ones).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("classical second-order operator") {
    auto nodes = equidistant_nodes(-1, 1, 10);
    auto op = make_classical_second_order(nodes);
    const double h = 2.0 / 9.0;
    auto d = differentiation_matrix(op);
    // boundary rows are one-sided differences
    CHECK(d(0, 0) == doctest::Approx(-1.0 / h));
    CHECK(d(0, 1) == doctest::Approx(1.0 / h));
    // interior rows are central differences
    CHECK(d(4, 3) == doctest::Approx(-0.5 / h));
    CHECK(d(4, 5) == doctest::Approx(0.5 / h));
    CHECK(d(4, 4) == 0.0);

    // exact for {1, x} but not x^2: the boundary rows see first-order error
    auto res = exactness_residual(op, polynomial_space(2));
    CHECK(res(0) <= 1e-14);
    CHECK(res(1) <= 1e-13);
    CHECK(res(2) > 0.01);
}

TEST_CASE("apply agrees with the dense matrix") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> dist;
    for (const auto& pattern : {SparsityPattern::dense(), SparsityPattern::banded(2, 4)}) {
        const int n = 14;
        auto nodes = equidistant_nodes(0, 1, n);
        const long count = unknown_count(n, pattern);
        Eigen::VectorXd sigma(count);
        for (long i = 0; i < count; ++i) sigma(i) = dist(rng);
        Eigen::VectorXd p(n);
        for (int i = 0; i < n; ++i) p(i) = 0.1 + 0.9 * std::abs(dist(rng));
        SBPOperator op(nodes, p, pattern, sigma);
        auto d = differentiation_matrix(op);

        Eigen::VectorXd u(n);
        for (int i = 0; i < n; ++i) u(i) = dist(rng);
        CHECK((op.apply(u) - d * u).cwiseAbs().maxCoeff() <= 1e-13 * d.cwiseAbs().maxCoeff());

        Eigen::MatrixXd m(n, 3);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = dist(rng);
        CHECK((op.apply_to_columns(m) - d * m).cwiseAbs().maxCoeff() <=
              1e-13 * d.cwiseAbs().maxCoeff());
        CHECK((op.apply_to_rows(m.transpose()) - m.transpose() * d.transpose())
                  .cwiseAbs()
                  .maxCoeff() <= 1e-13 * d.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("norm weights are always positive") {
    auto op = make_boundary_difference_operator(8, 1e-10);
    CHECK(op.norm_weights().minCoeff() > 0.0);
}
