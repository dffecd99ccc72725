#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fsbp/sparsity.hpp"

#include <random>

using namespace fsbp;

TEST_CASE("unknown counts") {
    CHECK(unknown_count(50, SparsityPattern::dense()) == 1225);
    CHECK(unknown_count(50, SparsityPattern::banded(3, 6)) == 150);
    CHECK(unknown_count(2, SparsityPattern::dense()) == 1);
    CHECK_THROWS_AS(unknown_count(12, SparsityPattern::banded(3, 6)), std::invalid_argument);
    try {
        unknown_count(12, SparsityPattern::banded(3, 6));
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("N >= 2c + b") != std::string::npos);
    }
}

TEST_CASE("pattern construction guards") {
    CHECK_THROWS_AS(SparsityPattern::banded(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(SparsityPattern::banded(3, 2), std::invalid_argument);
    CHECK_NOTHROW(SparsityPattern::banded(2, 2));
}

TEST_CASE("unknown count matches pattern enumeration") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const int b = 1 + static_cast<int>(rng() % 6);
        const int c = b + static_cast<int>(rng() % 5);
        const int n = 2 * c + b + static_cast<int>(rng() % 40);
        auto pattern = SparsityPattern::banded(b, c);
        CHECK(static_cast<long>(pattern.free_positions(n).size()) == unknown_count(n, pattern));
    }
    for (int n : {2, 5, 23}) {
        auto dense = SparsityPattern::dense();
        CHECK(static_cast<long>(dense.free_positions(n).size()) == unknown_count(n, dense));
    }
}

TEST_CASE("banded patterns always have fewer unknowns than dense") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        const int b = 1 + static_cast<int>(rng() % 5);
        const int c = b + static_cast<int>(rng() % 4);
        const int n = 2 * c + b + 1 + static_cast<int>(rng() % 30);
        CHECK(unknown_count(n, SparsityPattern::banded(b, c)) <
              unknown_count(n, SparsityPattern::dense()));
    }
}

TEST_CASE("dense skew layout is row-major upper triangle") {
    Eigen::VectorXd sigma(3);
    sigma << 1.5, -2.0, 7.0; // (a, b, c)
    auto s = skew_from_parameters(SparsityPattern::dense(), sigma, 3);
    CHECK(s(0, 1) == 1.5);
    CHECK(s(0, 2) == -2.0);
    CHECK(s(1, 2) == 7.0);
    CHECK(s(1, 0) == -1.5);
    CHECK(s(2, 0) == 2.0);
    CHECK(s(2, 1) == -7.0);
    CHECK(s(0, 0) == 0.0);
}

TEST_CASE("zero parameters give the zero matrix") {
    auto pattern = SparsityPattern::banded(2, 3);
    auto s = skew_from_parameters(pattern, Eigen::VectorXd::Zero(unknown_count(10, pattern)), 10);
    CHECK(s.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("banded structure matches the block description") {
    // N=12, b=2, c=4: corner blocks dense, interior band of width b, zero
    // blocks between the two corners
    const int n = 12, b = 2, c = 4;
    auto pattern = SparsityPattern::banded(b, c);
    Eigen::VectorXd sigma = Eigen::VectorXd::Ones(unknown_count(n, pattern));
    auto s = skew_from_parameters(pattern, sigma, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const bool in_left = i < c && j < c;
            const bool in_right = i >= n - c && j >= n - c;
            const bool in_band = (j - i) <= b;
            CHECK(((s(i, j) != 0.0) == (in_left || in_right || in_band)));
        }
    // triangular coupling block next to the left corner: row c-1 couples to
    // b interior columns, row c-b couples only to column c
    CHECK(s(c - 1, c + b - 1) != 0.0);
    CHECK(s(c - b, c) != 0.0);
    CHECK(s(c - b, c + 1) == 0.0);
    // no coupling between the two corner blocks
    CHECK(s(0, n - 1) == 0.0);
}

TEST_CASE("parameter round-trip is exact") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> dist;
    for (const auto& pattern :
         {SparsityPattern::dense(), SparsityPattern::banded(2, 4), SparsityPattern::banded(1, 1)}) {
        const int n = 13;
        const long count = unknown_count(n, pattern);
        Eigen::VectorXd sigma(count);
        for (long i = 0; i < count; ++i) sigma(i) = dist(rng);
        auto s = skew_from_parameters(pattern, sigma, n);
        Eigen::VectorXd back = skew_parameters(pattern, s);
        CHECK((back - sigma).cwiseAbs().maxCoeff() == 0.0);
        CHECK((s + s.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("wrong parameter count is reported") {
    CHECK_THROWS_AS(skew_from_parameters(SparsityPattern::dense(), Eigen::VectorXd::Zero(4), 4),
                    std::invalid_argument);
    try {
        skew_from_parameters(SparsityPattern::dense(), Eigen::VectorXd::Zero(4), 4);
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("6") != std::string::npos);
    }
}

TEST_CASE("pattern spec grammar") {
    CHECK(parse_pattern_spec("dense").is_dense());
    auto p = parse_pattern_spec("banded:b=3,c=6");
    CHECK(p.bandwidth() == 3);
    CHECK(p.boundary_size() == 6);
    auto q = parse_pattern_spec("banded:b=2"); // c defaults to 2b
    CHECK(q.boundary_size() == 4);
    CHECK_THROWS_AS(parse_pattern_spec("sparse"), std::invalid_argument);
    CHECK_THROWS_AS(parse_pattern_spec("banded:c=6"), std::invalid_argument);
}
