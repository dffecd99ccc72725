#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fsbp/error_norms.hpp"
#include "fsbp/svg.hpp"
#include "fsbp/table.hpp"

#include <string>

using namespace fsbp;

namespace {

int count_occurrences(const std::string& haystack, const std::string& needle) {
    int count = 0;
    size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

} // namespace

TEST_CASE("eoc examples") {
    auto orders = eoc({1e-2, 1.25e-3}, {2, 4});
    REQUIRE(orders.size() == 1);
    CHECK(orders[0] == doctest::Approx(3.0).epsilon(1e-12));

    CHECK_THROWS_AS(eoc({1.0, 0.5}, {4, 2}), std::invalid_argument);
    CHECK_THROWS_AS(eoc({1.0}, {2, 4}), std::invalid_argument);
    CHECK(eoc({1.0}, {2}).empty());
}

TEST_CASE("csv rendering with provenance footer") {
    OutputTable t;
    t.headers = {"a", "b"};
    t.config_digest = config_digest("example");
    t.seed = 7;
    t.add_row({"1", "2"});
    t.add_row({"x", "y"});
    const std::string csv = t.render("csv");
    CHECK(csv.find("a,b\n1,2\nx,y\n") == 0);
    CHECK(csv.find("# provenance: config=") != std::string::npos);
    CHECK(csv.find("seed=7") != std::string::npos);
    CHECK(csv.find("version=") != std::string::npos);

    const std::string tsv = t.render("tsv");
    CHECK(tsv.find("a\tb\n") == 0);
    CHECK_THROWS_AS(t.render("xml"), std::invalid_argument);
    CHECK_THROWS_AS(t.add_row({"only-one"}), std::invalid_argument);
}

TEST_CASE("rendering is deterministic") {
    OutputTable t;
    t.headers = {"v"};
    t.config_digest = config_digest("same");
    t.add_row({format_double(1.0 / 3.0, 10)});
    CHECK(t.render() == t.render());
}

TEST_CASE("config digest is stable and input-sensitive") {
    CHECK(config_digest("abc") == config_digest("abc"));
    CHECK(config_digest("abc") != config_digest("abd"));
    CHECK(config_digest("").size() == 16);
}

TEST_CASE("svg basics") {
    Series s;
    s.name = "series";
    s.x = {1.0, 2.0};
    s.y = {1.0, 2.0};
    AxesSpec axes;
    axes.title = "plot";
    const std::string svg = emit_svg({s}, axes);
    CHECK(svg.find("<svg") == 0);
    CHECK(count_occurrences(svg, "<polyline") == 1);
    CHECK(svg.find("series") != std::string::npos);
    CHECK(emit_svg({s}, axes) == svg); // deterministic
}

TEST_CASE("svg rejects bad input") {
    AxesSpec axes;
    CHECK_THROWS_AS(emit_svg({}, axes), std::invalid_argument);

    Series empty;
    empty.name = "none";
    CHECK_THROWS_AS(emit_svg({empty}, axes), std::invalid_argument);

    Series negative;
    negative.name = "bad";
    negative.x = {1.0, 2.0};
    negative.y = {1.0, -2.0};
    AxesSpec log_axes;
    log_axes.y_log = true;
    CHECK_THROWS_AS(emit_svg({negative}, log_axes), std::invalid_argument);
    CHECK_NOTHROW(emit_svg({negative}, axes));
}

TEST_CASE("error-versus-time figure carries one legend entry per series") {
    // sparse/dense for two bases: four series, four legend entries
    std::vector<Series> all;
    for (const char* name : {"P3_sparse", "P3_dense", "T_sparse", "T_dense"}) {
        Series s;
        s.name = name;
        s.x = {0.5, 1.0, 1.5};
        s.y = {1e-3, 2e-3, 4e-3};
        all.push_back(std::move(s));
    }
    AxesSpec axes;
    axes.y_log = true;
    const std::string svg = emit_svg(all, axes);
    CHECK(count_occurrences(svg, "<polyline") == 4);
    for (const char* name : {"P3_sparse", "P3_dense", "T_sparse", "T_dense"})
        CHECK(svg.find(name) != std::string::npos);
}

TEST_CASE("log axis ticks are positive decades") {
    Series s;
    s.name = "wide";
    s.x = {1.0, 10.0, 100.0};
    s.y = {1e-8, 1e-4, 1e-1};
    AxesSpec axes;
    axes.x_log = true;
    axes.y_log = true;
    const std::string svg = emit_svg({s}, axes);
    CHECK(svg.find("1e-06") != std::string::npos);
}
