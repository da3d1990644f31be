#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mmm/asymptotics.hpp"
#include "mmm/implied_vol.hpp"
#include "mmm/surface.hpp"
#include "test_helpers.hpp"

using namespace mmm;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i)
        v.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return v;
}

} // namespace

TEST_CASE("single-cell grid equals the scalar call") {
    const ModelParams p = testutil::sp500();
    const SurfaceGrid g = generate(p, {p.S}, {1.0});
    CHECK(g.iv.size() == 1);
    CHECK(g.iv[0].size() == 1);
    CHECK(g.iv[0][0] == implied_vol_mmm(p, p.S, 1.0).vol);
    CHECK(g.failures.empty());
    CHECK(g.small_limits[0] == small_time_limit(p, p.S));
    CHECK(g.large_limit == large_time_limit(p));
}

TEST_CASE("calibrated grid succeeds inside the sanity envelope") {
    const ModelParams p = testutil::sp500();
    const SurfaceGrid g =
        generate(p, linspace(0.5 * p.S, 2.0 * p.S, 21), linspace(0.1, 10.0, 20));
    CHECK(g.failures.empty());
    for (const auto& row : g.iv)
        for (double v : row) {
            CHECK(v > 0.1);
            CHECK(v < 0.6);
        }

    // shortest expiry row carries the skew shape of the small-time curve
    for (std::size_t j = 0; j < g.strikes.size(); ++j)
        CHECK(std::abs(g.iv[0][j] - g.small_limits[j]) <= 0.1 * g.small_limits[j]);
}

TEST_CASE("near-the-money cells track the small-time curve at T = 0.01") {
    const ModelParams p = testutil::sp500();
    for (double m : {0.85, 0.95, 1.1, 1.25}) {
        const double K = m * p.S;
        const double iv = implied_vol_mmm(p, K, 0.01).vol;
        CHECK(std::abs(iv - small_time_limit(p, K)) <= 0.1 * small_time_limit(p, K));
    }
}

TEST_CASE("longest expiry sits closer to the large-time limit") {
    // strikes where the short end starts well away from the large-time limit;
    // near K ~ S the small-time curve happens to cross the limit and the
    // trend carries no signal
    const ModelParams p = testutil::sp500();
    const SurfaceGrid g = generate(
        p, {0.5 * p.S, 0.6 * p.S, 1.6 * p.S, 2.0 * p.S}, {0.1, 1.0, 10.0, 100.0});
    for (std::size_t j = 0; j < g.strikes.size(); ++j) {
        const double first = std::abs(g.iv.front()[j] - g.large_limit);
        const double last = std::abs(g.iv.back()[j] - g.large_limit);
        CHECK(last < first);
    }
}

TEST_CASE("generation is deterministic and thread-invariant") {
    const ModelParams p = testutil::sp500();
    const auto strikes = linspace(0.6 * p.S, 1.7 * p.S, 9);
    const auto expiries = linspace(0.2, 30.0, 6);
    const SurfaceGrid serial = generate(p, strikes, expiries, 1);
    const SurfaceGrid again = generate(p, strikes, expiries, 1);
    const SurfaceGrid parallel = generate(p, strikes, expiries, 4);
    for (std::size_t i = 0; i < serial.iv.size(); ++i)
        for (std::size_t j = 0; j < serial.iv[i].size(); ++j) {
            CHECK(serial.iv[i][j] == again.iv[i][j]);
            CHECK(serial.iv[i][j] == parallel.iv[i][j]);
        }
}

TEST_CASE("cell failures degrade to status codes") {
    const ModelParams p = testutil::sp500();
    const SurfaceGrid g = generate(p, {p.S}, {1.0, 8000.0});
    CHECK(g.failures.size() == 1);
    CHECK(g.failures[0].row == 1);
    CHECK(g.failures[0].col == 0);
    CHECK(g.failures[0].code == "expiry_range");
    CHECK(g.cell_ok(0, 0));
    CHECK(!g.cell_ok(1, 0));

    std::ostringstream csv;
    export_grid(g, ExportFormat::csv, csv);
    CHECK(csv.str().find("expiry_range") != std::string::npos);
}

TEST_CASE("csv export shape and bit-exact round trip") {
    const ModelParams p = testutil::sp500();
    const SurfaceGrid single = generate(p, {p.S}, {1.0});
    std::ostringstream out;
    export_grid(single, ExportFormat::csv, out);
    // header plus exactly one row
    int lines = 0;
    for (char ch : out.str())
        lines += ch == '\n';
    CHECK(lines == 2);

    const SurfaceGrid g =
        generate(p, linspace(0.7 * p.S, 1.5 * p.S, 5), linspace(0.25, 8.0, 4));
    std::ostringstream big;
    export_grid(g, ExportFormat::csv, big);
    std::istringstream in(big.str());
    const SurfaceGrid back = import_csv(in);
    REQUIRE(back.strikes.size() == g.strikes.size());
    REQUIRE(back.expiries.size() == g.expiries.size());
    for (std::size_t i = 0; i < g.iv.size(); ++i)
        for (std::size_t j = 0; j < g.iv[i].size(); ++j)
            CHECK(back.iv[i][j] == g.iv[i][j]);
    for (std::size_t j = 0; j < g.strikes.size(); ++j) {
        CHECK(back.strikes[j] == g.strikes[j]);
        CHECK(back.small_limits[j] == g.small_limits[j]);
    }
    CHECK(back.large_limit == g.large_limit);
}

TEST_CASE("json export mirrors the csv schema") {
    const ModelParams p = testutil::sp500();
    const SurfaceGrid g = generate(p, linspace(0.9 * p.S, 1.1 * p.S, 3), {0.5, 2.0});
    std::ostringstream out;
    export_grid(g, ExportFormat::json, out);
    const std::string text = out.str();
    for (const char* key : {"\"expiry\"", "\"strike\"", "\"iv\"", "\"small_limit\"",
                            "\"large_limit\"", "\"status\""})
        CHECK(text.find(key) != std::string::npos);
}

TEST_CASE("grid validation") {
    const ModelParams p = testutil::sp500();
    CHECK_THROWS_AS(generate(p, {}, {1.0}), Error);
    CHECK_THROWS_AS(generate(p, {p.S}, {2.0, 1.0}), Error);
    CHECK_THROWS_AS(generate(p, {-p.S}, {1.0}), Error);
}
