#include <doctest.h>

#include "emoidx/calendar.hpp"
#include "emoidx/csv.hpp"
#include "emoidx/error.hpp"
#include "test_util.hpp"

using namespace emoidx;
using emoidx::testing::D;

TEST_CASE("dates parse and format") {
    CHECK(format_date(D("2024-02-29")) == "2024-02-29");
    CHECK_THROWS_AS(parse_date("2023-02-29"), DataError);
    CHECK_THROWS_AS(parse_date("2024-1-01"), DataError);
    CHECK_THROWS_AS(parse_date("2024-01-01x"), DataError);
    CHECK(weekday_index(D("2024-01-01")) == 0);  // Monday
    CHECK(weekday_index(D("2024-01-07")) == 6);  // Sunday
    const Period p = parse_period("2024-01-01:2024-12-31");
    CHECK((p.last - p.first).count() == 365);
    CHECK_THROWS_AS(parse_period("2024-12-31:2024-01-01"), DataError);
}

TEST_CASE("rfc3339 offsets map to the same instant") {
    const Instant a = parse_rfc3339("2024-01-01T09:00:00+09:00");
    const Instant b = parse_rfc3339("2024-01-01T00:00:00Z");
    CHECK(a == b);
    CHECK(parse_rfc3339("2024-01-01T00:00:00.250Z") - b == std::chrono::milliseconds{250});
    CHECK(format_rfc3339(a, 540) == "2024-01-01T09:00:00+09:00");
    CHECK(parse_rfc3339(format_rfc3339(a, -330)) == a);
    CHECK_THROWS_AS(parse_rfc3339("2024-01-01T00:00:00"), DataError);
    CHECK_THROWS_AS(parse_rfc3339("2024-01-01T25:00:00Z"), DataError);
}

TEST_CASE("csv quoting") {
    const auto f = csv::split(R"(a,"b,c","d""e",)");
    REQUIRE(f.size() == 4);
    CHECK(f[1] == "b,c");
    CHECK(f[2] == "d\"e");
    CHECK(f[3].empty());
    CHECK(csv::split(csv::escape("x,\"y\""))[0] == "x,\"y\"");
    CHECK_THROWS_AS(csv::split("\"open"), DataError);
}

TEST_CASE("doubles round-trip through text") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
        CHECK(csv::parse_double(csv::format_double(v)) == v);
    }
    CHECK_THROWS_AS(csv::parse_double("1.0x"), DataError);
    CHECK_THROWS_AS(csv::parse_double("nan"), DataError);
}
