#include <doctest.h>

#include "tripchain/dates.hpp"

using namespace tripchain;
using std::chrono::seconds;

TEST_SUITE("dates") {

TEST_CASE("dates parse and format") {
    const auto d = parse_date("2017-08-25");
    REQUIRE(d);
    CHECK(format_date(*d) == "2017-08-25");
    CHECK_FALSE(parse_date("2017-02-30"));
    CHECK_FALSE(parse_date("2017-8-25"));
    CHECK_FALSE(parse_date("2017-08-25x"));
    CHECK_FALSE(parse_date(""));
    CHECK(format_date(*parse_date("2016-02-29")) == "2016-02-29");
}

TEST_CASE("times parse and format") {
    CHECK(parse_time("07:16:00") == seconds(7 * 3600 + 16 * 60));
    CHECK(parse_time("00:00:00") == seconds(0));
    CHECK(parse_time("24:00:00") == kEndOfDay);
    CHECK_FALSE(parse_time("24:00:01"));
    CHECK_FALSE(parse_time("12:60:00"));
    CHECK_FALSE(parse_time("7:16"));
    CHECK(format_time(seconds(45296)) == "12:34:56");
    CHECK(format_time(kEndOfDay) == "24:00:00");
}

TEST_CASE("date ranges are closed intervals") {
    const auto r = parse_date_range("2018-02-01..2018-02-28");
    REQUIRE(r);
    CHECK(r->contains(*parse_date("2018-02-01")));
    CHECK(r->contains(*parse_date("2018-02-28")));
    CHECK_FALSE(r->contains(*parse_date("2018-03-01")));
    CHECK(format_date_range(*r) == "2018-02-01..2018-02-28");
    CHECK_FALSE(parse_date_range("2018-02-28..2018-02-01"));
    CHECK_FALSE(parse_date_range("2018-02-01"));
}

}
