#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "awg/error.hpp"
#include "awg/event_io.hpp"
#include "test_support.hpp"

using namespace awg;

TEST_CASE("parse_event_csv maps fields in file order") {
    const auto s = parse_event_csv("0,0,0,1\n3,4,0,-1");
    REQUIRE(s.size() == 2);
    CHECK(s[0] == Event{0, 0, 0, 1});
    CHECK(s[1] == Event{3, 4, 0, -1});
    CHECK_FALSE(s.sorted_by_time);
}

TEST_CASE("parse_event_csv reads polarity 0 as OFF") {
    const auto s = parse_event_csv("1,2,3,0");
    REQUIRE(s.size() == 1);
    CHECK(s[0] == Event{1, 2, 3, -1});
}

TEST_CASE("parse_event_csv on empty input") {
    CHECK(parse_event_csv("").empty());
    CHECK(parse_event_csv("\n\n").empty());
    CHECK(parse_event_csv("x,y,t,p\n").empty());
}

TEST_CASE("parse_event_csv skips the header, blank lines and CR") {
    const auto s = parse_event_csv("x,y,t,p\r\n5,6,7,1\r\n\r\n8,9,10,-1\r\n");
    REQUIRE(s.size() == 2);
    CHECK(s[1] == Event{8, 9, 10, -1});
}

TEST_CASE("parse_event_csv errors carry the line number") {
    try {
        parse_event_csv("0,0,0,1\n\n1,2,abc,1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_event_csv("1,2,3\n"), ParseError);
    CHECK_THROWS_AS(parse_event_csv("1,2,3,1,5\n"), ParseError);
    CHECK_THROWS_AS(parse_event_csv("1,2,,1\n"), ParseError);
    CHECK_THROWS_AS(parse_event_csv("1.5,2,3,1\n"), ParseError);
    // A header after data is just a malformed record.
    CHECK_THROWS_AS(parse_event_csv("1,2,3,1\nx,y,t,p\n"), ParseError);
}

TEST_CASE("parse_event_csv rejects out-of-domain values") {
    CHECK_THROWS_AS(parse_event_csv("1,2,3,2"), DomainError);
    CHECK_THROWS_AS(parse_event_csv("1,2,3,-2"), DomainError);
    CHECK_THROWS_AS(parse_event_csv("-1,2,3,1"), DomainError);
    CHECK_THROWS_AS(parse_event_csv("1,2,-3,1"), DomainError);
}

TEST_CASE("write_event_csv") {
    CHECK(write_event_csv(EventStream{{{0, 0, 0, 1}}}) == "0,0,0,1\n");
    CHECK(write_event_csv(EventStream{}).empty());
    CHECK(write_event_csv(EventStream{{{12, 34, 5678901234, -1}}}) == "12,34,5678901234,-1\n");
}

TEST_CASE("CSV round trip is lossless on random events") {
    Rng rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        const auto s = test::random_stream(rng, 1000, 1 << 20, std::int64_t{1} << 40);
        CHECK(parse_event_csv(write_event_csv(s)) == s);
    }
}

TEST_CASE("compute_extents") {
    const auto e = compute_extents(EventStream{{{0, 0, 0, 1}, {3, 4, 10, -1}}});
    CHECK(e == Extents{0, 3, 0, 4, 0, 10});

    const auto single = compute_extents(EventStream{{{5, 5, 5, 1}}});
    CHECK(single == Extents{5, 5, 5, 5, 5, 5});
    CHECK(single.t_range() == 0);

    CHECK_THROWS_AS(compute_extents(EventStream{}), DomainError);
}

TEST_CASE("compute_extents matches a scan and ignores order") {
    Rng rng(11);
    auto s = test::random_stream(rng, 100);
    std::int32_t x0 = INT32_MAX, x1 = INT32_MIN, y0 = INT32_MAX, y1 = INT32_MIN;
    std::int64_t t0 = INT64_MAX, t1 = INT64_MIN;
    for (std::size_t k = 0; k < s.size(); ++k) {
        x0 = std::min(x0, s[k].x), x1 = std::max(x1, s[k].x);
        y0 = std::min(y0, s[k].y), y1 = std::max(y1, s[k].y);
        t0 = std::min(t0, s[k].t), t1 = std::max(t1, s[k].t);
    }
    const auto ext = compute_extents(s);
    CHECK(ext == Extents{x0, x1, y0, y1, t0, t1});

    std::reverse(s.events.begin(), s.events.end());
    CHECK(compute_extents(s) == ext);
    std::shuffle(s.events.begin(), s.events.end(), rng);
    CHECK(compute_extents(s) == ext);
}

TEST_CASE("sort_by_time is stable") {
    EventStream s{{{0, 0, 5, 1}, {1, 0, 1, 1}, {2, 0, 1, -1}}};
    const auto sorted = sort_by_time(s);
    REQUIRE(sorted.size() == 3);
    CHECK(sorted[0] == Event{1, 0, 1, 1});
    CHECK(sorted[1] == Event{2, 0, 1, -1});
    CHECK(sorted[2] == Event{0, 0, 5, 1});
    CHECK(sorted.sorted_by_time);

    EventStream already{{{0, 0, 1, 1}, {0, 0, 2, 1}}};
    CHECK(sort_by_time(already).events == already.events);
}

TEST_CASE("sort_by_time yields a non-decreasing permutation and is idempotent") {
    Rng rng(3);
    const auto s = test::random_stream(rng, 1000, 10, 50);
    const auto sorted = sort_by_time(s);
    for (std::size_t k = 1; k < sorted.size(); ++k) REQUIRE(sorted[k - 1].t <= sorted[k].t);

    auto key = [](const Event& e) { return std::make_tuple(e.x, e.y, e.t, e.p); };
    auto a = s.events, b = sorted.events;
    std::sort(a.begin(), a.end(), [&](auto& l, auto& r) { return key(l) < key(r); });
    std::sort(b.begin(), b.end(), [&](auto& l, auto& r) { return key(l) < key(r); });
    CHECK(a == b);

    auto unflagged = sorted;
    unflagged.sorted_by_time = false;
    CHECK(sort_by_time(unflagged).events == sorted.events);
}
