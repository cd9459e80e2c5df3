#include <doctest.h>

#include <cmath>
#include <numbers>
#include <tuple>

#include "awg/error.hpp"
#include "awg/graph_build.hpp"
#include "test_support.hpp"

using namespace awg;

namespace {

Voxel voxel_of(std::vector<Event> events) {
    Voxel v;
    v.events.events = std::move(events);
    v.source.resize(v.events.size());
    return v;
}

// Exhaustive argmin over every other node under the documented preference order:
// later events first, then earlier, then simultaneous; nearest in time, then in space, then by id.
NodeId exhaustive_reference(const std::vector<Event>& ev, NodeId i) {
    NodeId best = 0;
    bool have = false;
    std::tuple<int, long long, long long, NodeId> best_key;
    for (NodeId j = 0; j < ev.size(); ++j) {
        if (j == i) continue;
        const long long dt = ev[j].t - ev[i].t;
        const int cls = dt > 0 ? 0 : (dt < 0 ? 1 : 2);
        const long long dx = ev[j].x - ev[i].x, dy = ev[j].y - ev[i].y;
        const auto key = std::make_tuple(cls, dt < 0 ? -dt : dt, dx * dx + dy * dy, j);
        if (!have || key < best_key) {
            best_key = key;
            best = j;
            have = true;
        }
    }
    return best;
}

// Term-by-term recomputation of the pair factors with plain arithmetic.
PairFactors scripted_factors(const std::vector<Event>& ev, NodeId i, NodeId j) {
    const auto vel = [&](NodeId a) {
        const auto& e = ev[a];
        const auto& r = ev[exhaustive_reference(ev, a)];
        const double dt = static_cast<double>(r.t - e.t);
        const double dx = r.x - e.x, dy = r.y - e.y;
        return dt == 0.0 ? std::pair{dx, dy} : std::pair{dx / dt, dy / dt};
    };
    const auto [vix, viy] = vel(i);
    const auto [vjx, vjy] = vel(j);
    const double mi = std::sqrt(vix * vix + viy * viy), mj = std::sqrt(vjx * vjx + vjy * vjy);
    PairFactors f;
    const double dx = ev[j].x - ev[i].x, dy = ev[j].y - ev[i].y, dt = static_cast<double>(ev[j].t - ev[i].t);
    f.d = std::sqrt(dx * dx + dy * dy + dt * dt);
    f.dv = std::abs(mi - mj);
    if (mi >= 1e-9 && mj >= 1e-9) {
        double c = (vix * vjx + viy * vjy) / (mi * mj);
        c = std::max(-1.0, std::min(1.0, c));
        f.theta = std::acos(c);
    }
    f.pol = ev[i].p == ev[j].p ? 0 : 1;
    return f;
}

std::vector<Event> random_voxel_events(Rng& rng, std::size_t n, std::int64_t max_t) {
    std::vector<Event> ev;
    for (std::size_t k = 0; k < n; ++k) ev.push_back(test::random_event(rng, 40, max_t));
    return ev;
}

}  // namespace

TEST_CASE("velocity_vector") {
    const auto v = velocity_vector({0, 0, 0, 1}, {2, 4, 2, 1});
    CHECK(v.vx == 1.0);
    CHECK(v.vy == 2.0);
    CHECK_FALSE(v.degenerate);

    const auto flat = velocity_vector({0, 0, 5, 1}, {3, 4, 5, 1});
    CHECK(flat.vx == 3.0);
    CHECK(flat.vy == 4.0);
    CHECK(flat.degenerate);
    CHECK(flat.magnitude() == 5.0);

    const auto same = velocity_vector({7, 7, 7, 1}, {7, 7, 7, 1});
    CHECK(same.vx == 0.0);
    CHECK(same.vy == 0.0);
    CHECK(same.degenerate);

    const auto backwards = velocity_vector({4, 0, 10, 1}, {0, 0, 8, 1});
    CHECK(backwards.vx == 2.0);
}

TEST_CASE("reference_velocity picks the temporal successor, else predecessor") {
    const auto two = voxel_of({{0, 0, 0, 1}, {4, 2, 2, 1}});
    CHECK(reference_neighbor(two.events.events, 0) == 1);
    CHECK(reference_neighbor(two.events.events, 1) == 0);
    CHECK(reference_velocity(two, 0).vx == 2.0);
    CHECK(reference_velocity(two, 1).vx == 2.0);

    const auto three = voxel_of({{0, 0, 0, 1}, {10, 0, 10, 1}, {30, 0, 20, 1}});
    CHECK(reference_neighbor(three.events.events, 0) == 1);
    CHECK(reference_neighbor(three.events.events, 1) == 2);
    CHECK(reference_neighbor(three.events.events, 2) == 1);

    // All timestamps equal: spatial nearest neighbor, degenerate displacement.
    const auto flat = voxel_of({{0, 0, 5, 1}, {10, 0, 5, 1}, {1, 1, 5, 1}});
    CHECK(reference_neighbor(flat.events.events, 0) == 2);
    CHECK(reference_neighbor(flat.events.events, 1) == 2);
    CHECK(reference_velocity(flat, 1).degenerate);

    CHECK_THROWS_AS(reference_velocity(voxel_of({{0, 0, 0, 1}}), 0), DomainError);
    CHECK_THROWS_AS(reference_velocity(two, 2), DomainError);
}

TEST_CASE("reference neighbors match the exhaustive argmin") {
    Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + uniform_index(rng, 40);
        // Small time ranges force many simultaneous events; max_t = 0 makes them all equal.
        const std::int64_t max_t = static_cast<std::int64_t>(uniform_index(rng, 4)) * 5;
        const auto ev = random_voxel_events(rng, n, max_t);
        const auto all = reference_velocities(ev);
        for (NodeId i = 0; i < n; ++i) {
            const auto expected = exhaustive_reference(ev, i);
            REQUIRE(reference_neighbor(ev, i) == expected);
            const auto v = velocity_vector(ev[i], ev[expected]);
            CHECK(all[i].vx == v.vx);
            CHECK(all[i].vy == v.vy);
            CHECK(all[i].degenerate == v.degenerate);
        }
    }
}

TEST_CASE("angular_difference") {
    CHECK(angular_difference({1, 0, false}, {0, 1, false}) == doctest::Approx(std::numbers::pi / 2));
    CHECK(angular_difference({1, 1, false}, {2, 2, false}) == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(angular_difference({1, 0, false}, {0, 0, false}) == 0.0);
    CHECK(angular_difference({1, 0, false}, {-3, 0, false}) == doctest::Approx(std::numbers::pi));
    CHECK(angular_difference({1e-10, 0, false}, {0, 1, false}) == 0.0);
    // Nearly parallel vectors whose cosine rounds above 1 still give a finite angle.
    const double a = angular_difference({0.1, 0.3, false}, {0.2, 0.6, false});
    CHECK(std::isfinite(a));
    CHECK(a >= 0.0);
}

TEST_CASE("polarity_consistency") {
    CHECK(polarity_consistency(1, 1) == 0);
    CHECK(polarity_consistency(1, -1) == 1);
    CHECK(polarity_consistency(-1, -1) == 0);
    CHECK(polarity_consistency(-1, 1) == 1);
}

TEST_CASE("pair_factors") {
    const auto same = voxel_of({{2, 2, 2, 1}, {2, 2, 2, 1}});
    const auto f0 = pair_factors(same, 0, 1);
    CHECK(f0.d == 0.0);
    CHECK(f0.pol == 0);

    const auto tri = voxel_of({{0, 0, 0, 1}, {3, 4, 0, -1}});
    const auto f1 = pair_factors(tri, 0, 1);
    CHECK(f1.d == 5.0);
    CHECK(f1.pol == 1);

    CHECK_THROWS_AS(pair_factors(tri, 0, 2), DomainError);
    CHECK_THROWS_AS(pair_factors(tri, 1, 1), DomainError);
}

TEST_CASE("pair_factors matches the scripted recomputation") {
    Rng rng(103);
    for (int trial = 0; trial < 50; ++trial) {
        const auto ev = random_voxel_events(rng, 2 + uniform_index(rng, 20), 1 + uniform_index(rng, 300));
        const auto v = voxel_of(ev);
        for (int k = 0; k < 10; ++k) {
            const auto i = static_cast<NodeId>(uniform_index(rng, ev.size()));
            auto j = static_cast<NodeId>(uniform_index(rng, ev.size()));
            if (i == j) j = (j + 1) % ev.size();
            const auto got = pair_factors(v, i, j);
            const auto want = scripted_factors(ev, i, j);
            CHECK(got.d == doctest::Approx(want.d).epsilon(1e-12));
            CHECK(got.dv == doctest::Approx(want.dv).epsilon(1e-12));
            // acos loses half its digits next to 0 and pi, so compare absolutely.
            CHECK(std::abs(got.theta - want.theta) < 1e-7);
            CHECK(got.pol == want.pol);
            CHECK(got.theta >= 0.0);
            CHECK(got.theta <= std::numbers::pi);
        }
    }
}

TEST_CASE("weight presets") {
    CHECK(weight_preset("comb1") == WeightParams{1.0, 0.0, 0.0, 0.0, true});
    CHECK(weight_preset("comb2") == WeightParams{0.8, 0.1, 0.05, 0.05, true});
    CHECK(weight_preset("comb3") == WeightParams{0.7, 0.1, 0.1, 0.1, true});
    CHECK(weight_preset("comb4") == WeightParams{0.6, 0.2, 0.1, 0.1, true});
    CHECK(WeightParams{} == weight_preset("comb3"));
    CHECK_THROWS_AS(weight_preset("comb5"), DomainError);

    WeightParams bad{0, 0, 0, 0, true};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad.alpha = -1;
    bad.beta = 2;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("edge_weight") {
    auto comb3 = weight_preset("comb3");
    comb3.normalize_factors = false;
    CHECK(edge_weight({1.0, 0.5, 0.5, 1}, comb3) == doctest::Approx(0.9).epsilon(1e-15));

    auto comb1 = weight_preset("comb1");
    comb1.normalize_factors = false;
    CHECK(edge_weight({3.25, 9.0, 2.0, 1}, comb1) == 3.25);

    CHECK(edge_weight({0, 0, 0, 0}, weight_preset("comb3")) == 0.0);

    // Normalized: d by the diagonal, dv by the max dv, theta by pi.
    const FactorScales scales{10.0, 4.0};
    const double w = edge_weight({5.0, 2.0, std::numbers::pi / 2, 1}, weight_preset("comb4"), scales);
    CHECK(w == doctest::Approx(0.6 * 0.5 + 0.2 * 0.5 + 0.1 * 0.5 + 0.1));
}

TEST_CASE("build_graph produces the complete graph") {
    const auto one = build_graph(voxel_of({{1, 1, 1, 1}}), WeightParams{});
    CHECK(one.node_count() == 1);
    CHECK(one.edge_count() == 0);

    const auto empty = build_graph(voxel_of({}), WeightParams{});
    CHECK(empty.node_count() == 0);

    const auto four = build_graph(voxel_of({{0, 0, 0, 1}, {1, 0, 1, 1}, {0, 1, 2, -1}, {5, 5, 3, 1}}), WeightParams{});
    CHECK(four.edge_count() == 6);
    CHECK_NOTHROW(four.validate());
}

TEST_CASE("build_graph edges match pairwise recomputation") {
    Rng rng(107);
    for (int trial = 0; trial < 20; ++trial) {
        const auto ev = random_voxel_events(rng, 2 + uniform_index(rng, 30), 1 + uniform_index(rng, 500));
        const auto n = ev.size();
        const WeightParams params{0.6, 0.2, 0.1, 0.1, trial % 2 == 0};

        // Scales: bounding-box diagonal and the spread of reference speeds.
        std::int64_t x0 = INT64_MAX, x1 = INT64_MIN, y0 = INT64_MAX, y1 = INT64_MIN, t0 = INT64_MAX, t1 = INT64_MIN;
        double s0 = 1e300, s1 = -1e300;
        for (NodeId i = 0; i < n; ++i) {
            x0 = std::min<std::int64_t>(x0, ev[i].x), x1 = std::max<std::int64_t>(x1, ev[i].x);
            y0 = std::min<std::int64_t>(y0, ev[i].y), y1 = std::max<std::int64_t>(y1, ev[i].y);
            t0 = std::min(t0, ev[i].t), t1 = std::max(t1, ev[i].t);
            const auto r = ev[exhaustive_reference(ev, i)];
            const double dt = static_cast<double>(r.t - ev[i].t);
            const double dx = r.x - ev[i].x, dy = r.y - ev[i].y;
            const double s = dt == 0.0 ? std::hypot(dx, dy) : std::hypot(dx / dt, dy / dt);
            s0 = std::min(s0, s), s1 = std::max(s1, s);
        }
        double diag = std::sqrt(double(x1 - x0) * (x1 - x0) + double(y1 - y0) * (y1 - y0) + double(t1 - t0) * (t1 - t0));
        if (diag == 0.0) diag = 1.0;
        const double dvmax = s1 - s0 > 0.0 ? s1 - s0 : 1.0;

        const auto g = build_graph(voxel_of(ev), params);
        REQUIRE(g.edge_count() == n * (n - 1) / 2);
        std::size_t k = 0;
        for (NodeId i = 0; i < n; ++i) {
            for (NodeId j = i + 1; j < n; ++j, ++k) {
                const auto f = scripted_factors(ev, i, j);
                const double want = params.normalize_factors
                                        ? 0.6 * f.d / diag + 0.2 * f.dv / dvmax + 0.1 * f.theta / std::numbers::pi + 0.1 * f.pol
                                        : 0.6 * f.d + 0.2 * f.dv + 0.1 * f.theta + 0.1 * f.pol;
                REQUIRE(g.edges[k].i == i);
                REQUIRE(g.edges[k].j == j);
                CHECK(g.edges[k].w == doctest::Approx(want).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("edge weights are symmetric in the pair") {
    Rng rng(109);
    for (int trial = 0; trial < 30; ++trial) {
        const auto ev = random_voxel_events(rng, 2 + uniform_index(rng, 15), 1 + uniform_index(rng, 50));
        const auto v = voxel_of(ev);
        for (NodeId i = 0; i < ev.size(); ++i) {
            for (NodeId j = 0; j < ev.size(); ++j) {
                if (i == j) continue;
                const auto a = pair_factors(v, i, j), b = pair_factors(v, j, i);
                CHECK(edge_weight(a, weight_preset("comb3")) == edge_weight(b, weight_preset("comb3")));
            }
        }
    }
}

TEST_CASE("comb1 without normalization reduces to Euclidean distance") {
    Rng rng(113);
    auto params = weight_preset("comb1");
    params.normalize_factors = false;
    for (int trial = 0; trial < 10; ++trial) {
        const auto ev = random_voxel_events(rng, 2 + uniform_index(rng, 25), 10000);
        const auto g = build_graph(voxel_of(ev), params);
        for (const auto& e : g.edges) {
            const double dx = ev[e.j].x - ev[e.i].x, dy = ev[e.j].y - ev[e.i].y;
            const double dt = static_cast<double>(ev[e.j].t - ev[e.i].t);
            CHECK(std::abs(e.w - std::sqrt(dx * dx + dy * dy + dt * dt)) < 1e-12);
        }
    }
}

TEST_CASE("normalized weights are bounded by the coefficient sum") {
    Rng rng(127);
    for (int trial = 0; trial < 30; ++trial) {
        const WeightParams params{uniform01(rng), uniform01(rng), uniform01(rng), uniform01(rng) + 0.01, true};
        const auto ev = random_voxel_events(rng, 2 + uniform_index(rng, 25), uniform_index(rng, 1000));
        const auto g = build_graph(voxel_of(ev), params);
        const double cap = params.alpha + params.beta + params.gamma + params.delta;
        for (const auto& e : g.edges) {
            CHECK(e.w >= 0.0);
            CHECK(e.w <= cap * (1 + 1e-12));
        }
    }
}

TEST_CASE("flipping one polarity shifts the weight by exactly delta") {
    Rng rng(131);
    for (bool normalize : {false, true}) {
        for (int trial = 0; trial < 20; ++trial) {
            auto ev = random_voxel_events(rng, 3 + uniform_index(rng, 10), 200);
            const WeightParams params{0.7, 0.1, 0.1, 0.1 + uniform01(rng), normalize};
            const auto before = build_graph(voxel_of(ev), params);
            const auto flip = static_cast<NodeId>(uniform_index(rng, ev.size()));
            ev[flip].p = static_cast<std::int8_t>(-ev[flip].p);
            const auto after = build_graph(voxel_of(ev), params);
            for (std::size_t k = 0; k < before.edges.size(); ++k) {
                const auto& e = before.edges[k];
                const double diff = after.edges[k].w - e.w;
                if (e.i == flip || e.j == flip) {
                    CHECK(std::abs(std::abs(diff) - params.delta) < 1e-12);
                } else {
                    CHECK(diff == 0.0);
                }
            }
        }
    }
}

TEST_CASE("EventGraph::validate") {
    EventGraph g;
    g.nodes.resize(3);
    g.edges = {{0, 1, 1.0}, {1, 2, 1.0}};
    CHECK_NOTHROW(g.validate());
    g.edges.push_back({0, 1, 2.0});
    CHECK_THROWS_AS(g.validate(), DomainError);
    g.edges = {{1, 1, 1.0}};
    CHECK_THROWS_AS(g.validate(), DomainError);
    g.edges = {{0, 3, 1.0}};
    CHECK_THROWS_AS(g.validate(), DomainError);
}
