#include <doctest.h>

#include <cmath>
#include <random>

#include "dse/network.hpp"
#include "dse/simulation.hpp"

using namespace dse;

namespace {

DiGraph graph_of(int n, std::initializer_list<std::pair<int, int>> edges) {
    std::vector<Edge> es;
    for (auto [u, v] : edges) es.push_back(Edge{u, v, 0.0, nullptr});
    return DiGraph(n, es);
}

// Straightforward exhaustive walk enumeration with the same revisit budget,
// used as the reference for the search routine.
bool brute_force_walk_exists(const DiGraph& g, bool closed) {
    const int n = g.node_count();
    if (n == 1) return true;
    std::vector<int> visits(static_cast<size_t>(n + 1), 0);
    int covered = 0;
    std::function<bool(int, int)> dfs = [&](int v, int start) -> bool {
        if (covered == n && (!closed || v == start)) return true;
        for (int w : g.out_neighbors(v)) {
            if (visits[static_cast<size_t>(w)] >= n) continue;
            ++visits[static_cast<size_t>(w)];
            const bool first = visits[static_cast<size_t>(w)] == 1;
            if (first) ++covered;
            if (dfs(w, start)) return true;
            if (first) --covered;
            --visits[static_cast<size_t>(w)];
        }
        return false;
    };
    for (int s = 1; s <= n; ++s) {
        std::fill(visits.begin(), visits.end(), 0);
        visits[static_cast<size_t>(s)] = 1;
        covered = 1;
        if (dfs(s, s)) return true;
    }
    return false;
}

Scenario benchmark_scenario() {
    Scenario s;
    s.a = make_matrix(6, 6,
                      {-1, 0, 0, 0, 0, 0,
                       -1, 1, 1, 0, 0, 0,
                       1, -2, -1, -1, 1, 1,
                       0, 0, 0, -1, 0, 0,
                       -8, 1, -1, -1, -2, 0,
                       4, -0.5, 0.5, 0, 0, -4});
    s.sensors = {make_matrix(2, 6, {1, 0, 0, 2, 0, 0, 2, 0, 0, 1, 0, 0}),
                 make_matrix(1, 6, {2, 0, 5, 0, 0, 3})};
    s.x0 = Vector(6);
    s.x0 << 1, 3, -2, -3, -1, 2;
    s.node_count = 2;
    s.edges = {Edge{1, 2, 0.0, nullptr}};
    s.walk = WalkOrder{{1, 2}, false};
    s.agents = {{1.0, 5.0, 0.05, 1.0, {}}, {0.8, 20.0, 0.1, 1.0, {}}};
    s.dt = 1e-3;
    s.t_final = 3.0;
    return s;
}

}  // namespace

TEST_CASE("graph construction rejects bad edges") {
    CHECK_THROWS_AS(graph_of(2, {{1, 1}}), ConfigError);
    CHECK_THROWS_AS(graph_of(2, {{1, 3}}), ConfigError);
    CHECK_THROWS_AS(graph_of(2, {{1, 2}, {1, 2}}), ConfigError);
}

TEST_CASE("walk validation examples") {
    {
        const auto d = validate_walk(graph_of(2, {{1, 2}}), WalkOrder{{1, 2}, false});
        CHECK(d.valid);
    }
    {
        const auto d = validate_walk(graph_of(2, {{1, 2}, {2, 1}}), WalkOrder{{1, 2, 1}, true});
        CHECK(d.valid);
    }
    {
        const auto d = validate_walk(graph_of(2, {{1, 2}}), WalkOrder{{2, 1}, false});
        CHECK(!d.valid);
        CHECK(d.reason == "missing edge 2->1");
    }
    {
        const auto d = validate_walk(graph_of(3, {{1, 2}}), WalkOrder{{1, 2}, false});
        CHECK(!d.valid);
        CHECK(d.reason == "vertex 3 not visited");
    }
    {
        // revisiting fails in path mode only
        const auto g = graph_of(3, {{1, 2}, {2, 1}, {1, 3}});
        const WalkOrder w{{2, 1, 3}, false};
        CHECK(validate_walk(g, w).valid);
        const WalkOrder revisit{{1, 2, 1, 3}, false};
        CHECK(validate_walk(g, revisit).valid);
        CHECK(!validate_walk(g, revisit, /*path_mode=*/true).valid);
    }
}

TEST_CASE("walk search on the documented examples") {
    {
        const auto g = graph_of(3, {{1, 2}, {1, 3}, {2, 1}, {2, 3}, {3, 1}, {3, 2}});
        const auto w = find_walk(g, false);
        REQUIRE(w);
        CHECK(w->nodes == std::vector<int>{1, 2, 3});
    }
    {
        const auto g = graph_of(3, {{1, 2}, {2, 3}, {3, 1}});
        const auto w = find_walk(g, true);
        REQUIRE(w);
        CHECK(w->nodes == std::vector<int>{1, 2, 3, 1});
        CHECK(w->closed);
    }
    {
        const auto g = graph_of(3, {{1, 2}, {3, 2}});
        CHECK(!find_walk(g, false));
        CHECK(!find_walk(g, true));
    }
    CHECK_THROWS_AS(find_walk(DiGraph(13, {}), false), ConfigError);
}

TEST_CASE("found walks always validate; brute force agrees on random graphs") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 80; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        std::vector<Edge> edges;
        for (int u = 1; u <= n; ++u)
            for (int v = 1; v <= n; ++v)
                if (u != v && rng() % 100 < 35) edges.push_back(Edge{u, v, 0.0, nullptr});
        DiGraph g(n, edges);
        for (bool closed : {false, true}) {
            const auto found = find_walk(g, closed);
            CHECK(found.has_value() == brute_force_walk_exists(g, closed));
            if (found) {
                const auto d = validate_walk(g, *found);
                CHECK(d.valid);
                CHECK(found->closed == closed);
            }
        }
        if (g.strongly_connected()) CHECK(find_walk(g, true).has_value());
    }
}

TEST_CASE("channel delivers immediately at zero delay") {
    ChannelBuffer ch(Edge{1, 2, 0.0, nullptr});
    ch.send(0.3, {1.0, 2.0});
    const auto got = ch.poll(0.3);
    REQUIRE(got.size() == 1);
    CHECK(got[0].payload == std::vector<double>{1.0, 2.0});
}

TEST_CASE("constant delay shifts delivery") {
    ChannelBuffer ch(Edge{1, 2, 0.5, nullptr});
    ch.send(0.3, {1.0});
    CHECK(ch.poll(0.79).empty());
    const auto got = ch.poll(0.8);
    REQUIRE(got.size() == 1);
    CHECK(got[0].delivery_time == doctest::Approx(0.8));
}

TEST_CASE("send times must be monotone per channel") {
    ChannelBuffer ch(Edge{1, 2, 0.0, nullptr});
    ch.send(1.0, {});
    CHECK_THROWS_AS(ch.send(0.5, {}), ProtocolError);
}

TEST_CASE("time-varying delay matches an event-list computation") {
    Edge e{1, 2, 0.0, [](double t) { return 0.1 + 0.05 * std::sin(t); }};
    ChannelBuffer ch(e);
    std::vector<std::pair<double, int>> events;  // (delivery time, tag)
    const double dt = 0.01;
    for (int k = 0; k < 300; ++k) {
        const double t = k * dt;
        ch.send(t, {}, k);
        events.emplace_back(t + 0.1 + 0.05 * std::sin(t), k);
    }
    std::stable_sort(events.begin(), events.end(),
                     [](auto& a, auto& b) { return a.first < b.first; });
    std::vector<int> delivered;
    size_t next_event = 0;
    for (int k = 0; k < 340; ++k) {
        const double t = k * dt;
        for (const auto& m : ch.poll(t)) delivered.push_back(m.tag);
        while (next_event < events.size() && events[next_event].first <= t + 1e-12) {
            CHECK(delivered.size() > next_event);
            CHECK(delivered[next_event] == events[next_event].second);
            ++next_event;
        }
    }
    CHECK(next_event == events.size());  // everything eventually delivered
}

TEST_CASE("switching schedule: static, gaps, and union") {
    SwitchingSchedule always(std::vector<SwitchingSchedule::Segment>{
        {0.0, 10.0, {{1, 2}}}});
    always.check_coverage(0, 10);
    CHECK(always.active_at(1, 2, 0.0));
    CHECK(always.active_at(1, 2, 9.5));
    CHECK(!always.active_at(2, 1, 5.0));

    SwitchingSchedule gappy(std::vector<SwitchingSchedule::Segment>{
        {0.0, 1.0, {{1, 2}}}, {2.0, 3.0, {{1, 2}}}});
    CHECK_THROWS_AS(gappy.check_coverage(0, 3), ConfigError);

    SwitchingSchedule two(std::vector<SwitchingSchedule::Segment>{
        {0.0, 1.0, {{1, 2}}}, {1.0, 3.0, {{2, 1}}}});
    const auto u = two.union_edges();
    CHECK(u.count({1, 2}));
    CHECK(u.count({2, 1}));
}

TEST_CASE("delayed edge postpones only the downstream latch") {
    Scenario base = benchmark_scenario();
    RunResult r0 = run(base);
    REQUIRE(r0.summary.latch_times_s[0]);
    REQUIRE(r0.summary.latch_times_s[1]);

    Scenario delayed = base;
    delayed.edges[0].delay = 0.2;
    delayed.t_final = 3.5;
    RunResult r1 = run(delayed);
    REQUIRE(r1.summary.latch_times_s[1]);
    CHECK(std::abs(*r1.summary.latch_times_s[0] - *r0.summary.latch_times_s[0]) <= 2 * base.dt + 1e-12);
    CHECK(std::abs(*r1.summary.latch_times_s[1] - *r0.summary.latch_times_s[1] - 0.2) <=
          2 * base.dt + 1e-12);
}

TEST_CASE("switching window delays arming until the link comes up") {
    Scenario base = benchmark_scenario();
    RunResult r0 = run(base);

    Scenario sw = base;
    sw.t_final = 3.5;
    sw.switching = {{0.0, 0.5, {}}, {0.5, 2.0, {{1, 2}}}, {2.0, 3.5, {}}};
    RunResult r1 = run(sw);
    REQUIRE(r1.summary.armed_times_s[1]);
    CHECK(*r1.summary.armed_times_s[1] == doctest::Approx(0.5).epsilon(0.02));
    // Downstream latch moves by the arming shift.
    REQUIRE(r1.summary.latch_times_s[1]);
    const double shift = *r1.summary.armed_times_s[1] - *r0.summary.armed_times_s[1];
    CHECK(std::abs(*r1.summary.latch_times_s[1] - *r0.summary.latch_times_s[1] - shift) <=
          2 * base.dt + 1e-12);
}

TEST_CASE("a union that never activates the chain edge is flagged") {
    Scenario sw = benchmark_scenario();
    sw.switching = {{0.0, 3.0, {}}};  // edge 1->2 exists but never comes up
    RunResult r = run(sw);
    CHECK(!r.summary.latch_times_s[1]);
    CHECK(!r.summary.validation.at("all_agents_latched"));
}
