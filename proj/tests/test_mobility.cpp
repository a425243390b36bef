#include <doctest.h>

#include <cmath>

#include "wds/mobility.hpp"

using namespace wds;

TEST_CASE("every node starts inside the area") {
    const ScenarioConfig cfg = load_config("");
    Rng rng(1);
    const auto states = init_positions(cfg, rng);
    REQUIRE(states.size() == 58);
    for (const auto& st : states) {
        CHECK(st.current.x >= 0.0);
        CHECK(st.current.x <= cfg.area_width);
        CHECK(st.current.y >= 0.0);
        CHECK(st.current.y <= cfg.area_height);
    }
}

TEST_CASE("no nodes yields an empty placement") {
    ScenarioConfig cfg = load_config("wormhole.pairs = 0\n");
    cfg.num_legit_nodes = 0;
    Rng rng(1);
    CHECK(init_positions(cfg, rng).empty());
}

TEST_CASE("wormhole pair endpoints start at least half the diagonal apart") {
    const ScenarioConfig cfg = load_config("");
    const double half_diag =
        0.5 * std::sqrt(cfg.area_width * cfg.area_width + cfg.area_height * cfg.area_height);
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 17ull}) {
        Rng rng(seed);
        const auto states = init_positions(cfg, rng);
        for (int p = 0; p < cfg.num_wormhole_pairs; ++p) {
            const auto& a = states[static_cast<size_t>(cfg.num_legit_nodes + 2 * p)];
            const auto& b = states[static_cast<size_t>(cfg.num_legit_nodes + 2 * p + 1)];
            CHECK(distance(a.current, b.current) >= half_diag);
        }
    }
}

TEST_CASE("a step advances toward the target at the leg speed") {
    WaypointState st;
    st.home = {0, 0, 100, 100};
    st.current = {0, 5};
    st.target = {10, 5};
    st.speed = 1.0;
    st.speed_range = {1.0, 1.0};
    Rng rng(3);
    waypoint_step(st, 1.0, 0.0, rng);
    CHECK(st.current.x == doctest::Approx(1.0));
    CHECK(st.current.y == doctest::Approx(5.0));
}

TEST_CASE("arrival draws a new target without moving this step") {
    WaypointState st;
    st.home = {0, 0, 100, 100};
    st.current = {10, 5};
    st.target = {10, 5};
    st.speed = 2.0;
    st.speed_range = {1.0, 3.0};
    Rng rng(4);
    waypoint_step(st, 1.0, 0.0, rng);
    CHECK(st.current.x == doctest::Approx(10.0));
    CHECK(st.current.y == doctest::Approx(5.0));
    const bool same_target = st.target.x == 10.0 && st.target.y == 5.0;
    CHECK(!same_target);
}

TEST_CASE("long walks respect bounds, speed classes and per-step displacement") {
    const ScenarioConfig cfg = load_config("");
    Rng rng(9);
    auto states = init_positions(cfg, rng);
    const double dt = cfg.tick;
    for (int step = 0; step < 10000; ++step) {
        for (size_t i = 0; i < states.size(); ++i) {
            WaypointState& st = states[i];
            const Position before = st.current;
            waypoint_step(st, dt, step * dt, rng);
            const double moved = distance(before, st.current);
            CHECK(moved <= st.speed_range.hi * dt + 1e-9);
            CHECK(st.current.x >= st.home.x0 - 1e-9);
            CHECK(st.current.x <= st.home.x1 + 1e-9);
            CHECK(st.current.y >= st.home.y0 - 1e-9);
            CHECK(st.current.y <= st.home.y1 + 1e-9);
            // legit speeds stay in the union of the configured ranges
            if (i < static_cast<size_t>(cfg.num_legit_nodes)) {
                const bool in_a = st.speed >= 0.5 && st.speed <= 1.5;
                const bool in_b = st.speed >= 2.7 && st.speed <= 13.9;
                CHECK((in_a || in_b));
            } else {
                CHECK(st.speed >= 7.0);
                CHECK(st.speed <= 10.0);
            }
        }
    }
}

TEST_CASE("wormhole endpoints stay confined to their corner boxes") {
    const ScenarioConfig cfg = load_config("");
    Rng rng(5);
    auto states = init_positions(cfg, rng);
    const double bw = cfg.wormhole_home_fraction * cfg.area_width / 2.0;
    const double bh = cfg.wormhole_home_fraction * cfg.area_height / 2.0;
    for (int step = 0; step < 5000; ++step)
        for (size_t i = static_cast<size_t>(cfg.num_legit_nodes); i < states.size(); ++i)
            waypoint_step(states[i], cfg.tick, step * cfg.tick, rng);
    for (size_t i = static_cast<size_t>(cfg.num_legit_nodes); i < states.size(); ++i) {
        const Position& p = states[i].current;
        const bool in_x = p.x <= bw + 1e-9 || p.x >= cfg.area_width - bw - 1e-9;
        const bool in_y = p.y <= bh + 1e-9 || p.y >= cfg.area_height - bh - 1e-9;
        CHECK(in_x);
        CHECK(in_y);
    }
}
