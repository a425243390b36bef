#include "wds/mobility.hpp"

#include <cmath>

namespace wds {

double distance(const Position& a, const Position& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

int legit_speed_class(const ScenarioConfig& cfg, NodeId id) {
    return static_cast<int>(id % static_cast<NodeId>(cfg.legit_speed_ranges.size()));
}

namespace {

// Outer-corner box of a quadrant. Quadrants are numbered 0..3 as
// (left/right) x (bottom/top); opposite means index 3 - q.
HomeRegion corner_box(const ScenarioConfig& cfg, int quadrant) {
    const double bw = cfg.wormhole_home_fraction * cfg.area_width / 2.0;
    const double bh = cfg.wormhole_home_fraction * cfg.area_height / 2.0;
    const bool right = quadrant == 1 || quadrant == 3;
    const bool top = quadrant == 2 || quadrant == 3;
    HomeRegion r;
    r.x0 = right ? cfg.area_width - bw : 0.0;
    r.x1 = right ? cfg.area_width : bw;
    r.y0 = top ? cfg.area_height - bh : 0.0;
    r.y1 = top ? cfg.area_height : bh;
    return r;
}

} // namespace

std::vector<WaypointState> init_positions(const ScenarioConfig& cfg, Rng& rng) {
    std::vector<WaypointState> out;
    out.reserve(static_cast<size_t>(cfg.total_nodes()));

    const HomeRegion whole{0.0, 0.0, cfg.area_width, cfg.area_height};
    for (NodeId i = 0; i < cfg.num_legit_nodes; ++i) {
        WaypointState st;
        st.home = whole;
        st.speed_range = cfg.legit_speed_ranges[static_cast<size_t>(legit_speed_class(cfg, i))];
        st.current = st.home.sample(rng);
        st.target = st.home.sample(rng);
        st.speed = rng.uniform(st.speed_range.lo, st.speed_range.hi);
        out.push_back(st);
    }

    const double half_diag =
        0.5 * std::sqrt(cfg.area_width * cfg.area_width + cfg.area_height * cfg.area_height);
    for (int p = 0; p < cfg.num_wormhole_pairs; ++p) {
        // Alternate between the two diagonals so pairs spread over all
        // four corners.
        const int qa = (p % 2 == 0) ? 0 : 1;
        const int qb = 3 - qa;
        WaypointState a, b;
        a.home = corner_box(cfg, qa);
        b.home = corner_box(cfg, qb);
        a.speed_range = cfg.wormhole_speed_range;
        b.speed_range = cfg.wormhole_speed_range;
        for (int tries = 0; tries < 64; ++tries) {
            a.current = a.home.sample(rng);
            b.current = b.home.sample(rng);
            if (distance(a.current, b.current) >= half_diag) break;
            if (tries == 63) {
                // Corner anchors are always far enough apart.
                a.current = {a.home.x0 == 0.0 ? 0.0 : a.home.x1, a.home.y0 == 0.0 ? 0.0 : a.home.y1};
                b.current = {b.home.x0 == 0.0 ? 0.0 : b.home.x1, b.home.y0 == 0.0 ? 0.0 : b.home.y1};
            }
        }
        a.target = a.home.sample(rng);
        b.target = b.home.sample(rng);
        a.speed = rng.uniform(a.speed_range.lo, a.speed_range.hi);
        b.speed = rng.uniform(b.speed_range.lo, b.speed_range.hi);
        out.push_back(a);
        out.push_back(b);
    }
    return out;
}

void waypoint_step(WaypointState& st, double dt, double now, Rng& rng) {
    if (now < st.pause_until) return;
    const double dx = st.target.x - st.current.x;
    const double dy = st.target.y - st.current.y;
    const double dist = std::sqrt(dx * dx + dy * dy);
    const double step = st.speed * dt;
    if (dist <= step || dist == 0.0) {
        // Arrive this step; the new leg starts next step.
        st.current = st.target;
        st.target = st.home.sample(rng);
        st.speed = rng.uniform(st.speed_range.lo, st.speed_range.hi);
        return;
    }
    st.current.x += dx / dist * step;
    st.current.y += dy / dist * step;
}

} // namespace wds
