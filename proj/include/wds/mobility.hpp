#ifndef WDS_MOBILITY_HPP
#define WDS_MOBILITY_HPP

#include <vector>

#include "wds/config.hpp"
#include "wds/rng.hpp"
#include "wds/types.hpp"

namespace wds {

struct Position {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Position& a, const Position& b);

// Axis-aligned box a node's waypoints are drawn from. Legit nodes use
// the whole area; wormhole endpoints are pinned to a corner box so the
// pair stays far apart for the whole run.
struct HomeRegion {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
    Position sample(Rng& rng) const {
        return {rng.uniform(x0, x1), rng.uniform(y0, y1)};
    }
};

struct WaypointState {
    Position current;
    Position target;
    double speed = 0.0;       // current leg, drawn from the class range
    double pause_until = 0.0; // no pausing by default; kept for generality
    SpeedRange speed_range;
    HomeRegion home;
};

// Places every node and seeds its first waypoint leg. Node ids are
// 0..num_legit-1 for legit nodes followed by 2 ids per wormhole pair.
// Pair endpoints start in opposite-quadrant corner boxes at least half
// the area diagonal apart.
std::vector<WaypointState> init_positions(const ScenarioConfig& cfg, Rng& rng);

// One movement step: advance toward the target at the leg speed; on
// arrival draw a new target and speed. The position never leaves the
// node's home region.
void waypoint_step(WaypointState& st, double dt, double now, Rng& rng);

// Legit speed class for node id (round-robin over the config ranges).
int legit_speed_class(const ScenarioConfig& cfg, NodeId id);

} // namespace wds

#endif
