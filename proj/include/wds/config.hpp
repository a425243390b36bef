#ifndef WDS_CONFIG_HPP
#define WDS_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wds/types.hpp"

namespace wds {

// Raised when the config document cannot be parsed at all.
struct ConfigParseError : std::runtime_error {
    explicit ConfigParseError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a parsed value violates an invariant; carries the key name.
struct ConfigValidationError : std::runtime_error {
    ConfigValidationError(std::string key_, const std::string& what)
        : std::runtime_error(what), key(std::move(key_)) {}
    std::string key;
};

struct DetectorParams {
    ZVariant z_variant = ZVariant::Standard;
    double z_threshold = 2.5;          // 3.5 when variant is Modified and unset
    double similarity_threshold = 0.1; // Jaccard below this confirms a pair
    double audit_window = 600.0;       // seconds between detector passes
    double warmup = 1800.0;            // no detection before this
    double sliding_window = 600.0;     // Dynamic variant only
    int min_pair_traffic = 1;          // messages needed to bind a suspect pair
};

struct ScenarioConfig {
    double area_width = 4500.0;
    double area_height = 3400.0;
    int num_legit_nodes = 48;
    int num_wormhole_pairs = 5;
    double sim_duration = 43200.0;
    double tick = 1.0;
    double legit_radio_range = 10.0;
    double wormhole_radio_range = 500.0;
    std::vector<SpeedRange> legit_speed_ranges{{0.5, 1.5}, {2.7, 13.9}};
    SpeedRange wormhole_speed_range{7.0, 10.0};
    long long legit_buffer = 5'000'000;
    long long wormhole_buffer = 50'000'000;
    double legit_bitrate = 250'000.0;
    double wormhole_tunnel_bitrate = 10'000'000.0;
    ByteRange message_size_range{500'000, 1'000'000};
    SpeedRange message_interval_range{25.0, 35.0};
    Protocol routing_protocol = Protocol::Epidemic;
    DetectorParams detector;
    std::uint64_t rng_seed = 1;

    // Router knobs (platform defaults).
    int spray_copies = 6;
    double prophet_p_init = 0.75;
    double prophet_beta = 0.25;
    double prophet_gamma = 0.98;
    double prophet_aging_unit = 30.0;

    // Fraction of a quadrant's width/height forming a wormhole home box,
    // anchored at the quadrant's outer corner.
    double wormhole_home_fraction = 0.6;

    // Seconds between POS trace records; 0 disables position logging.
    double pos_log_interval = 0.0;

    int total_nodes() const { return num_legit_nodes + 2 * num_wormhole_pairs; }

    // Throws ConfigValidationError naming the offending key.
    void validate() const;
};

// Parses the flat dotted-key document (see README for the grammar) and
// validates the result. Unknown keys are rejected.
ScenarioConfig load_config(const std::string& text);
ScenarioConfig load_config_file(const std::string& path);

// Serializes a config back to the document form (used by `run --out`).
std::string dump_config(const ScenarioConfig& cfg);

} // namespace wds

#endif
