#include "wds/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace wds {

std::string protocol_name(Protocol p) {
    switch (p) {
        case Protocol::Epidemic: return "epidemic";
        case Protocol::SprayAndWait: return "spray_and_wait";
        case Protocol::Prophet: return "prophet";
        case Protocol::FirstContact: return "first_contact";
    }
    return "?";
}

bool parse_protocol(const std::string& s, Protocol& out) {
    if (s == "epidemic") out = Protocol::Epidemic;
    else if (s == "spray_and_wait" || s == "spray" || s == "sprayandwait") out = Protocol::SprayAndWait;
    else if (s == "prophet") out = Protocol::Prophet;
    else if (s == "first_contact" || s == "firstcontact") out = Protocol::FirstContact;
    else return false;
    return true;
}

std::string zvariant_name(ZVariant v) {
    switch (v) {
        case ZVariant::Standard: return "standard";
        case ZVariant::Modified: return "modified";
        case ZVariant::Local: return "local";
        case ZVariant::Dynamic: return "dynamic";
    }
    return "?";
}

bool parse_zvariant(const std::string& s, ZVariant& out) {
    if (s == "standard") out = ZVariant::Standard;
    else if (s == "modified") out = ZVariant::Modified;
    else if (s == "local") out = ZVariant::Local;
    else if (s == "dynamic") out = ZVariant::Dynamic;
    else return false;
    return true;
}

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigValidationError(key, "config key '" + key + "': not a number: '" + v + "'");
    }
}

long long to_ll(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        long long d = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigValidationError(key, "config key '" + key + "': not an integer: '" + v + "'");
    }
}

// "lo:hi" pair
SpeedRange to_range(const std::string& key, const std::string& v) {
    auto colon = v.find(':');
    if (colon == std::string::npos)
        throw ConfigValidationError(key, "config key '" + key + "': expected 'min:max', got '" + v + "'");
    return {to_double(key, trim(v.substr(0, colon))), to_double(key, trim(v.substr(colon + 1)))};
}

std::vector<SpeedRange> to_range_list(const std::string& key, const std::string& v) {
    std::vector<SpeedRange> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_range(key, item));
    }
    if (out.empty())
        throw ConfigValidationError(key, "config key '" + key + "': empty range list");
    return out;
}

} // namespace

ScenarioConfig load_config(const std::string& text) {
    ScenarioConfig cfg;
    std::map<std::string, std::string> kv;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigParseError("line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigParseError("line " + std::to_string(lineno) + ": empty key or value");
        kv[key] = val;
    }

    bool z_threshold_set = false;
    for (const auto& [key, val] : kv) {
        if (key == "area.width") cfg.area_width = to_double(key, val);
        else if (key == "area.height") cfg.area_height = to_double(key, val);
        else if (key == "nodes.legit") cfg.num_legit_nodes = static_cast<int>(to_ll(key, val));
        else if (key == "wormhole.pairs") cfg.num_wormhole_pairs = static_cast<int>(to_ll(key, val));
        else if (key == "sim.duration") cfg.sim_duration = to_double(key, val);
        else if (key == "sim.tick") cfg.tick = to_double(key, val);
        else if (key == "radio.legit_range") cfg.legit_radio_range = to_double(key, val);
        else if (key == "radio.wormhole_range") cfg.wormhole_radio_range = to_double(key, val);
        else if (key == "speed.legit") cfg.legit_speed_ranges = to_range_list(key, val);
        else if (key == "speed.wormhole") cfg.wormhole_speed_range = to_range(key, val);
        else if (key == "buffer.legit") cfg.legit_buffer = to_ll(key, val);
        else if (key == "buffer.wormhole") cfg.wormhole_buffer = to_ll(key, val);
        else if (key == "bitrate.legit") cfg.legit_bitrate = to_double(key, val);
        else if (key == "bitrate.tunnel") cfg.wormhole_tunnel_bitrate = to_double(key, val);
        else if (key == "message.size") {
            SpeedRange r = to_range(key, val);
            cfg.message_size_range = {static_cast<long long>(r.lo), static_cast<long long>(r.hi)};
        } else if (key == "message.interval") cfg.message_interval_range = to_range(key, val);
        else if (key == "routing.protocol") {
            if (!parse_protocol(val, cfg.routing_protocol))
                throw ConfigValidationError(key, "config key '" + key + "': unknown protocol '" + val + "'");
        } else if (key == "routing.spray_copies") cfg.spray_copies = static_cast<int>(to_ll(key, val));
        else if (key == "routing.prophet_p_init") cfg.prophet_p_init = to_double(key, val);
        else if (key == "routing.prophet_beta") cfg.prophet_beta = to_double(key, val);
        else if (key == "routing.prophet_gamma") cfg.prophet_gamma = to_double(key, val);
        else if (key == "routing.prophet_aging_unit") cfg.prophet_aging_unit = to_double(key, val);
        else if (key == "detector.variant") {
            if (!parse_zvariant(val, cfg.detector.z_variant))
                throw ConfigValidationError(key, "config key '" + key + "': unknown variant '" + val + "'");
        } else if (key == "detector.z_threshold") {
            cfg.detector.z_threshold = to_double(key, val);
            z_threshold_set = true;
        } else if (key == "detector.similarity_threshold") cfg.detector.similarity_threshold = to_double(key, val);
        else if (key == "detector.audit_window") cfg.detector.audit_window = to_double(key, val);
        else if (key == "detector.warmup") cfg.detector.warmup = to_double(key, val);
        else if (key == "detector.sliding_window") cfg.detector.sliding_window = to_double(key, val);
        else if (key == "detector.min_pair_traffic") cfg.detector.min_pair_traffic = static_cast<int>(to_ll(key, val));
        else if (key == "wormhole.home_fraction") cfg.wormhole_home_fraction = to_double(key, val);
        else if (key == "trace.pos_interval") cfg.pos_log_interval = to_double(key, val);
        else if (key == "rng.seed") cfg.rng_seed = static_cast<std::uint64_t>(to_ll(key, val));
        else throw ConfigValidationError(key, "unknown config key '" + key + "'");
    }

    // The conventional cutoff differs between the plain and the
    // MAD-based score; pick the matching default when unset.
    if (!z_threshold_set && cfg.detector.z_variant == ZVariant::Modified)
        cfg.detector.z_threshold = 3.5;

    cfg.validate();
    return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigParseError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return load_config(ss.str());
}

void ScenarioConfig::validate() const {
    auto bad = [](const std::string& key, const std::string& msg) {
        throw ConfigValidationError(key, "config key '" + key + "': " + msg);
    };
    if (!(area_width > 0)) bad("area.width", "must be > 0");
    if (!(area_height > 0)) bad("area.height", "must be > 0");
    if (sim_duration < 0) bad("sim.duration", "must be >= 0");
    if (!(tick > 0)) bad("sim.tick", "must be > 0");
    if (sim_duration > 0 && tick > sim_duration) bad("sim.tick", "must be <= sim.duration");
    if (num_legit_nodes < 0) bad("nodes.legit", "must be >= 0");
    if (num_wormhole_pairs < 0) bad("wormhole.pairs", "must be >= 0");
    if (num_legit_nodes == 0 && num_wormhole_pairs > 0)
        bad("nodes.legit", "wormhole pairs require at least one legitimate node");
    if (!(legit_radio_range > 0)) bad("radio.legit_range", "must be > 0");
    if (!(wormhole_radio_range > 0)) bad("radio.wormhole_range", "must be > 0");
    for (const auto& r : legit_speed_ranges) {
        if (!(r.lo > 0) || r.lo > r.hi) bad("speed.legit", "ranges need 0 < min <= max");
    }
    if (!(wormhole_speed_range.lo > 0) || wormhole_speed_range.lo > wormhole_speed_range.hi)
        bad("speed.wormhole", "needs 0 < min <= max");
    if (legit_buffer <= 0) bad("buffer.legit", "must be > 0");
    if (wormhole_buffer <= 0) bad("buffer.wormhole", "must be > 0");
    if (!(legit_bitrate > 0)) bad("bitrate.legit", "must be > 0");
    if (!(wormhole_tunnel_bitrate > 0)) bad("bitrate.tunnel", "must be > 0");
    if (message_size_range.lo <= 0 || message_size_range.lo > message_size_range.hi)
        bad("message.size", "needs 0 < min <= max");
    if (!(message_interval_range.lo > 0) || message_interval_range.lo > message_interval_range.hi)
        bad("message.interval", "needs 0 < min <= max");
    if (spray_copies < 1) bad("routing.spray_copies", "must be >= 1");
    if (prophet_p_init <= 0 || prophet_p_init > 1) bad("routing.prophet_p_init", "must be in (0,1]");
    if (prophet_beta < 0 || prophet_beta > 1) bad("routing.prophet_beta", "must be in [0,1]");
    if (prophet_gamma <= 0 || prophet_gamma >= 1) bad("routing.prophet_gamma", "must be in (0,1)");
    if (!(prophet_aging_unit > 0)) bad("routing.prophet_aging_unit", "must be > 0");
    if (!(detector.z_threshold > 0)) bad("detector.z_threshold", "must be > 0");
    if (detector.similarity_threshold < 0 || detector.similarity_threshold > 1)
        bad("detector.similarity_threshold", "must be in [0,1]");
    if (!(detector.audit_window > 0)) bad("detector.audit_window", "must be > 0");
    if (detector.warmup < 0) bad("detector.warmup", "must be >= 0");
    if (sim_duration > 0 && detector.warmup >= sim_duration)
        bad("detector.warmup", "must be < sim.duration");
    if (!(detector.sliding_window > 0)) bad("detector.sliding_window", "must be > 0");
    if (detector.min_pair_traffic < 1) bad("detector.min_pair_traffic", "must be >= 1");
    if (wormhole_home_fraction <= 0 || wormhole_home_fraction > 1)
        bad("wormhole.home_fraction", "must be in (0,1]");
    if (pos_log_interval < 0) bad("trace.pos_interval", "must be >= 0");
}

std::string dump_config(const ScenarioConfig& cfg) {
    std::ostringstream o;
    o.precision(17);
    o << "area.width = " << cfg.area_width << "\n";
    o << "area.height = " << cfg.area_height << "\n";
    o << "nodes.legit = " << cfg.num_legit_nodes << "\n";
    o << "wormhole.pairs = " << cfg.num_wormhole_pairs << "\n";
    o << "sim.duration = " << cfg.sim_duration << "\n";
    o << "sim.tick = " << cfg.tick << "\n";
    o << "radio.legit_range = " << cfg.legit_radio_range << "\n";
    o << "radio.wormhole_range = " << cfg.wormhole_radio_range << "\n";
    o << "speed.legit = ";
    for (size_t i = 0; i < cfg.legit_speed_ranges.size(); ++i) {
        if (i) o << ",";
        o << cfg.legit_speed_ranges[i].lo << ":" << cfg.legit_speed_ranges[i].hi;
    }
    o << "\n";
    o << "speed.wormhole = " << cfg.wormhole_speed_range.lo << ":" << cfg.wormhole_speed_range.hi << "\n";
    o << "buffer.legit = " << cfg.legit_buffer << "\n";
    o << "buffer.wormhole = " << cfg.wormhole_buffer << "\n";
    o << "bitrate.legit = " << cfg.legit_bitrate << "\n";
    o << "bitrate.tunnel = " << cfg.wormhole_tunnel_bitrate << "\n";
    o << "message.size = " << cfg.message_size_range.lo << ":" << cfg.message_size_range.hi << "\n";
    o << "message.interval = " << cfg.message_interval_range.lo << ":" << cfg.message_interval_range.hi << "\n";
    o << "routing.protocol = " << protocol_name(cfg.routing_protocol) << "\n";
    o << "routing.spray_copies = " << cfg.spray_copies << "\n";
    o << "routing.prophet_p_init = " << cfg.prophet_p_init << "\n";
    o << "routing.prophet_beta = " << cfg.prophet_beta << "\n";
    o << "routing.prophet_gamma = " << cfg.prophet_gamma << "\n";
    o << "routing.prophet_aging_unit = " << cfg.prophet_aging_unit << "\n";
    o << "detector.variant = " << zvariant_name(cfg.detector.z_variant) << "\n";
    o << "detector.z_threshold = " << cfg.detector.z_threshold << "\n";
    o << "detector.similarity_threshold = " << cfg.detector.similarity_threshold << "\n";
    o << "detector.audit_window = " << cfg.detector.audit_window << "\n";
    o << "detector.warmup = " << cfg.detector.warmup << "\n";
    o << "detector.sliding_window = " << cfg.detector.sliding_window << "\n";
    o << "detector.min_pair_traffic = " << cfg.detector.min_pair_traffic << "\n";
    o << "wormhole.home_fraction = " << cfg.wormhole_home_fraction << "\n";
    o << "trace.pos_interval = " << cfg.pos_log_interval << "\n";
    o << "rng.seed = " << cfg.rng_seed << "\n";
    return o.str();
}

} // namespace wds
