#ifndef WDS_TRACE_HPP
#define WDS_TRACE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wds/types.hpp"

namespace wds {

// Record kinds of the line-oriented trace. Every line is
//   <time_us> <KIND> key=value ...
// with times in integer microseconds (exact to parse back).
enum class RecKind : std::uint8_t {
    Meta,       // scenario echo: area, node count, duration
    Role,       // per-node ground truth: legit/wormhole, class or pair
    MsgNew,     // message creation at src
    ContactUp,
    ContactDown,
    XferDone,   // completed radio transfer
    XferAbort,  // contact dropped mid-transfer
    TunnelXfer, // covert tunnel traversal (never visible to the auditor)
    Drop,       // buffer eviction or rejection
    Pos,        // optional position sample
    Report,     // audit window boundary marker
    Detect,     // detector pass summary
};

// Flag bits on XferDone / TunnelXfer / Drop records.
enum RecFlags : std::uint8_t {
    RF_MOVED = 1,      // sender deleted its copy (single-copy semantics)
    RF_DELIVERED = 2,  // receiver is the destination
    RF_DUP = 4,        // receiver already held the message; discarded
    RF_REJECT = 8,     // Drop: message refused rather than evicted
};

struct TraceRecord {
    std::int64_t t_us = 0;
    RecKind kind = RecKind::Meta;
    NodeId a = -1;      // node / sender / reporting subject
    NodeId b = -1;      // peer / receiver
    MsgId msg = -1;
    long long size = 0;
    int pair = -1;      // wormhole pair index (Role, TunnelXfer)
    int copies = 0;     // spray copies carried by this transfer / creation
    std::uint8_t flags = 0;
    double x = 0.0, y = 0.0; // Pos records
    std::vector<NodeId> hops; // path snapshot on XferDone (capped)
    std::string note;         // Meta / Detect payload
};

// Number of most recent hops echoed on an XferDone line. Long random
// walks (single-copy routing) would otherwise grow the trace
// quadratically; window mining only needs the recent tail.
constexpr int kHopSnapshotCap = 16;

struct NodeRole {
    bool wormhole = false;
    int pair = -1;       // pair index when wormhole
    NodeId peer = -1;    // tunnel peer when wormhole
    int speed_class = 0; // legit speed range index
};

class EventTrace {
public:
    // Scenario echo carried by the Meta record.
    double area_width = 0.0, area_height = 0.0;
    double duration = 0.0;
    int node_count = 0;
    int wormhole_pairs = 0;

    std::vector<NodeRole> roles;
    std::vector<TraceRecord> records;

    bool is_wormhole(NodeId n) const { return roles[static_cast<size_t>(n)].wormhole; }
    // Ground-truth pairs as (low id, high id), ordered by pair index.
    std::vector<std::pair<NodeId, NodeId>> truth_pairs() const;

    void serialize(std::ostream& out) const;
    std::string serialize() const;
    static EventTrace parse(std::istream& in);
    static EventTrace parse_file(const std::string& path);
};

std::string rec_kind_name(RecKind k);

std::int64_t to_us(double seconds);
double us_to_s(std::int64_t us);

} // namespace wds

#endif
