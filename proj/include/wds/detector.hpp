#ifndef WDS_DETECTOR_HPP
#define WDS_DETECTOR_HPP

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wds/config.hpp"
#include "wds/stats.hpp"
#include "wds/trace.hpp"
#include "wds/types.hpp"

namespace wds {

using NodePair = std::pair<NodeId, NodeId>; // always (low, high)

inline NodePair make_pair_key(NodeId a, NodeId b) {
    return a < b ? NodePair{a, b} : NodePair{b, a};
}

// Auditor-side view over one time window: relay/contact counters,
// reconstructed neighbor sets and per-pair traffic. Built only from
// events a legitimate node reported; the covert tunnel contributes
// nothing directly, but tunnel hops surface in the hop trails that
// legit receivers hand in, which is where wormhole-pair traffic counts
// come from.
struct AuditLedger {
    double window_start = 0.0;
    double window_end = 0.0;
    int population = 0; // node ids are 0..population-1

    std::map<NodeId, int> relay_count;
    std::map<NodeId, int> contact_count;
    std::map<NodeId, std::set<NodeId>> neighbors;
    std::map<NodePair, int> mutual; // distinct messages seen crossing the pair

    int relays(NodeId n) const {
        auto it = relay_count.find(n);
        return it == relay_count.end() ? 0 : it->second;
    }
    int mutual_traffic(NodeId a, NodeId b) const {
        auto it = mutual.find(make_pair_key(a, b));
        return it == mutual.end() ? 0 : it->second;
    }
    const std::set<NodeId>& neighbor_set(NodeId n) const;
};

// Builds the ledger for (window_start, window_end] from a trace.
// Contacts count as neighbors if their up-interval overlaps the
// window; counters only accumulate inside it.
AuditLedger build_ledger(const EventTrace& trace, double window_start, double window_end);

struct FlagResult {
    std::set<NodeId> suspects;
    std::map<NodeId, double> scores; // against the clean baseline
    bool degenerate = false;
};

// Applies the configured score variant to per-node relay counts and
// returns nodes scoring above params.z_threshold.
FlagResult flag_suspects(const AuditLedger& ledger, const DetectorParams& params);

// Greedy maximum-mutual-traffic matching over the suspect set. Pairs
// below min_traffic messages are never bound, and neither are two
// suspects the ledger saw in direct contact (co-located nodes cannot
// be the two ends of a wormhole).
std::vector<NodePair> pair_suspects(const std::set<NodeId>& suspects,
                                    const AuditLedger& ledger, int min_traffic = 1);

// Jaccard similarity of the two neighbor sets after stripping the
// partner node from each; 1.0 when both stripped sets are empty.
double neighbor_similarity(const std::set<NodeId>& na, const std::set<NodeId>& nb,
                           NodeId a, NodeId b);

struct Confirmation {
    NodeId a = -1, b = -1;
    double similarity = 0.0;
};

// Pairs whose stripped neighbor sets fall below the similarity
// threshold. Pairs with an empty stripped set on either side are
// skipped: no evidence, no declaration.
std::vector<Confirmation> confirm_wormholes(const std::vector<NodePair>& pairs,
                                            const AuditLedger& ledger,
                                            const DetectorParams& params);

struct ConfirmedPair {
    NodeId a = -1, b = -1;
    double declared_at = 0.0; // first detector pass that confirmed it
};

struct DetectionReport {
    std::set<NodeId> suspects; // union over detector passes
    std::vector<ConfirmedPair> confirmed;
    // Filled by score_report():
    double detection_success_rate = 0.0; // percent of preset pairs
    double false_alarm_rate = 0.0;       // percent of preset pairs
    double mean_detection_time = -1.0;   // seconds; -1 when nothing detected

    std::string serialize() const;
};

// Splits confirmations into true/false against the preset pairs and
// fills the three evaluation metrics. attack_start is the reference
// for detection time.
void score_report(DetectionReport& report,
                  const std::vector<NodePair>& truth_pairs,
                  double attack_start = 0.0);

// Drives detector passes over a trace: every audit_window seconds
// after warmup, flag on the cumulative ledger, bind suspect pairs and
// test similarity on the trailing-window ledger. Confirmations are
// sticky; declaration time is the first confirming pass.
struct RunnerResult {
    DetectionReport report;
    std::vector<double> pass_times;
    // Cumulative confirmed-pair count after each pass (same indexing
    // as pass_times); monotone by construction.
    std::vector<int> confirmed_after_pass;
};

RunnerResult run_detector(const EventTrace& trace, const DetectorParams& params);

// Pass schedule implied by the params for a run of `duration` seconds.
std::vector<double> detector_pass_times(const DetectorParams& params, double duration);

// Incremental pass driver shared by the live engine and replay: both
// feed the identical record stream, which is what makes replay
// reproduce the live report exactly. Passes must be audit_window
// seconds apart (the schedule above).
class DetectorStream {
public:
    DetectorStream(std::vector<char> wormhole_flags, DetectorParams params);

    struct PassOutcome {
        std::set<NodeId> suspects;
        std::vector<Confirmation> fresh; // newly confirmed this pass
        size_t total_confirmed = 0;
    };

    // Consumes records up to time t (the vector may have grown since
    // the last call) and runs one detector pass.
    PassOutcome pass(const std::vector<TraceRecord>& records, double t);

    RunnerResult finish() const;

private:
    struct MutualAcc {
        std::set<std::pair<NodePair, MsgId>> seen;
        std::map<NodePair, int> counts;
        void add(NodePair key, MsgId msg) {
            if (seen.insert({key, msg}).second) counts[key]++;
        }
    };

    bool is_wh(NodeId n) const { return wormhole_[static_cast<size_t>(n)] != 0; }
    bool visible(NodeId a, NodeId b) const { return !(is_wh(a) && is_wh(b)); }
    void note_session(NodeId a, NodeId b);
    void fold_window_record(const TraceRecord& rec);
    void reseed_window();

    std::vector<char> wormhole_;
    DetectorParams params_;
    size_t cursor_ = 0;
    bool started_ = false;

    std::map<NodePair, std::int64_t> active_;
    std::map<NodeId, int> cum_relay_;
    AuditLedger win_;
    MutualAcc win_mutual_;

    std::map<NodePair, double> confirmed_at_;
    std::set<NodeId> suspect_union_;
    std::vector<double> pass_times_;
    std::vector<int> confirmed_after_;
};

} // namespace wds

#endif
