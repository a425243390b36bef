#include "wds/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace wds {

const std::set<NodeId>& AuditLedger::neighbor_set(NodeId n) const {
    static const std::set<NodeId> empty;
    auto it = neighbors.find(n);
    return it == neighbors.end() ? empty : it->second;
}

namespace {

bool visible_contact(const EventTrace& trace, NodeId a, NodeId b) {
    // A contact is reported iff at least one endpoint is legit;
    // colluding endpoints report nothing about each other.
    return !(trace.is_wormhole(a) && trace.is_wormhole(b));
}

// Distinct-message bookkeeping for pair traffic.
struct MutualAcc {
    std::set<std::pair<NodePair, MsgId>> seen;
    std::map<NodePair, int> counts;

    void add(NodePair key, MsgId msg) {
        if (seen.insert({key, msg}).second) counts[key]++;
    }
};

void mine_transfer(const EventTrace& trace, const TraceRecord& rec, MutualAcc& acc) {
    acc.add(make_pair_key(rec.a, rec.b), rec.msg);
    // Hop trails handed in by legit receivers expose covert
    // wormhole-to-wormhole traversals as consecutive hops.
    if (!trace.is_wormhole(rec.b)) {
        for (size_t i = 0; i + 1 < rec.hops.size(); ++i) {
            const NodeId u = rec.hops[i], v = rec.hops[i + 1];
            if (trace.is_wormhole(u) && trace.is_wormhole(v))
                acc.add(make_pair_key(u, v), rec.msg);
        }
    }
}

} // namespace

AuditLedger build_ledger(const EventTrace& trace, double window_start, double window_end) {
    AuditLedger led;
    led.window_start = window_start;
    led.window_end = window_end;
    led.population = trace.node_count;
    if (window_end <= window_start) return led; // empty window, empty ledger

    const std::int64_t ws = to_us(window_start);
    const std::int64_t we = to_us(window_end);

    std::map<NodePair, std::int64_t> active; // contact -> up time
    MutualAcc mutual;

    auto note_session = [&](NodeId a, NodeId b) {
        led.neighbors[a].insert(b);
        led.neighbors[b].insert(a);
        led.contact_count[a]++;
        led.contact_count[b]++;
    };

    for (const TraceRecord& rec : trace.records) {
        if (rec.t_us > we) break;
        switch (rec.kind) {
            case RecKind::ContactUp:
                if (visible_contact(trace, rec.a, rec.b))
                    active[make_pair_key(rec.a, rec.b)] = rec.t_us;
                break;
            case RecKind::ContactDown: {
                if (!visible_contact(trace, rec.a, rec.b)) break;
                const NodePair key = make_pair_key(rec.a, rec.b);
                auto it = active.find(key);
                if (it == active.end()) break;
                if (rec.t_us > ws) note_session(key.first, key.second);
                active.erase(it);
                break;
            }
            case RecKind::XferDone:
                if (rec.t_us > ws) {
                    led.relay_count[rec.a]++;
                    mine_transfer(trace, rec, mutual);
                }
                break;
            default:
                break;
        }
    }
    // Contacts still up at window close overlap it by construction.
    for (const auto& [key, since] : active) {
        (void)since;
        note_session(key.first, key.second);
    }
    led.mutual = std::move(mutual.counts);
    return led;
}

FlagResult flag_suspects(const AuditLedger& ledger, const DetectorParams& params) {
    FlagResult res;
    const int n = ledger.population;
    if (n < 2) {
        res.degenerate = true;
        return res;
    }
    std::vector<double> values(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) values[static_cast<size_t>(i)] = ledger.relays(i);

    switch (params.z_variant) {
        case ZVariant::Modified: {
            stats::ScoreResult r = stats::modified_zscore(values);
            for (int i = 0; i < n; ++i) res.scores[i] = r.scores[static_cast<size_t>(i)];
            if (r.degenerate) {
                // Majority ties carry no usable spread; stay quiet
                // rather than flag on sentinel scores.
                res.degenerate = true;
                return res;
            }
            for (int i = 0; i < n; ++i)
                if (r.scores[static_cast<size_t>(i)] > params.z_threshold) res.suspects.insert(i);
            return res;
        }
        case ZVariant::Standard:
        case ZVariant::Local:   // no partition is configured here; one group
        case ZVariant::Dynamic: // caller supplies the sliding-window ledger
        default: {
            stats::OutlierSplit split = stats::robust_high_outliers(values, params.z_threshold);
            if (split.degenerate) {
                res.degenerate = true;
                return res;
            }
            for (int i = 0; i < n; ++i) {
                res.scores[i] = split.scores[static_cast<size_t>(i)];
                if (split.flagged[static_cast<size_t>(i)]) res.suspects.insert(i);
            }
            return res;
        }
    }
}

std::vector<NodePair> pair_suspects(const std::set<NodeId>& suspects,
                                    const AuditLedger& ledger, int min_traffic) {
    struct Cand {
        int traffic;
        NodePair key;
    };
    std::vector<Cand> cands;
    const int floor_traffic = std::max(1, min_traffic);
    for (auto ia = suspects.begin(); ia != suspects.end(); ++ia) {
        for (auto ib = std::next(ia); ib != suspects.end(); ++ib) {
            const int traffic = ledger.mutual_traffic(*ia, *ib);
            if (traffic < floor_traffic) continue;
            // Two nodes observed in direct contact cannot be a
            // wormhole pair: endpoints sit in regions far apart, which
            // is the geometry the whole scheme rests on. This also
            // keeps suspects whose traffic is ordinary neighborly
            // exchange from consuming a real endpoint in the matching.
            if (ledger.neighbor_set(*ia).count(*ib)) continue;
            cands.push_back({traffic, make_pair_key(*ia, *ib)});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& l, const Cand& r) {
        if (l.traffic != r.traffic) return l.traffic > r.traffic;
        return l.key < r.key;
    });
    std::set<NodeId> matched;
    std::vector<NodePair> out;
    for (const Cand& c : cands) {
        if (matched.count(c.key.first) || matched.count(c.key.second)) continue;
        matched.insert(c.key.first);
        matched.insert(c.key.second);
        out.push_back(c.key);
    }
    return out;
}

double neighbor_similarity(const std::set<NodeId>& na, const std::set<NodeId>& nb,
                           NodeId a, NodeId b) {
    size_t inter = 0, uni = 0;
    auto ia = na.begin();
    auto ib = nb.begin();
    auto skip_a = [&](std::set<NodeId>::const_iterator it) { return *it == b; };
    auto skip_b = [&](std::set<NodeId>::const_iterator it) { return *it == a; };
    while (ia != na.end() || ib != nb.end()) {
        if (ia != na.end() && skip_a(ia)) { ++ia; continue; }
        if (ib != nb.end() && skip_b(ib)) { ++ib; continue; }
        if (ia == na.end()) { ++uni; ++ib; }
        else if (ib == nb.end()) { ++uni; ++ia; }
        else if (*ia == *ib) { ++inter; ++uni; ++ia; ++ib; }
        else if (*ia < *ib) { ++uni; ++ia; }
        else { ++uni; ++ib; }
    }
    if (uni == 0) return 1.0; // both stripped sets empty
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<Confirmation> confirm_wormholes(const std::vector<NodePair>& pairs,
                                            const AuditLedger& ledger,
                                            const DetectorParams& params) {
    std::vector<Confirmation> out;
    for (const NodePair& p : pairs) {
        const std::set<NodeId>& na = ledger.neighbor_set(p.first);
        const std::set<NodeId>& nb = ledger.neighbor_set(p.second);
        // No declaration without restored neighbor evidence on both
        // sides; an empty table says nothing about the geometry.
        const size_t ev_a = na.size() - na.count(p.second);
        const size_t ev_b = nb.size() - nb.count(p.first);
        if (ev_a == 0 || ev_b == 0) continue;
        const double sim = neighbor_similarity(na, nb, p.first, p.second);
        if (sim < params.similarity_threshold) out.push_back({p.first, p.second, sim});
    }
    return out;
}

std::string DetectionReport::serialize() const {
    std::ostringstream o;
    o << "suspects ";
    bool first = true;
    for (NodeId n : suspects) {
        if (!first) o << ',';
        o << n;
        first = false;
    }
    if (first) o << '-';
    o << "\nconfirmed " << confirmed.size() << "\n";
    for (const ConfirmedPair& p : confirmed) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "pair %d %d %.6f\n", p.a, p.b, p.declared_at);
        o << buf;
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "detection_success_rate %.2f\nfalse_alarm_rate %.2f\nmean_detection_time %.6f\n",
                  detection_success_rate, false_alarm_rate, mean_detection_time);
    o << buf;
    return o.str();
}

void score_report(DetectionReport& report, const std::vector<NodePair>& truth_pairs,
                  double attack_start) {
    std::set<NodePair> truth(truth_pairs.begin(), truth_pairs.end());
    int true_hits = 0, false_hits = 0;
    double time_sum = 0.0;
    for (const ConfirmedPair& p : report.confirmed) {
        if (truth.count(make_pair_key(p.a, p.b))) {
            ++true_hits;
            time_sum += p.declared_at - attack_start;
        } else {
            ++false_hits;
        }
    }
    const int preset = static_cast<int>(truth.size());
    if (preset > 0) {
        report.detection_success_rate = 100.0 * true_hits / preset;
        report.false_alarm_rate = 100.0 * false_hits / preset;
    } else {
        report.detection_success_rate = 0.0;
        report.false_alarm_rate = 0.0;
    }
    report.mean_detection_time = true_hits > 0 ? time_sum / true_hits : -1.0;
}

std::vector<double> detector_pass_times(const DetectorParams& params, double duration) {
    std::vector<double> out;
    for (int k = 1;; ++k) {
        const double t = params.warmup + k * params.audit_window;
        if (t > duration) break;
        out.push_back(t);
    }
    return out;
}

DetectorStream::DetectorStream(std::vector<char> wormhole_flags, DetectorParams params)
    : wormhole_(std::move(wormhole_flags)), params_(params) {
    win_.population = static_cast<int>(wormhole_.size());
}

void DetectorStream::note_session(NodeId a, NodeId b) {
    win_.neighbors[a].insert(b);
    win_.neighbors[b].insert(a);
    win_.contact_count[a]++;
    win_.contact_count[b]++;
}

void DetectorStream::fold_window_record(const TraceRecord& rec) {
    switch (rec.kind) {
        case RecKind::ContactUp:
            if (visible(rec.a, rec.b)) {
                active_[make_pair_key(rec.a, rec.b)] = rec.t_us;
                note_session(rec.a, rec.b);
            }
            break;
        case RecKind::ContactDown:
            if (visible(rec.a, rec.b)) active_.erase(make_pair_key(rec.a, rec.b));
            break;
        case RecKind::XferDone: {
            cum_relay_[rec.a]++;
            win_.relay_count[rec.a]++;
            win_mutual_.add(make_pair_key(rec.a, rec.b), rec.msg);
            if (!is_wh(rec.b)) {
                for (size_t i = 0; i + 1 < rec.hops.size(); ++i) {
                    const NodeId u = rec.hops[i], v = rec.hops[i + 1];
                    if (is_wh(u) && is_wh(v)) win_mutual_.add(make_pair_key(u, v), rec.msg);
                }
            }
            break;
        }
        default:
            break;
    }
}

void DetectorStream::reseed_window() {
    win_ = AuditLedger{};
    win_.population = static_cast<int>(wormhole_.size());
    win_mutual_ = MutualAcc{};
    for (const auto& [key, since] : active_) {
        (void)since;
        note_session(key.first, key.second);
    }
}

DetectorStream::PassOutcome DetectorStream::pass(const std::vector<TraceRecord>& records,
                                                 double t) {
    if (!started_) {
        // Records before the first window only feed the cumulative
        // counters and the active-contact state.
        const std::int64_t wo = to_us(t - params_.audit_window);
        while (cursor_ < records.size() && records[cursor_].t_us <= wo) {
            const TraceRecord& rec = records[cursor_];
            switch (rec.kind) {
                case RecKind::ContactUp:
                    if (visible(rec.a, rec.b)) active_[make_pair_key(rec.a, rec.b)] = rec.t_us;
                    break;
                case RecKind::ContactDown:
                    if (visible(rec.a, rec.b)) active_.erase(make_pair_key(rec.a, rec.b));
                    break;
                case RecKind::XferDone:
                    cum_relay_[rec.a]++;
                    break;
                default:
                    break;
            }
            ++cursor_;
        }
        reseed_window();
        started_ = true;
    }

    const std::int64_t te = to_us(t);
    while (cursor_ < records.size() && records[cursor_].t_us <= te) {
        fold_window_record(records[cursor_]);
        ++cursor_;
    }

    win_.window_start = t - params_.audit_window;
    win_.window_end = t;
    win_.mutual = win_mutual_.counts;

    AuditLedger cum;
    cum.window_start = 0.0;
    cum.window_end = t;
    cum.population = win_.population;
    cum.relay_count = cum_relay_;

    const bool flag_on_window = params_.z_variant == ZVariant::Dynamic;
    FlagResult flags = flag_suspects(flag_on_window ? win_ : cum, params_);
    suspect_union_.insert(flags.suspects.begin(), flags.suspects.end());

    PassOutcome out;
    out.suspects = flags.suspects;

    const std::vector<NodePair> bound = pair_suspects(flags.suspects, win_, params_.min_pair_traffic);
    std::vector<NodePair> fresh;
    for (const NodePair& p : bound)
        if (!confirmed_at_.count(p)) fresh.push_back(p);
    for (const Confirmation& c : confirm_wormholes(fresh, win_, params_)) {
        confirmed_at_[{c.a, c.b}] = t;
        out.fresh.push_back(c);
    }
    out.total_confirmed = confirmed_at_.size();

    pass_times_.push_back(t);
    confirmed_after_.push_back(static_cast<int>(confirmed_at_.size()));

    reseed_window();
    return out;
}

RunnerResult DetectorStream::finish() const {
    RunnerResult result;
    result.pass_times = pass_times_;
    result.confirmed_after_pass = confirmed_after_;
    result.report.suspects = suspect_union_;
    for (const auto& [key, when] : confirmed_at_)
        result.report.confirmed.push_back({key.first, key.second, when});
    std::sort(result.report.confirmed.begin(), result.report.confirmed.end(),
              [](const ConfirmedPair& l, const ConfirmedPair& r) {
                  if (l.declared_at != r.declared_at) return l.declared_at < r.declared_at;
                  if (l.a != r.a) return l.a < r.a;
                  return l.b < r.b;
              });
    return result;
}

RunnerResult run_detector(const EventTrace& trace, const DetectorParams& params) {
    std::vector<char> wh(static_cast<size_t>(trace.node_count), 0);
    for (size_t i = 0; i < trace.roles.size(); ++i)
        wh[i] = trace.roles[i].wormhole ? 1 : 0;
    DetectorStream stream(std::move(wh), params);
    for (double t : detector_pass_times(params, trace.duration))
        stream.pass(trace.records, t);
    return stream.finish();
}

} // namespace wds
