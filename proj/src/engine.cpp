#include "wds/engine.hpp"

#include <algorithm>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "wds/link.hpp"
#include "wds/mobility.hpp"
#include "wds/rng.hpp"
#include "wds/routing.hpp"
#include "wds/wormhole.hpp"

namespace wds {

namespace {

struct SimEvent {
    double time = 0.0;
    EventKind kind = EventKind::Tick;
    std::uint64_t seq = 0;
    int payload = -1;

    bool operator>(const SimEvent& o) const {
        if (time != o.time) return time > o.time;
        if (kind != o.kind) return static_cast<int>(kind) > static_cast<int>(o.kind);
        return seq > o.seq;
    }
};

struct MessageInfo {
    NodeId src = -1, dst = -1;
    long long size = 0;
    double created_at = 0.0;
    int initial_copies = 1;
};

struct NodeState {
    WaypointState wp;
    Buffer buffer;
    bool wormhole = false;
    int pair_idx = -1;
    NodeId tunnel_peer = -1;
    ProphetTable prophet;
    std::vector<char> has;     // msg id -> currently buffered
    std::map<MsgId, int> pins; // active outgoing sends / queued tunnel jobs

    bool holding(MsgId m) const {
        return m >= 0 && static_cast<size_t>(m) < has.size() && has[static_cast<size_t>(m)];
    }
    void mark(MsgId m, bool v) {
        if (static_cast<size_t>(m) >= has.size()) has.resize(static_cast<size_t>(m) + 1, 0);
        has[static_cast<size_t>(m)] = v ? 1 : 0;
    }
    bool is_pinned(MsgId m) const {
        auto it = pins.find(m);
        return it != pins.end() && it->second > 0;
    }
    void pin(MsgId m) { pins[m]++; }
    void unpin(MsgId m) {
        auto it = pins.find(m);
        if (it != pins.end() && --it->second <= 0) pins.erase(it);
    }
};

struct ContactState {
    bool up = false;
    double up_since = 0.0;
    int active_transfer = -1;
    int turn = 0; // 0: lower id sends next
    std::set<MsgId> offered_lo_hi;
    std::set<MsgId> offered_hi_lo;
};

struct Transfer {
    NodeId from = -1, to = -1;
    MsgId msg = -1;
    long long size = 0;
    int handed_copies = 1;
    bool move = false;
    bool tunnel = false;
    int pair_idx = -1;
    int contact = -1;
};

struct Selection {
    MsgId msg = -1;
    int handed = 1;
    bool move = false;
};

class Simulator {
public:
    explicit Simulator(const ScenarioConfig& cfg)
        : cfg_(cfg), rng_(cfg.rng_seed), n_(cfg.total_nodes()) {}

    SimResult run();

private:
    const ScenarioConfig& cfg_;
    Rng rng_;
    int n_;
    double now_ = 0.0;
    std::uint64_t seq_ = 0;

    std::priority_queue<SimEvent, std::vector<SimEvent>, std::greater<SimEvent>> queue_;
    std::vector<NodeState> nodes_;
    std::vector<ContactState> contacts_;
    std::vector<MessageInfo> msgs_;
    std::vector<char> delivered_;
    std::vector<TunnelChannel> tunnels_;
    std::unordered_map<int, Transfer> transfers_;
    int next_transfer_id_ = 0;
    long long tick_count_ = 0;

    EventTrace trace_;
    std::optional<DetectorStream> detector_;

    int pack(NodeId a, NodeId b) const {
        return a < b ? a * n_ + b : b * n_ + a;
    }
    ContactState& contact(NodeId a, NodeId b) { return contacts_[static_cast<size_t>(pack(a, b))]; }

    void push(double time, EventKind kind, int payload = -1) {
        queue_.push(SimEvent{time, kind, seq_++, payload});
    }

    void rec(TraceRecord r) {
        r.t_us = to_us(now_);
        trace_.records.push_back(std::move(r));
    }

    std::vector<NodeId> capped_trail(const std::vector<NodeId>& hops) const {
        if (hops.size() <= static_cast<size_t>(kHopSnapshotCap)) return hops;
        return std::vector<NodeId>(hops.end() - kHopSnapshotCap, hops.end());
    }

    bool peer_has(NodeId peer, MsgId m) const {
        const NodeState& p = nodes_[static_cast<size_t>(peer)];
        if (p.holding(m)) return true;
        return msgs_[static_cast<size_t>(m)].dst == peer && delivered_[static_cast<size_t>(m)];
    }

    void setup();
    void scan_contacts();
    void log_positions();
    void do_tick();
    void do_message_create();
    void do_transfer_complete(int id);
    void complete_tunnel(const Transfer& tr);
    void do_report_marker();
    void do_detector_pass();

    void contact_came_up(NodeId a, NodeId b);
    void contact_went_down(NodeId a, NodeId b);
    void try_schedule(NodeId a, NodeId b);
    bool try_direction(NodeId from, NodeId to);
    void try_all_contacts_of(NodeId node);
    std::optional<Selection> select_message(NodeId from, NodeId to, const std::set<MsgId>& offered);

    EnqueueResult store_copy(NodeId node, MsgCopy copy);
    void remove_copy(NodeId node, MsgId m);
    void consider_tunnel(NodeId at_end, MsgId m);
    void start_next_tunnel_job(int pair_idx);

    double radio_seconds(long long size) const {
        return static_cast<double>(size) / cfg_.legit_bitrate;
    }
    double tunnel_seconds(long long size) const {
        return static_cast<double>(size) / cfg_.wormhole_tunnel_bitrate;
    }
};

void Simulator::setup() {
    trace_.area_width = cfg_.area_width;
    trace_.area_height = cfg_.area_height;
    trace_.duration = cfg_.sim_duration;
    trace_.node_count = n_;
    trace_.wormhole_pairs = cfg_.num_wormhole_pairs;
    trace_.roles.assign(static_cast<size_t>(n_), NodeRole{});

    std::vector<WaypointState> wps = init_positions(cfg_, rng_);
    nodes_.assign(static_cast<size_t>(n_), NodeState{});
    for (int i = 0; i < n_; ++i) nodes_[static_cast<size_t>(i)].wp = wps[static_cast<size_t>(i)];

    for (NodeId i = 0; i < cfg_.num_legit_nodes; ++i) {
        nodes_[static_cast<size_t>(i)].buffer = Buffer(cfg_.legit_buffer);
        trace_.roles[static_cast<size_t>(i)].speed_class = legit_speed_class(cfg_, i);
    }
    for (int p = 0; p < cfg_.num_wormhole_pairs; ++p) {
        const NodeId a = cfg_.num_legit_nodes + 2 * p;
        const NodeId b = a + 1;
        for (NodeId w : {a, b}) {
            NodeState& st = nodes_[static_cast<size_t>(w)];
            st.wormhole = true;
            st.pair_idx = p;
            st.tunnel_peer = w == a ? b : a;
            st.buffer = Buffer(cfg_.wormhole_buffer);
            NodeRole& role = trace_.roles[static_cast<size_t>(w)];
            role.wormhole = true;
            role.pair = p;
            role.peer = st.tunnel_peer;
        }
        tunnels_.emplace_back(p, WormholePair{a, b, cfg_.wormhole_tunnel_bitrate});
    }
    contacts_.assign(static_cast<size_t>(n_) * static_cast<size_t>(n_), ContactState{});

    std::vector<char> wh(static_cast<size_t>(n_), 0);
    for (int i = 0; i < n_; ++i) wh[static_cast<size_t>(i)] = nodes_[static_cast<size_t>(i)].wormhole;
    detector_.emplace(std::move(wh), cfg_.detector);

    if (cfg_.sim_duration <= 0.0) return;

    scan_contacts(); // t = 0
    if (cfg_.pos_log_interval > 0.0) log_positions();

    if (cfg_.tick <= cfg_.sim_duration) push(cfg_.tick, EventKind::Tick);
    if (cfg_.num_legit_nodes >= 2) {
        const double first =
            rng_.uniform(cfg_.message_interval_range.lo, cfg_.message_interval_range.hi);
        if (first <= cfg_.sim_duration) push(first, EventKind::MessageCreate);
    }
    const double w = cfg_.detector.audit_window;
    if (w <= cfg_.sim_duration) push(w, EventKind::ReportToTpa);
    const double first_pass = cfg_.detector.warmup + w;
    if (first_pass <= cfg_.sim_duration) push(first_pass, EventKind::DetectorRun);
}

void Simulator::scan_contacts() {
    for (NodeId a = 0; a < n_; ++a) {
        const NodeState& na = nodes_[static_cast<size_t>(a)];
        const Position& pa = na.wp.current;
        for (NodeId b = a + 1; b < n_; ++b) {
            const NodeState& nb = nodes_[static_cast<size_t>(b)];
            const double range = (na.wormhole || nb.wormhole) ? cfg_.wormhole_radio_range
                                                              : cfg_.legit_radio_range;
            const Position& pb = nb.wp.current;
            const double dx = pa.x - pb.x;
            bool up = false;
            if (dx <= range && dx >= -range) {
                const double dy = pa.y - pb.y;
                up = (dx * dx + dy * dy) <= range * range;
            }
            ContactState& cs = contact(a, b);
            if (up && !cs.up) contact_came_up(a, b);
            else if (!up && cs.up) contact_went_down(a, b);
        }
    }
}

void Simulator::log_positions() {
    for (NodeId i = 0; i < n_; ++i) {
        TraceRecord r;
        r.kind = RecKind::Pos;
        r.a = i;
        r.x = nodes_[static_cast<size_t>(i)].wp.current.x;
        r.y = nodes_[static_cast<size_t>(i)].wp.current.y;
        rec(std::move(r));
    }
}

void Simulator::do_tick() {
    ++tick_count_;
    for (NodeState& st : nodes_) waypoint_step(st.wp, cfg_.tick, now_, rng_);
    scan_contacts();
    if (cfg_.pos_log_interval > 0.0) {
        const long long every = std::max<long long>(
            1, static_cast<long long>(cfg_.pos_log_interval / cfg_.tick + 0.5));
        if (tick_count_ % every == 0) log_positions();
    }
    const double next = now_ + cfg_.tick;
    if (next <= cfg_.sim_duration) push(next, EventKind::Tick);
}

void Simulator::contact_came_up(NodeId a, NodeId b) {
    ContactState& cs = contact(a, b);
    cs.up = true;
    cs.up_since = now_;
    cs.active_transfer = -1;
    cs.turn = 0;
    cs.offered_lo_hi.clear();
    cs.offered_hi_lo.clear();

    TraceRecord r;
    r.kind = RecKind::ContactUp;
    r.a = std::min(a, b);
    r.b = std::max(a, b);
    rec(std::move(r));

    if (cfg_.routing_protocol == Protocol::Prophet) {
        NodeState& na = nodes_[static_cast<size_t>(a)];
        NodeState& nb = nodes_[static_cast<size_t>(b)];
        if (!na.wormhole && !nb.wormhole) {
            const ProphetTable snap_a = na.prophet;
            const ProphetTable snap_b = nb.prophet;
            prophet_on_contact(na.prophet, a, b, snap_b, now_, cfg_.prophet_p_init,
                               cfg_.prophet_beta, cfg_.prophet_gamma, cfg_.prophet_aging_unit);
            prophet_on_contact(nb.prophet, b, a, snap_a, now_, cfg_.prophet_p_init,
                               cfg_.prophet_beta, cfg_.prophet_gamma, cfg_.prophet_aging_unit);
        } else if (na.wormhole != nb.wormhole) {
            // The endpoint advertises certainty for every destination;
            // the legit side applies the usual update against that
            // fake table.
            NodeState& legit = na.wormhole ? nb : na;
            const NodeId legit_id = na.wormhole ? b : a;
            const NodeId wh_id = na.wormhole ? a : b;
            prophet_age(legit.prophet, now_, cfg_.prophet_gamma, cfg_.prophet_aging_unit);
            prophet_direct_update(legit.prophet, wh_id, cfg_.prophet_p_init);
            const double p_wh = legit.prophet.get(wh_id);
            for (NodeId c = 0; c < cfg_.num_legit_nodes; ++c) {
                if (c == legit_id) continue;
                const double cand =
                    p_wh * WormholeStance::advertised_predictability * cfg_.prophet_beta;
                double& v = legit.prophet.p[c];
                v = std::max(v, cand);
            }
        }
    }

    try_schedule(a, b);
}

void Simulator::contact_went_down(NodeId a, NodeId b) {
    ContactState& cs = contact(a, b);
    cs.up = false;

    TraceRecord r;
    r.kind = RecKind::ContactDown;
    r.a = std::min(a, b);
    r.b = std::max(a, b);
    rec(std::move(r));

    if (cs.active_transfer >= 0) {
        auto it = transfers_.find(cs.active_transfer);
        if (it != transfers_.end()) {
            const Transfer tr = it->second;
            transfers_.erase(it);
            nodes_[static_cast<size_t>(tr.from)].unpin(tr.msg);
            TraceRecord ab;
            ab.kind = RecKind::XferAbort;
            ab.a = tr.from;
            ab.b = tr.to;
            ab.msg = tr.msg;
            ab.size = tr.size;
            rec(std::move(ab));
        }
        cs.active_transfer = -1;
    }
    cs.offered_lo_hi.clear();
    cs.offered_hi_lo.clear();
}

std::optional<Selection> Simulator::select_message(NodeId from, NodeId to,
                                                   const std::set<MsgId>& offered) {
    const NodeState& s = nodes_[static_cast<size_t>(from)];
    const NodeState& r = nodes_[static_cast<size_t>(to)];
    for (const MsgCopy& c : s.buffer.resident()) {
        const MsgId m = c.id;
        if (offered.count(m)) continue;
        if (peer_has(to, m)) continue;
        const MessageInfo& mi = msgs_[static_cast<size_t>(m)];
        const bool to_is_dst = mi.dst == to;
        switch (cfg_.routing_protocol) {
            case Protocol::Epidemic:
                return Selection{m, 1, false};
            case Protocol::FirstContact:
                if (s.is_pinned(m)) continue; // move already in flight elsewhere
                if (!to_is_dst && c.hops.size() >= 2 && c.hops[c.hops.size() - 2] == to)
                    continue; // no immediate bounce-back
                return Selection{m, c.copies_left, true};
            case Protocol::SprayAndWait: {
                if (s.is_pinned(m)) continue; // budget arithmetic is serial
                if (s.wormhole && !to_is_dst) {
                    if (c.copies_left > 1) return Selection{m, c.copies_left / 2, false};
                    return Selection{m, 1, true}; // relocate the last copy onward
                }
                const SprayDecision d = spray_decision(c.copies_left, to_is_dst);
                if (!d.forward) continue;
                return Selection{m, d.handed, d.handed >= c.copies_left};
            }
            case Protocol::Prophet: {
                if (to_is_dst) return Selection{m, 1, false};
                if (s.wormhole) return Selection{m, 1, false}; // greedy replay
                if (r.wormhole) {
                    if (s.prophet.get(mi.dst) < WormholeStance::advertised_predictability)
                        return Selection{m, 1, false};
                    continue;
                }
                if (prophet_should_forward(s.prophet, r.prophet, mi.dst))
                    return Selection{m, 1, false};
                continue;
            }
        }
    }
    return std::nullopt;
}

bool Simulator::try_direction(NodeId from, NodeId to) {
    ContactState& cs = contact(from, to);
    std::set<MsgId>& offered = from < to ? cs.offered_lo_hi : cs.offered_hi_lo;
    const std::optional<Selection> sel = select_message(from, to, offered);
    if (!sel) return false;
    offered.insert(sel->msg);

    Transfer tr;
    tr.from = from;
    tr.to = to;
    tr.msg = sel->msg;
    tr.size = msgs_[static_cast<size_t>(sel->msg)].size;
    tr.handed_copies = sel->handed;
    tr.move = sel->move;
    tr.contact = pack(from, to);
    const int id = next_transfer_id_++;
    transfers_[id] = tr;
    nodes_[static_cast<size_t>(from)].pin(sel->msg);
    cs.active_transfer = id;
    push(now_ + radio_seconds(tr.size), EventKind::TransferComplete, id);
    return true;
}

void Simulator::try_schedule(NodeId a, NodeId b) {
    ContactState& cs = contact(a, b);
    if (!cs.up || cs.active_transfer >= 0) return;
    const NodeState& na = nodes_[static_cast<size_t>(a)];
    const NodeState& nb = nodes_[static_cast<size_t>(b)];
    if (na.wormhole && nb.wormhole) return; // colluders keep radio silence
    const NodeId lo = std::min(a, b), hi = std::max(a, b);
    const NodeId first = cs.turn == 0 ? lo : hi;
    const NodeId second = first == lo ? hi : lo;
    if (!try_direction(first, second)) try_direction(second, first);
}

void Simulator::try_all_contacts_of(NodeId node) {
    for (NodeId peer = 0; peer < n_; ++peer) {
        if (peer == node) continue;
        ContactState& cs = contact(node, peer);
        if (cs.up && cs.active_transfer < 0) try_schedule(node, peer);
    }
}

EnqueueResult Simulator::store_copy(NodeId node, MsgCopy copy) {
    NodeState& st = nodes_[static_cast<size_t>(node)];
    const MsgId id = copy.id;
    std::vector<MsgId> evicted;
    const EnqueueResult res =
        st.buffer.enqueue(std::move(copy), &evicted, [&st](MsgId m) { return st.is_pinned(m); });
    for (MsgId e : evicted) {
        st.mark(e, false);
        TraceRecord r;
        r.kind = RecKind::Drop;
        r.msg = e;
        r.a = node;
        rec(std::move(r));
    }
    if (res != EnqueueResult::Rejected) st.mark(id, true);
    return res;
}

void Simulator::remove_copy(NodeId node, MsgId m) {
    NodeState& st = nodes_[static_cast<size_t>(node)];
    st.buffer.erase(m);
    st.mark(m, false);
}

void Simulator::consider_tunnel(NodeId at_end, MsgId m) {
    NodeState& w = nodes_[static_cast<size_t>(at_end)];
    TunnelChannel& ch = tunnels_[static_cast<size_t>(w.pair_idx)];
    if (ch.crossed(m)) return;
    if (nodes_[static_cast<size_t>(w.tunnel_peer)].holding(m)) return;
    ch.mark_crossed(m);
    w.pin(m);
    ch.queue.push_back({m, at_end});
    if (!ch.busy) start_next_tunnel_job(w.pair_idx);
}

void Simulator::start_next_tunnel_job(int pair_idx) {
    TunnelChannel& ch = tunnels_[static_cast<size_t>(pair_idx)];
    if (ch.queue.empty()) {
        ch.busy = false;
        return;
    }
    ch.busy = true;
    const TunnelChannel::Job job = ch.queue.front();
    ch.queue.pop_front();

    Transfer tr;
    tr.from = job.from;
    tr.to = ch.other_end(job.from);
    tr.msg = job.msg;
    tr.size = msgs_[static_cast<size_t>(job.msg)].size;
    tr.move = tunnel_moves_copy(cfg_.routing_protocol);
    tr.tunnel = true;
    tr.pair_idx = pair_idx;
    const int id = next_transfer_id_++;
    transfers_[id] = tr;
    push(now_ + tunnel_seconds(tr.size), EventKind::TransferComplete, id);
}

void Simulator::complete_tunnel(const Transfer& tr) {
    NodeState& near = nodes_[static_cast<size_t>(tr.from)];
    NodeState& far = nodes_[static_cast<size_t>(tr.to)];
    near.unpin(tr.msg);

    TraceRecord r;
    r.kind = RecKind::TunnelXfer;
    r.msg = tr.msg;
    r.pair = tr.pair_idx;
    r.a = tr.from;
    r.b = tr.to;
    r.size = tr.size;

    const MsgCopy* nc = near.buffer.find(tr.msg);
    if (nc == nullptr) {
        // Copy vanished despite the pin; record nothing else.
        start_next_tunnel_job(tr.pair_idx);
        return;
    }
    if (far.holding(tr.msg)) {
        r.flags = RF_DUP;
        rec(std::move(r));
        start_next_tunnel_job(tr.pair_idx);
        return;
    }

    MsgCopy copy;
    copy.id = tr.msg;
    copy.size = tr.size;
    copy.copies_left = cfg_.routing_protocol == Protocol::SprayAndWait ? nc->copies_left : 1;
    copy.received_at = now_;
    copy.hops = nc->hops;
    copy.hops.push_back(tr.to);
    r.copies = copy.copies_left;

    const EnqueueResult res = store_copy(tr.to, std::move(copy));
    if (res == EnqueueResult::Rejected) {
        r.flags = RF_REJECT;
        rec(std::move(r));
        start_next_tunnel_job(tr.pair_idx);
        return;
    }
    if (tr.move) {
        remove_copy(tr.from, tr.msg);
        r.flags |= RF_MOVED;
    }
    rec(std::move(r));
    try_all_contacts_of(tr.to);
    start_next_tunnel_job(tr.pair_idx);
}

void Simulator::do_transfer_complete(int id) {
    auto it = transfers_.find(id);
    if (it == transfers_.end()) return; // aborted at contact drop
    const Transfer tr = it->second;
    transfers_.erase(it);

    if (tr.tunnel) {
        complete_tunnel(tr);
        return;
    }

    ContactState& cs = contacts_[static_cast<size_t>(tr.contact)];
    cs.active_transfer = -1;
    cs.turn = tr.to < tr.from ? 0 : 1; // receiver speaks next

    NodeState& s = nodes_[static_cast<size_t>(tr.from)];
    s.unpin(tr.msg);
    const MsgCopy* sc = s.buffer.find(tr.msg);
    if (sc == nullptr) {
        try_schedule(tr.from, tr.to);
        return;
    }

    const MessageInfo& mi = msgs_[static_cast<size_t>(tr.msg)];
    TraceRecord r;
    r.kind = RecKind::XferDone;
    r.msg = tr.msg;
    r.a = tr.from;
    r.b = tr.to;
    r.size = tr.size;

    if (peer_has(tr.to, tr.msg)) {
        // Receiver picked it up elsewhere while this was in the air.
        r.copies = 0;
        r.flags = RF_DUP;
        std::vector<NodeId> trail = sc->hops;
        trail.push_back(tr.to);
        r.hops = capped_trail(trail);
        rec(std::move(r));
        try_schedule(tr.from, tr.to);
        return;
    }

    std::vector<NodeId> trail = sc->hops;
    trail.push_back(tr.to);
    r.hops = capped_trail(trail);
    r.copies = tr.handed_copies;

    if (mi.dst == tr.to) {
        delivered_[static_cast<size_t>(tr.msg)] = 1;
        r.flags = RF_DELIVERED;
        if (cfg_.routing_protocol == Protocol::SprayAndWait) {
            remove_copy(tr.from, tr.msg); // whole budget handed over
            r.flags |= RF_MOVED;
        } else if (tr.move) {
            remove_copy(tr.from, tr.msg);
            r.flags |= RF_MOVED;
        }
        rec(std::move(r));
        try_schedule(tr.from, tr.to);
        return;
    }

    MsgCopy copy;
    copy.id = tr.msg;
    copy.size = mi.size;
    copy.copies_left =
        cfg_.routing_protocol == Protocol::SprayAndWait ? tr.handed_copies : 1;
    copy.received_at = now_;
    copy.hops = std::move(trail);

    const EnqueueResult res = store_copy(tr.to, std::move(copy));
    if (res == EnqueueResult::Rejected) {
        TraceRecord ab;
        ab.kind = RecKind::XferAbort;
        ab.msg = tr.msg;
        ab.a = tr.from;
        ab.b = tr.to;
        ab.size = tr.size;
        ab.flags = RF_REJECT;
        rec(std::move(ab));
        try_schedule(tr.from, tr.to);
        return;
    }

    if (cfg_.routing_protocol == Protocol::SprayAndWait) {
        MsgCopy* sc_mut = s.buffer.find(tr.msg);
        sc_mut->copies_left -= tr.handed_copies;
        if (sc_mut->copies_left <= 0) {
            remove_copy(tr.from, tr.msg);
            r.flags |= RF_MOVED;
        }
    } else if (tr.move) {
        remove_copy(tr.from, tr.msg);
        r.flags |= RF_MOVED;
    }
    rec(std::move(r));

    const NodeState& receiver = nodes_[static_cast<size_t>(tr.to)];
    if (receiver.wormhole && !s.wormhole) consider_tunnel(tr.to, tr.msg);

    try_all_contacts_of(tr.to);
    try_schedule(tr.from, tr.to);
}

void Simulator::do_message_create() {
    if (cfg_.num_legit_nodes >= 2) {
        const NodeId src = static_cast<NodeId>(rng_.uniform_int(0, cfg_.num_legit_nodes - 1));
        NodeId dst = static_cast<NodeId>(rng_.uniform_int(0, cfg_.num_legit_nodes - 2));
        if (dst >= src) ++dst;
        const long long size =
            rng_.uniform_int(cfg_.message_size_range.lo, cfg_.message_size_range.hi);
        const int copies =
            cfg_.routing_protocol == Protocol::SprayAndWait ? cfg_.spray_copies : 1;

        const MsgId id = static_cast<MsgId>(msgs_.size());
        msgs_.push_back({src, dst, size, now_, copies});
        delivered_.push_back(0);

        MsgCopy copy;
        copy.id = id;
        copy.size = size;
        copy.copies_left = copies;
        copy.received_at = now_;
        copy.hops = {src};
        // Store first: eviction drops land in the trace ahead of the
        // creation record, so a replayed prefix never shows a buffer
        // above capacity.
        const EnqueueResult res = store_copy(src, std::move(copy));

        TraceRecord r;
        r.kind = RecKind::MsgNew;
        r.msg = id;
        r.a = src;
        r.b = dst;
        r.size = size;
        r.copies = copies;
        if (res == EnqueueResult::Rejected) r.flags = RF_REJECT;
        rec(std::move(r));
        if (res != EnqueueResult::Rejected) try_all_contacts_of(src);
    }
    const double next =
        now_ + rng_.uniform(cfg_.message_interval_range.lo, cfg_.message_interval_range.hi);
    if (next <= cfg_.sim_duration) push(next, EventKind::MessageCreate);
}

void Simulator::do_report_marker() {
    TraceRecord r;
    r.kind = RecKind::Report;
    std::ostringstream note;
    note << "upto=" << to_us(now_);
    r.note = note.str();
    rec(std::move(r));
    const double next = now_ + cfg_.detector.audit_window;
    if (next <= cfg_.sim_duration) push(next, EventKind::ReportToTpa);
}

void Simulator::do_detector_pass() {
    const DetectorStream::PassOutcome out = detector_->pass(trace_.records, now_);

    TraceRecord r;
    r.kind = RecKind::Detect;
    std::ostringstream note;
    note << "suspects=";
    bool first = true;
    for (NodeId n : out.suspects) {
        if (!first) note << ',';
        note << n;
        first = false;
    }
    if (first) note << '-';
    note << " new=";
    first = true;
    for (const Confirmation& c : out.fresh) {
        if (!first) note << ',';
        note << c.a << ':' << c.b;
        first = false;
    }
    if (first) note << '-';
    note << " confirmed=" << out.total_confirmed;
    r.note = note.str();
    rec(std::move(r));

    const double next = now_ + cfg_.detector.audit_window;
    if (next <= cfg_.sim_duration) push(next, EventKind::DetectorRun);
}

SimResult Simulator::run() {
    setup();
    while (!queue_.empty()) {
        const SimEvent ev = queue_.top();
        queue_.pop();
        now_ = ev.time;
        switch (ev.kind) {
            case EventKind::Tick: do_tick(); break;
            case EventKind::MessageCreate: do_message_create(); break;
            case EventKind::TransferComplete: do_transfer_complete(ev.payload); break;
            case EventKind::ReportToTpa: do_report_marker(); break;
            case EventKind::DetectorRun: do_detector_pass(); break;
        }
    }
    SimResult result;
    result.detector = detector_->finish();
    result.report = result.detector.report;
    score_report(result.report, trace_.truth_pairs());
    result.detector.report = result.report;
    result.trace = std::move(trace_);
    return result;
}

} // namespace

SimResult run_simulation(const ScenarioConfig& cfg) {
    cfg.validate();
    Simulator sim(cfg);
    return sim.run();
}

RunnerResult replay_detector(const EventTrace& trace, const DetectorParams& params) {
    RunnerResult r = run_detector(trace, params);
    score_report(r.report, trace.truth_pairs());
    return r;
}

} // namespace wds
