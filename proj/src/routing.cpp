#include "wds/routing.hpp"

#include <algorithm>
#include <cmath>

namespace wds {

std::vector<MsgId> epidemic_selection(const Buffer& buf,
                                      const std::function<bool(MsgId)>& peer_has) {
    std::vector<MsgId> out;
    for (const MsgCopy& c : buf.resident())
        if (!peer_has(c.id)) out.push_back(c.id);
    return out;
}

std::vector<MsgId> first_contact_selection(const Buffer& buf, NodeId peer,
                                           const std::function<bool(MsgId)>& peer_has) {
    std::vector<MsgId> out;
    for (const MsgCopy& c : buf.resident()) {
        if (peer_has(c.id)) continue;
        // Don't bounce a bundle straight back to the hop it came from.
        if (c.hops.size() >= 2 && c.hops[c.hops.size() - 2] == peer) continue;
        out.push_back(c.id);
    }
    return out;
}

SprayDecision spray_decision(int copies_left, bool peer_is_dst) {
    SprayDecision d;
    if (peer_is_dst) {
        // Direct delivery consumes the whole budget.
        d.forward = true;
        d.handed = copies_left;
        return d;
    }
    if (copies_left > 1) {
        d.forward = true;
        d.handed = copies_left / 2;
    }
    return d;
}

void prophet_direct_update(ProphetTable& t, NodeId peer, double p_init) {
    double& v = t.p[peer];
    v = v + (1.0 - v) * p_init;
}

void prophet_age(ProphetTable& t, double now, double gamma, double aging_unit) {
    const double elapsed = now - t.last_aged;
    if (elapsed <= 0.0) {
        t.last_aged = now;
        return;
    }
    const double factor = std::pow(gamma, elapsed / aging_unit);
    for (auto& [_, v] : t.p) v *= factor;
    t.last_aged = now;
}

void prophet_transitive_update(ProphetTable& t, NodeId self, NodeId peer,
                               const ProphetTable& peer_table, double beta) {
    const double p_peer = t.get(peer);
    for (const auto& [c, pc] : peer_table.p) {
        if (c == self || c == peer) continue;
        const double cand = p_peer * pc * beta;
        double& v = t.p[c];
        v = std::max(v, cand);
    }
}

void prophet_on_contact(ProphetTable& t, NodeId self, NodeId peer,
                        const ProphetTable& peer_table, double now,
                        double p_init, double beta, double gamma, double aging_unit) {
    prophet_age(t, now, gamma, aging_unit);
    prophet_direct_update(t, peer, p_init);
    prophet_transitive_update(t, self, peer, peer_table, beta);
}

bool prophet_should_forward(const ProphetTable& self_table, const ProphetTable& peer_table,
                            NodeId dst) {
    return peer_table.get(dst) > self_table.get(dst);
}

} // namespace wds
