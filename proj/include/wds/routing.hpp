#ifndef WDS_ROUTING_HPP
#define WDS_ROUTING_HPP

#include <functional>
#include <map>
#include <vector>

#include "wds/link.hpp"
#include "wds/types.hpp"

namespace wds {

// Anti-entropy selection: every resident message the peer does not
// already hold, in buffer (oldest-first) order. Copies stay local.
std::vector<MsgId> epidemic_selection(const Buffer& buf,
                                      const std::function<bool(MsgId)>& peer_has);

// First Contact hands over everything and deletes locally; the
// selection skips messages that just arrived from this very peer so a
// two-node meeting does not ping-pong the same bundle.
std::vector<MsgId> first_contact_selection(const Buffer& buf, NodeId peer,
                                           const std::function<bool(MsgId)>& peer_has);

// Binary Spray-and-Wait handover for one message.
struct SprayDecision {
    bool forward = false;
    int handed = 0; // copies given to the peer; sender keeps the rest
};
SprayDecision spray_decision(int copies_left, bool peer_is_dst);

// Delivery predictability table (PRoPHET).
struct ProphetTable {
    std::map<NodeId, double> p;
    double last_aged = 0.0;

    double get(NodeId n) const {
        auto it = p.find(n);
        return it == p.end() ? 0.0 : it->second;
    }
};

// P(peer) <- P + (1 - P) * p_init
void prophet_direct_update(ProphetTable& t, NodeId peer, double p_init);

// All entries decayed by gamma^((now - last_aged) / aging_unit).
void prophet_age(ProphetTable& t, double now, double gamma, double aging_unit);

// P(c) <- max(P(c), P(peer) * peer_P(c) * beta) for every c in the
// peer's table (excluding self).
void prophet_transitive_update(ProphetTable& t, NodeId self, NodeId peer,
                               const ProphetTable& peer_table, double beta);

// Full on-contact update: age, direct, transitive.
void prophet_on_contact(ProphetTable& t, NodeId self, NodeId peer,
                        const ProphetTable& peer_table, double now,
                        double p_init, double beta, double gamma, double aging_unit);

// Forward iff the peer's delivery predictability for dst beats ours.
bool prophet_should_forward(const ProphetTable& self_table, const ProphetTable& peer_table,
                            NodeId dst);

} // namespace wds

#endif
