#ifndef WDS_WORMHOLE_HPP
#define WDS_WORMHOLE_HPP

#include <deque>
#include <vector>

#include "wds/types.hpp"

namespace wds {

struct WormholePair {
    NodeId end_a = -1;
    NodeId end_b = -1;
    double tunnel_bitrate = 0.0;
};

// Whether the covert tunnel relocates the copy instead of duplicating
// it. Single-copy and budgeted routers keep their copy invariants
// through the tunnel; replicating routers get a copy at each end.
bool tunnel_moves_copy(Protocol p);

// Endpoint forwarding stance: wormhole nodes accept everything offered
// and offer everything the peer lacks, regardless of router heuristics
// (they masquerade as ideal relays). Under Spray-and-Wait a single
// remaining copy is relocated onward rather than held for the
// destination; the budget is never inflated.
struct WormholeStance {
    static constexpr bool greedy_accept = true;
    static constexpr double advertised_predictability = 1.0; // fake table value
};

// Out-of-band pipe between the two endpoints of one pair. Serializes
// traversals at the tunnel bitrate; each message id crosses at most
// once for the pair's lifetime.
class TunnelChannel {
public:
    TunnelChannel() = default;
    TunnelChannel(int pair_idx, WormholePair pair) : pair_idx_(pair_idx), pair_(pair) {}

    int pair_index() const { return pair_idx_; }
    const WormholePair& pair() const { return pair_; }
    NodeId other_end(NodeId n) const { return n == pair_.end_a ? pair_.end_b : pair_.end_a; }

    bool crossed(MsgId m) const {
        return m >= 0 && static_cast<size_t>(m) < crossed_.size() && crossed_[static_cast<size_t>(m)];
    }
    void mark_crossed(MsgId m) {
        if (static_cast<size_t>(m) >= crossed_.size()) crossed_.resize(static_cast<size_t>(m) + 1, 0);
        crossed_[static_cast<size_t>(m)] = 1;
    }

    struct Job {
        MsgId msg = -1;
        NodeId from = -1; // capturing end
    };

    bool busy = false;
    std::deque<Job> queue;

private:
    int pair_idx_ = -1;
    WormholePair pair_;
    std::vector<char> crossed_;
};

} // namespace wds

#endif
