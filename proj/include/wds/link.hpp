#ifndef WDS_LINK_HPP
#define WDS_LINK_HPP

#include <deque>
#include <functional>
#include <vector>

#include "wds/types.hpp"

namespace wds {

// One buffered copy of a message. Each copy carries its own hop trail;
// replication forks the trail.
struct MsgCopy {
    MsgId id = -1;
    long long size = 0;
    int copies_left = 1; // spray budget carried by this copy
    double received_at = 0.0;
    std::vector<NodeId> hops;
};

// Whether a radio contact is up at distance d. Wormhole endpoints
// capture with their own (much larger) range even against short-range
// peers; legit pairs need both disks, i.e. the min of equal ranges.
bool contact_up(double dist, bool a_wormhole, bool b_wormhole,
                double legit_range, double wormhole_range);

enum class EnqueueResult { Stored, Evicted, Rejected };

// FIFO drop-tail buffer. Eviction removes oldest-received copies until
// the newcomer fits; copies the caller marks as pinned (in-flight
// sends) are skipped.
class Buffer {
public:
    Buffer() = default;
    explicit Buffer(long long capacity) : capacity_(capacity) {}

    long long capacity() const { return capacity_; }
    long long used() const { return used_; }
    const std::deque<MsgCopy>& resident() const { return resident_; }
    std::deque<MsgCopy>& resident() { return resident_; }

    bool contains(MsgId id) const;
    const MsgCopy* find(MsgId id) const;
    MsgCopy* find(MsgId id);

    // Inserts the copy, evicting as needed. `evicted` collects the ids
    // removed to make room. Returns Rejected when the message cannot
    // fit even with every unpinned copy gone.
    EnqueueResult enqueue(MsgCopy copy, std::vector<MsgId>* evicted = nullptr,
                          const std::function<bool(MsgId)>& pinned = {});

    // Removes a copy outright (single-copy forwarding, delivery bookkeeping).
    bool erase(MsgId id);

private:
    long long capacity_ = 0;
    long long used_ = 0;
    std::deque<MsgCopy> resident_;
};

} // namespace wds

#endif
