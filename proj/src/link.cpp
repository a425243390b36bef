#include "wds/link.hpp"

#include <algorithm>

namespace wds {

bool contact_up(double dist, bool a_wormhole, bool b_wormhole,
                double legit_range, double wormhole_range) {
    if (a_wormhole || b_wormhole) return dist <= wormhole_range;
    return dist <= legit_range;
}

bool Buffer::contains(MsgId id) const { return find(id) != nullptr; }

const MsgCopy* Buffer::find(MsgId id) const {
    for (const MsgCopy& c : resident_)
        if (c.id == id) return &c;
    return nullptr;
}

MsgCopy* Buffer::find(MsgId id) {
    for (MsgCopy& c : resident_)
        if (c.id == id) return &c;
    return nullptr;
}

EnqueueResult Buffer::enqueue(MsgCopy copy, std::vector<MsgId>* evicted,
                              const std::function<bool(MsgId)>& pinned) {
    if (copy.size > capacity_) return EnqueueResult::Rejected;

    // Check that eviction of unpinned copies can ever make room.
    if (used_ + copy.size > capacity_) {
        long long reclaimable = 0;
        for (const MsgCopy& c : resident_)
            if (!pinned || !pinned(c.id)) reclaimable += c.size;
        if (used_ - reclaimable + copy.size > capacity_) return EnqueueResult::Rejected;
    }

    bool any_evicted = false;
    while (used_ + copy.size > capacity_) {
        auto victim = resident_.end();
        for (auto it = resident_.begin(); it != resident_.end(); ++it) {
            if (!pinned || !pinned(it->id)) {
                victim = it;
                break; // deque front is oldest-received
            }
        }
        if (victim == resident_.end()) return EnqueueResult::Rejected;
        if (evicted) evicted->push_back(victim->id);
        used_ -= victim->size;
        resident_.erase(victim);
        any_evicted = true;
    }

    used_ += copy.size;
    resident_.push_back(std::move(copy));
    return any_evicted ? EnqueueResult::Evicted : EnqueueResult::Stored;
}

bool Buffer::erase(MsgId id) {
    for (auto it = resident_.begin(); it != resident_.end(); ++it) {
        if (it->id == id) {
            used_ -= it->size;
            resident_.erase(it);
            return true;
        }
    }
    return false;
}

} // namespace wds
