#include "wds/wormhole.hpp"

namespace wds {

bool tunnel_moves_copy(Protocol p) {
    return p == Protocol::FirstContact || p == Protocol::SprayAndWait;
}

} // namespace wds
