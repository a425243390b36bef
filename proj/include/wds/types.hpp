#ifndef WDS_TYPES_HPP
#define WDS_TYPES_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace wds {

using NodeId = int;
using MsgId = int;

enum class Protocol { Epidemic, SprayAndWait, Prophet, FirstContact };

enum class ZVariant { Standard, Modified, Local, Dynamic };

struct SpeedRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct ByteRange {
    long long lo = 0;
    long long hi = 0;
};

std::string protocol_name(Protocol p);
bool parse_protocol(const std::string& s, Protocol& out);

std::string zvariant_name(ZVariant v);
bool parse_zvariant(const std::string& s, ZVariant& out);

} // namespace wds

#endif
