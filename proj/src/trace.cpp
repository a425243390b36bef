#include "wds/trace.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wds {

std::int64_t to_us(double seconds) {
    return static_cast<std::int64_t>(std::llround(seconds * 1e6));
}

double us_to_s(std::int64_t us) { return static_cast<double>(us) * 1e-6; }

std::string rec_kind_name(RecKind k) {
    switch (k) {
        case RecKind::Meta: return "META";
        case RecKind::Role: return "ROLE";
        case RecKind::MsgNew: return "MSG_NEW";
        case RecKind::ContactUp: return "CONTACT_UP";
        case RecKind::ContactDown: return "CONTACT_DOWN";
        case RecKind::XferDone: return "XFER_DONE";
        case RecKind::XferAbort: return "XFER_ABORT";
        case RecKind::TunnelXfer: return "TUNNEL_XFER";
        case RecKind::Drop: return "DROP";
        case RecKind::Pos: return "POS";
        case RecKind::Report: return "REPORT";
        case RecKind::Detect: return "DETECT";
    }
    return "?";
}

namespace {

bool kind_from_name(const std::string& s, RecKind& out) {
    static const std::pair<const char*, RecKind> table[] = {
        {"META", RecKind::Meta},       {"ROLE", RecKind::Role},
        {"MSG_NEW", RecKind::MsgNew},  {"CONTACT_UP", RecKind::ContactUp},
        {"CONTACT_DOWN", RecKind::ContactDown}, {"XFER_DONE", RecKind::XferDone},
        {"XFER_ABORT", RecKind::XferAbort}, {"TUNNEL_XFER", RecKind::TunnelXfer},
        {"DROP", RecKind::Drop},       {"POS", RecKind::Pos},
        {"REPORT", RecKind::Report},   {"DETECT", RecKind::Detect},
    };
    for (const auto& [name, k] : table) {
        if (s == name) {
            out = k;
            return true;
        }
    }
    return false;
}

void write_hops(std::ostream& o, const std::vector<NodeId>& hops) {
    o << " hops=";
    for (size_t i = 0; i < hops.size(); ++i) {
        if (i) o << ',';
        o << hops[i];
    }
}

} // namespace

std::vector<std::pair<NodeId, NodeId>> EventTrace::truth_pairs() const {
    std::vector<std::pair<NodeId, NodeId>> out(static_cast<size_t>(wormhole_pairs), {-1, -1});
    for (size_t n = 0; n < roles.size(); ++n) {
        const NodeRole& r = roles[n];
        if (!r.wormhole || r.pair < 0) continue;
        auto& p = out[static_cast<size_t>(r.pair)];
        if (p.first < 0) p.first = static_cast<NodeId>(n);
        else p.second = static_cast<NodeId>(n);
    }
    for (auto& p : out) {
        if (p.first > p.second) std::swap(p.first, p.second);
    }
    return out;
}

void EventTrace::serialize(std::ostream& out) const {
    out << "0 META version=1 area_w=" << area_width << " area_h=" << area_height
        << " nodes=" << node_count << " pairs=" << wormhole_pairs
        << " duration=" << duration << "\n";
    for (size_t n = 0; n < roles.size(); ++n) {
        const NodeRole& r = roles[n];
        out << "0 ROLE node=" << n;
        if (r.wormhole)
            out << " role=wormhole pair=" << r.pair << " peer=" << r.peer;
        else
            out << " role=legit class=" << r.speed_class;
        out << "\n";
    }
    for (const TraceRecord& rec : records) {
        out << rec.t_us << ' ' << rec_kind_name(rec.kind);
        switch (rec.kind) {
            case RecKind::MsgNew:
                out << " msg=" << rec.msg << " src=" << rec.a << " dst=" << rec.b
                    << " size=" << rec.size << " copies=" << rec.copies
                    << " flags=" << static_cast<int>(rec.flags);
                break;
            case RecKind::ContactUp:
            case RecKind::ContactDown:
                out << " a=" << rec.a << " b=" << rec.b;
                break;
            case RecKind::XferDone:
            case RecKind::XferAbort:
                out << " msg=" << rec.msg << " from=" << rec.a << " to=" << rec.b
                    << " size=" << rec.size << " copies=" << rec.copies
                    << " flags=" << static_cast<int>(rec.flags);
                if (rec.kind == RecKind::XferDone) write_hops(out, rec.hops);
                break;
            case RecKind::TunnelXfer:
                out << " msg=" << rec.msg << " pair=" << rec.pair << " from=" << rec.a
                    << " to=" << rec.b << " size=" << rec.size << " copies=" << rec.copies
                    << " flags=" << static_cast<int>(rec.flags);
                break;
            case RecKind::Drop:
                out << " msg=" << rec.msg << " node=" << rec.a
                    << " flags=" << static_cast<int>(rec.flags);
                break;
            case RecKind::Pos: {
                char buf[64];
                std::snprintf(buf, sizeof(buf), " node=%d x=%.3f y=%.3f", rec.a, rec.x, rec.y);
                out << buf;
                break;
            }
            case RecKind::Report:
            case RecKind::Detect:
                if (!rec.note.empty()) out << ' ' << rec.note;
                break;
            case RecKind::Meta:
            case RecKind::Role:
                break; // emitted from header state above
        }
        out << "\n";
    }
}

std::string EventTrace::serialize() const {
    std::ostringstream ss;
    serialize(ss);
    return ss.str();
}

namespace {

struct FieldView {
    // key=value pairs of one line, linear scan lookup (few fields per line)
    std::vector<std::pair<std::string, std::string>> kv;
    std::string rest; // full remainder for note-style records

    const std::string* find(const char* key) const {
        for (const auto& [k, v] : kv)
            if (k == key) return &v;
        return nullptr;
    }
    long long get_ll(const char* key, const char* ctx) const {
        const std::string* v = find(key);
        if (!v) throw std::runtime_error(std::string("trace: missing field '") + key + "' in " + ctx);
        return std::stoll(*v);
    }
    long long get_ll_or(const char* key, long long dflt) const {
        const std::string* v = find(key);
        return v ? std::stoll(*v) : dflt;
    }
    double get_d(const char* key, const char* ctx) const {
        const std::string* v = find(key);
        if (!v) throw std::runtime_error(std::string("trace: missing field '") + key + "' in " + ctx);
        return std::stod(*v);
    }
};

FieldView split_fields(const std::string& s) {
    FieldView f;
    f.rest = s;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        size_t start = i;
        while (i < s.size() && s[i] != ' ') ++i;
        if (start == i) break;
        std::string tok = s.substr(start, i - start);
        auto eq = tok.find('=');
        if (eq != std::string::npos)
            f.kv.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
    return f;
}

std::vector<NodeId> parse_hops(const std::string& s) {
    std::vector<NodeId> out;
    size_t i = 0;
    while (i < s.size()) {
        size_t j = s.find(',', i);
        if (j == std::string::npos) j = s.size();
        out.push_back(std::stoi(s.substr(i, j - i)));
        i = j + 1;
    }
    return out;
}

} // namespace

EventTrace EventTrace::parse(std::istream& in) {
    EventTrace tr;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        size_t sp1 = line.find(' ');
        if (sp1 == std::string::npos)
            throw std::runtime_error("trace line " + std::to_string(lineno) + ": malformed");
        size_t sp2 = line.find(' ', sp1 + 1);
        std::string kind_s = line.substr(sp1 + 1, sp2 == std::string::npos ? std::string::npos : sp2 - sp1 - 1);
        RecKind kind;
        if (!kind_from_name(kind_s, kind))
            throw std::runtime_error("trace line " + std::to_string(lineno) + ": unknown kind '" + kind_s + "'");
        const std::int64_t t_us = std::stoll(line.substr(0, sp1));
        const std::string body = sp2 == std::string::npos ? std::string() : line.substr(sp2 + 1);
        FieldView f = split_fields(body);

        switch (kind) {
            case RecKind::Meta:
                tr.area_width = f.get_d("area_w", "META");
                tr.area_height = f.get_d("area_h", "META");
                tr.node_count = static_cast<int>(f.get_ll("nodes", "META"));
                tr.wormhole_pairs = static_cast<int>(f.get_ll("pairs", "META"));
                tr.duration = f.get_d("duration", "META");
                tr.roles.assign(static_cast<size_t>(tr.node_count), NodeRole{});
                continue;
            case RecKind::Role: {
                const NodeId n = static_cast<NodeId>(f.get_ll("node", "ROLE"));
                if (n < 0 || static_cast<size_t>(n) >= tr.roles.size())
                    throw std::runtime_error("trace: ROLE before META or node out of range");
                NodeRole& r = tr.roles[static_cast<size_t>(n)];
                const std::string* role = f.find("role");
                r.wormhole = role && *role == "wormhole";
                if (r.wormhole) {
                    r.pair = static_cast<int>(f.get_ll("pair", "ROLE"));
                    r.peer = static_cast<NodeId>(f.get_ll("peer", "ROLE"));
                } else {
                    r.speed_class = static_cast<int>(f.get_ll_or("class", 0));
                }
                continue;
            }
            default:
                break;
        }

        TraceRecord rec;
        rec.t_us = t_us;
        rec.kind = kind;
        switch (kind) {
            case RecKind::MsgNew:
                rec.msg = static_cast<MsgId>(f.get_ll("msg", "MSG_NEW"));
                rec.a = static_cast<NodeId>(f.get_ll("src", "MSG_NEW"));
                rec.b = static_cast<NodeId>(f.get_ll("dst", "MSG_NEW"));
                rec.size = f.get_ll("size", "MSG_NEW");
                rec.copies = static_cast<int>(f.get_ll_or("copies", 0));
                rec.flags = static_cast<std::uint8_t>(f.get_ll_or("flags", 0));
                break;
            case RecKind::ContactUp:
            case RecKind::ContactDown:
                rec.a = static_cast<NodeId>(f.get_ll("a", "CONTACT"));
                rec.b = static_cast<NodeId>(f.get_ll("b", "CONTACT"));
                break;
            case RecKind::XferDone:
            case RecKind::XferAbort: {
                rec.msg = static_cast<MsgId>(f.get_ll("msg", "XFER"));
                rec.a = static_cast<NodeId>(f.get_ll("from", "XFER"));
                rec.b = static_cast<NodeId>(f.get_ll("to", "XFER"));
                rec.size = f.get_ll("size", "XFER");
                rec.copies = static_cast<int>(f.get_ll_or("copies", 0));
                rec.flags = static_cast<std::uint8_t>(f.get_ll_or("flags", 0));
                if (const std::string* h = f.find("hops")) rec.hops = parse_hops(*h);
                break;
            }
            case RecKind::TunnelXfer:
                rec.msg = static_cast<MsgId>(f.get_ll("msg", "TUNNEL_XFER"));
                rec.pair = static_cast<int>(f.get_ll("pair", "TUNNEL_XFER"));
                rec.a = static_cast<NodeId>(f.get_ll("from", "TUNNEL_XFER"));
                rec.b = static_cast<NodeId>(f.get_ll("to", "TUNNEL_XFER"));
                rec.size = f.get_ll("size", "TUNNEL_XFER");
                rec.copies = static_cast<int>(f.get_ll_or("copies", 0));
                rec.flags = static_cast<std::uint8_t>(f.get_ll_or("flags", 0));
                break;
            case RecKind::Drop:
                rec.msg = static_cast<MsgId>(f.get_ll("msg", "DROP"));
                rec.a = static_cast<NodeId>(f.get_ll("node", "DROP"));
                rec.flags = static_cast<std::uint8_t>(f.get_ll_or("flags", 0));
                break;
            case RecKind::Pos:
                rec.a = static_cast<NodeId>(f.get_ll("node", "POS"));
                rec.x = f.get_d("x", "POS");
                rec.y = f.get_d("y", "POS");
                break;
            case RecKind::Report:
            case RecKind::Detect:
                rec.note = body;
                break;
            case RecKind::Meta:
            case RecKind::Role:
                break;
        }
        tr.records.push_back(std::move(rec));
    }
    return tr;
}

EventTrace EventTrace::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::ios_base::failure("cannot open trace file: " + path);
    return parse(f);
}

} // namespace wds
