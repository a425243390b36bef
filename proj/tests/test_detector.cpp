#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "wds/detector.hpp"
#include "wds/engine.hpp"

using namespace wds;

namespace {

EventTrace two_node_trace() {
    EventTrace tr;
    tr.area_width = 100;
    tr.area_height = 100;
    tr.duration = 100;
    tr.node_count = 2;
    tr.wormhole_pairs = 0;
    tr.roles.assign(2, NodeRole{});
    TraceRecord up;
    up.t_us = 1'000'000;
    up.kind = RecKind::ContactUp;
    up.a = 0;
    up.b = 1;
    tr.records.push_back(up);
    TraceRecord xf;
    xf.t_us = 2'000'000;
    xf.kind = RecKind::XferDone;
    xf.msg = 0;
    xf.a = 0;
    xf.b = 1;
    xf.size = 1000;
    xf.hops = {0, 1};
    tr.records.push_back(xf);
    return tr;
}

AuditLedger ledger_with_relays(const std::vector<int>& counts) {
    AuditLedger led;
    led.population = static_cast<int>(counts.size());
    for (size_t i = 0; i < counts.size(); ++i)
        if (counts[i] != 0) led.relay_count[static_cast<NodeId>(i)] = counts[i];
    return led;
}

DetectorParams default_params() {
    return load_config("").detector;
}

} // namespace

TEST_CASE("single-transfer trace produces the textbook ledger") {
    const EventTrace tr = two_node_trace();
    const AuditLedger led = build_ledger(tr, 0.0, 100.0);
    CHECK(led.relays(0) == 1);
    CHECK(led.relays(1) == 0);
    CHECK(led.neighbor_set(0) == std::set<NodeId>{1});
    CHECK(led.neighbor_set(1) == std::set<NodeId>{0});
    CHECK(led.mutual_traffic(0, 1) == 1);
    CHECK(led.contact_count.at(0) == 1);
}

TEST_CASE("tunnel records contribute nothing to the ledger") {
    EventTrace tr;
    tr.area_width = tr.area_height = 100;
    tr.duration = 100;
    tr.node_count = 4;
    tr.wormhole_pairs = 1;
    tr.roles.assign(4, NodeRole{});
    tr.roles[2].wormhole = true;
    tr.roles[2].pair = 0;
    tr.roles[2].peer = 3;
    tr.roles[3].wormhole = true;
    tr.roles[3].pair = 0;
    tr.roles[3].peer = 2;
    TraceRecord tx;
    tx.t_us = 5'000'000;
    tx.kind = RecKind::TunnelXfer;
    tx.msg = 0;
    tx.pair = 0;
    tx.a = 2;
    tx.b = 3;
    tx.size = 1000;
    tr.records.push_back(tx);
    // a wormhole-wormhole radio contact is likewise unreported
    TraceRecord up;
    up.t_us = 6'000'000;
    up.kind = RecKind::ContactUp;
    up.a = 2;
    up.b = 3;
    tr.records.push_back(up);

    const AuditLedger led = build_ledger(tr, 0.0, 100.0);
    CHECK(led.relay_count.empty());
    CHECK(led.neighbors.empty());
    CHECK(led.mutual.empty());
}

TEST_CASE("hop trails expose tunnel traversals to the auditor") {
    EventTrace tr;
    tr.area_width = tr.area_height = 100;
    tr.duration = 100;
    tr.node_count = 5;
    tr.wormhole_pairs = 1;
    tr.roles.assign(5, NodeRole{});
    tr.roles[3].wormhole = true;
    tr.roles[3].pair = 0;
    tr.roles[3].peer = 4;
    tr.roles[4].wormhole = true;
    tr.roles[4].pair = 0;
    tr.roles[4].peer = 3;
    // wormhole 4 replays msg 7 to legit node 1; the trail crosses 3->4
    TraceRecord xf;
    xf.t_us = 10'000'000;
    xf.kind = RecKind::XferDone;
    xf.msg = 7;
    xf.a = 4;
    xf.b = 1;
    xf.size = 1000;
    xf.hops = {0, 3, 4, 1};
    tr.records.push_back(xf);
    // second replay of the same message must not double-count
    TraceRecord xf2 = xf;
    xf2.t_us = 11'000'000;
    xf2.b = 2;
    xf2.hops = {0, 3, 4, 2};
    tr.records.push_back(xf2);

    const AuditLedger led = build_ledger(tr, 0.0, 100.0);
    CHECK(led.mutual_traffic(3, 4) == 1); // distinct messages, not transfers
    CHECK(led.mutual_traffic(4, 1) == 1);
    CHECK(led.relays(4) == 2);
}

TEST_CASE("an empty window yields an empty ledger") {
    const EventTrace tr = two_node_trace();
    const AuditLedger led = build_ledger(tr, 50.0, 50.0);
    CHECK(led.relay_count.empty());
    CHECK(led.neighbors.empty());
    CHECK(led.mutual.empty());
}

TEST_CASE("window boundaries include carried-over contacts") {
    EventTrace tr = two_node_trace(); // contact up at t=1, transfer at t=2
    SUBCASE("window after the events still sees the open contact") {
        const AuditLedger led = build_ledger(tr, 50.0, 100.0);
        CHECK(led.neighbor_set(0) == std::set<NodeId>{1});
        CHECK(led.relays(0) == 0); // transfer happened before the window
    }
    SUBCASE("a closed contact before the window is invisible") {
        TraceRecord down;
        down.t_us = 3'000'000;
        down.kind = RecKind::ContactDown;
        down.a = 0;
        down.b = 1;
        tr.records.push_back(down);
        const AuditLedger led = build_ledger(tr, 50.0, 100.0);
        CHECK(led.neighbor_set(0).empty());
    }
}

TEST_CASE("flag_suspects isolates heavy relays despite masking") {
    const DetectorParams params = default_params(); // standard, threshold 2.5
    const AuditLedger led = ledger_with_relays({3, 4, 3, 5, 4, 250, 260});
    const FlagResult r = flag_suspects(led, params);
    CHECK(r.suspects == std::set<NodeId>{5, 6});
    CHECK(r.scores.at(5) > 2.5);
    CHECK(r.scores.at(6) > 2.5);
    CHECK(r.scores.at(3) < 2.5);
}

TEST_CASE("flag_suspects returns nothing for a flat population") {
    const FlagResult r = flag_suspects(ledger_with_relays({7, 7, 7, 7, 7}), default_params());
    CHECK(r.degenerate);
    CHECK(r.suspects.empty());
}

TEST_CASE("flag_suspects suspect set is affine-invariant") {
    const DetectorParams params = default_params();
    const std::vector<int> base{3, 4, 3, 5, 4, 250, 260};
    std::vector<int> scaled;
    for (int v : base) scaled.push_back(3 * v + 7);
    const FlagResult a = flag_suspects(ledger_with_relays(base), params);
    const FlagResult b = flag_suspects(ledger_with_relays(scaled), params);
    CHECK(a.suspects == b.suspects);
}

TEST_CASE("modified variant flags through the MAD score") {
    DetectorParams params = default_params();
    params.z_variant = ZVariant::Modified;
    params.z_threshold = 3.5;
    const FlagResult r = flag_suspects(ledger_with_relays({3, 4, 3, 5, 4, 250, 260}), params);
    CHECK(r.suspects == std::set<NodeId>{5, 6});
}

TEST_CASE("pair_suspects binds by mutual traffic") {
    AuditLedger led;
    led.population = 4;
    SUBCASE("one pair with traffic") {
        led.mutual[{0, 1}] = 500;
        CHECK(pair_suspects({0, 1}, led) == std::vector<NodePair>{{0, 1}});
    }
    SUBCASE("zero traffic never binds") {
        CHECK(pair_suspects({0, 1}, led).empty());
    }
    SUBCASE("greedy matching matches the enumerated optimum") {
        led.mutual[{0, 1}] = 900;
        led.mutual[{2, 3}] = 800;
        led.mutual[{0, 2}] = 3;
        const auto got = pair_suspects({0, 1, 2, 3}, led);
        CHECK(got == std::vector<NodePair>{{0, 1}, {2, 3}});
        // brute force over the three perfect matchings of 4 nodes
        const int m1 = 900 + 800; // (01)(23)
        const int m2 = 3 + 0;     // (02)(13)
        const int m3 = 0 + 0;     // (03)(12)
        CHECK(m1 >= std::max(m2, m3));
    }
    SUBCASE("the traffic floor suppresses weak bindings") {
        led.mutual[{0, 1}] = 4;
        CHECK(pair_suspects({0, 1}, led, 5).empty());
        led.mutual[{0, 1}] = 5;
        CHECK(pair_suspects({0, 1}, led, 5).size() == 1);
    }
    SUBCASE("suspects seen in direct contact are never bound") {
        led.mutual[{0, 1}] = 500;
        led.neighbors[0].insert(1);
        led.neighbors[1].insert(0);
        CHECK(pair_suspects({0, 1}, led).empty());
        // and a refuted high-traffic pair does not consume an endpoint
        led.mutual[{1, 2}] = 50; // 1 and 2 were never in contact
        CHECK(pair_suspects({0, 1, 2}, led) == std::vector<NodePair>{{1, 2}});
    }
}

TEST_CASE("neighbor similarity matches set enumeration") {
    const std::set<NodeId> p{10, 11, 12}, q{11, 12, 13};
    CHECK(neighbor_similarity(p, p, 1, 2) == doctest::Approx(1.0));
    CHECK(neighbor_similarity({1, 2}, {3, 4}, 8, 9) == doctest::Approx(0.0));
    CHECK(neighbor_similarity(p, q, 1, 2) == doctest::Approx(0.5)); // 2 of 4
    CHECK(neighbor_similarity({}, {}, 1, 2) == doctest::Approx(1.0));
    // partners are stripped before comparing
    CHECK(neighbor_similarity({2, 5}, {1, 5}, 1, 2) == doctest::Approx(1.0));
}

TEST_CASE("neighbor similarity is symmetric and bounded") {
    std::uint64_t state = 77;
    auto next = [&state]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return state >> 33;
    };
    for (int trial = 0; trial < 300; ++trial) {
        std::set<NodeId> a, b;
        for (int i = 0; i < 12; ++i) {
            if (next() % 2) a.insert(static_cast<NodeId>(next() % 20));
            if (next() % 2) b.insert(static_cast<NodeId>(next() % 20));
        }
        const double s1 = neighbor_similarity(a, b, 98, 99);
        const double s2 = neighbor_similarity(b, a, 99, 98);
        CHECK(s1 == doctest::Approx(s2));
        CHECK(s1 >= 0.0);
        CHECK(s1 <= 1.0);
    }
}

TEST_CASE("confirm_wormholes keeps only low-similarity pairs") {
    AuditLedger led;
    led.population = 6;
    led.neighbors[0] = {10, 11, 12};
    led.neighbors[1] = {20, 21, 22};
    led.neighbors[2] = {10, 11, 12};
    led.neighbors[3] = {10, 11, 13};
    DetectorParams params = default_params(); // similarity threshold 0.1
    const auto confirmed = confirm_wormholes({{0, 1}, {2, 3}}, led, params);
    REQUIRE(confirmed.size() == 1);
    CHECK(confirmed[0].a == 0);
    CHECK(confirmed[0].b == 1);
}

TEST_CASE("confirm_wormholes withholds judgment without evidence") {
    AuditLedger led;
    led.population = 4;
    led.neighbors[0] = {10, 11};
    // node 1 reported no neighbors at all
    DetectorParams params = default_params();
    CHECK(confirm_wormholes({{0, 1}}, led, params).empty());
    // a table containing only the partner is still empty evidence
    led.neighbors[1] = {0};
    CHECK(confirm_wormholes({{0, 1}}, led, params).empty());
    led.neighbors[1] = {20, 21};
    CHECK(confirm_wormholes({{0, 1}}, led, params).size() == 1);
}

TEST_CASE("score_report computes the three metrics") {
    const std::vector<NodePair> truth{{10, 11}, {12, 13}, {14, 15}, {16, 17}, {18, 19}};
    SUBCASE("four of five, no false alarms") {
        DetectionReport rep;
        rep.confirmed = {{10, 11, 2400}, {12, 13, 2400}, {14, 15, 3000}, {16, 17, 3600}};
        score_report(rep, truth);
        CHECK(rep.detection_success_rate == doctest::Approx(80.0));
        CHECK(rep.false_alarm_rate == doctest::Approx(0.0));
        CHECK(rep.mean_detection_time == doctest::Approx((2400 + 2400 + 3000 + 3600) / 4.0));
    }
    SUBCASE("five of five") {
        DetectionReport rep;
        for (const auto& p : truth) rep.confirmed.push_back({p.first, p.second, 2400});
        score_report(rep, truth);
        CHECK(rep.detection_success_rate == doctest::Approx(100.0));
        CHECK(rep.false_alarm_rate == doctest::Approx(0.0));
    }
    SUBCASE("nothing confirmed") {
        DetectionReport rep;
        score_report(rep, truth);
        CHECK(rep.detection_success_rate == doctest::Approx(0.0));
        CHECK(rep.false_alarm_rate == doctest::Approx(0.0));
        CHECK(rep.mean_detection_time == doctest::Approx(-1.0));
    }
    SUBCASE("a false pair raises the alarm rate") {
        DetectionReport rep;
        rep.confirmed = {{10, 11, 2400}, {1, 2, 2400}};
        score_report(rep, truth);
        CHECK(rep.detection_success_rate == doctest::Approx(20.0));
        CHECK(rep.false_alarm_rate == doctest::Approx(20.0));
    }
}

TEST_CASE("the streaming runner agrees with pure per-window ledgers") {
    // Reference pass driver recomputed from build_ledger each time.
    const ScenarioConfig cfg = load_config(
        "area.width = 200\narea.height = 200\nnodes.legit = 8\nwormhole.pairs = 1\n"
        "radio.wormhole_range = 60\nsim.duration = 2400\n"
        "detector.warmup = 300\ndetector.audit_window = 300\n");
    const SimResult sim = run_simulation(cfg);
    const EventTrace& tr = sim.trace;
    const DetectorParams& params = cfg.detector;

    std::map<NodePair, double> confirmed_at;
    for (double t : detector_pass_times(params, tr.duration)) {
        const AuditLedger cum = build_ledger(tr, 0.0, t);
        const AuditLedger win = build_ledger(tr, t - params.audit_window, t);
        const FlagResult flags = flag_suspects(cum, params);
        std::vector<NodePair> fresh;
        for (const NodePair& p : pair_suspects(flags.suspects, win, params.min_pair_traffic))
            if (!confirmed_at.count(p)) fresh.push_back(p);
        for (const Confirmation& c : confirm_wormholes(fresh, win, params))
            confirmed_at[{c.a, c.b}] = t;
    }

    const RunnerResult streamed = run_detector(tr, params);
    REQUIRE(streamed.report.confirmed.size() == confirmed_at.size());
    for (const ConfirmedPair& p : streamed.report.confirmed) {
        REQUIRE(confirmed_at.count({p.a, p.b}));
        CHECK(confirmed_at[{p.a, p.b}] == doctest::Approx(p.declared_at));
    }
}

TEST_CASE("detector reports are deterministic for a fixed trace") {
    const ScenarioConfig cfg = load_config(
        "area.width = 150\narea.height = 150\nnodes.legit = 6\nwormhole.pairs = 1\n"
        "radio.wormhole_range = 50\nsim.duration = 1500\n"
        "detector.warmup = 300\ndetector.audit_window = 300\n");
    const SimResult sim = run_simulation(cfg);
    const RunnerResult a = replay_detector(sim.trace, cfg.detector);
    const RunnerResult b = replay_detector(sim.trace, cfg.detector);
    CHECK(a.report.serialize() == b.report.serialize());
}

TEST_CASE("modified and dynamic variants drive the full pass pipeline") {
    const char* variants[] = {"modified", "dynamic"};
    for (const char* v : variants) {
        CAPTURE(v);
        const ScenarioConfig cfg = load_config(
            std::string("area.width = 200\narea.height = 200\nnodes.legit = 8\n"
                        "wormhole.pairs = 1\nradio.wormhole_range = 60\nsim.duration = 1800\n"
                        "detector.warmup = 300\ndetector.audit_window = 300\n"
                        "detector.variant = ") + v + "\n");
        const SimResult sim = run_simulation(cfg);
        // no false pairs under any variant
        const auto tp = sim.trace.truth_pairs();
        const std::set<NodePair> truth(tp.begin(), tp.end());
        for (const ConfirmedPair& p : sim.report.confirmed)
            CHECK(truth.count(make_pair_key(p.a, p.b)) == 1);
        // replay agrees regardless of variant
        const RunnerResult replayed = replay_detector(sim.trace, cfg.detector);
        CHECK(replayed.report.serialize() == sim.report.serialize());
    }
}

TEST_CASE("report serialization is stable and complete") {
    DetectionReport rep;
    rep.suspects = {4, 9};
    rep.confirmed = {{4, 9, 2400.0}};
    score_report(rep, {{4, 9}});
    const std::string text = rep.serialize();
    CHECK(text.find("suspects 4,9\n") != std::string::npos);
    CHECK(text.find("pair 4 9 2400.000000\n") != std::string::npos);
    CHECK(text.find("detection_success_rate 100.00\n") != std::string::npos);
    CHECK(text.find("false_alarm_rate 0.00\n") != std::string::npos);
    CHECK(text.find("mean_detection_time 2400.000000\n") != std::string::npos);
}
