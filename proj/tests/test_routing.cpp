#include <doctest.h>

#include <random>
#include <set>

#include "wds/routing.hpp"

using namespace wds;

namespace {
Buffer with_msgs(std::initializer_list<MsgId> ids) {
    Buffer buf(100'000'000);
    double t = 0;
    for (MsgId id : ids) {
        MsgCopy c;
        c.id = id;
        c.size = 1000;
        c.received_at = t++;
        c.hops = {0};
        buf.enqueue(std::move(c));
    }
    return buf;
}
} // namespace

TEST_CASE("epidemic offers nothing when the peer has everything") {
    const Buffer buf = with_msgs({1, 2, 3});
    const auto out = epidemic_selection(buf, [](MsgId) { return true; });
    CHECK(out.empty());
}

TEST_CASE("epidemic offers everything to an empty peer") {
    const Buffer buf = with_msgs({1, 2, 3});
    const auto out = epidemic_selection(buf, [](MsgId) { return false; });
    CHECK(out == std::vector<MsgId>{1, 2, 3});
}

TEST_CASE("epidemic offers the set difference") {
    const Buffer buf = with_msgs({1, 2, 3});
    const auto out = epidemic_selection(buf, [](MsgId m) { return m == 2; });
    CHECK(out == std::vector<MsgId>{1, 3});
}

TEST_CASE("first contact hands over every resident message") {
    const Buffer buf = with_msgs({4, 5});
    const auto out = first_contact_selection(buf, 9, [](MsgId) { return false; });
    CHECK(out == std::vector<MsgId>{4, 5});
}

TEST_CASE("first contact does not bounce a message back to its last hop") {
    Buffer buf(1'000'000);
    MsgCopy c;
    c.id = 7;
    c.size = 100;
    c.hops = {0, 3, 5}; // held by node 5, came from node 3
    buf.enqueue(std::move(c));
    CHECK(first_contact_selection(buf, 3, [](MsgId) { return false; }).empty());
    CHECK(first_contact_selection(buf, 4, [](MsgId) { return false; }) == std::vector<MsgId>{7});
}

TEST_CASE("binary spray splits the copy budget") {
    const SprayDecision d = spray_decision(6, false);
    CHECK(d.forward);
    CHECK(d.handed == 3);
    const SprayDecision odd = spray_decision(5, false);
    CHECK(odd.handed == 2); // peer floor, self keeps 3
}

TEST_CASE("a single spray copy waits for the destination") {
    CHECK(!spray_decision(1, false).forward);
    const SprayDecision d = spray_decision(1, true);
    CHECK(d.forward);
    CHECK(d.handed == 1);
}

TEST_CASE("prophet first encounter lands at p_init") {
    ProphetTable t;
    prophet_direct_update(t, 5, 0.75);
    CHECK(t.get(5) == doctest::Approx(0.75));
}

TEST_CASE("prophet second immediate encounter compounds") {
    ProphetTable t;
    prophet_direct_update(t, 5, 0.75);
    prophet_direct_update(t, 5, 0.75);
    CHECK(t.get(5) == doctest::Approx(0.9375));
}

TEST_CASE("prophet aging decays by gamma per unit") {
    ProphetTable t;
    t.p[5] = 0.9375;
    t.last_aged = 0.0;
    prophet_age(t, 60.0, 0.98, 30.0); // two aging units
    CHECK(t.get(5) == doctest::Approx(0.9375 * 0.98 * 0.98).epsilon(1e-12));
}

TEST_CASE("prophet transitivity takes the max") {
    ProphetTable t;
    t.p[2] = 0.6; // P(peer)
    t.p[9] = 0.1;
    ProphetTable peer;
    peer.p[9] = 0.8;
    prophet_transitive_update(t, 1, 2, peer, 0.25);
    CHECK(t.get(9) == doctest::Approx(0.6 * 0.8 * 0.25)); // 0.12 > 0.1
    peer.p[9] = 0.2;
    prophet_transitive_update(t, 1, 2, peer, 0.25);
    CHECK(t.get(9) == doctest::Approx(0.12)); // unchanged, max rule
}

TEST_CASE("prophet forwards only toward better custodians") {
    ProphetTable mine, theirs;
    mine.p[9] = 0.3;
    theirs.p[9] = 0.4;
    CHECK(prophet_should_forward(mine, theirs, 9));
    theirs.p[9] = 0.3;
    CHECK(!prophet_should_forward(mine, theirs, 9));
}

TEST_CASE("prophet values stay in [0,1] under random encounter churn") {
    std::mt19937_64 eng(99);
    std::uniform_int_distribution<int> node(0, 19);
    std::uniform_real_distribution<double> dt(0.0, 120.0);
    std::vector<ProphetTable> tables(20);
    double now = 0.0;
    for (int step = 0; step < 10000; ++step) {
        now += dt(eng);
        const NodeId a = node(eng);
        NodeId b = node(eng);
        if (a == b) b = (b + 1) % 20;
        const ProphetTable snap_a = tables[static_cast<size_t>(a)];
        const ProphetTable snap_b = tables[static_cast<size_t>(b)];
        prophet_on_contact(tables[static_cast<size_t>(a)], a, b, snap_b, now, 0.75, 0.25, 0.98, 30.0);
        prophet_on_contact(tables[static_cast<size_t>(b)], b, a, snap_a, now, 0.75, 0.25, 0.98, 30.0);
        for (const auto& t : {tables[static_cast<size_t>(a)], tables[static_cast<size_t>(b)]}) {
            for (const auto& [_, v] : t.p) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
    }
}
