#include "privhc/net.hpp"

#include <gtest/gtest.h>

#include <future>
#include <thread>

using namespace privhc;
using namespace privhc::net;

TEST(Frame, RoundTripAndMeter)
{
    auto [a, b] = inprocess_pair();
    std::vector<std::uint8_t> payload(100);
    for (std::size_t i = 0; i < payload.size(); ++i)
        payload[i] = std::uint8_t(i * 7);
    a.send(tag::setup_h, payload);
    EXPECT_EQ(b.recv(tag::setup_h), payload);
    EXPECT_EQ(a.stats().total().sent, 105u);
    EXPECT_EQ(b.stats().total().received, 105u);
}

TEST(Frame, InterleavedOrderPreserved)
{
    auto [a, b] = inprocess_pair();
    a.send(tag::gc_tables, {1});
    a.send(tag::ot_msg1, {2, 2});
    a.send(tag::gc_labels, {});
    auto f1 = b.recv(), f2 = b.recv(), f3 = b.recv();
    EXPECT_EQ(f1.t, tag::gc_tables);
    EXPECT_EQ(f2.t, tag::ot_msg1);
    EXPECT_EQ(f2.payload.size(), 2u);
    EXPECT_EQ(f3.t, tag::gc_labels);
    EXPECT_TRUE(f3.payload.empty());
}

TEST(Frame, DesyncDetected)
{
    auto [a, b] = inprocess_pair();
    a.send(tag::ot_msg2, {0});
    EXPECT_THROW(b.recv(tag::ot_msg3), error);
}

TEST(Frame, OversizedRejected)
{
    auto [a, b] = inprocess_pair(16);
    EXPECT_THROW(a.send(tag::setup_d, std::vector<std::uint8_t>(17)), error);
}

TEST(Frame, PeerClosed)
{
    auto [a, b] = inprocess_pair();
    a.close();
    EXPECT_THROW(b.recv(), error);
}

TEST(Handshake, Loopback)
{
    auto [a, b] = inprocess_pair();
    auto f = std::async(std::launch::async, [&] { b.handshake(42); });
    EXPECT_NO_THROW(a.handshake(42));
    EXPECT_NO_THROW(f.get());
}

TEST(Handshake, ConfigMismatchAborts)
{
    auto [a, b] = inprocess_pair();
    auto f = std::async(std::launch::async, [&] { b.handshake(5); });
    EXPECT_THROW(a.handshake(6), error);
    EXPECT_THROW(f.get(), error);
}

TEST(Meter, EmptyAndPhases)
{
    auto [a, b] = inprocess_pair();
    auto empty = phase_report(a.stats());
    EXPECT_EQ(empty.total, counters{});
    EXPECT_TRUE(empty.phases.empty());

    a.set_phase("setup");
    b.set_phase("setup");
    a.send(tag::setup_h, std::vector<std::uint8_t>(10));
    b.recv();
    a.set_phase("cluster");
    b.set_phase("cluster");
    b.send(tag::gc_output, std::vector<std::uint8_t>(3));
    a.recv();
    auto r = phase_report(a.stats());
    EXPECT_EQ(r.phases["setup"].sent, 15u);
    EXPECT_EQ(r.phases["cluster"].received, 8u);
    EXPECT_EQ(r.tags["SETUP_H"].sent, 15u);
    EXPECT_EQ(r.total.sent + r.total.received, 23u);
    EXPECT_FALSE(format_table(r).empty());
}

TEST(Meter, SymmetryPerTag)
{
    auto [a, b] = inprocess_pair();
    for (int i = 0; i < 20; ++i) {
        a.send(tag(1 + i % 15), std::vector<std::uint8_t>(i * 3));
        b.recv();
        b.send(tag(1 + (i * 7) % 15), std::vector<std::uint8_t>(i));
        a.recv();
    }
    auto ta = a.stats().by_tag(), tb = b.stats().by_tag();
    for (const auto& [t, c] : ta) {
        EXPECT_EQ(c.sent, tb[t].received);
        EXPECT_EQ(c.received, tb[t].sent);
    }
}

TEST(Tcp, RoundTripAndHandshake)
{
    listener_socket l;
    auto port = l.port();
    auto f = std::async(std::launch::async, [&] {
        auto s = connect(role::dialer, {"127.0.0.1", port});
        s.handshake(9);
        auto got = s.recv(tag::setup_d);
        s.send(tag::out_plains, got);
    });
    auto s = l.accept();
    s.handshake(9);
    std::vector<std::uint8_t> big(1 << 20, 0xab);
    s.send(tag::setup_d, big);
    EXPECT_EQ(s.recv(tag::out_plains), big);
    f.get();
}

TEST(Endpoint, Parse)
{
    auto e = endpoint::parse("10.0.0.1:7000");
    EXPECT_EQ(e.host, "10.0.0.1");
    EXPECT_EQ(e.port, 7000);
    EXPECT_EQ(endpoint::parse(":80").host, "127.0.0.1");
    EXPECT_THROW(endpoint::parse("host:notaport"), usage_error);
}
