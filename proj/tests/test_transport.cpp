#include "biohybrid/error.hpp"
#include "biohybrid/transport.hpp"

#include <doctest.h>

#include <chrono>
#include <thread>

using namespace biohybrid;

namespace {

constexpr auto P = PartnerRole::Primary;
constexpr auto S = PartnerRole::Synapse;

Octets tagged(std::uint8_t n) { return encode({kPrimaryTag, n, 0, n}); }

std::vector<double> times(const std::vector<Delivery>& ds) {
    std::vector<double> out;
    for (const auto& d : ds) out.push_back(d.time_ms);
    return out;
}

}  // namespace

TEST_CASE("static delay without jitter") {
    SimScheduler s(1);
    CHECK(s.send({50.0, 0.0, 0.0}, P, S, tagged(1), 0.0) == 50.0);
    CHECK(s.send({0.0, 0.0, 0.0}, P, S, tagged(2), 60.0) == 60.0);
    const auto got = s.run_until(100.0);
    CHECK(times(got) == std::vector<double>{50.0, 60.0});
    CHECK(s.now() == 100.0);
}

TEST_CASE("total loss") {
    SimScheduler s(1);
    for (int i = 0; i < 100; ++i) CHECK_FALSE(s.send({10.0, 0.0, 1.0}, P, S, tagged(1), i).has_value());
    CHECK(s.idle());
}

TEST_CASE("partial loss rate") {
    SimScheduler s(2);
    int delivered = 0;
    for (int i = 0; i < 20000; ++i) delivered += s.send({1.0, 0.0, 0.25}, P, S, tagged(1), i).has_value();
    CHECK(delivered / 20000.0 == doctest::Approx(0.75).epsilon(0.03));
}

TEST_CASE("empty queue advances time") {
    SimScheduler s(1);
    CHECK(s.run_until(123.0).empty());
    CHECK(s.now() == 123.0);
}

TEST_CASE("priority order and tie-break") {
    SimScheduler s(1);
    s.schedule({10.0, P, S, tagged(1)});
    s.schedule({5.0, P, S, tagged(2)});
    s.schedule({7.0, P, S, tagged(3)});
    s.schedule({7.0, P, S, tagged(4)});
    const auto got = s.run_until(20.0);
    REQUIRE(got.size() == 4);
    CHECK(decode(got[0].octets).neuron_id == 2);
    CHECK(decode(got[1].octets).neuron_id == 3);
    CHECK(decode(got[2].octets).neuron_id == 4);
    CHECK(decode(got[3].octets).neuron_id == 1);
}

TEST_CASE("deliveries past the horizon wait") {
    SimScheduler s(1);
    s.send({30.0, 0.0, 0.0}, P, S, tagged(1), 0.0);
    CHECK(s.run_until(29.9).empty());
    CHECK(s.run_until(30.0).size() == 1);
}

TEST_CASE("jitter stays within bounds and never precedes the send") {
    SimScheduler s(3);
    for (int i = 0; i < 5000; ++i) {
        const double sent = i * 10.0;
        const auto at = s.send({50.0, 2.0, 0.0, false}, P, S, tagged(1), sent);
        REQUIRE(at);
        CHECK(*at >= sent + 48.0);
        CHECK(*at <= sent + 52.0);
    }
    SimScheduler z(3);
    for (int i = 0; i < 1000; ++i) CHECK(*z.send({0.0, 5.0, 0.0, false}, P, S, tagged(1), 100.0) >= 100.0);
}

TEST_CASE("links are FIFO when jitter is small next to the send gap, even without order preservation") {
    SimScheduler s(4);
    for (int i = 0; i < 2000; ++i) s.send({40.0, 2.0, 0.0, false}, P, S, tagged(static_cast<std::uint8_t>(i)), i * 5.0);
    const auto got = s.run_until(1e9);
    for (std::size_t i = 1; i < got.size(); ++i) CHECK(got[i].time_ms >= got[i - 1].time_ms);
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(decode(got[i].octets).neuron_id == (i & 0xFF));
}

TEST_CASE("order preservation at extreme jitter") {
    SimScheduler keep(5), loose(5);
    bool reordered = false;
    for (int i = 0; i < 500; ++i) {
        keep.send({10.0, 9.0, 0.0, true}, P, S, tagged(static_cast<std::uint8_t>(i)), i * 1.0);
        loose.send({10.0, 9.0, 0.0, false}, P, S, tagged(static_cast<std::uint8_t>(i)), i * 1.0);
    }
    const auto k = keep.run_until(1e9);
    for (std::size_t i = 0; i < k.size(); ++i) CHECK(decode(k[i].octets).neuron_id == (i & 0xFF));
    const auto l = loose.run_until(1e9);
    for (std::size_t i = 0; i < l.size(); ++i) reordered |= decode(l[i].octets).neuron_id != (i & 0xFF);
    CHECK(reordered);
}

TEST_CASE("deterministic for a seed") {
    auto run = [](std::uint64_t seed) {
        SimScheduler s(seed);
        for (int i = 0; i < 300; ++i) s.send({20.0, 2.0, 0.1}, P, S, tagged(1), i * 3.0);
        return times(s.run_until(1e9));
    };
    CHECK(run(9) == run(9));
    CHECK(run(9) != run(10));
}

TEST_CASE("handler may schedule more traffic") {
    SimScheduler s(1);
    s.schedule({5.0, P, S, tagged(1)});
    std::vector<double> seen;
    s.run_until(20.0, [&](const Delivery& d) {
        seen.push_back(d.time_ms);
        if (seen.size() < 3) s.send({4.0, 0.0, 0.0}, S, P, tagged(2), d.time_ms);
    });
    CHECK(seen == std::vector<double>{5.0, 9.0, 13.0});
}

TEST_CASE("sim transport counts losses and uses per-link profiles") {
    SimTransport t(1, {{{P, S}, LinkProfile{10.0, 0.0, 0.0}}, {{S, P}, LinkProfile{0.0, 0.0, 1.0}}});
    t.send(P, S, tagged(1), 0.0);
    t.send(S, P, tagged(2), 0.0);
    CHECK(t.lost() == 1);
    std::vector<Delivery> got;
    t.deliver_until(10.0, [&](const Delivery& d) { got.push_back(d); });
    REQUIRE(got.size() == 1);
    CHECK(got[0].time_ms == 10.0);
    CHECK(t.idle());
    CHECK_THROWS_AS(SimTransport(1, {{{P, S}, LinkProfile{-1.0, 0.0, 0.0}}}), Error);
    CHECK_THROWS_AS(LinkProfile({0.0, 0.0, 1.5}).validate(), Error);
}

TEST_CASE("endpoint parsing") {
    const auto e = UdpEndpoint::parse("127.0.0.1:47000");
    CHECK(e.host == "127.0.0.1");
    CHECK(e.port == 47000);
    CHECK(UdpEndpoint::parse(e.to_string()).port == 47000);
    for (const char* bad : {"", "127.0.0.1", "host:", ":80", "h:70000", "h:abc"}) {
        CHECK_THROWS_AS(UdpEndpoint::parse(bad), Error);
    }
}

TEST_CASE("UDP loopback") {
    UdpTransport hub(0, {});
    const std::uint16_t hub_port = hub.local_port();
    REQUIRE(hub_port != 0);
    UdpTransport primary(0, {{S, UdpEndpoint{"127.0.0.1", hub_port}}});

    const AerPacket pkt{kPrimaryTag, 1, 0, 12};
    primary.send(P, S, encode(pkt), 0.0);
    std::vector<Delivery> got;
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(2);
    while (got.empty() && std::chrono::steady_clock::now() < deadline) {
        hub.wait_readable(50);
        hub.deliver_until(0.0, [&](const Delivery& d) { got.push_back(d); });
    }
    REQUIRE(got.size() == 1);
    CHECK(got[0].from == P);
    CHECK(decode(got[0].octets) == pkt);
    CHECK(primary.sent() == 1);
}

TEST_CASE("UDP drops datagrams with an unknown role tag") {
    UdpTransport hub(0, {});
    UdpTransport sender(0, {{S, UdpEndpoint{"127.0.0.1", hub.local_port()}}});
    sender.send(P, S, encode({0x09, 1, 0, 0}), 0.0);
    sender.send(P, S, encode({kSecondaryTag, 3, 1, 0}), 0.0);
    std::vector<Delivery> got;
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(2);
    while (got.empty() && std::chrono::steady_clock::now() < deadline) {
        hub.wait_readable(50);
        hub.deliver_until(0.0, [&](const Delivery& d) { got.push_back(d); });
    }
    REQUIRE(got.size() == 1);
    CHECK(got[0].from == PartnerRole::Secondary);
    CHECK(hub.dropped() == 1);
}
