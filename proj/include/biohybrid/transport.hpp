#pragma once

#include "biohybrid/protocol.hpp"
#include "biohybrid/random.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

namespace biohybrid {

struct LinkProfile {
    double static_delay_ms = 0.0;
    double jitter_ms = 0.0;  // half-width of the uniform jitter
    double loss_prob = 0.0;
    // A single network path does not reorder: delivery times on a link are
    // kept non-decreasing. Set false for independent per-packet jitter.
    bool preserve_order = true;

    void validate() const;
};

struct Delivery {
    double time_ms = 0.0;
    PartnerRole from = PartnerRole::Primary;
    PartnerRole to = PartnerRole::Synapse;
    Octets octets{};
};

using DeliveryHandler = std::function<void(const Delivery&)>;

// Virtual-time event queue. Deliveries come out in non-decreasing time, ties
// in insertion order.
class SimScheduler {
public:
    explicit SimScheduler(std::uint64_t seed);

    double now() const { return now_; }
    std::size_t pending() const { return queue_.size(); }
    bool idle() const { return queue_.empty(); }

    // Applies the link profile; returns the delivery time, or nullopt if the
    // packet was lost.
    std::optional<double> send(const LinkProfile& link, PartnerRole from, PartnerRole to,
                               const Octets& octets, double send_ms);

    // Enqueues a delivery as-is (clamped to the current virtual time).
    void schedule(Delivery delivery);

    std::vector<Delivery> run_until(double t_end);
    // The handler may schedule more traffic; anything due by t_end is included.
    void run_until(double t_end, const DeliveryHandler& handler);

private:
    struct Item {
        Delivery delivery;
        std::uint64_t sequence;
    };
    struct Later {
        bool operator()(const Item& a, const Item& b) const {
            if (a.delivery.time_ms != b.delivery.time_ms) return a.delivery.time_ms > b.delivery.time_ms;
            return a.sequence > b.sequence;
        }
    };
    using LinkKey = std::pair<PartnerRole, PartnerRole>;

    Rng& link_rng(const LinkKey& key);

    std::uint64_t seed_;
    double now_ = 0.0;
    std::uint64_t next_sequence_ = 0;
    std::priority_queue<Item, std::vector<Item>, Later> queue_;
    std::map<LinkKey, Rng> rngs_;
    std::map<LinkKey, double> last_delivery_;
};

// Send/receive contract implemented by both backends. Nodes never see which
// one they are running on.
class Transport {
public:
    virtual ~Transport() = default;
    virtual void send(PartnerRole from, PartnerRole to, const Octets& octets, double at_ms) = 0;
    // Hands every packet that has arrived by now_ms to the handler, in order.
    virtual void deliver_until(double now_ms, const DeliveryHandler& handler) = 0;
    virtual bool idle() const = 0;
};

class SimTransport final : public Transport {
public:
    SimTransport(std::uint64_t seed, std::map<std::pair<PartnerRole, PartnerRole>, LinkProfile> links);

    void send(PartnerRole from, PartnerRole to, const Octets& octets, double at_ms) override;
    void deliver_until(double now_ms, const DeliveryHandler& handler) override;
    bool idle() const override { return scheduler_.idle(); }

    const SimScheduler& scheduler() const { return scheduler_; }
    const LinkProfile& link(PartnerRole from, PartnerRole to) const;
    std::size_t lost() const { return lost_; }

private:
    SimScheduler scheduler_;
    std::map<std::pair<PartnerRole, PartnerRole>, LinkProfile> links_;
    std::size_t lost_ = 0;
};

struct UdpEndpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;

    // "host:port"; throws Error{BadConfig}.
    static UdpEndpoint parse(const std::string& text);
    std::string to_string() const;
};

// One UDP socket per node. The sender's role is taken from the R1 tag of each
// datagram; datagrams that are not 8 octets or carry an unknown tag are dropped.
class UdpTransport final : public Transport {
public:
    UdpTransport(std::uint16_t listen_port, std::map<PartnerRole, UdpEndpoint> peers);
    ~UdpTransport() override;
    UdpTransport(const UdpTransport&) = delete;
    UdpTransport& operator=(const UdpTransport&) = delete;

    std::uint16_t local_port() const { return port_; }

    void send(PartnerRole from, PartnerRole to, const Octets& octets, double at_ms) override;
    void deliver_until(double now_ms, const DeliveryHandler& handler) override;
    bool idle() const override { return true; }

    // Blocks up to timeout_ms for readability.
    bool wait_readable(int timeout_ms) const;

    std::size_t dropped() const { return dropped_; }
    std::size_t sent() const { return sent_; }

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
    std::map<PartnerRole, UdpEndpoint> peers_;
    std::size_t dropped_ = 0;
    std::size_t sent_ = 0;
};

}  // namespace biohybrid
