#include "biohybrid/event_loop.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>

namespace biohybrid {

namespace {

void flush(Node& node, Transport& transport, Outbox& out) {
    for (const auto& e : out) transport.send(node.role(), e.to, encode(e.packet), e.at_ms);
    out.clear();
}

}  // namespace

LoopStats run_simulation(Node& primary, Node& hub, Node& secondary, SimTransport& transport,
                         double duration_ms, double dt_ms, double drain_limit_ms) {
    Node* by_role[3] = {&primary, &hub, &secondary};
    LoopStats stats;
    Outbox out;

    const DeliveryHandler dispatch = [&](const Delivery& d) {
        ++stats.deliveries;
        Node& node = *by_role[static_cast<int>(d.to)];
        node.receive(d.from, decode(d.octets), d.time_ms, out);
        flush(node, transport, out);
    };
    auto step = [&](double t) {
        transport.deliver_until(t, dispatch);
        for (Node* node : by_role) {
            node->advance(t, dt_ms, out);
            flush(*node, transport, out);
        }
        ++stats.steps;
    };

    // Integer step index keeps the time grid exact over long runs.
    const auto n_steps = static_cast<std::int64_t>(std::ceil(duration_ms / dt_ms - 1e-9));
    std::int64_t i = 0;
    for (; i < n_steps; ++i) step(static_cast<double>(i) * dt_ms);

    for (Node* node : by_role) node->quiesce();
    const auto drain_steps = static_cast<std::int64_t>(std::ceil(drain_limit_ms / dt_ms));
    for (std::int64_t k = 0; k < drain_steps; ++k, ++i) {
        const bool busy = !transport.idle() || !primary.idle() || !hub.idle() || !secondary.idle();
        if (!busy) break;
        step(static_cast<double>(i) * dt_ms);
    }
    if (!transport.idle()) spdlog::warn("simulation: drain limit reached with packets in flight");
    stats.end_ms = static_cast<double>(i) * dt_ms;
    return stats;
}

LoopStats run_realtime(Node& node, UdpTransport& transport, double duration_ms, double dt_ms,
                       double linger_ms, const std::atomic<bool>* stop) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double, std::milli>(clock::now() - start).count();
    };
    LoopStats stats;
    Outbox out;
    const DeliveryHandler dispatch = [&](const Delivery& d) {
        ++stats.deliveries;
        node.receive(d.from, decode(d.octets), d.time_ms, out);
        flush(node, transport, out);
    };

    double node_time = 0.0;
    bool quiesced = false;
    for (;;) {
        if (stop && stop->load()) break;
        const double now = elapsed();
        if (now >= duration_ms + linger_ms) break;
        if (!quiesced && now >= duration_ms) {
            node.quiesce();
            quiesced = true;
        }
        transport.deliver_until(now, dispatch);
        while (node_time + dt_ms <= now) {
            node.advance(node_time, dt_ms, out);
            flush(node, transport, out);
            node_time += dt_ms;
            ++stats.steps;
        }
        transport.wait_readable(1);
    }
    stats.end_ms = node_time;
    return stats;
}

}  // namespace biohybrid
