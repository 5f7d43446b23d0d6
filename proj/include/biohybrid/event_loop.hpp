#pragma once

#include "biohybrid/node.hpp"
#include "biohybrid/transport.hpp"

#include <atomic>

namespace biohybrid {

struct LoopStats {
    std::size_t steps = 0;
    std::size_t deliveries = 0;
    std::size_t undecodable = 0;
    double end_ms = 0.0;
};

// Single-threaded virtual-time loop over all three partners. After
// duration_ms the nodes are quiesced and the loop keeps stepping until every
// in-flight packet and queued reply has been handled (bounded by drain_limit_ms).
LoopStats run_simulation(Node& primary, Node& hub, Node& secondary, SimTransport& transport,
                         double duration_ms, double dt_ms, double drain_limit_ms = 10'000.0);

// Wall-clock loop for one node behind a real socket. Returns when duration_ms
// plus linger_ms has elapsed or `stop` becomes true.
LoopStats run_realtime(Node& node, UdpTransport& transport, double duration_ms, double dt_ms,
                       double linger_ms, const std::atomic<bool>* stop = nullptr);

}  // namespace biohybrid
