#pragma once

#include "biohybrid/protocol.hpp"

#include <vector>

namespace biohybrid {

struct Emission {
    PartnerRole to = PartnerRole::Synapse;
    double at_ms = 0.0;  // local send time
    AerPacket packet;
};

using Outbox = std::vector<Emission>;

// Event-loop contract shared by the three partners. The same node objects run
// on the virtual-time scheduler and behind real UDP sockets.
class Node {
public:
    virtual ~Node() = default;

    virtual PartnerRole role() const = 0;

    // A packet delivered at local time now_ms.
    virtual void receive(PartnerRole from, const AerPacket& packet, double now_ms, Outbox& out) = 0;

    // Advances internal dynamics over [now_ms, now_ms + dt_ms).
    virtual void advance(double now_ms, double dt_ms, Outbox& out) = 0;

    // Stops originating new activity; pending replies still go out.
    virtual void quiesce() {}

    // True when nothing queued locally still has to be sent.
    virtual bool idle() const { return true; }
};

}  // namespace biohybrid
