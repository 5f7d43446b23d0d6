#include "biohybrid/protocol.hpp"

#include "biohybrid/error.hpp"

#include <string>

namespace biohybrid {

std::uint8_t role_tag(PartnerRole role) {
    switch (role) {
    case PartnerRole::Primary: return kPrimaryTag;
    case PartnerRole::Synapse: return kSynapseTag;
    case PartnerRole::Secondary: return kSecondaryTag;
    }
    return 0;
}

std::optional<PartnerRole> role_from_tag(std::uint8_t tag) {
    switch (tag) {
    case kPrimaryTag: return PartnerRole::Primary;
    case kSynapseTag: return PartnerRole::Synapse;
    case kSecondaryTag: return PartnerRole::Secondary;
    default: return std::nullopt;
    }
}

std::string_view to_string(PartnerRole role) {
    switch (role) {
    case PartnerRole::Primary: return "primary";
    case PartnerRole::Synapse: return "synapse";
    case PartnerRole::Secondary: return "secondary";
    }
    return "?";
}

std::optional<PartnerRole> parse_role(std::string_view name) {
    if (name == "primary") return PartnerRole::Primary;
    if (name == "synapse") return PartnerRole::Synapse;
    if (name == "secondary") return PartnerRole::Secondary;
    return std::nullopt;
}

Octets encode(const AerPacket& packet) {
    const std::uint32_t id = packet.neuron_id & kField24Mask;
    const std::uint32_t ts = packet.timestamp & kField24Mask;
    return Octets{
        packet.r1,
        static_cast<std::uint8_t>(id >> 16),
        static_cast<std::uint8_t>(id >> 8),
        static_cast<std::uint8_t>(id),
        packet.r2,
        static_cast<std::uint8_t>(ts >> 16),
        static_cast<std::uint8_t>(ts >> 8),
        static_cast<std::uint8_t>(ts),
    };
}

std::optional<AerPacket> try_decode(std::span<const std::uint8_t> octets) {
    if (octets.size() != kPacketSize) return std::nullopt;
    AerPacket p;
    p.r1 = octets[0];
    p.neuron_id = (std::uint32_t{octets[1]} << 16) | (std::uint32_t{octets[2]} << 8) | octets[3];
    p.r2 = octets[4];
    p.timestamp = (std::uint32_t{octets[5]} << 16) | (std::uint32_t{octets[6]} << 8) | octets[7];
    return p;
}

AerPacket decode(std::span<const std::uint8_t> octets) {
    auto p = try_decode(octets);
    if (!p) {
        throw Error(Errc::WrongLength,
                    "expected 8 octets, got " + std::to_string(octets.size()));
    }
    return *p;
}

std::uint8_t secondary_kind_code(EventKind kind) {
    switch (kind) {
    case EventKind::Psp: return kPspCode;
    case EventKind::ForcedAp: return kForcedApCode;
    case EventKind::SpontaneousAp: return kSpontaneousApCode;
    default: throw Error(Errc::OutOfRange, "event kind has no secondary code");
    }
}

std::optional<EventKind> decode_event_kind(PartnerRole sender, std::uint8_t r2) {
    switch (sender) {
    case PartnerRole::Secondary:
        switch (r2) {
        case kPspCode: return EventKind::Psp;
        case kForcedApCode: return EventKind::ForcedAp;
        case kSpontaneousApCode: return EventKind::SpontaneousAp;
        default: return std::nullopt;
        }
    case PartnerRole::Synapse: return EventKind::WeightByte;
    case PartnerRole::Primary:
        if (r2 == 0) return EventKind::Unused;
        return std::nullopt;
    }
    return std::nullopt;
}

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::Psp: return "psp";
    case EventKind::ForcedAp: return "forced_ap";
    case EventKind::SpontaneousAp: return "spontaneous_ap";
    case EventKind::WeightByte: return "weight";
    case EventKind::Unused: return "spike";
    }
    return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
    for (auto k : {EventKind::Psp, EventKind::ForcedAp, EventKind::SpontaneousAp,
                   EventKind::WeightByte, EventKind::Unused}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

}  // namespace biohybrid
