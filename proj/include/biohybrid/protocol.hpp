#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace biohybrid {

inline constexpr std::size_t kPacketSize = 8;
inline constexpr std::uint32_t kField24Mask = 0xFFFFFFu;
inline constexpr std::uint32_t kTimestampModulus = 1u << 24;

using Octets = std::array<std::uint8_t, kPacketSize>;

enum class PartnerRole : std::uint8_t { Primary, Synapse, Secondary };

inline constexpr std::uint8_t kPrimaryTag = 0x01;
inline constexpr std::uint8_t kSynapseTag = 0x02;
inline constexpr std::uint8_t kSecondaryTag = 0x03;

std::uint8_t role_tag(PartnerRole role);
std::optional<PartnerRole> role_from_tag(std::uint8_t tag);
std::string_view to_string(PartnerRole role);
std::optional<PartnerRole> parse_role(std::string_view name);

// One address event on the wire. The 24-bit fields are stored widened; encode()
// masks them, so callers are expected to respect the declared widths.
struct AerPacket {
    std::uint8_t r1 = 0;
    std::uint32_t neuron_id = 0;  // 24 bits
    std::uint8_t r2 = 0;
    std::uint32_t timestamp = 0;  // 24 bits, milliseconds

    bool fields_valid() const { return neuron_id <= kField24Mask && timestamp <= kField24Mask; }
    friend bool operator==(const AerPacket&, const AerPacket&) = default;
};

// Big-endian R1(8) | NeuronID(24) | R2(8) | Timestamp(24).
Octets encode(const AerPacket& packet);

// Throws Error{WrongLength} unless exactly 8 octets are given. Any 8-octet
// pattern decodes; whether R2 is meaningful is up to the receiver.
AerPacket decode(std::span<const std::uint8_t> octets);
std::optional<AerPacket> try_decode(std::span<const std::uint8_t> octets);

// Payload semantics of R2 by sender role.
enum class EventKind : std::uint8_t { Psp, ForcedAp, SpontaneousAp, WeightByte, Unused };

inline constexpr std::uint8_t kPspCode = 0x00;
inline constexpr std::uint8_t kForcedApCode = 0x01;
inline constexpr std::uint8_t kSpontaneousApCode = 0x02;

std::uint8_t secondary_kind_code(EventKind kind);

// Interprets R2 for a packet sent by `sender`. Returns nullopt when the value is
// not legal for that role (unknown secondary code, non-zero primary R2).
std::optional<EventKind> decode_event_kind(PartnerRole sender, std::uint8_t r2);

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

inline bool is_action_potential(EventKind kind) {
    return kind == EventKind::ForcedAp || kind == EventKind::SpontaneousAp;
}

}  // namespace biohybrid
