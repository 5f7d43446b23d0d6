#pragma once

#include "biohybrid/connectome.hpp"
#include "biohybrid/memristor.hpp"
#include "biohybrid/plasticity.hpp"
#include "biohybrid/protocol.hpp"
#include "biohybrid/timekeeping.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace biohybrid {

struct NetworkEvent {
    Millis abs_time = 0;
    std::uint32_t neuron_id = 0;
    PartnerRole source = PartnerRole::Primary;
    EventKind kind = EventKind::Unused;
};

struct PlasticityRecord {
    Millis abs_time = 0;
    std::string synapse_id;
    PlasticityDecision decision = PlasticityDecision::NoChange;
    double weight_after = 0.0;
};

using LogEntry = std::variant<NetworkEvent, PlasticityRecord>;

struct HubConfig {
    BcmThresholds bcm;
    Millis window_ms = 1000;
    MemristorParams memristor;
    std::map<std::string, double> initial_weights;  // by synapse id
    double default_initial_weight = 0.5;
};

struct Outbound {
    PartnerRole destination = PartnerRole::Secondary;
    AerPacket packet;
};

enum class PacketStatus { Accepted, UnknownNeuron, MalformedEventKind, UnknownSource };

std::string_view to_string(PacketStatus status);

struct HubResult {
    PacketStatus status = PacketStatus::Accepted;
    std::vector<Outbound> outbound;
};

// The memristive-synapse node. Single-threaded: every inbound packet goes
// through on_packet() in arrival order, which is also the order in which the
// devices are programmed and the log is appended.
class SynapseHub {
public:
    SynapseHub(ConnectivityMatrix matrix, HubConfig config, std::uint64_t seed);

    HubResult on_packet(const AerPacket& packet, PartnerRole source);

    // Local clock in real-UDP mode, virtual clock in simulation.
    void advance_axis(Millis now) { clock_.advance_axis(now); }

    const ConnectivityMatrix& matrix() const { return matrix_; }
    const HubClock& clock() const { return clock_; }
    const std::vector<LogEntry>& log() const { return log_; }
    const MemristorDevice& device(const std::string& synapse_id) const;
    const std::map<std::string, MemristorDevice>& devices() const { return devices_; }
    const SpikeHistory* history(std::uint32_t neuron_id) const;

    std::size_t accepted() const { return accepted_; }
    std::size_t evaluations() const { return evaluations_; }
    std::size_t dropped_unknown_neuron() const { return dropped_unknown_neuron_; }
    std::size_t dropped_malformed() const { return dropped_malformed_; }

private:
    SpikeHistory& history_for(std::uint32_t neuron_id);
    void program(const SynapseEntry& entry, PlasticityDecision decision, Millis abs_time);

    ConnectivityMatrix matrix_;
    HubConfig config_;
    HubClock clock_;
    std::map<std::string, MemristorDevice> devices_;
    std::map<std::uint32_t, SpikeHistory> histories_;
    std::vector<LogEntry> log_;
    std::size_t accepted_ = 0;
    std::size_t evaluations_ = 0;
    std::size_t dropped_unknown_neuron_ = 0;
    std::size_t dropped_malformed_ = 0;
};

// events: abs_time_ms,neuron_id,source,kind
// plasticity: abs_time_ms,synapse_id,decision,weight_after
// Rows are stably sorted by abs_time_ms; secondary reports can reach the hub
// after later primary events.
void export_log(const SynapseHub& hub, std::ostream& events, std::ostream& plasticity);
void export_log(const SynapseHub& hub, const std::filesystem::path& dir);

}  // namespace biohybrid

#include "biohybrid/node.hpp"

namespace biohybrid {

// Event-loop wrapper around SynapseHub. Outbound stimulation leaves at the
// time the triggering packet was handled.
class HubNode final : public Node {
public:
    explicit HubNode(SynapseHub hub) : hub_(std::move(hub)) {}

    PartnerRole role() const override { return PartnerRole::Synapse; }
    void receive(PartnerRole from, const AerPacket& packet, double now_ms, Outbox& out) override;
    void advance(double now_ms, double dt_ms, Outbox& out) override;

    SynapseHub& hub() { return hub_; }
    const SynapseHub& hub() const { return hub_; }

private:
    SynapseHub hub_;
};

}  // namespace biohybrid
