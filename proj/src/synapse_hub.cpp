#include "biohybrid/synapse_hub.hpp"

#include "biohybrid/error.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <ostream>

namespace biohybrid {

std::string_view to_string(PacketStatus status) {
    switch (status) {
    case PacketStatus::Accepted: return "accepted";
    case PacketStatus::UnknownNeuron: return "unknown_neuron";
    case PacketStatus::MalformedEventKind: return "malformed_event_kind";
    case PacketStatus::UnknownSource: return "unknown_source";
    }
    return "?";
}

SynapseHub::SynapseHub(ConnectivityMatrix matrix, HubConfig config, std::uint64_t seed)
    : matrix_(std::move(matrix)), config_(std::move(config)) {
    if (!(config_.bcm.low_hz > 0.0 && config_.bcm.low_hz <= config_.bcm.high_hz)) {
        throw Error(Errc::BadConfig, "BCM thresholds must satisfy 0 < low <= high");
    }
    for (const auto& e : matrix_.entries()) {
        auto it = config_.initial_weights.find(e.synapse_id);
        const double w0 = it != config_.initial_weights.end() ? it->second
                                                              : config_.default_initial_weight;
        devices_.emplace(e.synapse_id,
                         MemristorDevice(w0, config_.memristor,
                                         make_stream(seed, "memristor/" + e.synapse_id)));
    }
}

const MemristorDevice& SynapseHub::device(const std::string& synapse_id) const {
    auto it = devices_.find(synapse_id);
    if (it == devices_.end()) throw Error(Errc::OutOfRange, "no synapse " + synapse_id);
    return it->second;
}

const SpikeHistory* SynapseHub::history(std::uint32_t neuron_id) const {
    auto it = histories_.find(neuron_id);
    return it == histories_.end() ? nullptr : &it->second;
}

SpikeHistory& SynapseHub::history_for(std::uint32_t neuron_id) {
    auto it = histories_.find(neuron_id);
    if (it == histories_.end()) {
        it = histories_.emplace(neuron_id, SpikeHistory(config_.window_ms)).first;
    }
    return it->second;
}

void SynapseHub::program(const SynapseEntry& entry, PlasticityDecision decision, Millis abs_time) {
    auto& dev = devices_.at(entry.synapse_id);
    if (auto dir = pulse_for(decision)) dev.apply_pulse(*dir);
    log_.emplace_back(PlasticityRecord{abs_time, entry.synapse_id, decision, dev.weight()});
    ++evaluations_;
}

HubResult SynapseHub::on_packet(const AerPacket& packet, PartnerRole source) {
    HubResult result;
    if (source == PartnerRole::Synapse) {
        result.status = PacketStatus::UnknownSource;
        spdlog::warn("hub: dropping packet tagged as coming from a synapse partner");
        return result;
    }

    const auto kind = decode_event_kind(source, packet.r2);
    Millis abs_time = 0;
    if (source == PartnerRole::Primary) {
        // The relative-time chain must advance even when the payload is bad.
        abs_time = primary_to_absolute(clock_, packet.timestamp);
    } else if (kind) {
        abs_time = secondary_to_absolute(clock_, packet.timestamp);
    }
    if (!kind) {
        ++dropped_malformed_;
        result.status = PacketStatus::MalformedEventKind;
        spdlog::warn("hub: malformed event kind 0x{:02x} from {} neuron {}", packet.r2,
                     to_string(source), packet.neuron_id);
        return result;
    }
    if (!matrix_.knows_neuron(packet.neuron_id)) {
        ++dropped_unknown_neuron_;
        result.status = PacketStatus::UnknownNeuron;
        spdlog::warn("hub: neuron {} from {} is not in the connectome", packet.neuron_id,
                     to_string(source));
        return result;
    }

    ++accepted_;
    log_.emplace_back(NetworkEvent{abs_time, packet.neuron_id, source, *kind});
    if (*kind == EventKind::Psp) return result;

    const std::uint32_t fired = packet.neuron_id;
    history_for(fired).record(abs_time);

    const auto targets = matrix_.outgoing(fired);
    for (const auto* e : targets) {
        if (e->pathway == Pathway::Forward) {
            program(*e, evaluate_forward(history_for(fired), abs_time, config_.bcm), abs_time);
        }
    }
    for (const auto* e : matrix_.incoming(fired)) {
        if (e->pathway == Pathway::Reverse) {
            program(*e, evaluate_reverse(history_for(e->pre_neuron_id), abs_time, config_.bcm),
                    abs_time);
        }
    }

    // Stimulation carries the weight after this packet's programming pulses.
    for (const auto* e : targets) {
        AerPacket out;
        out.r1 = kSynapseTag;
        out.neuron_id = e->post_neuron_id;
        out.r2 = weight_to_byte(devices_.at(e->synapse_id).weight());
        out.timestamp = to_ts24(abs_time);
        result.outbound.push_back({e->post_partner, out});
    }
    return result;
}

void export_log(const SynapseHub& hub, std::ostream& events, std::ostream& plasticity) {
    std::vector<const NetworkEvent*> ev;
    std::vector<const PlasticityRecord*> pl;
    for (const auto& entry : hub.log()) {
        if (const auto* e = std::get_if<NetworkEvent>(&entry)) ev.push_back(e);
        if (const auto* p = std::get_if<PlasticityRecord>(&entry)) pl.push_back(p);
    }
    std::stable_sort(ev.begin(), ev.end(),
                     [](const auto* a, const auto* b) { return a->abs_time < b->abs_time; });
    std::stable_sort(pl.begin(), pl.end(),
                     [](const auto* a, const auto* b) { return a->abs_time < b->abs_time; });

    events << "abs_time_ms,neuron_id,source,kind\n";
    for (const auto* e : ev) {
        fmt::print(events, "{},{},{},{}\n", e->abs_time, e->neuron_id, to_string(e->source),
                   to_string(e->kind));
    }
    plasticity << "abs_time_ms,synapse_id,decision,weight_after\n";
    for (const auto* p : pl) {
        fmt::print(plasticity, "{},{},{},{:.9f}\n", p->abs_time, p->synapse_id,
                   to_string(p->decision), p->weight_after);
    }
}

void export_log(const SynapseHub& hub, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream events(dir / "events.csv");
    std::ofstream plasticity(dir / "plasticity.csv");
    if (!events || !plasticity) {
        throw Error(Errc::OutputIoError, "cannot write hub logs under " + dir.string());
    }
    export_log(hub, events, plasticity);
    events.flush();
    plasticity.flush();
    if (!events || !plasticity) {
        throw Error(Errc::OutputIoError, "failed writing hub logs under " + dir.string());
    }
}


void HubNode::receive(PartnerRole from, const AerPacket& packet, double now_ms, Outbox& out) {
    hub_.advance_axis(static_cast<Millis>(now_ms));
    for (auto& o : hub_.on_packet(packet, from).outbound) {
        out.push_back({o.destination, now_ms, o.packet});
    }
}

void HubNode::advance(double now_ms, double /*dt_ms*/, Outbox& /*out*/) {
    hub_.advance_axis(static_cast<Millis>(now_ms));
}

}  // namespace biohybrid
