#include "biohybrid/bio_node.hpp"

#include "biohybrid/error.hpp"
#include "biohybrid/memristor.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

namespace biohybrid {

BioNeuron::BioNeuron(BioParams params, Rng rng) : params_(params), rng_(std::move(rng)) {
    if (params_.ap_threshold_pulses < 2 || params_.ap_threshold_pulses > 16) {
        throw Error(Errc::BadConfig, "AP threshold must lie in 2..16 pulses");
    }
    if (params_.jitter < 0.0 || params_.spont_rate_hz < 0.0 || params_.refractory_ms < 0.0) {
        throw Error(Errc::BadConfig, "jitter, spontaneous rate and refractory period must be >= 0");
    }
}

bool BioNeuron::refractory_at(Millis t) const {
    return last_ap_ && static_cast<double>(t - *last_ap_) < params_.refractory_ms;
}

StimulusResponse BioNeuron::stimulate(int pulse_count, Millis at_ms) {
    if (pulse_count < 2 || pulse_count > 16) {
        throw Error(Errc::OutOfRange, "pulse count " + std::to_string(pulse_count) + " outside 2..16");
    }
    double xi = 0.0;
    if (params_.jitter > 0.0) xi = std::normal_distribution<double>(0.0, params_.jitter)(rng_);
    double effective = std::max(0.0, std::round(pulse_count * (1.0 + xi)));

    if (params_.summation_mode) {
        if (last_stimulus_) {
            const double gap = static_cast<double>(at_ms - *last_stimulus_);
            accumulator_ *= std::exp(-std::max(0.0, gap) / params_.summation_tau_ms);
        }
        accumulator_ += effective;
        last_stimulus_ = at_ms;
        effective = accumulator_;
    }

    StimulusResponse r;
    r.effective_pulses = effective;
    if (effective >= params_.ap_threshold_pulses && !refractory_at(at_ms)) {
        r.kind = EventKind::ForcedAp;
        r.amplitude = params_.ap_amplitude;
        last_ap_ = at_ms;
        accumulator_ = 0.0;
    } else {
        r.kind = EventKind::Psp;
        r.amplitude = params_.psp_amp_max * std::min(effective, 16.0) / 16.0;
    }
    return r;
}

SecondaryNode::SecondaryNode(SecondaryConfig config, std::uint64_t seed)
    : config_(config),
      neuron_(config_.bio, make_stream(seed, "secondary/bn")),
      spont_rng_(make_stream(seed, "secondary/spontaneous")) {}

Millis SecondaryNode::referenced(double local_ms) const {
    return reference_abs_ + std::llround(clock_.wall_elapsed(local_ms));
}

void SecondaryNode::queue(EventKind kind, double at_local_ms) {
    AerPacket p;
    p.r1 = kSecondaryTag;
    p.neuron_id = config_.bn_id;
    p.r2 = secondary_kind_code(kind);
    p.timestamp = secondary_report_time(clock_, at_local_ms);
    auto it = std::upper_bound(pending_.begin(), pending_.end(), at_local_ms,
                               [](double t, const Emission& e) { return t < e.at_ms; });
    pending_.insert(it, Emission{PartnerRole::Synapse, at_local_ms, p});
    spike_log_.push_back({static_cast<double>(referenced(at_local_ms)), config_.bn_id, kind});
}

void SecondaryNode::receive(PartnerRole from, const AerPacket& packet, double now_ms, Outbox& /*out*/) {
    if (from != PartnerRole::Synapse || packet.r1 != kSynapseTag || packet.neuron_id != config_.bn_id) {
        ++rejected_;
        spdlog::warn("secondary: neuron {} is not hosted here (r1=0x{:02x})", packet.neuron_id, packet.r1);
        return;
    }
    reference_abs_ = unwrap_near(packet.timestamp, reference_abs_);
    clock_.reset(packet.timestamp, now_ms);

    const double respond_at = now_ms + config_.bio.response_latency_ms;
    const int pulses = weight_to_pulse_count(byte_to_weight(packet.r2));
    const auto response = neuron_.stimulate(pulses, referenced(respond_at));
    stimulus_log_.push_back({now_ms, reference_abs_, pulses, response.kind, response.amplitude});
    queue(response.kind, respond_at);
}

void SecondaryNode::advance(double now_ms, double dt_ms, Outbox& out) {
    const double end = now_ms + dt_ms;
    if (active_ && config_.bio.spont_rate_hz > 0.0) {
        std::exponential_distribution<double> isi(config_.bio.spont_rate_hz / 1000.0);
        if (!next_spontaneous_) next_spontaneous_ = now_ms + isi(spont_rng_);
        while (*next_spontaneous_ < end) {
            const double t = *next_spontaneous_;
            const Millis ref = referenced(t);
            if (!neuron_.refractory_at(ref)) {
                neuron_.record_ap(ref);
                queue(EventKind::SpontaneousAp, t);
            }
            next_spontaneous_ = t + isi(spont_rng_);
        }
    }
    while (!pending_.empty() && pending_.front().at_ms < end) {
        out.push_back(pending_.front());
        pending_.pop_front();
    }
}

}  // namespace biohybrid
