#pragma once

#include "biohybrid/artificial_node.hpp"
#include "biohybrid/node.hpp"
#include "biohybrid/random.hpp"
#include "biohybrid/timekeeping.hpp"

#include <deque>
#include <optional>
#include <vector>

namespace biohybrid {

struct BioParams {
    int ap_threshold_pulses = 16;
    double psp_amp_max = 10.0;
    double ap_amplitude = 100.0;
    double jitter = 0.05;
    double spont_rate_hz = 0.0;
    double refractory_ms = 250.0;
    bool summation_mode = false;
    double summation_tau_ms = 50.0;
    double response_latency_ms = 5.0;
};

struct StimulusResponse {
    EventKind kind = EventKind::Psp;
    double amplitude = 0.0;
    double effective_pulses = 0.0;
};

// Behavioural stand-in for a cultured neuron under capacitive stimulation:
// the response is graded in pulse repetitions, with an action potential once
// the effective count reaches threshold.
class BioNeuron {
public:
    BioNeuron(BioParams params, Rng rng);

    // pulse_count in {2, ..., 16}; throws Error{OutOfRange} otherwise.
    // `at_ms` is the referenced time of the response, used for refractoriness
    // and, in summation mode, for the leaky accumulator.
    StimulusResponse stimulate(int pulse_count, Millis at_ms);

    bool refractory_at(Millis t) const;
    void record_ap(Millis t) { last_ap_ = t; }
    const BioParams& params() const { return params_; }

private:
    BioParams params_;
    Rng rng_;
    std::optional<Millis> last_ap_;
    double accumulator_ = 0.0;
    std::optional<Millis> last_stimulus_;
};

struct StimulusLogRow {
    double local_ms = 0.0;  // arrival at the secondary
    Millis reference_ms = 0;  // t0 carried by the hub, unwrapped
    int pulse_count = 0;
    EventKind kind = EventKind::Psp;
    double amplitude = 0.0;
};

struct SecondaryConfig {
    std::uint32_t bn_id = 3;
    BioParams bio;
};

class SecondaryNode final : public Node {
public:
    SecondaryNode(SecondaryConfig config, std::uint64_t seed);

    PartnerRole role() const override { return PartnerRole::Secondary; }
    void receive(PartnerRole from, const AerPacket& packet, double now_ms, Outbox& out) override;
    void advance(double now_ms, double dt_ms, Outbox& out) override;
    void quiesce() override { active_ = false; }
    bool idle() const override { return pending_.empty(); }

    const SecondaryClock& clock() const { return clock_; }
    const std::vector<SpikeLogRow>& spike_log() const { return spike_log_; }
    const std::vector<StimulusLogRow>& stimulus_log() const { return stimulus_log_; }
    std::size_t rejected() const { return rejected_; }

private:
    Millis referenced(double local_ms) const;
    void queue(EventKind kind, double at_local_ms);

    SecondaryConfig config_;
    BioNeuron neuron_;
    Rng spont_rng_;
    SecondaryClock clock_;
    Millis reference_abs_ = 0;
    std::deque<Emission> pending_;
    std::optional<double> next_spontaneous_;
    bool active_ = true;
    std::size_t rejected_ = 0;
    std::vector<SpikeLogRow> spike_log_;
    std::vector<StimulusLogRow> stimulus_log_;
};

}  // namespace biohybrid
