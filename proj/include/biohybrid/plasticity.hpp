#pragma once

#include "biohybrid/timekeeping.hpp"

#include <deque>
#include <optional>
#include <string_view>

namespace biohybrid {

enum class PlasticityDecision { LTP, LTD, NoChange };

std::string_view to_string(PlasticityDecision decision);
std::optional<PlasticityDecision> parse_decision(std::string_view name);

struct BcmThresholds {
    double low_hz = 5.0;
    double high_hz = 20.0;
};

// Spike times of one neuron, pruned to the rate window of the newest entry.
class SpikeHistory {
public:
    explicit SpikeHistory(Millis window_ms = 1000);

    // Inserts a spike. Late (out-of-order) arrivals are placed in order; a time
    // already present is rejected and false is returned.
    bool record(Millis t);

    // Spikes in (now - window, now].
    std::size_t count_in_window(Millis now) const;

    Millis window_ms() const { return window_ms_; }
    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }
    const std::deque<Millis>& times() const { return times_; }

private:
    void prune();

    Millis window_ms_;
    std::deque<Millis> times_;
};

double estimate_rate(const SpikeHistory& history, Millis now);

// rate < low -> LTD, low <= rate <= high -> NoChange, rate > high -> LTP.
PlasticityDecision bcm_decide(double rate_hz, const BcmThresholds& thresholds);

// Forward pathway: triggered by each presynaptic spike, gated by nothing else.
PlasticityDecision evaluate_forward(const SpikeHistory& pre_history, Millis now,
                                    const BcmThresholds& thresholds);

// Reverse pathway: triggered by a postsynaptic spike, direction set by the
// presynaptic rate leading up to it.
PlasticityDecision evaluate_reverse(const SpikeHistory& pre_history, Millis post_spike_time,
                                    const BcmThresholds& thresholds);

}  // namespace biohybrid
