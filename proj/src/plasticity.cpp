#include "biohybrid/plasticity.hpp"

#include "biohybrid/error.hpp"

#include <algorithm>

namespace biohybrid {

std::string_view to_string(PlasticityDecision decision) {
    switch (decision) {
    case PlasticityDecision::LTP: return "LTP";
    case PlasticityDecision::LTD: return "LTD";
    case PlasticityDecision::NoChange: return "NoChange";
    }
    return "?";
}

std::optional<PlasticityDecision> parse_decision(std::string_view name) {
    if (name == "LTP") return PlasticityDecision::LTP;
    if (name == "LTD") return PlasticityDecision::LTD;
    if (name == "NoChange") return PlasticityDecision::NoChange;
    return std::nullopt;
}

SpikeHistory::SpikeHistory(Millis window_ms) : window_ms_(window_ms) {
    if (window_ms_ <= 0) throw Error(Errc::BadConfig, "rate window must be positive");
}

bool SpikeHistory::record(Millis t) {
    if (times_.empty() || t > times_.back()) {
        times_.push_back(t);
    } else {
        auto it = std::lower_bound(times_.begin(), times_.end(), t);
        if (it != times_.end() && *it == t) return false;
        times_.insert(it, t);
    }
    prune();
    return true;
}

void SpikeHistory::prune() {
    const Millis cutoff = times_.back() - window_ms_;
    while (!times_.empty() && times_.front() <= cutoff) times_.pop_front();
}

std::size_t SpikeHistory::count_in_window(Millis now) const {
    auto lo = std::upper_bound(times_.begin(), times_.end(), now - window_ms_);
    auto hi = std::upper_bound(times_.begin(), times_.end(), now);
    return hi > lo ? static_cast<std::size_t>(hi - lo) : 0;
}

double estimate_rate(const SpikeHistory& history, Millis now) {
    return static_cast<double>(history.count_in_window(now)) * 1000.0 /
           static_cast<double>(history.window_ms());
}

PlasticityDecision bcm_decide(double rate_hz, const BcmThresholds& thresholds) {
    if (rate_hz < thresholds.low_hz) return PlasticityDecision::LTD;
    if (rate_hz > thresholds.high_hz) return PlasticityDecision::LTP;
    return PlasticityDecision::NoChange;
}

PlasticityDecision evaluate_forward(const SpikeHistory& pre_history, Millis now,
                                    const BcmThresholds& thresholds) {
    return bcm_decide(estimate_rate(pre_history, now), thresholds);
}

PlasticityDecision evaluate_reverse(const SpikeHistory& pre_history, Millis post_spike_time,
                                    const BcmThresholds& thresholds) {
    return bcm_decide(estimate_rate(pre_history, post_spike_time), thresholds);
}

}  // namespace biohybrid
