#include "biohybrid/memristor.hpp"

#include "biohybrid/error.hpp"

#include <algorithm>
#include <cmath>

namespace biohybrid {

std::optional<PulseDirection> pulse_for(PlasticityDecision decision) {
    switch (decision) {
    case PlasticityDecision::LTP: return PulseDirection::Potentiate;
    case PlasticityDecision::LTD: return PulseDirection::Depress;
    case PlasticityDecision::NoChange: return std::nullopt;
    }
    return std::nullopt;
}

MemristorDevice::MemristorDevice(double initial_weight, MemristorParams params, Rng rng)
    : weight_(initial_weight), params_(params), rng_(std::move(rng)) {
    if (!(initial_weight >= 0.0 && initial_weight <= 1.0)) {
        throw Error(Errc::OutOfRange, "initial weight must lie in [0, 1]");
    }
    if (params_.alpha_p < 0.0 || params_.alpha_d < 0.0 || params_.noise_sigma < 0.0) {
        throw Error(Errc::BadConfig, "memristor gains and noise must be non-negative");
    }
}

double MemristorDevice::apply_pulse(PulseDirection direction) {
    double xi = 0.0;
    if (params_.noise_sigma > 0.0) {
        xi = std::normal_distribution<double>(0.0, params_.noise_sigma)(rng_);
    }
    double next = weight_;
    if (direction == PulseDirection::Potentiate) {
        next = weight_ + params_.alpha_p * (1.0 - weight_) * (1.0 + xi);
    } else {
        next = weight_ - params_.alpha_d * weight_ * (1.0 + xi);
    }
    weight_ = std::clamp(next, 0.0, 1.0);
    return weight_;
}

int weight_to_pulse_count(double w) {
    const int level = std::clamp(static_cast<int>(std::floor(w * 8.0)), 0, 7);
    return 2 * (level + 1);
}

double weight_to_burst_rate(double w, const BurstParams& params) {
    return params.f_min_hz + w * (params.f_max_hz - params.f_min_hz);
}

std::uint8_t weight_to_byte(double w) {
    const double scaled = std::floor(std::clamp(w, 0.0, 1.0) * 255.0 + 0.5);
    return static_cast<std::uint8_t>(scaled);
}

double byte_to_weight(std::uint8_t b) { return static_cast<double>(b) / 255.0; }

}  // namespace biohybrid
