#pragma once

#include "biohybrid/plasticity.hpp"
#include "biohybrid/random.hpp"

#include <cstdint>
#include <optional>

namespace biohybrid {

enum class PulseDirection { Potentiate, Depress };

std::optional<PulseDirection> pulse_for(PlasticityDecision decision);

struct MemristorParams {
    double alpha_p = 0.05;
    double alpha_d = 0.05;
    double noise_sigma = 0.1;
};

// Behavioural non-volatile device. The weight is a normalized conductance in
// [0, 1] and only changes through apply_pulse(); step size shrinks towards the
// rails (soft bounds).
class MemristorDevice {
public:
    MemristorDevice(double initial_weight, MemristorParams params, Rng rng);

    double weight() const { return weight_; }
    const MemristorParams& params() const { return params_; }

    double apply_pulse(PulseDirection direction);

private:
    double weight_;
    MemristorParams params_;
    Rng rng_;
};

// Capacitive stimulation strength: 2, 4, ..., 16 pulse repetitions.
int weight_to_pulse_count(double w);

struct BurstParams {
    double f_min_hz = 10.0;
    double f_max_hz = 200.0;
    double burst_duration_ms = 50.0;
};

double weight_to_burst_rate(double w, const BurstParams& params);

std::uint8_t weight_to_byte(double w);
double byte_to_weight(std::uint8_t b);

}  // namespace biohybrid
