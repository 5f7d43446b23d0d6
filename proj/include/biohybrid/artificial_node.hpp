#pragma once

#include "biohybrid/connectome.hpp"
#include "biohybrid/memristor.hpp"
#include "biohybrid/node.hpp"
#include "biohybrid/random.hpp"
#include "biohybrid/timekeeping.hpp"

#include <deque>
#include <optional>
#include <vector>

namespace biohybrid {

struct Phase {
    double rate_hz = 0.0;
    double duration_s = 0.0;
};

struct PhaseSchedule {
    std::vector<Phase> phases;

    double total_ms() const;
    // Parses "10:20, 25:20" (rate_hz:duration_s pairs). Throws Error{BadConfig}.
    static PhaseSchedule parse(std::string_view text);
    std::string format() const;
};

// Periodic spikes per phase; the first spike of a phase comes one period after
// the phase starts. Times are rounded to whole milliseconds.
std::vector<Millis> forced_spike_times(const PhaseSchedule& schedule);

// Model units are mV and ms; currents are expressed as the voltage they would
// produce across the membrane resistance.
struct AdexParams {
    double tau_m = 20.0;
    double tau_w = 100.0;
    double tau_syn = 100.0;
    double v_rest = -70.0;
    double v_threshold = -50.0;
    double v_reset = -58.0;
    double v_peak = 0.0;
    double delta_t = 2.0;
    double a = 0.0;
    double b = 5.0;
    double t_refractory = 5.0;
    double i_background = 17.906;
    double noise_sigma = 1.0;
};

struct StimulationParams {
    BurstParams burst;
    double epsc_quantum = 4.0;
};

class AdaptiveNeuron {
public:
    AdaptiveNeuron(AdexParams params, Rng rng);

    // Euler step of dt_ms (<= 1 ms). Returns true when the neuron fired.
    bool step(double dt_ms);

    // Converts a weight byte into a burst of EPSC quanta starting at the
    // neuron's current time.
    void on_stimulation(std::uint8_t weight_byte, const StimulationParams& stim);

    double time_ms() const { return t_; }
    double v() const { return v_; }
    double w_adapt() const { return w_; }
    double i_syn() const { return i_syn_; }
    void set_i_syn(double value) { i_syn_ = value; }
    const AdexParams& params() const { return params_; }
    std::size_t pending_quanta() const { return pending_.size(); }

private:
    struct Quantum {
        double at_ms;
        double amount;
    };

    AdexParams params_;
    Rng rng_;
    double t_ = 0.0;
    double v_;
    double w_ = 0.0;
    double i_syn_ = 0.0;
    double refractory_until_ = -1.0;
    std::deque<Quantum> pending_;
};

// Stamps a primary spike with the interval since the previous emission.
AerPacket emit_spike_packet(std::uint32_t neuron_id, PrimaryClock& clock, Millis now);

// Mean firing rate of an unstimulated neuron over duration_s.
double spontaneous_rate(const AdexParams& params, double duration_s, double dt_ms, std::uint64_t seed);

struct CalibrationPoint {
    double i_background = 0.0;
    double rate_hz = 0.0;
};

struct Calibration {
    double i_background = 0.0;
    double rate_hz = 0.0;
    std::vector<CalibrationPoint> sweep;
};

// Sweeps i_background over [lo, hi] in `step` increments, then bisects inside
// the bracketing interval until the rate is within tolerance of the target.
// Rates are averaged over `seeds` independent noise streams.
Calibration calibrate_background(AdexParams params, double target_hz, double lo, double hi, double step,
                                 double duration_s = 200.0, int seeds = 3, double tolerance = 0.01);

struct SpikeLogRow {
    double time_ms = 0.0;
    std::uint32_t neuron_id = 0;
    EventKind kind = EventKind::Unused;
};

struct PrimaryConfig {
    PhaseSchedule schedule;
    NeuronIds ids;
    AdexParams anpost;
    StimulationParams stim;
};

// Hosts ANPRE (forced schedule) and ANPOST (spontaneously active AdEx neuron).
class PrimaryNode final : public Node {
public:
    PrimaryNode(PrimaryConfig config, std::uint64_t seed);

    PartnerRole role() const override { return PartnerRole::Primary; }
    void receive(PartnerRole from, const AerPacket& packet, double now_ms, Outbox& out) override;
    void advance(double now_ms, double dt_ms, Outbox& out) override;
    void quiesce() override { active_ = false; }

    const std::vector<SpikeLogRow>& spike_log() const { return spike_log_; }
    const AdaptiveNeuron& anpost() const { return anpost_; }
    std::size_t stimulations() const { return stimulations_; }
    std::size_t rejected() const { return rejected_; }

private:
    PrimaryConfig config_;
    AdaptiveNeuron anpost_;
    PrimaryClock clock_;
    std::vector<Millis> forced_;
    std::size_t next_forced_ = 0;
    bool active_ = true;
    std::size_t stimulations_ = 0;
    std::size_t rejected_ = 0;
    std::vector<SpikeLogRow> spike_log_;
};

}  // namespace biohybrid
