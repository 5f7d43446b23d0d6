#include "biohybrid/artificial_node.hpp"

#include "biohybrid/error.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace biohybrid {

double PhaseSchedule::total_ms() const {
    double total = 0.0;
    for (const auto& p : phases) total += p.duration_s * 1000.0;
    return total;
}

PhaseSchedule PhaseSchedule::parse(std::string_view text) {
    PhaseSchedule schedule;
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        double rate = 0.0, duration = 0.0;
        char colon = 0;
        std::istringstream fields(item);
        if (!(fields >> rate >> colon >> duration) || colon != ':') {
            throw Error(Errc::BadConfig, "bad phase '" + item + "', expected rate_hz:duration_s");
        }
        if (!(rate > 0.0) || !(duration > 0.0)) {
            throw Error(Errc::BadConfig, "phase rate and duration must be positive");
        }
        schedule.phases.push_back({rate, duration});
    }
    return schedule;
}

std::string PhaseSchedule::format() const {
    std::string out;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        if (i) out += ", ";
        out += fmt::format("{}:{}", phases[i].rate_hz, phases[i].duration_s);
    }
    return out;
}

std::vector<Millis> forced_spike_times(const PhaseSchedule& schedule) {
    std::vector<Millis> times;
    double start = 0.0;
    for (const auto& phase : schedule.phases) {
        const double period = 1000.0 / phase.rate_hz;
        const double end = start + phase.duration_s * 1000.0;
        // Small slack so that rate * duration spikes fit despite rounding.
        const auto n = static_cast<std::int64_t>(std::floor(phase.rate_hz * phase.duration_s + 1e-9));
        for (std::int64_t k = 1; k <= n; ++k) {
            times.push_back(std::llround(start + static_cast<double>(k) * period));
        }
        start = end;
    }
    return times;
}

AdaptiveNeuron::AdaptiveNeuron(AdexParams params, Rng rng)
    : params_(params), rng_(std::move(rng)), v_(params.v_rest) {
    if (params_.tau_m <= 0 || params_.tau_w <= 0 || params_.tau_syn <= 0 || params_.delta_t <= 0) {
        throw Error(Errc::BadConfig, "neuron time constants and slope factor must be positive");
    }
}

bool AdaptiveNeuron::step(double dt_ms) {
    if (!(dt_ms > 0.0 && dt_ms <= 1.0)) {
        throw Error(Errc::OutOfRange, "integration step must lie in (0, 1] ms");
    }
    while (!pending_.empty() && pending_.front().at_ms <= t_) {
        i_syn_ += pending_.front().amount;
        pending_.pop_front();
    }

    const auto& p = params_;
    bool fired = false;
    if (t_ < refractory_until_) {
        v_ = p.v_reset;
        w_ += dt_ms * (p.a * (v_ - p.v_rest) - w_) / p.tau_w;
    } else {
        const double arg = std::min((v_ - p.v_threshold) / p.delta_t, 20.0);
        const double dv = (-(v_ - p.v_rest) + p.delta_t * std::exp(arg) - w_ + p.i_background + i_syn_) /
                          p.tau_m;
        const double dw = (p.a * (v_ - p.v_rest) - w_) / p.tau_w;
        v_ += dt_ms * dv;
        if (p.noise_sigma > 0.0) {
            v_ += p.noise_sigma * std::sqrt(2.0 * dt_ms / p.tau_m) *
                  std::normal_distribution<double>(0.0, 1.0)(rng_);
        }
        w_ += dt_ms * dw;
        if (v_ >= p.v_peak) {
            fired = true;
            v_ = p.v_reset;
            w_ += p.b;
            refractory_until_ = t_ + dt_ms + p.t_refractory;
        }
    }
    i_syn_ *= std::exp(-dt_ms / p.tau_syn);
    t_ += dt_ms;
    return fired;
}

void AdaptiveNeuron::on_stimulation(std::uint8_t weight_byte, const StimulationParams& stim) {
    const double rate = weight_to_burst_rate(byte_to_weight(weight_byte), stim.burst);
    if (!(rate > 0.0) || stim.epsc_quantum == 0.0) return;
    const double period = 1000.0 / rate;
    std::vector<Quantum> burst;
    for (double offset = 0.0; offset < stim.burst.burst_duration_ms; offset += period) {
        burst.push_back({t_ + offset, stim.epsc_quantum});
    }
    // Overlapping bursts interleave; keep the queue ordered by time.
    for (const auto& q : burst) {
        auto it = std::upper_bound(pending_.begin(), pending_.end(), q.at_ms,
                                   [](double t, const Quantum& x) { return t < x.at_ms; });
        pending_.insert(it, q);
    }
}

double spontaneous_rate(const AdexParams& params, double duration_s, double dt_ms, std::uint64_t seed) {
    AdaptiveNeuron neuron(params, make_stream(seed, "calibration"));
    const auto steps = static_cast<std::int64_t>(std::llround(duration_s * 1000.0 / dt_ms));
    std::int64_t spikes = 0;
    for (std::int64_t i = 0; i < steps; ++i) spikes += neuron.step(dt_ms) ? 1 : 0;
    return static_cast<double>(spikes) / duration_s;
}

Calibration calibrate_background(AdexParams params, double target_hz, double lo, double hi, double step,
                                 double duration_s, int seeds, double tolerance) {
    auto rate_at = [&](double current) {
        params.i_background = current;
        double sum = 0.0;
        for (int s = 0; s < seeds; ++s) sum += spontaneous_rate(params, duration_s, 0.5, 1000 + s);
        return sum / seeds;
    };
    Calibration cal;
    for (double i = lo; i <= hi + 1e-9; i += step) cal.sweep.push_back({i, rate_at(i)});

    auto above = std::find_if(cal.sweep.begin(), cal.sweep.end(),
                              [&](const CalibrationPoint& p) { return p.rate_hz >= target_hz; });
    if (above == cal.sweep.end() || above == cal.sweep.begin()) {
        throw Error(Errc::BadConfig, "target rate is not bracketed by the sweep range");
    }
    double a = std::prev(above)->i_background;
    double b = above->i_background;
    cal.i_background = b;
    cal.rate_hz = above->rate_hz;
    for (int iter = 0; iter < 30 && std::abs(cal.rate_hz - target_hz) > tolerance * target_hz; ++iter) {
        const double mid = 0.5 * (a + b);
        const double r = rate_at(mid);
        cal.i_background = mid;
        cal.rate_hz = r;
        (r < target_hz ? a : b) = mid;
    }
    return cal;
}

AerPacket emit_spike_packet(std::uint32_t neuron_id, PrimaryClock& clock, Millis now) {
    AerPacket p;
    p.r1 = kPrimaryTag;
    p.neuron_id = neuron_id;
    p.r2 = 0;
    p.timestamp = clock.stamp(now);
    return p;
}

PrimaryNode::PrimaryNode(PrimaryConfig config, std::uint64_t seed)
    : config_(std::move(config)),
      anpost_(config_.anpost, make_stream(seed, "primary/anpost")),
      forced_(forced_spike_times(config_.schedule)) {}

void PrimaryNode::receive(PartnerRole from, const AerPacket& packet, double /*now_ms*/, Outbox& /*out*/) {
    if (from != PartnerRole::Synapse || packet.r1 != kSynapseTag ||
        packet.neuron_id != config_.ids.anpost) {
        ++rejected_;
        spdlog::warn("primary: ignoring packet for neuron {} (r1=0x{:02x})", packet.neuron_id, packet.r1);
        return;
    }
    if (!active_) return;
    ++stimulations_;
    anpost_.on_stimulation(packet.r2, config_.stim);
}

void PrimaryNode::advance(double now_ms, double dt_ms, Outbox& out) {
    if (!active_) return;
    const double end = now_ms + dt_ms;
    // The last step also owns the spike that lands exactly on the schedule end.
    const bool last_step = end >= config_.schedule.total_ms();
    auto due = [&](Millis t) {
        const auto at = static_cast<double>(t);
        return at < end || (last_step && at <= end);
    };
    while (next_forced_ < forced_.size() && due(forced_[next_forced_])) {
        const Millis t = forced_[next_forced_++];
        out.push_back({PartnerRole::Synapse, static_cast<double>(t),
                       emit_spike_packet(config_.ids.anpre, clock_, t)});
        spike_log_.push_back({static_cast<double>(t), config_.ids.anpre, EventKind::ForcedAp});
    }
    // The neuron keeps its own time; catch it up to the loop clock.
    while (anpost_.time_ms() + 1e-9 < end) {
        const double step = std::min(dt_ms, end - anpost_.time_ms());
        if (anpost_.step(step)) {
            const double t = anpost_.time_ms();
            // Wire time is whole milliseconds and must not run backwards.
            const Millis stamp = std::max(static_cast<Millis>(std::floor(t)), clock_.last_emitted_abs);
            out.push_back({PartnerRole::Synapse, t, emit_spike_packet(config_.ids.anpost, clock_, stamp)});
            spike_log_.push_back({static_cast<double>(stamp), config_.ids.anpost,
                                  EventKind::SpontaneousAp});
        }
    }
}

}  // namespace biohybrid
