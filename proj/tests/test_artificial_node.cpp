#include "biohybrid/artificial_node.hpp"
#include "biohybrid/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace biohybrid;

namespace {

AdexParams silent_params() {
    AdexParams p;
    p.i_background = 0.0;
    p.noise_sigma = 0.0;
    return p;
}

std::vector<double> spike_times(AdaptiveNeuron& n, double duration_ms, double dt = 0.5,
                                std::optional<double> pin_i_syn = std::nullopt) {
    std::vector<double> out;
    while (n.time_ms() < duration_ms) {
        if (pin_i_syn) n.set_i_syn(*pin_i_syn);
        if (n.step(dt)) out.push_back(n.time_ms());
    }
    return out;
}

}  // namespace

TEST_CASE("forced schedule") {
    const auto canned = PhaseSchedule::parse("10:20, 25:20, 10:20, 4:40");
    CHECK(canned.phases.size() == 4);
    CHECK(canned.total_ms() == 100000.0);
    const auto times = forced_spike_times(canned);
    CHECK(times.size() == 200 + 500 + 200 + 160);
    CHECK(times.front() == 100);
    CHECK(times.back() == 100000);
    CHECK(std::is_sorted(times.begin(), times.end()));

    CHECK(forced_spike_times(PhaseSchedule::parse("1:3")) == std::vector<Millis>{1000, 2000, 3000});
    CHECK(forced_spike_times(PhaseSchedule{}).empty());
    CHECK(PhaseSchedule::parse("").phases.empty());
    CHECK(PhaseSchedule::parse(canned.format()).phases.size() == 4);

    // Phase boundaries: the first spike comes one period in.
    const auto two = forced_spike_times(PhaseSchedule::parse("2:1, 4:1"));
    CHECK(two == std::vector<Millis>{500, 1000, 1250, 1500, 1750, 2000});

    CHECK_THROWS_AS(PhaseSchedule::parse("10"), Error);
    CHECK_THROWS_AS(PhaseSchedule::parse("0:5"), Error);
    CHECK_THROWS_AS(PhaseSchedule::parse("5:-1"), Error);
}

TEST_CASE("resting neuron without drive stays put") {
    AdaptiveNeuron n(silent_params(), make_stream(1, "n"));
    CHECK(spike_times(n, 10000).empty());
    CHECK(n.v() == doctest::Approx(-70.0).epsilon(1e-3));
}

TEST_CASE("step size is bounded") {
    AdaptiveNeuron n(silent_params(), make_stream(1, "n"));
    CHECK_THROWS_AS(n.step(1.5), Error);
    CHECK_THROWS_AS(n.step(0.0), Error);
    CHECK_NOTHROW(n.step(1.0));
}

TEST_CASE("a full-weight burst adds decaying quanta") {
    StimulationParams stim;
    AdaptiveNeuron n(silent_params(), make_stream(1, "n"));
    n.on_stimulation(255, stim);
    CHECK(n.pending_quanta() == 10);  // 200 Hz for 50 ms
    spike_times(n, 50.0);
    // Quanta land every 5 ms from t=0 and decay with tau_syn.
    double expected = 0.0;
    for (int k = 0; k < 10; ++k) expected += stim.epsc_quantum * std::exp(-(50.0 - 5.0 * k) / 100.0);
    CHECK(n.i_syn() == doctest::Approx(expected).epsilon(1e-9));
    CHECK(n.i_syn() <= stim.epsc_quantum * 200.0 * 0.05);
}

TEST_CASE("zero drive leaves i_syn untouched") {
    StimulationParams stim;
    stim.burst.f_min_hz = 0.0;
    AdaptiveNeuron n(silent_params(), make_stream(1, "n"));
    n.on_stimulation(0, stim);
    CHECK(n.pending_quanta() == 0);
    spike_times(n, 100.0);
    CHECK(n.i_syn() == 0.0);
}

TEST_CASE("overlapping bursts superpose") {
    StimulationParams stim;
    auto peak = [&](bool twice) {
        AdaptiveNeuron n(silent_params(), make_stream(1, "n"));
        n.on_stimulation(255, stim);
        double best = 0.0;
        while (n.time_ms() < 300.0) {
            if (twice && n.time_ms() == 60.0) n.on_stimulation(255, stim);
            n.step(0.5);
            best = std::max(best, n.i_syn());
        }
        return best;
    };
    CHECK(peak(true) > peak(false));
}

TEST_CASE("refractory period and reset") {
    AdexParams p;
    p.i_background = 60.0;
    AdaptiveNeuron n(p, make_stream(2, "n"));
    const auto spikes = spike_times(n, 5000.0);
    REQUIRE(spikes.size() > 10);
    for (std::size_t i = 1; i < spikes.size(); ++i) CHECK(spikes[i] - spikes[i - 1] >= p.t_refractory);
}

TEST_CASE("rate grows with sustained synaptic drive") {
    std::vector<double> rates;
    for (double drive : {0.0, 3.0, 6.0, 12.0}) {
        AdaptiveNeuron n(AdexParams{}, make_stream(5, "n"));
        rates.push_back(static_cast<double>(spike_times(n, 60000.0, 0.5, drive).size()) / 60.0);
    }
    for (std::size_t i = 1; i < rates.size(); ++i) CHECK(rates[i] > rates[i - 1]);

    // Noise-free: a larger pinned drive gives strictly shorter intervals.
    auto mean_isi = [](double drive) {
        AdexParams p;
        p.noise_sigma = 0.0;
        AdaptiveNeuron n(p, make_stream(1, "n"));
        const auto s = spike_times(n, 20000.0, 0.5, drive);
        return (s.back() - s.front()) / static_cast<double>(s.size() - 1);
    };
    CHECK(mean_isi(20.0) < mean_isi(10.0));
    CHECK(mean_isi(40.0) < mean_isi(20.0));
}

TEST_CASE("default drive is calibrated to about 2 Hz") {
    const AdexParams p;
    double sum = 0.0;
    for (std::uint64_t seed : {21u, 22u, 23u}) sum += spontaneous_rate(p, 200.0, 0.5, seed);
    CHECK(sum / 3.0 == doctest::Approx(2.0).epsilon(0.05));

    for (std::uint64_t seed : {31u, 32u, 33u, 34u}) {
        const double r = spontaneous_rate(p, 60.0, 0.5, seed);
        CHECK(r >= 1.6);
        CHECK(r <= 2.4);
    }
}

TEST_CASE("calibration finds the drive for another target") {
    const auto cal = calibrate_background(AdexParams{}, 5.0, 16.0, 24.0, 1.0, 60.0, 2);
    CHECK(cal.rate_hz == doctest::Approx(5.0).epsilon(0.05));
    AdexParams p;
    p.i_background = cal.i_background;
    const double r = spontaneous_rate(p, 60.0, 0.5, 77);
    CHECK(r >= 4.0);
    CHECK(r <= 6.0);
    CHECK_THROWS_AS(calibrate_background(AdexParams{}, 500.0, 16.0, 18.0, 1.0, 10.0, 1), Error);
}

TEST_CASE("a full-weight burst at least triples the instantaneous rate") {
    // Spikes within 100 ms of burst onset, over many trials, against the
    // spontaneous expectation in the same window.
    const AdexParams p;
    const StimulationParams stim;
    int evoked = 0;
    const int trials = 300;
    for (int trial = 0; trial < trials; ++trial) {
        AdaptiveNeuron n(p, make_stream(static_cast<std::uint64_t>(trial), "burst"));
        spike_times(n, 2000.0);
        n.on_stimulation(255, stim);
        evoked += static_cast<int>(spike_times(n, 2100.0).size());
    }
    const double evoked_rate = evoked / (trials * 0.1);
    CHECK(evoked_rate >= 3.0 * 2.0);
}

TEST_CASE("spike packets carry general relative time") {
    PrimaryClock clock;
    CHECK(emit_spike_packet(1, clock, 0) == AerPacket{kPrimaryTag, 1, 0, 0});
    PrimaryClock c2;
    c2.last_emitted_abs = 12000;
    CHECK(emit_spike_packet(2, c2, 12012) == AerPacket{kPrimaryTag, 2, 0, 12});
    CHECK(c2.last_emitted_abs == 12012);

    PrimaryClock chain;
    CHECK(emit_spike_packet(1, chain, 100).timestamp == 100);
    CHECK(emit_spike_packet(2, chain, 140).timestamp == 40);
    CHECK(emit_spike_packet(1, chain, 150).timestamp == 10);
}

TEST_CASE("primary node emits the whole schedule and a consistent delta chain") {
    PrimaryConfig cfg;
    cfg.schedule = PhaseSchedule::parse("10:2, 25:2");
    PrimaryNode node(cfg, 1);
    Outbox out;
    for (int i = 0; i < 8000; ++i) node.advance(i * 0.5, 0.5, out);
    std::size_t anpre = 0;
    Millis abs = 0;
    std::vector<Millis> anpre_times;
    for (const auto& e : out) {
        CHECK(e.to == PartnerRole::Synapse);
        CHECK(e.packet.r1 == kPrimaryTag);
        abs += e.packet.timestamp;
        if (e.packet.neuron_id == cfg.ids.anpre) {
            ++anpre;
            anpre_times.push_back(abs);
        }
    }
    CHECK(anpre == 20 + 50);
    CHECK(anpre_times == forced_spike_times(cfg.schedule));
    CHECK(node.spike_log().size() == out.size());
}

TEST_CASE("primary node only accepts stimulation for ANPOST") {
    PrimaryNode node(PrimaryConfig{}, 1);
    Outbox out;
    node.receive(PartnerRole::Synapse, {kSynapseTag, 2, 255, 0}, 0.0, out);
    CHECK(node.stimulations() == 1);
    CHECK(node.anpost().pending_quanta() == 10);
    node.receive(PartnerRole::Synapse, {kSynapseTag, 1, 255, 0}, 0.0, out);
    node.receive(PartnerRole::Secondary, {kSecondaryTag, 2, 1, 0}, 0.0, out);
    CHECK(node.rejected() == 2);
    CHECK(out.empty());
}

TEST_CASE("quiesced primary stops") {
    PrimaryConfig cfg;
    cfg.schedule = PhaseSchedule::parse("10:2");
    PrimaryNode node(cfg, 1);
    node.quiesce();
    Outbox out;
    for (int i = 0; i < 4000; ++i) node.advance(i * 0.5, 0.5, out);
    CHECK(out.empty());
}
