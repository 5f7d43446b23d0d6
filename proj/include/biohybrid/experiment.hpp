#pragma once

#include "biohybrid/artificial_node.hpp"
#include "biohybrid/bio_node.hpp"
#include "biohybrid/config.hpp"
#include "biohybrid/connectome.hpp"
#include "biohybrid/event_loop.hpp"
#include "biohybrid/synapse_hub.hpp"
#include "biohybrid/transport.hpp"

#include <atomic>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace biohybrid {

enum class TransportMode { Sim, Udp };

struct LinkSettings {
    std::optional<double> static_delay_ms;  // drawn from the default range when unset
    double jitter_ms = 2.0;
    double loss_prob = 0.0;
    bool preserve_order = true;
};

inline constexpr const char* kLinkNames[] = {"primary_to_hub", "hub_to_primary", "secondary_to_hub",
                                             "hub_to_secondary"};

struct RunConfig {
    TransportMode mode = TransportMode::Sim;
    std::uint64_t seed = 1;
    double dt_ms = 0.5;
    PhaseSchedule schedule;
    NeuronIds ids;
    ConnectivityMatrix connectome;
    HubConfig hub;
    AdexParams anpost;
    double anpost_target_rate_hz = 2.0;
    StimulationParams stim;
    BioParams bio;
    double static_delay_min_ms = 10.0;
    double static_delay_max_ms = 90.0;
    std::map<std::string, LinkSettings> links;  // keyed by kLinkNames
    std::filesystem::path out_dir;

    std::uint16_t hub_port = 47000;
    std::uint16_t primary_port = 47001;
    std::uint16_t secondary_port = 47002;
    std::string primary_addr = "127.0.0.1:47001";
    std::string secondary_addr = "127.0.0.1:47002";
    std::string hub_addr = "127.0.0.1:47000";

    // The four-phase forward-path protocol with the default network.
    static RunConfig canned();
};

// Throws Error{BadConfig} on unknown keys or bad values; unset keys keep the
// canned defaults.
RunConfig run_config_from(const Config& cfg);
RunConfig load_run_config(const std::filesystem::path& path);
void validate_keys(const Config& cfg);

// Concrete per-link profiles; unset static delays are drawn once per link,
// uniformly in [static_delay_min_ms, static_delay_max_ms], from the run seed.
std::map<std::pair<PartnerRole, PartnerRole>, LinkProfile> resolve_links(const RunConfig& cfg);

struct EventRow {
    Millis abs_time = 0;
    std::uint32_t neuron_id = 0;
    PartnerRole source = PartnerRole::Primary;
    EventKind kind = EventKind::Unused;
};

struct PlasticityRow {
    Millis abs_time = 0;
    std::string synapse_id;
    PlasticityDecision decision = PlasticityDecision::NoChange;
    double weight_after = 0.0;
};

struct PhaseWindow {
    int index = 0;
    Millis start_ms = 0;
    Millis end_ms = 0;
    double rate_hz = 0.0;

    // Phases are half-open on the left: (start, end].
    bool contains(Millis t, Millis exclude_ms = 0) const {
        return t > start_ms + exclude_ms && t <= end_ms;
    }
};

std::vector<PhaseWindow> phase_windows(const PhaseSchedule& schedule);

struct RunArtifacts {
    std::filesystem::path dir;
    std::vector<EventRow> events;
    std::vector<PlasticityRow> plasticity;
    std::vector<PhaseWindow> phases;
    std::vector<SpikeLogRow> primary_spikes;
    std::vector<SpikeLogRow> secondary_spikes;
    // Not persisted: what the secondary saw on each stimulation.
    std::vector<StimulusLogRow> stimuli;
    std::string events_csv;
    std::string plasticity_csv;
};

// Sim mode only; UDP runs go through the per-node commands. Writes the CSVs
// when cfg.out_dir is set.
RunArtifacts run_experiment(const RunConfig& cfg);

struct UdpNodeResult {
    LoopStats stats;
    std::size_t sent = 0;
    std::size_t dropped = 0;
};

// Runs one partner in real time behind its configured UDP port until the
// schedule plus linger_ms has elapsed (or `stop` is set), then writes that
// partner's artifacts into cfg.out_dir when set: the hub writes events.csv,
// plasticity.csv, phases.csv and summary.csv, the primary primary_spikes.csv,
// the secondary secondary_spikes.csv.
UdpNodeResult run_udp_node(PartnerRole role, const RunConfig& cfg, double linger_ms = 2000.0,
                           const std::atomic<bool>* stop = nullptr);

std::vector<EventRow> parse_events_csv(const std::string& text);
std::vector<PlasticityRow> parse_plasticity_csv(const std::string& text);
std::string format_spike_log(std::vector<SpikeLogRow> rows);
RunArtifacts read_artifacts(const std::filesystem::path& dir);

struct DecisionFractions {
    std::size_t n = 0;
    double ltp = 0.0;
    double ltd = 0.0;
    double none = 0.0;
};

DecisionFractions decision_fractions(const std::vector<PlasticityDecision>& decisions);

struct SynapsePhaseStats {
    int phase = 0;
    std::string synapse_id;
    DecisionFractions fractions;
    double mean_weight = 0.0;
};

struct NeuronPhaseStats {
    int phase = 0;
    std::uint32_t neuron_id = 0;
    PartnerRole source = PartnerRole::Primary;
    std::size_t ap_count = 0;
    double rate_hz = 0.0;
};

struct PhaseSummary {
    Millis exclude_ms = 0;
    std::vector<PhaseWindow> phases;
    std::vector<SynapsePhaseStats> synapses;
    std::vector<NeuronPhaseStats> neurons;

    const SynapsePhaseStats* synapse(int phase, const std::string& id) const;
    const NeuronPhaseStats* neuron(int phase, std::uint32_t id) const;
};

// Per phase, ignoring the first exclude_ms of each: decision fractions and
// mean weight per synapse, AP counts and rates per neuron. PSPs are not APs.
PhaseSummary summarize(const RunArtifacts& artifacts, Millis exclude_ms = 2000);
void write_summary(const PhaseSummary& summary, const std::filesystem::path& dir);
std::string format_summary(const PhaseSummary& summary);

// Decision that occurs most often; ties resolve NoChange, then LTP, then LTD.
std::optional<PlasticityDecision> majority(const DecisionFractions& f);

}  // namespace biohybrid
