#pragma once

#include "biohybrid/config.hpp"
#include "biohybrid/experiment.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace biohybrid {

// Qualitative features of one run, used to compare runs with each other.
struct RunProfile {
    std::vector<std::optional<PlasticityDecision>> forward_majority;  // per phase
    std::vector<PlasticityDecision> forward_stream;                   // every forward decision, in order
    std::size_t bn_aps_phase1 = 0;
    bool bn_onset_in_phase2 = false;  // silent in phase 1, firing by the end of phase 2
    std::optional<Millis> bn_first_ap_ms;
    std::optional<Millis> bn_last_ap_ms;
    double anpost_baseline_hz = 0.0;  // phase 1
    double anpost_active_hz = 0.0;    // between the first and last BN AP
    double anpost_final_hz = 0.0;     // last 20 s of the schedule
    int anpost_change_sign = 0;       // +1 / -1 when the active rate differs from baseline by >= 20 %
};

// Rate of `neuron_id` action potentials within (from, to].
double spike_rate(const std::vector<EventRow>& events, std::uint32_t neuron_id, Millis from, Millis to);

RunProfile profile_run(const RunConfig& cfg, const RunArtifacts& artifacts, Millis exclude_ms = 2000);

// "none/LTP/none/LTD"; phases without decisions show as "-".
std::string format_majority(const std::vector<std::optional<PlasticityDecision>>& seq);

struct Scenario {
    std::string name;
    std::map<std::string, std::string> overrides;  // flat "section.key" values
};

struct ScenarioSuite {
    Config base;
    std::vector<Scenario> scenarios;  // the first one is the reference
};

// INI layout:
//   [suite]
//   base = canned.ini            (optional, relative to the suite file)
//   scenarios = canned, delay-90 (order; the first is the reference)
//   [scenario:delay-90]
//   link.primary_to_hub.static_delay_ms = 90
// Every merged scenario is checked against the known configuration keys.
ScenarioSuite parse_suite(const Config& suite_file);
ScenarioSuite load_suite(const std::filesystem::path& path);

// Canned run, repeat with ABm starting at 0.5, 10 ms and 90 ms static delays,
// and jitter-free links.
ScenarioSuite default_suite();

RunConfig scenario_config(const ScenarioSuite& suite, const Scenario& scenario);

struct ScenarioOutcome {
    std::string name;
    bool ok = false;
    std::string error;
    RunProfile profile;
    bool forward_stream_matches = false;  // identical to the reference scenario
    bool pattern_matches = false;         // same majority sequence, BN onset and ANPOST sign
};

struct ScenarioReport {
    std::vector<ScenarioOutcome> outcomes;
    bool all_match() const;
};

// Runs scenarios sequentially; a failing scenario is recorded and the rest
// still run. With out_dir set, each scenario's artifacts go to out_dir/<name>
// and the comparison table to out_dir/report.csv.
ScenarioReport run_scenario_suite(const ScenarioSuite& suite, const std::filesystem::path& out_dir = {});

std::string format_report(const ScenarioReport& report);

}  // namespace biohybrid
