#include "biohybrid/scenarios.hpp"

#include "biohybrid/error.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <set>

namespace biohybrid {
namespace {

constexpr Millis kFinalWindowMs = 20'000;
constexpr double kRateChangeBand = 0.2;

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    auto flush = [&] {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
        item.clear();
    };
    for (char c : text) {
        if (c == ',') {
            flush();
        } else {
            item += c;
        }
    }
    flush();
    return out;
}

Config merged(const Config& base, const Scenario& scenario) {
    Config cfg = base;
    for (const auto& [key, value] : scenario.overrides) cfg.set(key, value);
    return cfg;
}

}  // namespace

double spike_rate(const std::vector<EventRow>& events, std::uint32_t neuron_id, Millis from, Millis to) {
    if (to <= from) return 0.0;
    std::size_t count = 0;
    for (const auto& e : events) {
        const bool spike = e.kind == EventKind::Unused || is_action_potential(e.kind);
        if (spike && e.neuron_id == neuron_id && e.abs_time > from && e.abs_time <= to) ++count;
    }
    return static_cast<double>(count) * 1000.0 / static_cast<double>(to - from);
}

RunProfile profile_run(const RunConfig& cfg, const RunArtifacts& art, Millis exclude_ms) {
    RunProfile p;
    std::set<std::string> forward;
    for (const auto& e : cfg.connectome.entries()) {
        if (e.pathway == Pathway::Forward) forward.insert(e.synapse_id);
    }
    for (const auto& r : art.plasticity) {
        if (forward.count(r.synapse_id)) p.forward_stream.push_back(r.decision);
    }
    for (const auto& phase : art.phases) {
        std::vector<PlasticityDecision> decisions;
        for (const auto& r : art.plasticity) {
            if (forward.count(r.synapse_id) && phase.contains(r.abs_time, exclude_ms)) {
                decisions.push_back(r.decision);
            }
        }
        p.forward_majority.push_back(majority(decision_fractions(decisions)));
    }

    const std::uint32_t bn = cfg.ids.bn;
    for (const auto& e : art.events) {
        if (e.neuron_id != bn || !is_action_potential(e.kind)) continue;
        if (!p.bn_first_ap_ms) p.bn_first_ap_ms = e.abs_time;
        p.bn_last_ap_ms = e.abs_time;
        if (!art.phases.empty() && art.phases[0].contains(e.abs_time)) ++p.bn_aps_phase1;
    }
    if (art.phases.size() >= 2) {
        const auto& ph2 = art.phases[1];
        const bool late_phase2 = spike_rate(art.events, bn, ph2.end_ms - 5000, ph2.end_ms) > 0.0;
        p.bn_onset_in_phase2 = p.bn_aps_phase1 == 0 && late_phase2;
    }

    if (!art.phases.empty()) {
        const auto& ph1 = art.phases.front();
        p.anpost_baseline_hz = spike_rate(art.events, cfg.ids.anpost, ph1.start_ms + exclude_ms, ph1.end_ms);
        const Millis end = art.phases.back().end_ms;
        p.anpost_final_hz = spike_rate(art.events, cfg.ids.anpost, end - kFinalWindowMs, end);
    }
    if (p.bn_first_ap_ms && *p.bn_last_ap_ms > *p.bn_first_ap_ms) {
        p.anpost_active_hz = spike_rate(art.events, cfg.ids.anpost, *p.bn_first_ap_ms, *p.bn_last_ap_ms);
        if (p.anpost_baseline_hz > 0.0) {
            const double change = p.anpost_active_hz / p.anpost_baseline_hz - 1.0;
            if (change >= kRateChangeBand) p.anpost_change_sign = 1;
            if (change <= -kRateChangeBand) p.anpost_change_sign = -1;
        }
    }
    return p;
}

std::string format_majority(const std::vector<std::optional<PlasticityDecision>>& seq) {
    std::string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i) out += '/';
        if (!seq[i]) {
            out += '-';
        } else if (*seq[i] == PlasticityDecision::NoChange) {
            out += "none";
        } else {
            out += to_string(*seq[i]);
        }
    }
    return out;
}

ScenarioSuite parse_suite(const Config& file) {
    static const std::string prefix = "scenario:";
    ScenarioSuite suite;
    if (auto base = file.get("suite.base")) {
        suite.base = Config::load(file.base_dir / *base);
    } else {
        suite.base.base_dir = file.base_dir;
    }

    std::map<std::string, Scenario> sections;
    for (const auto& section : file.sections()) {
        if (section.rfind(prefix, 0) != 0) continue;
        const std::string name = section.substr(prefix.size());
        sections[name].name = name;
    }
    for (const auto& [key, value] : file.values()) {
        if (key.rfind(prefix, 0) != 0) {
            if (key == "suite.base" || key == "suite.scenarios") continue;
            throw Error(Errc::BadConfig, "unexpected key '" + key + "' in scenario suite");
        }
        const auto dot = key.find('.');
        const std::string name = key.substr(prefix.size(), dot == std::string::npos ? std::string::npos
                                                                                     : dot - prefix.size());
        auto& sc = sections[name];
        sc.name = name;
        if (dot != std::string::npos) sc.overrides[key.substr(dot + 1)] = value;
    }

    std::vector<std::string> order;
    if (auto listed = file.get("suite.scenarios")) {
        order = split_list(*listed);
    } else {
        for (const auto& [name, sc] : sections) order.push_back(name);
    }
    if (order.empty()) throw Error(Errc::BadConfig, "scenario suite lists no scenarios");
    std::set<std::string> seen;
    for (const auto& name : order) {
        if (!seen.insert(name).second) throw Error(Errc::BadConfig, "scenario '" + name + "' listed twice");
        auto it = sections.find(name);
        suite.scenarios.push_back(it == sections.end() ? Scenario{name, {}} : it->second);
    }
    for (const auto& [name, sc] : sections) {
        if (!seen.count(name)) throw Error(Errc::BadConfig, "scenario '" + name + "' is not listed in suite.scenarios");
    }
    for (const auto& sc : suite.scenarios) validate_keys(merged(suite.base, sc));
    return suite;
}

ScenarioSuite load_suite(const std::filesystem::path& path) { return parse_suite(Config::load(path)); }

ScenarioSuite default_suite() {
    ScenarioSuite suite;
    suite.scenarios.push_back({"canned", {}});
    suite.scenarios.push_back({"repeat", {{"memristor.initial_weight.ABm", "0.5"}}});
    std::map<std::string, std::string> d10, d90;
    for (const char* link : kLinkNames) {
        d10[std::string("link.") + link + ".static_delay_ms"] = "10";
        d90[std::string("link.") + link + ".static_delay_ms"] = "90";
    }
    suite.scenarios.push_back({"delay-10", d10});
    suite.scenarios.push_back({"delay-90", d90});
    suite.scenarios.push_back({"jitter-0", {{"transport.jitter_ms", "0"}}});
    return suite;
}

RunConfig scenario_config(const ScenarioSuite& suite, const Scenario& scenario) {
    return run_config_from(merged(suite.base, scenario));
}

bool ScenarioReport::all_match() const {
    return std::all_of(outcomes.begin(), outcomes.end(),
                       [](const ScenarioOutcome& o) { return o.ok && o.pattern_matches && o.forward_stream_matches; });
}

ScenarioReport run_scenario_suite(const ScenarioSuite& suite, const std::filesystem::path& out_dir) {
    ScenarioReport report;
    const RunProfile* reference = nullptr;
    for (const auto& sc : suite.scenarios) {
        ScenarioOutcome o;
        o.name = sc.name;
        try {
            RunConfig cfg = scenario_config(suite, sc);
            cfg.mode = TransportMode::Sim;
            cfg.out_dir = out_dir.empty() ? std::filesystem::path{} : out_dir / sc.name;
            const auto art = run_experiment(cfg);
            o.profile = profile_run(cfg, art);
            o.ok = true;
        } catch (const std::exception& e) {
            o.error = e.what();
            spdlog::error("scenario {} failed: {}", sc.name, e.what());
        }
        report.outcomes.push_back(std::move(o));
        auto& done = report.outcomes.back();
        if (!done.ok) continue;
        if (!reference) reference = &done.profile;
        done.forward_stream_matches = done.profile.forward_stream == reference->forward_stream;
        done.pattern_matches = done.profile.forward_majority == reference->forward_majority &&
                               done.profile.bn_onset_in_phase2 == reference->bn_onset_in_phase2 &&
                               done.profile.anpost_change_sign == reference->anpost_change_sign;
    }

    if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        std::ofstream out(out_dir / "report.csv");
        if (ec || !out) throw Error(Errc::OutputIoError, "cannot write " + (out_dir / "report.csv").string());
        out << format_report(report);
        if (!out) throw Error(Errc::OutputIoError, "cannot write " + (out_dir / "report.csv").string());
    }
    return report;
}

std::string format_report(const ScenarioReport& report) {
    std::string out =
        "scenario,status,forward_majority,forward_decisions,bn_aps_phase1,bn_onset_phase2,bn_first_ap_ms,"
        "bn_last_ap_ms,anpost_baseline_hz,anpost_active_hz,anpost_final_hz,anpost_change,"
        "forward_stream_matches,pattern_matches,error\n";
    auto opt = [](const std::optional<Millis>& t) { return t ? std::to_string(*t) : std::string(); };
    for (const auto& o : report.outcomes) {
        const auto& p = o.profile;
        std::string error = o.error;
        std::replace(error.begin(), error.end(), ',', ';');
        std::replace(error.begin(), error.end(), '\n', ' ');
        out += fmt::format("{},{},{},{},{},{},{},{},{:.4f},{:.4f},{:.4f},{:+d},{},{},{}\n", o.name,
                           o.ok ? "ok" : "failed", format_majority(p.forward_majority), p.forward_stream.size(),
                           p.bn_aps_phase1, p.bn_onset_in_phase2 ? "yes" : "no", opt(p.bn_first_ap_ms),
                           opt(p.bn_last_ap_ms), p.anpost_baseline_hz, p.anpost_active_hz, p.anpost_final_hz,
                           p.anpost_change_sign, o.forward_stream_matches ? "yes" : "no",
                           o.pattern_matches ? "yes" : "no", error);
    }
    return out;
}

}  // namespace biohybrid
