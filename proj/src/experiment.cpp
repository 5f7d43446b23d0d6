#include "biohybrid/experiment.hpp"

#include "biohybrid/error.hpp"
#include "biohybrid/event_loop.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace biohybrid {

RunConfig RunConfig::canned() {
    RunConfig cfg;
    cfg.schedule = PhaseSchedule::parse("10:20, 25:20, 10:20, 4:40");
    cfg.connectome = ConnectivityMatrix::canned(cfg.ids);
    cfg.hub.initial_weights = {{"ABm", 0.3}, {"BAm", 0.5}};
    for (const char* name : kLinkNames) cfg.links[name] = LinkSettings{};
    return cfg;
}

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "run.seed", "run.dt_ms", "run.out",
        "transport.mode", "transport.static_delay_min_ms", "transport.static_delay_max_ms",
        "transport.jitter_ms", "transport.loss_prob", "transport.preserve_order",
        "schedule.phases",
        "neurons.anpre_id", "neurons.anpost_id", "neurons.bn_id",
        "connectome.file",
        "bcm.low_hz", "bcm.high_hz", "bcm.window_ms",
        "memristor.alpha_p", "memristor.alpha_d", "memristor.noise_sigma", "memristor.initial_weight",
        "stim.f_min", "stim.f_max", "stim.burst_duration_ms", "stim.epsc_quantum",
        "anpost.tau_m", "anpost.tau_w", "anpost.tau_syn", "anpost.v_rest", "anpost.v_threshold",
        "anpost.v_reset", "anpost.v_peak", "anpost.delta_t", "anpost.a", "anpost.b",
        "anpost.t_refractory", "anpost.i_background", "anpost.noise_sigma", "anpost.spont_rate_hz",
        "bio.ap_threshold_pulses", "bio.psp_amp_max", "bio.ap_amplitude", "bio.jitter",
        "bio.spont_rate_hz", "bio.refractory_ms", "bio.summation_mode", "bio.summation_tau_ms",
        "bio.response_latency_ms",
        "hub.listen_port", "hub.primary_addr", "hub.secondary_addr", "hub.addr",
        "primary.listen_port", "secondary.listen_port",
    };
    return keys;
}

bool is_link_key(const std::string& key) {
    for (const char* name : kLinkNames) {
        const std::string prefix = std::string("link.") + name + ".";
        if (key.rfind(prefix, 0) == 0) {
            const auto field = key.substr(prefix.size());
            return field == "static_delay_ms" || field == "jitter_ms" || field == "loss_prob" ||
                   field == "preserve_order";
        }
    }
    return false;
}

std::uint16_t port_of(const Config& cfg, const std::string& key, std::uint16_t fallback) {
    const auto p = cfg.get_int(key, fallback);
    if (p < 0 || p > 65535) throw Error(Errc::BadConfig, key + ": port out of range");
    return static_cast<std::uint16_t>(p);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

template <typename Row, typename ParseFn>
std::vector<Row> parse_table(const std::string& text, std::size_t n_fields, const char* what, ParseFn parse) {
    std::vector<Row> rows;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != n_fields) {
            throw Error(Errc::InputIoError, std::string("malformed ") + what + " row: " + line);
        }
        try {
            rows.push_back(parse(fields));
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw Error(Errc::InputIoError, std::string("malformed ") + what + " row: " + line);
        }
    }
    return rows;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InputIoError, "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
    out.flush();
    if (!out) throw Error(Errc::OutputIoError, "cannot write " + path.string());
}

}  // namespace

void validate_keys(const Config& cfg) {
    for (const auto& [key, value] : cfg.values()) {
        if (known_keys().count(key) || is_link_key(key)) continue;
        if (key.rfind("memristor.initial_weight.", 0) == 0) continue;
        throw Error(Errc::BadConfig, "unknown configuration key '" + key + "'");
    }
}

RunConfig run_config_from(const Config& cfg) {
    validate_keys(cfg);
    RunConfig rc = RunConfig::canned();

    rc.seed = static_cast<std::uint64_t>(cfg.get_int("run.seed", static_cast<std::int64_t>(rc.seed)));
    rc.dt_ms = cfg.get_double("run.dt_ms", rc.dt_ms);
    if (!(rc.dt_ms > 0.0 && rc.dt_ms <= 1.0)) throw Error(Errc::BadConfig, "run.dt_ms must lie in (0, 1]");
    if (auto out = cfg.get("run.out")) rc.out_dir = cfg.base_dir / *out;

    const auto mode = cfg.get_string("transport.mode", "sim");
    if (mode == "sim") {
        rc.mode = TransportMode::Sim;
    } else if (mode == "udp") {
        rc.mode = TransportMode::Udp;
    } else {
        throw Error(Errc::BadConfig, "transport.mode must be sim or udp");
    }

    if (auto phases = cfg.get("schedule.phases")) rc.schedule = PhaseSchedule::parse(*phases);

    rc.ids.anpre = static_cast<std::uint32_t>(cfg.get_int("neurons.anpre_id", rc.ids.anpre));
    rc.ids.anpost = static_cast<std::uint32_t>(cfg.get_int("neurons.anpost_id", rc.ids.anpost));
    rc.ids.bn = static_cast<std::uint32_t>(cfg.get_int("neurons.bn_id", rc.ids.bn));
    if (auto file = cfg.get("connectome.file")) {
        rc.connectome = load_connectome_file((cfg.base_dir / *file).string());
    } else {
        rc.connectome = ConnectivityMatrix::canned(rc.ids);
    }

    rc.hub.bcm.low_hz = cfg.get_double("bcm.low_hz", rc.hub.bcm.low_hz);
    rc.hub.bcm.high_hz = cfg.get_double("bcm.high_hz", rc.hub.bcm.high_hz);
    rc.hub.window_ms = cfg.get_int("bcm.window_ms", rc.hub.window_ms);
    rc.hub.memristor.alpha_p = cfg.get_double("memristor.alpha_p", rc.hub.memristor.alpha_p);
    rc.hub.memristor.alpha_d = cfg.get_double("memristor.alpha_d", rc.hub.memristor.alpha_d);
    rc.hub.memristor.noise_sigma = cfg.get_double("memristor.noise_sigma", rc.hub.memristor.noise_sigma);
    rc.hub.default_initial_weight =
        cfg.get_double("memristor.initial_weight", rc.hub.default_initial_weight);
    for (const auto& [id, value] : cfg.with_prefix("memristor.initial_weight")) {
        rc.hub.initial_weights[id] = cfg.get_double("memristor.initial_weight." + id, 0.0);
        if (!rc.connectome.find(id)) {
            throw Error(Errc::BadConfig, "initial weight for unknown synapse '" + id + "'");
        }
    }

    rc.stim.burst.f_min_hz = cfg.get_double("stim.f_min", rc.stim.burst.f_min_hz);
    rc.stim.burst.f_max_hz = cfg.get_double("stim.f_max", rc.stim.burst.f_max_hz);
    rc.stim.burst.burst_duration_ms = cfg.get_double("stim.burst_duration_ms", rc.stim.burst.burst_duration_ms);
    rc.stim.epsc_quantum = cfg.get_double("stim.epsc_quantum", rc.stim.epsc_quantum);

    auto& a = rc.anpost;
    a.tau_m = cfg.get_double("anpost.tau_m", a.tau_m);
    a.tau_w = cfg.get_double("anpost.tau_w", a.tau_w);
    a.tau_syn = cfg.get_double("anpost.tau_syn", a.tau_syn);
    a.v_rest = cfg.get_double("anpost.v_rest", a.v_rest);
    a.v_threshold = cfg.get_double("anpost.v_threshold", a.v_threshold);
    a.v_reset = cfg.get_double("anpost.v_reset", a.v_reset);
    a.v_peak = cfg.get_double("anpost.v_peak", a.v_peak);
    a.delta_t = cfg.get_double("anpost.delta_t", a.delta_t);
    a.a = cfg.get_double("anpost.a", a.a);
    a.b = cfg.get_double("anpost.b", a.b);
    a.t_refractory = cfg.get_double("anpost.t_refractory", a.t_refractory);
    a.i_background = cfg.get_double("anpost.i_background", a.i_background);
    a.noise_sigma = cfg.get_double("anpost.noise_sigma", a.noise_sigma);
    rc.anpost_target_rate_hz = cfg.get_double("anpost.spont_rate_hz", rc.anpost_target_rate_hz);
    if (!(rc.anpost_target_rate_hz > 0.0)) throw Error(Errc::BadConfig, "anpost.spont_rate_hz must be positive");
    if (cfg.has("anpost.spont_rate_hz") && !cfg.has("anpost.i_background")) {
        // The built-in drive is calibrated for the default target; anything
        // else (or changed dynamics) is recalibrated here.
        a.i_background = calibrate_background(a, rc.anpost_target_rate_hz, 0.0, 40.0, 1.0, 60.0, 2).i_background;
        spdlog::info("anpost.i_background calibrated to {:.4f} for {} Hz", a.i_background,
                     rc.anpost_target_rate_hz);
    }

    auto& b = rc.bio;
    b.ap_threshold_pulses = static_cast<int>(cfg.get_int("bio.ap_threshold_pulses", b.ap_threshold_pulses));
    b.psp_amp_max = cfg.get_double("bio.psp_amp_max", b.psp_amp_max);
    b.ap_amplitude = cfg.get_double("bio.ap_amplitude", b.ap_amplitude);
    b.jitter = cfg.get_double("bio.jitter", b.jitter);
    b.spont_rate_hz = cfg.get_double("bio.spont_rate_hz", b.spont_rate_hz);
    b.refractory_ms = cfg.get_double("bio.refractory_ms", b.refractory_ms);
    b.summation_mode = cfg.get_bool("bio.summation_mode", b.summation_mode);
    b.summation_tau_ms = cfg.get_double("bio.summation_tau_ms", b.summation_tau_ms);
    b.response_latency_ms = cfg.get_double("bio.response_latency_ms", b.response_latency_ms);

    rc.static_delay_min_ms = cfg.get_double("transport.static_delay_min_ms", rc.static_delay_min_ms);
    rc.static_delay_max_ms = cfg.get_double("transport.static_delay_max_ms", rc.static_delay_max_ms);
    if (rc.static_delay_min_ms < 0.0 || rc.static_delay_max_ms < rc.static_delay_min_ms) {
        throw Error(Errc::BadConfig, "static delay range must satisfy 0 <= min <= max");
    }
    const double jitter = cfg.get_double("transport.jitter_ms", 2.0);
    const double loss = cfg.get_double("transport.loss_prob", 0.0);
    const bool ordered = cfg.get_bool("transport.preserve_order", true);
    for (const char* name : kLinkNames) {
        const std::string p = std::string("link.") + name + ".";
        LinkSettings ls;
        if (cfg.has(p + "static_delay_ms")) ls.static_delay_ms = cfg.get_double(p + "static_delay_ms", 0.0);
        ls.jitter_ms = cfg.get_double(p + "jitter_ms", jitter);
        ls.loss_prob = cfg.get_double(p + "loss_prob", loss);
        ls.preserve_order = cfg.get_bool(p + "preserve_order", ordered);
        LinkProfile{ls.static_delay_ms.value_or(0.0), ls.jitter_ms, ls.loss_prob, ls.preserve_order}.validate();
        rc.links[name] = ls;
    }

    rc.hub_port = port_of(cfg, "hub.listen_port", rc.hub_port);
    rc.primary_port = port_of(cfg, "primary.listen_port", rc.primary_port);
    rc.secondary_port = port_of(cfg, "secondary.listen_port", rc.secondary_port);
    rc.primary_addr = cfg.get_string("hub.primary_addr", "127.0.0.1:" + std::to_string(rc.primary_port));
    rc.secondary_addr = cfg.get_string("hub.secondary_addr", "127.0.0.1:" + std::to_string(rc.secondary_port));
    rc.hub_addr = cfg.get_string("hub.addr", "127.0.0.1:" + std::to_string(rc.hub_port));
    return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) { return run_config_from(Config::load(path)); }

std::map<std::pair<PartnerRole, PartnerRole>, LinkProfile> resolve_links(const RunConfig& cfg) {
    static const std::pair<PartnerRole, PartnerRole> endpoints[] = {
        {PartnerRole::Primary, PartnerRole::Synapse},
        {PartnerRole::Synapse, PartnerRole::Primary},
        {PartnerRole::Secondary, PartnerRole::Synapse},
        {PartnerRole::Synapse, PartnerRole::Secondary},
    };
    Rng rng = make_stream(cfg.seed, "links/static_delay");
    std::uniform_real_distribution<double> draw(cfg.static_delay_min_ms, cfg.static_delay_max_ms);
    std::map<std::pair<PartnerRole, PartnerRole>, LinkProfile> out;
    for (std::size_t i = 0; i < std::size(kLinkNames); ++i) {
        // Always draw, so overriding one link leaves the others unchanged.
        const double drawn = draw(rng);
        LinkSettings ls;
        if (auto it = cfg.links.find(kLinkNames[i]); it != cfg.links.end()) ls = it->second;
        out[endpoints[i]] = LinkProfile{ls.static_delay_ms.value_or(drawn), ls.jitter_ms, ls.loss_prob,
                                        ls.preserve_order};
    }
    return out;
}

std::vector<PhaseWindow> phase_windows(const PhaseSchedule& schedule) {
    std::vector<PhaseWindow> out;
    double start = 0.0;
    int index = 1;
    for (const auto& p : schedule.phases) {
        const double end = start + p.duration_s * 1000.0;
        out.push_back({index++, std::llround(start), std::llround(end), p.rate_hz});
        start = end;
    }
    return out;
}

std::vector<EventRow> parse_events_csv(const std::string& text) {
    return parse_table<EventRow>(text, 4, "events", [](const std::vector<std::string>& f) {
        EventRow r;
        r.abs_time = std::stoll(f[0]);
        r.neuron_id = static_cast<std::uint32_t>(std::stoul(f[1]));
        auto role = parse_role(f[2]);
        auto kind = parse_event_kind(f[3]);
        if (!role || !kind) throw std::invalid_argument("role/kind");
        r.source = *role;
        r.kind = *kind;
        return r;
    });
}

std::vector<PlasticityRow> parse_plasticity_csv(const std::string& text) {
    return parse_table<PlasticityRow>(text, 4, "plasticity", [](const std::vector<std::string>& f) {
        PlasticityRow r;
        r.abs_time = std::stoll(f[0]);
        r.synapse_id = f[1];
        auto d = parse_decision(f[2]);
        if (!d) throw std::invalid_argument("decision");
        r.decision = *d;
        r.weight_after = std::stod(f[3]);
        return r;
    });
}

std::string format_spike_log(std::vector<SpikeLogRow> rows) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SpikeLogRow& a, const SpikeLogRow& b) { return a.time_ms < b.time_ms; });
    std::string out = "time_ms,neuron_id,kind\n";
    for (const auto& r : rows) out += fmt::format("{:.1f},{},{}\n", r.time_ms, r.neuron_id, to_string(r.kind));
    return out;
}

namespace {

std::vector<SpikeLogRow> parse_spike_log(const std::string& text) {
    return parse_table<SpikeLogRow>(text, 3, "spike log", [](const std::vector<std::string>& f) {
        SpikeLogRow r;
        r.time_ms = std::stod(f[0]);
        r.neuron_id = static_cast<std::uint32_t>(std::stoul(f[1]));
        auto kind = parse_event_kind(f[2]);
        if (!kind) throw std::invalid_argument("kind");
        r.kind = *kind;
        return r;
    });
}

std::string format_phases(const std::vector<PhaseWindow>& phases) {
    std::string out = "phase,start_ms,end_ms,rate_hz\n";
    for (const auto& p : phases) out += fmt::format("{},{},{},{}\n", p.index, p.start_ms, p.end_ms, p.rate_hz);
    return out;
}

std::vector<PhaseWindow> parse_phases(const std::string& text) {
    return parse_table<PhaseWindow>(text, 4, "phases", [](const std::vector<std::string>& f) {
        return PhaseWindow{std::stoi(f[0]), std::stoll(f[1]), std::stoll(f[2]), std::stod(f[3])};
    });
}

}  // namespace

RunArtifacts run_experiment(const RunConfig& cfg) {
    if (cfg.mode != TransportMode::Sim) {
        throw Error(Errc::NodeStartupFailure,
                    "run_experiment drives the simulated network; start UDP nodes individually");
    }
    PrimaryNode primary(PrimaryConfig{cfg.schedule, cfg.ids, cfg.anpost, cfg.stim}, cfg.seed);
    HubNode hub(SynapseHub(cfg.connectome, cfg.hub, cfg.seed));
    SecondaryNode secondary(SecondaryConfig{cfg.ids.bn, cfg.bio}, cfg.seed);
    SimTransport transport(cfg.seed, resolve_links(cfg));

    const auto stats = run_simulation(primary, hub, secondary, transport, cfg.schedule.total_ms(), cfg.dt_ms);
    spdlog::debug("simulation: {} steps, {} deliveries, {} lost", stats.steps, stats.deliveries,
                  transport.lost());

    RunArtifacts art;
    std::ostringstream events, plasticity;
    export_log(hub.hub(), events, plasticity);
    art.events_csv = events.str();
    art.plasticity_csv = plasticity.str();
    art.events = parse_events_csv(art.events_csv);
    art.plasticity = parse_plasticity_csv(art.plasticity_csv);
    art.phases = phase_windows(cfg.schedule);
    art.primary_spikes = primary.spike_log();
    art.secondary_spikes = secondary.spike_log();
    art.stimuli = secondary.stimulus_log();

    if (!cfg.out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(cfg.out_dir, ec);
        if (ec) throw Error(Errc::OutputIoError, "cannot create " + cfg.out_dir.string());
        art.dir = cfg.out_dir;
        write_file(cfg.out_dir / "events.csv", art.events_csv);
        write_file(cfg.out_dir / "plasticity.csv", art.plasticity_csv);
        write_file(cfg.out_dir / "phases.csv", format_phases(art.phases));
        write_file(cfg.out_dir / "primary_spikes.csv", format_spike_log(art.primary_spikes));
        write_file(cfg.out_dir / "secondary_spikes.csv", format_spike_log(art.secondary_spikes));
        write_summary(summarize(art), cfg.out_dir);
    }
    return art;
}

UdpNodeResult run_udp_node(PartnerRole role, const RunConfig& cfg, double linger_ms, const std::atomic<bool>* stop) {
    const auto hub_ep = UdpEndpoint::parse(cfg.hub_addr);
    std::map<PartnerRole, UdpEndpoint> peers;
    std::uint16_t port = 0;
    switch (role) {
        case PartnerRole::Synapse:
            port = cfg.hub_port;
            peers = {{PartnerRole::Primary, UdpEndpoint::parse(cfg.primary_addr)},
                     {PartnerRole::Secondary, UdpEndpoint::parse(cfg.secondary_addr)}};
            break;
        case PartnerRole::Primary:
            port = cfg.primary_port;
            peers = {{PartnerRole::Synapse, hub_ep}};
            break;
        case PartnerRole::Secondary:
            port = cfg.secondary_port;
            peers = {{PartnerRole::Synapse, hub_ep}};
            break;
    }
    UdpTransport transport(port, peers);
    const double duration = cfg.schedule.total_ms();
    auto prepare_dir = [&] {
        std::error_code ec;
        std::filesystem::create_directories(cfg.out_dir, ec);
        if (ec) throw Error(Errc::OutputIoError, "cannot create " + cfg.out_dir.string());
    };

    UdpNodeResult result;
    auto finish = [&](const LoopStats& stats) {
        result.stats = stats;
        result.sent = transport.sent();
        result.dropped = transport.dropped();
    };
    if (role == PartnerRole::Synapse) {
        HubNode node(SynapseHub(cfg.connectome, cfg.hub, cfg.seed));
        finish(run_realtime(node, transport, duration, cfg.dt_ms, linger_ms, stop));
        if (!cfg.out_dir.empty()) {
            prepare_dir();
            export_log(node.hub(), cfg.out_dir);
            write_file(cfg.out_dir / "phases.csv", format_phases(phase_windows(cfg.schedule)));
            write_summary(summarize(read_artifacts(cfg.out_dir)), cfg.out_dir);
        }
    } else if (role == PartnerRole::Primary) {
        PrimaryNode node(PrimaryConfig{cfg.schedule, cfg.ids, cfg.anpost, cfg.stim}, cfg.seed);
        finish(run_realtime(node, transport, duration, cfg.dt_ms, linger_ms, stop));
        if (!cfg.out_dir.empty()) {
            prepare_dir();
            write_file(cfg.out_dir / "primary_spikes.csv", format_spike_log(node.spike_log()));
        }
    } else {
        SecondaryNode node(SecondaryConfig{cfg.ids.bn, cfg.bio}, cfg.seed);
        finish(run_realtime(node, transport, duration, cfg.dt_ms, linger_ms, stop));
        if (!cfg.out_dir.empty()) {
            prepare_dir();
            write_file(cfg.out_dir / "secondary_spikes.csv", format_spike_log(node.spike_log()));
        }
    }
    return result;
}

RunArtifacts read_artifacts(const std::filesystem::path& dir) {
    RunArtifacts art;
    art.dir = dir;
    art.events_csv = read_file(dir / "events.csv");
    art.plasticity_csv = read_file(dir / "plasticity.csv");
    art.events = parse_events_csv(art.events_csv);
    art.plasticity = parse_plasticity_csv(art.plasticity_csv);
    art.phases = parse_phases(read_file(dir / "phases.csv"));
    if (std::filesystem::exists(dir / "primary_spikes.csv")) {
        art.primary_spikes = parse_spike_log(read_file(dir / "primary_spikes.csv"));
    }
    if (std::filesystem::exists(dir / "secondary_spikes.csv")) {
        art.secondary_spikes = parse_spike_log(read_file(dir / "secondary_spikes.csv"));
    }
    return art;
}

DecisionFractions decision_fractions(const std::vector<PlasticityDecision>& decisions) {
    DecisionFractions f;
    f.n = decisions.size();
    if (f.n == 0) return f;
    for (auto d : decisions) {
        if (d == PlasticityDecision::LTP) f.ltp += 1;
        if (d == PlasticityDecision::LTD) f.ltd += 1;
        if (d == PlasticityDecision::NoChange) f.none += 1;
    }
    const auto n = static_cast<double>(f.n);
    f.ltp /= n;
    f.ltd /= n;
    f.none /= n;
    return f;
}

std::optional<PlasticityDecision> majority(const DecisionFractions& f) {
    if (f.n == 0) return std::nullopt;
    if (f.none >= f.ltp && f.none >= f.ltd) return PlasticityDecision::NoChange;
    if (f.ltp >= f.ltd) return PlasticityDecision::LTP;
    return PlasticityDecision::LTD;
}

const SynapsePhaseStats* PhaseSummary::synapse(int phase, const std::string& id) const {
    for (const auto& s : synapses) {
        if (s.phase == phase && s.synapse_id == id) return &s;
    }
    return nullptr;
}

const NeuronPhaseStats* PhaseSummary::neuron(int phase, std::uint32_t id) const {
    for (const auto& n : neurons) {
        if (n.phase == phase && n.neuron_id == id) return &n;
    }
    return nullptr;
}

PhaseSummary summarize(const RunArtifacts& artifacts, Millis exclude_ms) {
    PhaseSummary s;
    s.exclude_ms = exclude_ms;
    s.phases = artifacts.phases;

    std::vector<std::string> synapse_ids;
    for (const auto& r : artifacts.plasticity) {
        if (std::find(synapse_ids.begin(), synapse_ids.end(), r.synapse_id) == synapse_ids.end()) {
            synapse_ids.push_back(r.synapse_id);
        }
    }
    std::sort(synapse_ids.begin(), synapse_ids.end());
    std::map<std::uint32_t, PartnerRole> neurons;
    for (const auto& e : artifacts.events) neurons.emplace(e.neuron_id, e.source);

    for (const auto& phase : s.phases) {
        const double span_s = static_cast<double>(phase.end_ms - phase.start_ms - exclude_ms) / 1000.0;
        for (const auto& id : synapse_ids) {
            std::vector<PlasticityDecision> decisions;
            double weight_sum = 0.0;
            for (const auto& r : artifacts.plasticity) {
                if (r.synapse_id == id && phase.contains(r.abs_time, exclude_ms)) {
                    decisions.push_back(r.decision);
                    weight_sum += r.weight_after;
                }
            }
            SynapsePhaseStats st{phase.index, id, decision_fractions(decisions), 0.0};
            st.mean_weight = decisions.empty() ? std::nan("") : weight_sum / static_cast<double>(decisions.size());
            s.synapses.push_back(st);
        }
        for (const auto& [id, source] : neurons) {
            std::size_t count = 0;
            for (const auto& e : artifacts.events) {
                const bool spike = e.kind == EventKind::Unused || is_action_potential(e.kind);
                if (e.neuron_id == id && spike && phase.contains(e.abs_time, exclude_ms)) ++count;
            }
            s.neurons.push_back({phase.index, id, source, count,
                                 span_s > 0.0 ? static_cast<double>(count) / span_s : 0.0});
        }
    }
    return s;
}

std::string format_summary(const PhaseSummary& summary) {
    std::string out = "phase,start_ms,end_ms,drive_hz,scope,id,n,frac_ltp,frac_ltd,frac_none,mean_weight,ap_count,rate_hz\n";
    for (const auto& phase : summary.phases) {
        for (const auto& st : summary.synapses) {
            if (st.phase != phase.index) continue;
            out += fmt::format("{},{},{},{},synapse,{},{},{:.4f},{:.4f},{:.4f},{:.6f},,\n", phase.index,
                               phase.start_ms, phase.end_ms, phase.rate_hz, st.synapse_id, st.fractions.n,
                               st.fractions.ltp, st.fractions.ltd, st.fractions.none, st.mean_weight);
        }
        for (const auto& n : summary.neurons) {
            if (n.phase != phase.index) continue;
            out += fmt::format("{},{},{},{},neuron,{}:{},,,,,,{},{:.4f}\n", phase.index, phase.start_ms,
                               phase.end_ms, phase.rate_hz, to_string(n.source), n.neuron_id, n.ap_count,
                               n.rate_hz);
        }
    }
    return out;
}

void write_summary(const PhaseSummary& summary, const std::filesystem::path& dir) {
    write_file(dir / "summary.csv", format_summary(summary));
}

}  // namespace biohybrid
