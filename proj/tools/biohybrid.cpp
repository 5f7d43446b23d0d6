#include "biohybrid/error.hpp"
#include "biohybrid/experiment.hpp"
#include "biohybrid/plot.hpp"
#include "biohybrid/scenarios.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>

using namespace biohybrid;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct RunOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void add_run_options(CLI::App* cmd, RunOptions& o, bool out_required) {
    cmd->add_option("--config", o.config, "INI configuration (defaults to the canned experiment)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Override run.seed");
    auto* out = cmd->add_option("--out", o.out, "Output directory");
    if (out_required) out->required();
}

RunConfig resolve(const RunOptions& o) {
    RunConfig cfg = o.config.empty() ? RunConfig::canned() : load_run_config(o.config);
    if (o.seed) cfg.seed = *o.seed;
    if (!o.out.empty()) cfg.out_dir = o.out;
    return cfg;
}

void run_node(PartnerRole role, const RunOptions& o, double linger_ms, const std::string& hub_addr) {
    RunConfig cfg = resolve(o);
    if (!hub_addr.empty()) cfg.hub_addr = hub_addr;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    spdlog::info("{} node up for {:.1f} s", to_string(role), cfg.schedule.total_ms() / 1000.0);
    const auto r = run_udp_node(role, cfg, linger_ms, &g_stop);
    spdlog::info("{} node done: {} packets in, {} out, {} dropped", to_string(role), r.stats.deliveries, r.sent,
                 r.dropped);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
    if (!out) throw Error(Errc::OutputIoError, "cannot write " + path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bio-hybrid spiking network simulator"};
    app.require_subcommand(1);
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

    RunOptions sim_opts;
    auto* sim = app.add_subcommand("run-sim", "Run the three partners in simulated time");
    add_run_options(sim, sim_opts, true);

    RunOptions node_opts;
    double linger_ms = 2000.0;
    std::string hub_addr;
    auto* hub = app.add_subcommand("run-hub", "Run the memristive hub over UDP");
    auto* primary = app.add_subcommand("run-primary", "Run the artificial neurons over UDP");
    auto* secondary = app.add_subcommand("run-secondary", "Run the biological neuron model over UDP");
    for (auto* cmd : {hub, primary, secondary}) {
        add_run_options(cmd, node_opts, false);
        cmd->add_option("--linger-ms", linger_ms, "Keep receiving this long after the schedule ends");
    }
    for (auto* cmd : {primary, secondary}) cmd->add_option("--hub-addr", hub_addr, "Hub address host:port");

    std::string in_dir;
    std::int64_t exclude_ms = 2000;
    auto* summ = app.add_subcommand("summarize", "Phase summary of a finished run");
    summ->add_option("--in", in_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
    summ->add_option("--exclude-ms", exclude_ms, "Settling time ignored at the start of each phase");

    std::string suite_path, suite_out;
    auto* scen = app.add_subcommand("run-scenarios", "Run a scenario suite and compare the runs");
    scen->add_option("--suite", suite_path, "Suite file (defaults to the built-in suite)")->check(CLI::ExistingFile);
    scen->add_option("--out", suite_out, "Output directory")->required();

    double target_hz = 2.0, lo = 16.0, hi = 20.0, step = 0.25, cal_seconds = 200.0;
    RunOptions cal_opts;
    auto* cal = app.add_subcommand("calibrate-anpost", "Find the background drive for a target spontaneous rate");
    cal->add_option("--config", cal_opts.config, "INI configuration")->check(CLI::ExistingFile);
    cal->add_option("--target-hz", target_hz, "Target spontaneous rate");
    cal->add_option("--lo", lo, "Lowest background drive in the sweep");
    cal->add_option("--hi", hi, "Highest background drive in the sweep");
    cal->add_option("--step", step, "Sweep step");
    cal->add_option("--seconds", cal_seconds, "Simulated time per measurement");

    std::string plot_out;
    auto* plot = app.add_subcommand("plot", "Render a raster and weight plot as SVG");
    plot->add_option("--in", in_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
    plot->add_option("--out", plot_out, "SVG file (defaults to <in>/run.svg)");

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(spdlog::level::from_str(log_level));

    try {
        if (*sim) {
            const RunConfig cfg = resolve(sim_opts);
            const auto t0 = std::chrono::steady_clock::now();
            const auto art = run_experiment(cfg);
            const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            spdlog::info("{:.1f} s simulated in {:.2f} s; {} events, {} plasticity rows written to {}",
                         cfg.schedule.total_ms() / 1000.0, wall, art.events.size(), art.plasticity.size(),
                         cfg.out_dir.string());
        } else if (*hub || *primary || *secondary) {
            const PartnerRole role =
                *hub ? PartnerRole::Synapse : *primary ? PartnerRole::Primary : PartnerRole::Secondary;
            run_node(role, node_opts, linger_ms, hub_addr);
        } else if (*summ) {
            std::cout << format_summary(summarize(read_artifacts(in_dir), exclude_ms));
        } else if (*scen) {
            const auto suite = suite_path.empty() ? default_suite() : load_suite(suite_path);
            const auto report = run_scenario_suite(suite, suite_out);
            std::cout << format_report(report);
            return report.all_match() ? 0 : 2;
        } else if (*cal) {
            const RunConfig cfg = cal_opts.config.empty() ? RunConfig::canned() : load_run_config(cal_opts.config);
            const auto result = calibrate_background(cfg.anpost, target_hz, lo, hi, step, cal_seconds);
            std::cout << "i_background,rate_hz\n";
            for (const auto& p : result.sweep) std::cout << fmt::format("{:.4f},{:.4f}\n", p.i_background, p.rate_hz);
            std::cout << fmt::format("# calibrated i_background = {:.4f} ({:.4f} Hz)\n", result.i_background,
                                     result.rate_hz);
        } else if (*plot) {
            write_text(plot_out.empty() ? in_dir + "/run.svg" : plot_out, render_svg(read_artifacts(in_dir)));
        }
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
