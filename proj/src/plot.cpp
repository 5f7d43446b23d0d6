#include "biohybrid/plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>

namespace biohybrid {
namespace {

constexpr double kWidth = 1000.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kRasterTop = 20.0;
constexpr double kRowHeight = 30.0;
constexpr double kWeightHeight = 220.0;

const char* decision_colour(PlasticityDecision d) {
    switch (d) {
        case PlasticityDecision::LTP: return "#d62728";
        case PlasticityDecision::LTD: return "#1f77b4";
        case PlasticityDecision::NoChange: break;
    }
    return "#999999";
}

}  // namespace

std::string render_svg(const RunArtifacts& art) {
    Millis t_end = art.phases.empty() ? 0 : art.phases.back().end_ms;
    for (const auto& e : art.events) t_end = std::max(t_end, e.abs_time);
    for (const auto& r : art.plasticity) t_end = std::max(t_end, r.abs_time);
    if (t_end <= 0) t_end = 1;

    std::map<std::uint32_t, PartnerRole> neurons;
    for (const auto& e : art.events) neurons.emplace(e.neuron_id, e.source);
    std::map<std::uint32_t, int> row;
    for (const auto& [id, source] : neurons) row.emplace(id, static_cast<int>(row.size()));

    const double plot_w = kWidth - kLeft - kRight;
    const double raster_h = kRowHeight * static_cast<double>(std::max<std::size_t>(neurons.size(), 1));
    const double weight_top = kRasterTop + raster_h + 40.0;
    const double height = weight_top + kWeightHeight + 40.0;
    auto x = [&](Millis t) { return kLeft + plot_w * static_cast<double>(t) / static_cast<double>(t_end); };
    auto y_weight = [&](double w) { return weight_top + kWeightHeight * (1.0 - std::clamp(w, 0.0, 1.0)); };

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
        "font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        kWidth, height);

    for (const auto& ph : art.phases) {
        svg += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1}\" x2=\"{0:.1f}\" y2=\"{2}\" stroke=\"#bbbbbb\" "
                           "stroke-dasharray=\"4,3\"/>\n",
                           x(ph.end_ms), kRasterTop, weight_top + kWeightHeight);
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{} Hz</text>\n",
                           0.5 * (x(ph.start_ms) + x(ph.end_ms)), kRasterTop - 6, ph.rate_hz);
    }

    for (const auto& [id, source] : neurons) {
        const double y = kRasterTop + kRowHeight * row[id];
        svg += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{} {}</text>\n", kLeft - 6,
                           y + kRowHeight * 0.6, to_string(source), id);
    }
    for (const auto& e : art.events) {
        const double y = kRasterTop + kRowHeight * row[e.neuron_id];
        const bool psp = e.kind == EventKind::Psp;
        svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.1f}\" x2=\"{0:.2f}\" y2=\"{2:.1f}\" stroke=\"{3}\"/>\n",
                           x(e.abs_time), y + (psp ? 0.55 : 0.15) * kRowHeight, y + 0.85 * kRowHeight,
                           psp ? "#cccccc" : "black");
    }

    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                       kLeft, weight_top, plot_w, kWeightHeight);
    for (double w : {0.0, 0.5, 1.0}) {
        svg += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{:.1f}</text>\n", kLeft - 6,
                           y_weight(w) + 4, w);
    }
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">time (s)</text>\n",
                       kLeft + plot_w / 2, weight_top + kWeightHeight + 30);
    for (int s = 0; s <= 10; ++s) {
        const Millis t = t_end * s / 10;
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.0f}</text>\n", x(t),
                           weight_top + kWeightHeight + 14, static_cast<double>(t) / 1000.0);
    }

    std::map<std::string, std::vector<const PlasticityRow*>> by_synapse;
    for (const auto& r : art.plasticity) by_synapse[r.synapse_id].push_back(&r);
    int label = 0;
    for (const auto& [id, rows] : by_synapse) {
        std::string points;
        for (const auto* r : rows) points += fmt::format("{:.2f},{:.2f} ", x(r->abs_time), y_weight(r->weight_after));
        svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"#444444\" stroke-width=\"0.5\"/>\n",
                           points);
        for (const auto* r : rows) {
            svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"1.5\" fill=\"{}\"/>\n", x(r->abs_time),
                               y_weight(r->weight_after), decision_colour(r->decision));
        }
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", kLeft + 6,
                           weight_top + 14 + 14 * label++, id);
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace biohybrid
