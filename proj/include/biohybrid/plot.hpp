#pragma once

#include "biohybrid/experiment.hpp"

#include <string>

namespace biohybrid {

// Spike raster (one row per neuron, PSPs as short grey ticks) above the weight
// trajectory of every synapse, coloured by decision: LTP red, LTD blue,
// no change grey. Phase boundaries are drawn as dashed lines.
std::string render_svg(const RunArtifacts& artifacts);

}  // namespace biohybrid
