#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace biohybrid {

using Rng = std::mt19937_64;

// Independent deterministic stream per (run seed, stream name), so adding a
// consumer never shifts the draws seen by another one.
Rng make_stream(std::uint64_t seed, std::string_view name);

}  // namespace biohybrid
