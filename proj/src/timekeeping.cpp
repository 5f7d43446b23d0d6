#include "biohybrid/timekeeping.hpp"

#include <algorithm>
#include <cmath>

namespace biohybrid {

namespace {
constexpr std::int64_t kModulus = std::int64_t{1} << 24;
constexpr std::int64_t kHalf = std::int64_t{1} << 23;
}  // namespace

std::uint32_t wrap_delta(std::uint32_t later, std::uint32_t earlier) {
    return (later - earlier) & 0xFFFFFFu;
}

Millis unwrap_near(std::uint32_t ts, Millis reference) {
    const std::int64_t ref_mod = ((reference % kModulus) + kModulus) % kModulus;
    std::int64_t diff = static_cast<std::int64_t>(ts & 0xFFFFFFu) - ref_mod;
    if (diff >= kHalf) diff -= kModulus;
    if (diff < -kHalf) diff += kModulus;
    return reference + diff;
}

std::uint32_t PrimaryClock::stamp(Millis now) {
    const auto dt = wrap_delta(to_ts24(now), to_ts24(last_emitted_abs));
    last_emitted_abs = now;
    return dt;
}

Millis primary_to_absolute(HubClock& clock, std::uint32_t dt) {
    clock.last_primary_abs += static_cast<Millis>(dt & 0xFFFFFFu);
    clock.advance_axis(clock.last_primary_abs);
    return clock.last_primary_abs;
}

Millis secondary_to_absolute(HubClock& clock, std::uint32_t ts) {
    const Millis t = unwrap_near(ts, clock.last_primary_abs);
    clock.advance_axis(t);
    return t;
}

void SecondaryClock::reset(std::uint32_t reference_ts, double local_now_ms) {
    t0 = reference_ts & 0xFFFFFFu;
    reset_local_ms = local_now_ms;
    has_reference = true;
}

double SecondaryClock::wall_elapsed(double local_now_ms) const {
    return std::max(0.0, local_now_ms - reset_local_ms);
}

std::uint32_t secondary_report_time(const SecondaryClock& clock, double local_now_ms) {
    const auto elapsed = static_cast<std::uint64_t>(std::llround(clock.wall_elapsed(local_now_ms)));
    return static_cast<std::uint32_t>((clock.t0 + elapsed) & 0xFFFFFFu);
}

}  // namespace biohybrid
