#pragma once

#include <cstdint>

namespace biohybrid {

// Milliseconds on an unbounded axis. Only the wire carries 24-bit values.
using Millis = std::int64_t;

inline std::uint32_t to_ts24(Millis t) {
    return static_cast<std::uint32_t>(static_cast<std::uint64_t>(t) & 0xFFFFFFu);
}

// (later - earlier) mod 2^24. Unambiguous while the true interval is < 2^23 ms.
std::uint32_t wrap_delta(std::uint32_t later, std::uint32_t earlier);

// Maps a 24-bit timestamp onto the absolute axis, picking the value nearest to
// `reference` (within +-2^23 ms).
Millis unwrap_near(std::uint32_t ts, Millis reference);

// Sender side of "general relative time": every packet carries the interval
// since the previous emission, whichever neuron produced it.
struct PrimaryClock {
    Millis last_emitted_abs = 0;

    // Returns the delta to put on the wire and records `now` as the last emission.
    std::uint32_t stamp(Millis now);
};

struct HubClock {
    Millis axis_now = 0;
    Millis last_primary_abs = 0;

    void advance_axis(Millis t) {
        if (t > axis_now) axis_now = t;
    }
};

Millis primary_to_absolute(HubClock& clock, std::uint32_t dt);

// Secondary timestamps are already absolute; the hub only undoes the 24-bit wrap.
Millis secondary_to_absolute(HubClock& clock, std::uint32_t ts);

// Reset-relative clock of the secondary partner. Before any reference arrives
// the clock counts from session start (t0 = 0, reset at local time 0).
struct SecondaryClock {
    std::uint32_t t0 = 0;
    double reset_local_ms = 0.0;
    bool has_reference = false;

    void reset(std::uint32_t reference_ts, double local_now_ms);
    double wall_elapsed(double local_now_ms) const;
};

std::uint32_t secondary_report_time(const SecondaryClock& clock, double local_now_ms);

}  // namespace biohybrid
