#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tdc/errors.hpp"

namespace tdc {

// Absolute times are in 10 ps ticks:
//   time = fine + 500 * (coarse + 2048 * epoch)
// with fine in 0..499, coarse in 0..2047, epoch in 0..2^28-1.
constexpr uint64_t kTicksPerCoarse = 500;
constexpr uint64_t kCoarsePerEpoch = 2048;
constexpr uint64_t kTicksPerEpoch = kTicksPerCoarse * kCoarsePerEpoch;
constexpr uint64_t kMaxEpoch = (1ull << 28) - 1;
constexpr uint64_t kMaxDelta = (1ull << 57) - 1;

// Word layout (32-bit little-endian words, tag in bits [31:30]):
//   00 main:   [29] reserved, [28] edge, [27:21] channel,
//              [20:10] coarse, [9:0] fine
//   01 epoch:  [29:28] reserved, [27:0] epoch
//   10 header: [29:0] event sequence number; sequence numbers increment
//              by one (mod 2^30) across the stream
enum class Edge : uint8_t { falling = 0, rising = 1 };

struct Hit {
    uint8_t channel = 0; // 0..127
    Edge edge = Edge::rising;
    uint64_t time = 0; // absolute, 10 ps ticks

    bool operator==(const Hit&) const = default;
};

struct EventHits {
    uint32_t seq = 0;
    std::vector<Hit> hits; // time-sorted

    bool operator==(const EventHits&) const = default;
};

struct Pulse {
    uint64_t rise = 0;
    uint64_t fall = 0;

    bool operator==(const Pulse&) const = default;
};

struct ChannelPulses {
    uint8_t channel = 0;
    std::vector<Pulse> pulses;

    bool operator==(const ChannelPulses&) const = default;
};

struct ChannelRecord {
    uint8_t channel = 0;
    uint64_t start = 0;               // first rise minus ref
    std::vector<uint64_t> widths;     // one per pulse, > 0
    std::vector<uint64_t> distances;  // pulses-1 entries, > 0

    uint32_t pulse_count() const { return static_cast<uint32_t>(widths.size()); }
    bool operator==(const ChannelRecord&) const = default;
};

// Relative representation of one event. Only channels with at least one
// pulse are listed (ascending); an event with no channels is the
// explicit empty-event marker. Exactly one channel of a non-empty event
// has start == 0.
struct RelativeEvent {
    uint64_t ref = 0;
    std::vector<ChannelRecord> channels;

    bool empty() const { return channels.empty(); }
    bool operator==(const RelativeEvent&) const = default;
};

std::vector<EventHits> parse_legacy(std::span<const uint8_t> bytes);
std::vector<uint8_t> write_legacy(std::span<const EventHits> events);

// Incremental legacy emission; carries the epoch across chunks so a
// stream written piecewise is byte-identical to a one-shot write.
class LegacyWriter {
public:
    void write_event(const EventHits& event, std::vector<uint8_t>& out);

private:
    uint64_t current_epoch_ = 0;
};

constexpr uint64_t kDefaultMaxPulseWidth = 1ull << 20; // ~10 us

struct PairResult {
    std::vector<ChannelPulses> channels; // ascending channel
    std::vector<Hit> rejects;            // unpaired or filtered hits
};

// Greedy rising->falling pairing per channel. A rising edge followed by
// another rising rejects the first; a falling edge with no pending
// rising is rejected; zero-width and wider-than-max pulses are rejected
// whole, as is a rising edge landing exactly on the previous fall.
PairResult pair_and_filter(const EventHits& event,
                           uint64_t max_width = kDefaultMaxPulseWidth);

RelativeEvent to_relative(std::span<const ChannelPulses> channels);
std::vector<ChannelPulses> from_relative(const RelativeEvent& event);

struct FixedCost {
    int pulses_bits = 0;
    int start_bits = 0;
    int width_bits = 0;
    int distance_bits = 0;
    double pulses_per_event = 0;   // channel_count (one count per channel)
    double starts_per_event = 0;
    double widths_per_event = 0;
    double distances_per_event = 0;
    double total_bits_per_event = 0;
};

// Fixed-length coding cost: floor(log2(max)) + 1 bits per value type,
// times the average number of values of that type per event.
FixedCost fixed_cost(std::span<const RelativeEvent> events, uint32_t channel_count);

// One-line JSON rendering for debug dumps.
std::string relative_event_to_json(const RelativeEvent& event);
RelativeEvent relative_event_from_json(const std::string& line);

} // namespace tdc
