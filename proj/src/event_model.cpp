#include "tdc/event_model.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "json.hpp"

namespace tdc {

namespace {

constexpr uint32_t kTagMain = 0u;
constexpr uint32_t kTagEpoch = 1u;
constexpr uint32_t kTagHeader = 2u;
constexpr uint32_t kSeqMask = (1u << 30) - 1;

uint32_t word_at(std::span<const uint8_t> bytes, size_t word) {
    size_t i = word * 4;
    return static_cast<uint32_t>(bytes[i]) |
           (static_cast<uint32_t>(bytes[i + 1]) << 8) |
           (static_cast<uint32_t>(bytes[i + 2]) << 16) |
           (static_cast<uint32_t>(bytes[i + 3]) << 24);
}

void push_word(std::vector<uint8_t>& out, uint32_t w) {
    out.push_back(static_cast<uint8_t>(w));
    out.push_back(static_cast<uint8_t>(w >> 8));
    out.push_back(static_cast<uint8_t>(w >> 16));
    out.push_back(static_cast<uint8_t>(w >> 24));
}

int bit_length(uint64_t v) { return v == 0 ? 0 : 64 - std::countl_zero(v); }

} // namespace

std::vector<EventHits> parse_legacy(std::span<const uint8_t> bytes) {
    if (bytes.size() % 4 != 0)
        throw MalformedData("parse_legacy: byte length not a multiple of 4");

    std::vector<EventHits> events;
    uint64_t epoch = 0;
    bool have_event = false;
    bool have_seq = false;
    uint32_t expected_seq = 0;

    const size_t words = bytes.size() / 4;
    for (size_t i = 0; i < words; ++i) {
        uint32_t w = word_at(bytes, i);
        uint32_t tag = w >> 30;
        switch (tag) {
        case kTagHeader: {
            uint32_t seq = w & kSeqMask;
            if (have_seq && seq != expected_seq)
                throw MalformedData("parse_legacy: non-contiguous event sequence at word " +
                                    std::to_string(i));
            have_seq = true;
            expected_seq = (seq + 1) & kSeqMask;
            events.push_back(EventHits{seq, {}});
            have_event = true;
            break;
        }
        case kTagEpoch: {
            epoch = w & ((1u << 28) - 1);
            break;
        }
        case kTagMain: {
            if (!have_event)
                throw MalformedData("parse_legacy: hit before first event header at word " +
                                    std::to_string(i));
            uint32_t fine = w & 0x3FF;
            uint32_t coarse = (w >> 10) & 0x7FF;
            uint8_t channel = static_cast<uint8_t>((w >> 21) & 0x7F);
            Edge edge = ((w >> 28) & 1) ? Edge::rising : Edge::falling;
            if (fine >= kTicksPerCoarse)
                throw MalformedData("parse_legacy: fine_time out of range at word " +
                                    std::to_string(i));
            uint64_t time = fine + kTicksPerCoarse * (coarse + kCoarsePerEpoch * epoch);
            events.back().hits.push_back(Hit{channel, edge, time});
            break;
        }
        default:
            throw MalformedData("parse_legacy: unknown word tag at word " +
                                std::to_string(i));
        }
    }
    return events;
}

void LegacyWriter::write_event(const EventHits& event, std::vector<uint8_t>& out) {
    push_word(out, (kTagHeader << 30) | (event.seq & kSeqMask));
    for (const Hit& h : event.hits) {
        uint64_t epoch = h.time / kTicksPerEpoch;
        if (epoch > kMaxEpoch)
            throw ContractError("write_legacy: time exceeds epoch capacity");
        if (epoch != current_epoch_) {
            push_word(out, (kTagEpoch << 30) | static_cast<uint32_t>(epoch));
            current_epoch_ = epoch;
        }
        uint64_t rem = h.time % kTicksPerEpoch;
        uint32_t coarse = static_cast<uint32_t>(rem / kTicksPerCoarse);
        uint32_t fine = static_cast<uint32_t>(rem % kTicksPerCoarse);
        uint32_t w = (kTagMain << 30) |
                     (static_cast<uint32_t>(h.edge == Edge::rising) << 28) |
                     (static_cast<uint32_t>(h.channel & 0x7F) << 21) |
                     (coarse << 10) | fine;
        push_word(out, w);
    }
}

std::vector<uint8_t> write_legacy(std::span<const EventHits> events) {
    std::vector<uint8_t> out;
    LegacyWriter writer;
    for (const EventHits& ev : events) writer.write_event(ev, out);
    return out;
}

PairResult pair_and_filter(const EventHits& event, uint64_t max_width) {
    // Stable partition by channel, keeping time order within each.
    std::map<uint8_t, std::vector<Hit>> per_channel;
    for (const Hit& h : event.hits) per_channel[h.channel].push_back(h);

    PairResult result;
    for (auto& [channel, hits] : per_channel) {
        std::stable_sort(hits.begin(), hits.end(),
                         [](const Hit& a, const Hit& b) { return a.time < b.time; });
        ChannelPulses cp;
        cp.channel = channel;
        const Hit* pending = nullptr;
        uint64_t prev_fall = 0;
        bool have_prev = false;
        for (const Hit& h : hits) {
            if (h.edge == Edge::rising) {
                if (pending) {
                    result.rejects.push_back(*pending); // two successive risings
                    pending = &h;
                } else if (have_prev && h.time <= prev_fall) {
                    result.rejects.push_back(h); // zero gap to previous pulse
                } else {
                    pending = &h;
                }
            } else {
                if (!pending) {
                    result.rejects.push_back(h); // falling with nothing pending
                    continue;
                }
                uint64_t width = h.time - pending->time;
                if (width == 0 || width > max_width) {
                    result.rejects.push_back(*pending);
                    result.rejects.push_back(h);
                } else {
                    cp.pulses.push_back(Pulse{pending->time, h.time});
                    prev_fall = h.time;
                    have_prev = true;
                }
                pending = nullptr;
            }
        }
        if (pending) result.rejects.push_back(*pending);
        if (!cp.pulses.empty()) result.channels.push_back(std::move(cp));
    }
    return result;
}

RelativeEvent to_relative(std::span<const ChannelPulses> channels) {
    RelativeEvent ev;
    bool any = false;
    uint64_t ref = UINT64_MAX;
    for (const ChannelPulses& cp : channels) {
        for (const Pulse& p : cp.pulses) {
            any = true;
            ref = std::min(ref, p.rise);
        }
    }
    if (!any) return ev; // empty-event marker
    ev.ref = ref;
    for (const ChannelPulses& cp : channels) {
        if (cp.pulses.empty()) continue;
        ChannelRecord rec;
        rec.channel = cp.channel;
        rec.start = cp.pulses.front().rise - ref;
        for (size_t i = 0; i < cp.pulses.size(); ++i) {
            const Pulse& p = cp.pulses[i];
            if (p.fall <= p.rise)
                throw ContractError("to_relative: non-positive pulse width");
            rec.widths.push_back(p.fall - p.rise);
            if (i + 1 < cp.pulses.size()) {
                if (cp.pulses[i + 1].rise <= p.fall)
                    throw ContractError("to_relative: non-positive pulse distance");
                rec.distances.push_back(cp.pulses[i + 1].rise - p.fall);
            }
        }
        ev.channels.push_back(std::move(rec));
    }
    std::sort(ev.channels.begin(), ev.channels.end(),
              [](const ChannelRecord& a, const ChannelRecord& b) {
                  return a.channel < b.channel;
              });
    return ev;
}

std::vector<ChannelPulses> from_relative(const RelativeEvent& event) {
    std::vector<ChannelPulses> out;
    size_t zero_starts = 0;
    for (const ChannelRecord& rec : event.channels) {
        if (rec.widths.empty())
            throw MalformedData("from_relative: channel record with no pulses");
        if (rec.distances.size() + 1 != rec.widths.size())
            throw MalformedData("from_relative: width/distance count mismatch");
        if (rec.start == 0) ++zero_starts;
        ChannelPulses cp;
        cp.channel = rec.channel;
        uint64_t rise = event.ref + rec.start;
        for (size_t i = 0; i < rec.widths.size(); ++i) {
            if (rec.widths[i] == 0)
                throw MalformedData("from_relative: zero width");
            uint64_t fall = rise + rec.widths[i];
            cp.pulses.push_back(Pulse{rise, fall});
            if (i < rec.distances.size()) {
                if (rec.distances[i] == 0)
                    throw MalformedData("from_relative: zero distance");
                rise = fall + rec.distances[i];
            }
        }
        out.push_back(std::move(cp));
    }
    if (!event.channels.empty() && zero_starts != 1)
        throw MalformedData("from_relative: event must have exactly one zero start");
    return out;
}

FixedCost fixed_cost(std::span<const RelativeEvent> events, uint32_t channel_count) {
    uint64_t max_pulses = 0, max_start = 0, max_width = 0, max_distance = 0;
    uint64_t n_starts = 0, n_widths = 0, n_distances = 0;
    for (const RelativeEvent& ev : events) {
        for (const ChannelRecord& rec : ev.channels) {
            max_pulses = std::max<uint64_t>(max_pulses, rec.pulse_count());
            max_start = std::max(max_start, rec.start);
            ++n_starts;
            for (uint64_t w : rec.widths) max_width = std::max(max_width, w);
            for (uint64_t d : rec.distances) max_distance = std::max(max_distance, d);
            n_widths += rec.widths.size();
            n_distances += rec.distances.size();
        }
    }
    auto bits_for = [](uint64_t max) { return std::max(1, bit_length(max)); };
    FixedCost cost;
    cost.pulses_bits = bits_for(max_pulses);
    cost.start_bits = bits_for(max_start);
    cost.width_bits = bits_for(max_width);
    cost.distance_bits = bits_for(max_distance);
    const double n = events.empty() ? 1.0 : static_cast<double>(events.size());
    cost.pulses_per_event = static_cast<double>(channel_count);
    cost.starts_per_event = static_cast<double>(n_starts) / n;
    cost.widths_per_event = static_cast<double>(n_widths) / n;
    cost.distances_per_event = static_cast<double>(n_distances) / n;
    cost.total_bits_per_event = cost.pulses_bits * cost.pulses_per_event +
                                cost.start_bits * cost.starts_per_event +
                                cost.width_bits * cost.widths_per_event +
                                cost.distance_bits * cost.distances_per_event;
    return cost;
}

std::string relative_event_to_json(const RelativeEvent& event) {
    nlohmann::json channels = nlohmann::json::array();
    for (const ChannelRecord& rec : event.channels) {
        channels.push_back({{"ch", rec.channel},
                            {"pulses", rec.pulse_count()},
                            {"start", rec.start},
                            {"widths", rec.widths},
                            {"distances", rec.distances}});
    }
    nlohmann::json j{{"ref", event.ref}, {"channels", channels}};
    return j.dump();
}

RelativeEvent relative_event_from_json(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line);
    RelativeEvent ev;
    ev.ref = j.at("ref").get<uint64_t>();
    for (const auto& c : j.at("channels")) {
        ChannelRecord rec;
        rec.channel = c.at("ch").get<uint8_t>();
        rec.start = c.at("start").get<uint64_t>();
        rec.widths = c.at("widths").get<std::vector<uint64_t>>();
        rec.distances = c.at("distances").get<std::vector<uint64_t>>();
        ev.channels.push_back(std::move(rec));
    }
    return ev;
}

} // namespace tdc
