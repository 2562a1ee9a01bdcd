#include "tdc/datagen.hpp"

#include <algorithm>
#include <cmath>

namespace tdc {

namespace {

const double kPulsesFreq[9] = {0.8825, 0.06591, 0.01948, 0.009375,
                               0.01503, 0.00653, 0.00101, 0.00013, 2e-6};

// splitmix64; used both to derive per-event seeds and as the core
// uniform generator so corpora are reproducible across platforms.
uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() { return splitmix64(state_); }

    // uniform in (0, 1]
    double next_unit() {
        uint64_t bits = next_u64() >> 11;
        return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
    }

    double gaussian(double mean, double sd) {
        // Box-Muller; one draw per call keeps the stream simple.
        double u1 = next_unit();
        double u2 = next_unit();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        return mean + sd * z;
    }

    double exponential(double mean) { return -mean * std::log(next_unit()); }

    double pareto(double alpha, double scale) {
        return scale * (std::pow(next_unit(), -1.0 / alpha) - 1.0);
    }

    uint32_t pick(const std::vector<double>& cumulative) {
        double u = next_unit();
        for (uint32_t i = 0; i < cumulative.size(); ++i)
            if (u <= cumulative[i]) return i;
        return static_cast<uint32_t>(cumulative.size() - 1);
    }

private:
    uint64_t state_;
};

uint64_t clip_delta(double v, uint64_t max_delta) {
    if (!(v >= 1.0)) return 1;
    if (v >= static_cast<double>(max_delta)) return max_delta;
    return static_cast<uint64_t>(v);
}

// Events are laid out on a fixed absolute-time grid so successive
// events never interleave and epochs stay within capacity.
constexpr uint64_t kEventSpacing = 1ull << 33;
constexpr uint64_t kBaseTime = 1000;

} // namespace

Distribution default_pulses_distribution() {
    std::vector<double> w(std::begin(kPulsesFreq), std::end(kPulsesFreq));
    return Distribution::from_weights(w);
}

Distribution escape_extended_pulses_distribution() {
    std::vector<double> p(std::begin(kPulsesFreq), std::end(kPulsesFreq));
    double sum = 0;
    for (double v : p) sum += v;
    p.push_back(1.0 - sum);
    return Distribution::from_probabilities(std::move(p));
}

GeneratedCorpus generate_events(const GenParams& params, size_t n) {
    if (n < 1)
        throw ContractError("generate_events: need at least one event");
    if (params.channel_count == 0 || params.channel_count > 128)
        throw ContractError("generate_events: channel count out of range");

    std::vector<double> cumulative;
    {
        double acc = 0;
        for (size_t s = 0; s < params.pulses_dist.size(); ++s) {
            acc += params.pulses_dist[s];
            cumulative.push_back(acc);
        }
        cumulative.back() = 1.0;
    }

    GeneratedCorpus corpus;
    corpus.events.reserve(n);
    corpus.hit_events.reserve(n);

    for (size_t ev_idx = 0; ev_idx < n; ++ev_idx) {
        uint64_t ev_seed = params.seed ^ (0xA24BAED4963EE407ull * (ev_idx + 1));
        Rng rng(ev_seed);

        struct Draft {
            uint8_t channel;
            uint64_t start_raw;
            std::vector<uint64_t> widths;
            std::vector<uint64_t> distances;
        };
        std::vector<Draft> drafts;
        for (uint32_t c = 0; c < params.channel_count; ++c) {
            uint32_t pulses = rng.pick(cumulative);
            if (pulses == 0) continue;
            Draft d;
            d.channel = static_cast<uint8_t>(c);
            double t = params.channel_count > 1
                           ? static_cast<double>(c) / (params.channel_count - 1)
                           : 0.0;
            double mean = params.width_mean_lo +
                          t * (params.width_mean_hi - params.width_mean_lo);
            double raw_start =
                rng.next_unit() < params.start_point_mass
                    ? static_cast<double>(params.start_min)
                    : static_cast<double>(params.start_min) +
                          rng.pareto(params.start_tail_alpha, params.start_tail_scale);
            d.start_raw = clip_delta(raw_start, params.max_delta);
            for (uint32_t p = 0; p < pulses; ++p) {
                d.widths.push_back(
                    clip_delta(rng.gaussian(mean, mean / 10.0), params.max_delta));
                if (p + 1 < pulses)
                    d.distances.push_back(
                        clip_delta(rng.exponential(params.distance_mean), params.max_delta));
            }
            drafts.push_back(std::move(d));
        }
        if (drafts.empty()) {
            // Force one pulse so every event is non-empty; channel 0,
            // modest width, keeps the re-reference invariant intact.
            Draft d;
            d.channel = 0;
            d.start_raw = params.start_min;
            d.widths.push_back(clip_delta(params.width_mean_lo, params.max_delta));
            drafts.push_back(std::move(d));
        }

        // Unique minimum start: exactly one channel must sit at the
        // event reference. Bump ties above the first holder.
        uint64_t min_start = UINT64_MAX;
        for (const Draft& d : drafts) min_start = std::min(min_start, d.start_raw);
        bool seen_min = false;
        for (Draft& d : drafts) {
            if (d.start_raw != min_start) continue;
            if (!seen_min) {
                seen_min = true;
            } else {
                d.start_raw += 1 + (d.channel % 3);
            }
        }

        const uint64_t ref = kBaseTime + ev_idx * kEventSpacing + min_start;
        RelativeEvent rel;
        rel.ref = ref;
        EventHits hits;
        hits.seq = static_cast<uint32_t>(ev_idx & ((1u << 30) - 1));
        for (const Draft& d : drafts) {
            ChannelRecord rec;
            rec.channel = d.channel;
            rec.start = d.start_raw - min_start;
            rec.widths = d.widths;
            rec.distances = d.distances;
            uint64_t rise = ref + rec.start;
            for (size_t p = 0; p < rec.widths.size(); ++p) {
                uint64_t fall = rise + rec.widths[p];
                hits.hits.push_back(Hit{d.channel, Edge::rising, rise});
                hits.hits.push_back(Hit{d.channel, Edge::falling, fall});
                if (p < rec.distances.size()) rise = fall + rec.distances[p];
            }
            rel.channels.push_back(std::move(rec));
        }
        std::sort(rel.channels.begin(), rel.channels.end(),
                  [](const ChannelRecord& a, const ChannelRecord& b) {
                      return a.channel < b.channel;
                  });
        std::sort(hits.hits.begin(), hits.hits.end(),
                  [](const Hit& a, const Hit& b) {
                      if (a.time != b.time) return a.time < b.time;
                      if (a.channel != b.channel) return a.channel < b.channel;
                      return a.edge == Edge::rising && b.edge == Edge::falling;
                  });
        corpus.events.push_back(std::move(rel));
        corpus.hit_events.push_back(std::move(hits));
    }
    return corpus;
}

GenParams calibrated_corpus_params(uint64_t seed) {
    GenParams p;
    p.seed = seed;
    // Width maxima in the 27-bit range: the widest channel draws around
    // 1.05 * 2^26 with sd mean/10, so the corpus maximum clears 2^26
    // with huge margin while 2^27 sits nine sigmas away.
    p.width_mean_lo = 1 << 21;
    p.width_mean_hi = 1.05 * static_cast<double>(1ull << 26);
    // Start and distance maxima in the 28-bit range.
    p.start_tail_scale = static_cast<double>(1ull << 22);
    p.start_tail_alpha = 1.1;
    p.distance_mean = static_cast<double>(1ull << 25);
    p.max_delta = (1ull << 28) - 1;
    // Raise the tail of the pulse-count distribution enough that the
    // maximum count of 8 actually appears in a 10^4-event corpus.
    std::vector<double> w(std::begin(kPulsesFreq), std::end(kPulsesFreq));
    w[8] = 1e-4;
    p.pulses_dist = Distribution::from_weights(w);
    return p;
}

} // namespace tdc
