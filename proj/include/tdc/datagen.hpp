#pragma once

#include <cstdint>
#include <vector>

#include "tdc/entropy.hpp"
#include "tdc/event_model.hpp"

namespace tdc {

// Pulse-count frequencies measured on a 48-channel tracker sample;
// the default alphabet for synthetic pulse counts (values 0..8).
Distribution default_pulses_distribution();

// Same frequencies extended with a final escape slot absorbing the
// residual probability mass, so the ten entries sum to exactly one.
Distribution escape_extended_pulses_distribution();

struct GenParams {
    uint32_t channel_count = 48;
    Distribution pulses_dist = default_pulses_distribution();

    // Per-channel pulse-width model: Gaussian with means spread
    // linearly from width_mean_lo (channel 0) to width_mean_hi
    // (last channel), sd = mean / 10.
    double width_mean_lo = 2000;
    double width_mean_hi = 100000;

    // Gap between pulses on a channel: exponential.
    double distance_mean = 400000;

    // First-activation spread: point mass at start_min with probability
    // start_point_mass, otherwise start_min plus a Pareto tail.
    double start_point_mass = 0.3;
    uint64_t start_min = 10000;
    double start_tail_alpha = 1.2;
    double start_tail_scale = 200000;

    uint64_t max_delta = (1ull << 28) - 1; // clip bound for all deltas
    uint64_t seed = 1;
};

struct GeneratedCorpus {
    std::vector<RelativeEvent> events;
    std::vector<EventHits> hit_events; // same corpus as absolute hits
};

// Deterministic given the seed; each event derives its own generator
// state from (seed, event index), so output does not depend on any
// threading of the caller.
GeneratedCorpus generate_events(const GenParams& params, size_t n);

// GenParams preset whose per-type maxima land in the bit ranges of a
// full-scale tracker corpus: pulses up to 8 (4 bits), start and
// distance in 28-bit range, width in 27-bit range.
GenParams calibrated_corpus_params(uint64_t seed = 7);

} // namespace tdc
