#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tdc/entropy.hpp"

namespace tdc {

// Sorted (value, fraction) pairs, one per observation, fractions i/n.
struct EmpiricalCdf {
    struct Point {
        uint64_t value;
        double fraction;
    };
    std::vector<Point> points;
};

double shannon_entropy(const Distribution& dist);

EmpiricalCdf empirical_cdf(std::span<const uint64_t> values);

// Quantile-preserving thinning for plotting payloads.
EmpiricalCdf downsample_cdf(const EmpiricalCdf& cdf, size_t max_points = 10000);

// Normalized frequencies over 0..alphabet_bound-1. Values must already
// be inside the bound (escape-map them first).
Distribution histogram(std::span<const uint64_t> values, uint64_t alphabet_bound);

void write_cdf_csv(std::ostream& os, const EmpiricalCdf& cdf);
void write_cdf_json(std::ostream& os, const EmpiricalCdf& cdf);

struct CostRow {
    std::string label;
    double bits;
};

void write_cost_csv(std::ostream& os, std::span<const CostRow> rows);
void write_cost_json(std::ostream& os, std::span<const CostRow> rows);

} // namespace tdc
