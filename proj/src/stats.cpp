#include "tdc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "json.hpp"

namespace tdc {

double shannon_entropy(const Distribution& dist) {
    double h = 0;
    for (size_t s = 0; s < dist.size(); ++s)
        if (dist[s] > 0) h += dist[s] * std::log2(1.0 / dist[s]);
    return h;
}

EmpiricalCdf empirical_cdf(std::span<const uint64_t> values) {
    if (values.empty())
        throw ContractError("empirical_cdf: empty input");
    std::vector<uint64_t> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    EmpiricalCdf cdf;
    cdf.points.reserve(sorted.size());
    const double n = static_cast<double>(sorted.size());
    for (size_t i = 0; i < sorted.size(); ++i)
        cdf.points.push_back({sorted[i], static_cast<double>(i + 1) / n});
    return cdf;
}

EmpiricalCdf downsample_cdf(const EmpiricalCdf& cdf, size_t max_points) {
    if (max_points == 0 || cdf.points.size() <= max_points) return cdf;
    EmpiricalCdf out;
    out.points.reserve(max_points);
    const size_t n = cdf.points.size();
    for (size_t i = 0; i < max_points; ++i) {
        size_t idx = (i + 1) * n / max_points - 1;
        out.points.push_back(cdf.points[idx]);
    }
    out.points.back() = cdf.points.back();
    return out;
}

Distribution histogram(std::span<const uint64_t> values, uint64_t alphabet_bound) {
    if (alphabet_bound == 0)
        throw ContractError("histogram: empty alphabet");
    std::vector<double> counts(alphabet_bound, 0.0);
    for (uint64_t v : values) {
        if (v >= alphabet_bound)
            throw ContractError("histogram: value outside alphabet bound");
        counts[v] += 1.0;
    }
    return Distribution::from_weights(counts);
}

void write_cdf_csv(std::ostream& os, const EmpiricalCdf& cdf) {
    os << "value,fraction\n";
    for (const auto& p : cdf.points) os << p.value << ',' << p.fraction << '\n';
}

void write_cdf_json(std::ostream& os, const EmpiricalCdf& cdf) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : cdf.points)
        arr.push_back({{"value", p.value}, {"fraction", p.fraction}});
    os << arr.dump() << '\n';
}

void write_cost_csv(std::ostream& os, std::span<const CostRow> rows) {
    os << "type,bits\n";
    for (const auto& r : rows) os << r.label << ',' << r.bits << '\n';
}

void write_cost_json(std::ostream& os, std::span<const CostRow> rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows)
        arr.push_back({{"type", r.label}, {"bits", r.bits}});
    os << arr.dump() << '\n';
}

} // namespace tdc
