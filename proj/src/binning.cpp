#include "tdc/binning.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace tdc {

namespace {

int bit_length(uint64_t v) { return v == 0 ? 0 : 64 - std::countl_zero(v); }

constexpr uint8_t kMaxBinWidth = 57;

} // namespace

BinningTable::BinningTable(std::vector<uint64_t> bin_start,
                           std::vector<uint8_t> bin_width)
    : bin_start_(std::move(bin_start)), bin_width_(std::move(bin_width)) {
    if (bin_start_.empty() || bin_start_.size() != bin_width_.size())
        throw ContractError("BinningTable: empty or mismatched arrays");
    if (bin_start_[0] != 0)
        throw ContractError("BinningTable: first bin must start at 0");
    for (size_t i = 0; i < bin_width_.size(); ++i) {
        if (bin_width_[i] > kMaxBinWidth)
            throw ContractError("BinningTable: bin width exceeds 57");
        uint64_t end = bin_start_[i] + (1ull << bin_width_[i]);
        if (i + 1 < bin_start_.size() && bin_start_[i + 1] != end)
            throw ContractError("BinningTable: bins not contiguous");
        if (i + 1 == bin_start_.size()) total_range_ = end;
    }
    build_radix();
}

BinningTable BinningTable::from_widths(std::span<const uint8_t> widths) {
    std::vector<uint64_t> starts(widths.size());
    uint64_t pos = 0;
    for (size_t i = 0; i < widths.size(); ++i) {
        starts[i] = pos;
        pos += 1ull << widths[i];
    }
    return BinningTable(std::move(starts),
                        std::vector<uint8_t>(widths.begin(), widths.end()));
}

void BinningTable::build_radix() {
    radix_.clear();
    int bits = bit_length(total_range_ - 1);
    int digits = std::max(1, (bits + 7) / 8);
    top_shift_ = (digits - 1) * 8;

    // Breadth-first construction; a node is created only where one
    // 8-bit digit does not determine the bin.
    struct Pending {
        size_t node;
        uint64_t base;
        int shift;
    };
    radix_.push_back(RadixNode{});
    std::vector<Pending> queue{{0, 0, top_shift_}};
    while (!queue.empty()) {
        Pending cur = queue.back();
        queue.pop_back();
        for (int j = 0; j < 256; ++j) {
            uint64_t lo = cur.base + (static_cast<uint64_t>(j) << cur.shift);
            uint64_t hi = lo + (1ull << cur.shift); // exclusive
            if (lo >= total_range_) {
                radix_[cur.node].slot[j] = -1;
                continue;
            }
            hi = std::min(hi, total_range_);
            // first bin intersecting [lo, hi)
            size_t first = std::upper_bound(bin_start_.begin(), bin_start_.end(), lo) -
                           bin_start_.begin() - 1;
            size_t last = std::upper_bound(bin_start_.begin(), bin_start_.end(), hi - 1) -
                          bin_start_.begin() - 1;
            if (first == last) {
                radix_[cur.node].slot[j] = static_cast<int64_t>(first);
            } else {
                size_t child = radix_.size();
                radix_.push_back(RadixNode{});
                radix_[cur.node].slot[j] = -static_cast<int64_t>(child) - 2;
                queue.push_back({child, lo, cur.shift - 8});
            }
        }
    }
}

uint32_t BinningTable::lookup(uint64_t value) const {
    if (value >= total_range_)
        throw MalformedData("bin_lookup: value out of range");
    size_t node = 0;
    int shift = top_shift_;
    for (;;) {
        int digit = static_cast<int>((value >> shift) & 0xFF);
        int64_t entry = radix_[node].slot[digit];
        if (entry >= 0) return static_cast<uint32_t>(entry);
        node = static_cast<size_t>(-entry - 2);
        shift -= 8;
    }
}

uint32_t bin_lookup(uint64_t value, const BinningTable& table) {
    return table.lookup(value);
}

BinningTable simple_binning(int total_bits, int low_bits) {
    if (low_bits < 0 || total_bits < low_bits || total_bits > 57)
        throw ContractError("simple_binning: invalid bit split");
    int bin_bits = total_bits - low_bits;
    if (bin_bits > 26)
        throw ContractError("simple_binning: too many bins");
    size_t count = 1ull << bin_bits;
    std::vector<uint8_t> widths(count, static_cast<uint8_t>(low_bits));
    return BinningTable::from_widths(widths);
}

BinningTable truncate_binning(const BinningTable& table, uint64_t max_value) {
    size_t keep = table.lookup(max_value) + 1;
    std::vector<uint8_t> widths(table.widths().begin(),
                                table.widths().begin() + keep);
    return BinningTable::from_widths(widths);
}

BinningTable adaptive_binning(std::span<const uint64_t> sorted_values,
                              uint64_t min_per_bin, uint64_t max_value) {
    if (sorted_values.empty())
        throw ContractError("adaptive_binning: empty input");
    if (min_per_bin < 1)
        throw ContractError("adaptive_binning: min_per_bin must be >= 1");
    if (sorted_values.back() > max_value)
        throw ContractError("adaptive_binning: values exceed max_value");
    if (max_value >= (1ull << kMaxBinWidth))
        throw ContractError("adaptive_binning: max_value exceeds 57-bit range");

    std::vector<uint8_t> widths;
    uint64_t bin_start = 0;
    size_t pos = 0; // first value not yet covered
    const uint64_t end_of_range = max_value + 1;
    while (bin_start < end_of_range) {
        // Accept the first width holding more than min_per_bin values;
        // the last bin instead grows until coverage reaches the end.
        int w = 0;
        uint64_t bin_end;
        for (;;) {
            bin_end = bin_start + (1ull << w);
            size_t in_bin = std::upper_bound(sorted_values.begin() + pos,
                                             sorted_values.end(), bin_end - 1) -
                            (sorted_values.begin() + pos);
            if (in_bin > min_per_bin) break;
            if (bin_end >= end_of_range) break;
            ++w;
        }
        widths.push_back(static_cast<uint8_t>(w));
        pos = std::upper_bound(sorted_values.begin() + pos, sorted_values.end(),
                               bin_end - 1) -
              sorted_values.begin();
        bin_start = bin_end;
    }
    return BinningTable::from_widths(widths);
}

void bin_encode(uint64_t value, const BinningTable& table,
                const std::function<void(uint32_t)>& emit_symbol, BitSink& raw) {
    uint32_t bin = table.lookup(value);
    emit_symbol(bin);
    raw.write_bits(value - table.bin_start(bin), table.bin_width(bin));
}

uint64_t bin_decode(const std::function<uint32_t()>& read_symbol,
                    const BinningTable& table, BitCursor& raw) {
    uint32_t bin = read_symbol();
    if (bin >= table.bin_count())
        throw MalformedData("bin_decode: bin symbol out of range");
    return table.bin_start(bin) + raw.read_bits(table.bin_width(bin));
}

BinningCost binning_cost(const BinningTable& table, std::span<const uint64_t> values) {
    if (values.empty())
        throw ContractError("binning_cost: empty input");
    std::vector<uint64_t> counts(table.bin_count(), 0);
    for (uint64_t v : values) ++counts[table.lookup(v)];
    const double n = static_cast<double>(values.size());
    BinningCost cost;
    for (size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] == 0) continue;
        double f = static_cast<double>(counts[i]) / n;
        cost.bin_entropy_bits += f * std::log2(1.0 / f);
        cost.avg_low_bits += f * static_cast<double>(table.bin_width(i));
    }
    cost.total_avg_bits = cost.bin_entropy_bits + cost.avg_low_bits;
    return cost;
}

} // namespace tdc
