#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tdc/bitstream.hpp"
#include "tdc/errors.hpp"

namespace tdc {

// Contiguous variable-width partition of [0, total_range): bin i covers
// [bin_start[i], bin_start[i] + 2^bin_width[i]), and each bin's payload
// is its bin_width low bits. Lookup goes through a radix table on 8-bit
// digits, built once at construction.
class BinningTable {
public:
    BinningTable(std::vector<uint64_t> bin_start, std::vector<uint8_t> bin_width);

    static BinningTable from_widths(std::span<const uint8_t> widths);

    size_t bin_count() const { return bin_width_.size(); }
    uint64_t bin_start(size_t i) const { return bin_start_[i]; }
    uint8_t bin_width(size_t i) const { return bin_width_[i]; }
    uint64_t total_range() const { return total_range_; }
    const std::vector<uint8_t>& widths() const { return bin_width_; }

    // Bin index containing value; equivalent to a binary search over
    // bin_start. Throws on value >= total_range.
    uint32_t lookup(uint64_t value) const;

    bool operator==(const BinningTable& o) const {
        return bin_width_ == o.bin_width_;
    }

private:
    void build_radix();

    std::vector<uint64_t> bin_start_;
    std::vector<uint8_t> bin_width_;
    uint64_t total_range_ = 0;

    // Radix nodes: 256 slots each; value >= 0 is a bin index, -1 marks
    // out-of-range, anything else encodes -(child node index)-2.
    struct RadixNode {
        int64_t slot[256];
    };
    std::vector<RadixNode> radix_;
    int top_shift_ = 0;
};

uint32_t bin_lookup(uint64_t value, const BinningTable& table);

// 2^(total_bits - low_bits) equal bins of width low_bits.
BinningTable simple_binning(int total_bits, int low_bits);

// Drops trailing bins no value can reach given the largest observed
// value; the last kept bin keeps its width.
BinningTable truncate_binning(const BinningTable& table, uint64_t max_value);

// Greedy variable-width construction: each bin starts at width 0 and
// grows until it holds more than min_per_bin of the remaining values or
// reaches the end of the range; the final bin rounds its width up so
// coverage reaches max_value + 1.
BinningTable adaptive_binning(std::span<const uint64_t> sorted_values,
                              uint64_t min_per_bin, uint64_t max_value);

// Writes the bin symbol through the supplied entropy coder, then the
// bin_width low bits of (value - bin_start) to the raw sink.
void bin_encode(uint64_t value, const BinningTable& table,
                const std::function<void(uint32_t)>& emit_symbol, BitSink& raw);

// Inverse: the entropy decoder hands back the bin symbol, the raw
// cursor supplies the low bits.
uint64_t bin_decode(const std::function<uint32_t()>& read_symbol,
                    const BinningTable& table, BitCursor& raw);

struct BinningCost {
    double bin_entropy_bits = 0; // Shannon entropy of the bin choice
    double avg_low_bits = 0;     // mean bin_width over the values
    double total_avg_bits = 0;
};

BinningCost binning_cost(const BinningTable& table, std::span<const uint64_t> values);

} // namespace tdc
