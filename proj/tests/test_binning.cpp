#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "tdc/binning.hpp"

using namespace tdc;

namespace {

uint32_t binary_search_lookup(const BinningTable& t, uint64_t v) {
    uint32_t lo = 0, hi = (uint32_t)t.bin_count() - 1;
    while (lo < hi) {
        uint32_t mid = (lo + hi + 1) / 2;
        if (t.bin_start(mid) <= v) lo = mid;
        else hi = mid - 1;
    }
    return lo;
}

BinningTable random_table(std::mt19937_64& rng, int max_bins, int max_width) {
    size_t bins = 1 + rng() % max_bins;
    std::vector<uint8_t> widths(bins);
    for (auto& w : widths) w = (uint8_t)(rng() % (max_width + 1));
    return BinningTable::from_widths(widths);
}

} // namespace

TEST_CASE("simple binning splits the range evenly") {
    SUBCASE("28 bits with 24 low bits") {
        BinningTable t = simple_binning(28, 24);
        CHECK(t.bin_count() == 16);
        for (size_t i = 0; i < t.bin_count(); ++i) CHECK(t.bin_width(i) == 24);
        CHECK(t.total_range() == 1ull << 28);
        // truncated to the largest start actually observed
        BinningTable cut = truncate_binning(t, (15ull << 24) - 123);
        CHECK(cut.bin_count() == 15);
    }
    SUBCASE("degenerate single bin") {
        BinningTable t = simple_binning(12, 12);
        CHECK(t.bin_count() == 1);
        CHECK(t.bin_width(0) == 12);
    }
    SUBCASE("three bits, one low bit") {
        BinningTable t = simple_binning(3, 1);
        CHECK(t.bin_count() == 4);
        for (size_t i = 0; i < 4; ++i) {
            CHECK(t.bin_start(i) == 2 * i);
            CHECK(t.bin_width(i) == 1);
        }
    }
}

TEST_CASE("adaptive binning") {
    SUBCASE("all-zero values make a dedicated zero bin") {
        std::vector<uint64_t> values(100, 0);
        BinningTable t = adaptive_binning(values, 10, 255);
        CHECK(t.bin_start(0) == 0);
        CHECK(t.bin_width(0) == 0);
        CHECK(t.total_range() >= 256);
    }
    SUBCASE("point mass at zero plus coverage") {
        std::vector<uint64_t> values(50, 0);
        BinningTable t = adaptive_binning(values, 1, 1023);
        CHECK(t.bin_width(0) == 0);
        CHECK(t.lookup(0) == 0);
        CHECK(t.total_range() >= 1024);
    }
    SUBCASE("uniform values approach the raw bit cost") {
        std::mt19937_64 rng(41);
        const int k = 12;
        std::vector<uint64_t> values(20000);
        for (auto& v : values) v = rng() % (1ull << k);
        std::sort(values.begin(), values.end());
        BinningTable t = adaptive_binning(values, 4000, (1ull << k) - 1);
        BinningCost cost = binning_cost(t, values);
        CHECK(std::abs(cost.total_avg_bits - k) < 0.1);
    }
    SUBCASE("partition property on random inputs") {
        std::mt19937_64 rng(43);
        for (int iter = 0; iter < 30; ++iter) {
            std::vector<uint64_t> values(1 + rng() % 500);
            uint64_t max_value = 1 + rng() % 100000;
            for (auto& v : values) v = rng() % (max_value + 1);
            std::sort(values.begin(), values.end());
            BinningTable t = adaptive_binning(values, 1 + rng() % 64, max_value);
            CHECK(t.total_range() >= max_value + 1);
            for (size_t i = 0; i + 1 < t.bin_count(); ++i)
                CHECK(t.bin_start(i + 1) ==
                      t.bin_start(i) + (1ull << t.bin_width(i)));
            for (uint64_t v : values) {
                uint32_t b = t.lookup(v);
                CHECK(t.bin_start(b) <= v);
                CHECK(v < t.bin_start(b) + (1ull << t.bin_width(b)));
            }
        }
    }
    SUBCASE("empty input is rejected") {
        CHECK_THROWS_AS(adaptive_binning({}, 4, 100), ContractError);
    }
}

TEST_CASE("radix lookup equals binary search") {
    std::mt19937_64 rng(47);
    for (int iter = 0; iter < 40; ++iter) {
        BinningTable t = random_table(rng, 64, 20);
        for (int probe = 0; probe < 200; ++probe) {
            uint64_t v = rng() % t.total_range();
            CHECK(t.lookup(v) == binary_search_lookup(t, v));
        }
        for (size_t i = 0; i < t.bin_count(); ++i)
            CHECK(t.lookup(t.bin_start(i)) == i); // boundary case
        CHECK(t.lookup(t.total_range() - 1) == t.bin_count() - 1);
        CHECK_THROWS_AS(t.lookup(t.total_range()), MalformedData);
    }
}

TEST_CASE("radix lookup handles wide ranges") {
    BinningTable t = BinningTable::from_widths(std::vector<uint8_t>{0, 40, 57});
    CHECK(t.lookup(0) == 0);
    CHECK(t.lookup(1) == 1);
    CHECK(t.lookup(1ull << 40) == 1);        // bin 1 ends at 1 + 2^40
    CHECK(t.lookup((1ull << 40) + 1) == 2);
    CHECK(t.lookup(t.total_range() - 1) == 2);
}

TEST_CASE("bin encode/decode round trip") {
    SUBCASE("one bin of width w is a raw path") {
        BinningTable t = BinningTable::from_widths(std::vector<uint8_t>{5});
        BitSink raw;
        std::vector<uint32_t> symbols;
        for (uint64_t v = 0; v < 32; ++v)
            bin_encode(v, t, [&](uint32_t s) { symbols.push_back(s); }, raw);
        CHECK(raw.bit_count() == 32 * 5);
        for (uint32_t s : symbols) CHECK(s == 0);
        BitBuffer cursor_buf = raw.finish();
        BitCursor cursor(cursor_buf, BitCursor::Direction::forward);
        size_t next = 0;
        for (uint64_t v = 0; v < 32; ++v)
            CHECK(bin_decode([&] { return symbols[next++]; }, t, cursor) == v);
    }
    SUBCASE("exhaustive round trip over a random small table") {
        std::mt19937_64 rng(53);
        BinningTable t = random_table(rng, 12, 6);
        BitSink raw;
        std::vector<uint32_t> symbols;
        for (uint64_t v = 0; v < t.total_range(); ++v)
            bin_encode(v, t, [&](uint32_t s) { symbols.push_back(s); }, raw);
        BitBuffer cursor_buf = raw.finish();
        BitCursor cursor(cursor_buf, BitCursor::Direction::forward);
        size_t next = 0;
        for (uint64_t v = 0; v < t.total_range(); ++v)
            CHECK(bin_decode([&] { return symbols[next++]; }, t, cursor) == v);
        CHECK(cursor.remaining() == 0);
    }
    SUBCASE("zero bin writes no low bits") {
        std::vector<uint64_t> values(100, 0);
        BinningTable t = adaptive_binning(values, 10, 63);
        BitSink raw;
        uint32_t symbol = 99;
        bin_encode(0, t, [&](uint32_t s) { symbol = s; }, raw);
        CHECK(symbol == 0);
        CHECK(raw.bit_count() == 0);
    }
}

TEST_CASE("binning cost") {
    SUBCASE("single bin of width w") {
        BinningTable t = BinningTable::from_widths(std::vector<uint8_t>{7});
        std::vector<uint64_t> values{1, 2, 3, 100};
        BinningCost cost = binning_cost(t, values);
        CHECK(cost.bin_entropy_bits == doctest::Approx(0.0));
        CHECK(cost.avg_low_bits == doctest::Approx(7.0));
        CHECK(cost.total_avg_bits == doctest::Approx(7.0));
    }
    SUBCASE("24-bit simple binning pays exactly 24 raw bits per value") {
        std::mt19937_64 rng(59);
        std::vector<uint64_t> starts(5000);
        for (auto& v : starts) v = rng() % (1ull << 28);
        BinningTable t = simple_binning(28, 24);
        BinningCost cost = binning_cost(t, starts);
        CHECK(cost.avg_low_bits == doctest::Approx(24.0));
        CHECK(cost.bin_entropy_bits > 0);
    }
    SUBCASE("cost matches bits actually emitted") {
        std::mt19937_64 rng(61);
        std::vector<uint64_t> values(4000);
        for (auto& v : values) v = rng() % 4096;
        std::sort(values.begin(), values.end());
        BinningTable t = adaptive_binning(values, 64, 4095);
        BinningCost cost = binning_cost(t, values);
        BitSink raw;
        for (uint64_t v : values) bin_encode(v, t, [](uint32_t) {}, raw);
        double measured_low = (double)raw.bit_count() / values.size();
        CHECK(measured_low == doctest::Approx(cost.avg_low_bits).epsilon(1e-9));
    }
    SUBCASE("empty values are rejected") {
        BinningTable t = simple_binning(4, 2);
        CHECK_THROWS_AS(binning_cost(t, {}), ContractError);
    }
}

TEST_CASE("monotone refinement in min_per_bin") {
    std::mt19937_64 rng(67);
    std::vector<uint64_t> values;
    for (int i = 0; i < 8000; ++i) {
        if (rng() % 5 == 0) values.push_back(0);
        else values.push_back((uint64_t)(-30000.0 * std::log((rng() % 10000 + 1) / 10000.0)));
    }
    std::sort(values.begin(), values.end());
    uint64_t max_value = values.back();
    for (uint64_t min_per_bin : {256u, 64u, 16u}) {
        BinningTable coarse = adaptive_binning(values, min_per_bin, max_value);
        BinningTable fine = adaptive_binning(values, min_per_bin / 2, max_value);
        double c = binning_cost(coarse, values).total_avg_bits;
        double f = binning_cost(fine, values).total_avg_bits;
        CHECK(f <= c + 0.05);
    }
}

TEST_CASE("adaptive beats simple on zero-inflated heavy-tail data") {
    std::mt19937_64 rng(71);
    std::vector<uint64_t> values;
    for (int i = 0; i < 50000; ++i) {
        if (rng() % 100 < 18) values.push_back(0); // ~18% zeros
        else values.push_back((uint64_t)(5e6 * std::pow((rng() % 10000 + 1) / 10000.0, -1.3)));
    }
    std::sort(values.begin(), values.end());
    uint64_t max_value = values.back();
    int total_bits = 64 - __builtin_clzll(max_value);
    BinningTable simple =
        truncate_binning(simple_binning(total_bits, total_bits - 4), max_value);
    BinningTable adaptive = adaptive_binning(values, 64, max_value);
    double s = binning_cost(simple, values).total_avg_bits;
    double a = binning_cost(adaptive, values).total_avg_bits;
    CHECK(a < s);
    CHECK(adaptive.bin_width(0) == 0); // the zero bin costs no low bits
}
