#include "doctest.h"

#include <random>

#include "tdc/bitstream.hpp"

using namespace tdc;

TEST_CASE("single bit round trip") {
    BitSink sink;
    sink.write_bits(1, 1);
    BitBuffer buf = sink.finish();
    BitCursor cursor(buf, BitCursor::Direction::forward);
    CHECK(cursor.read_bits(1) == 1);
}

TEST_CASE("LSB-first order within a value") {
    BitSink sink;
    sink.write_bits(0b101, 3);
    BitBuffer cursor_buf = sink.finish();
    BitCursor cursor(cursor_buf, BitCursor::Direction::forward);
    CHECK(cursor.read_bits(1) == 1);
    CHECK(cursor.read_bits(1) == 0);
    CHECK(cursor.read_bits(1) == 1);
}

TEST_CASE("reverse reads consume bits last-first") {
    BitSink sink;
    sink.write_bits(6, 3); // bits on the wire: 0,1,1
    BitBuffer cursor_buf = sink.finish();
    BitCursor cursor(cursor_buf, BitCursor::Direction::reverse);
    CHECK(cursor.read_bits(1) == 1);
    CHECK(cursor.read_bits(1) == 1);
    CHECK(cursor.read_bits(1) == 0);
}

TEST_CASE("zero-width read is a no-op") {
    BitSink sink;
    sink.write_bits(3, 2);
    BitBuffer cursor_buf = sink.finish();
    BitCursor cursor(cursor_buf, BitCursor::Direction::forward);
    CHECK(cursor.read_bits(0) == 0);
    CHECK(cursor.position() == 0);
}

TEST_CASE("byte values forward round trip") {
    BitSink sink;
    for (int v = 0; v < 256; ++v) sink.write_bits(v, 8);
    BitBuffer cursor_buf = sink.finish();
    BitCursor cursor(cursor_buf, BitCursor::Direction::forward);
    for (int v = 0; v < 256; ++v) CHECK(cursor.read_bits(8) == (uint64_t)v);
    CHECK(cursor.remaining() == 0);
}

TEST_CASE("interleaved widths pair LIFO on reverse") {
    BitSink sink;
    sink.write_bits(3, 2);
    sink.write_bits(5, 4);
    BitBuffer cursor_buf = sink.finish();
    BitCursor cursor(cursor_buf, BitCursor::Direction::reverse);
    CHECK(cursor.read_bits(4) == 5);
    CHECK(cursor.read_bits(2) == 3);
    CHECK(cursor.remaining() == 0);
}

TEST_CASE("random sequences: forward and reverse reproduce writes") {
    std::mt19937_64 rng(42);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<std::pair<uint64_t, int>> writes;
        BitSink sink;
        int count = 1 + (int)(rng() % 64);
        for (int i = 0; i < count; ++i) {
            int n = (int)(rng() % 58); // 0..57
            uint64_t v = n == 0 ? 0 : rng() & ((1ull << n) - 1);
            sink.write_bits(v, n);
            writes.push_back({v, n});
        }
        BitBuffer buf = sink.finish();
        uint64_t total = 0;
        for (auto [v, n] : writes) total += n;
        CHECK(buf.bit_count == total);

        BitCursor fwd(buf, BitCursor::Direction::forward);
        for (auto [v, n] : writes) CHECK(fwd.read_bits(n) == v);
        CHECK(fwd.remaining() == 0);

        BitCursor rev(buf, BitCursor::Direction::reverse);
        for (auto it = writes.rbegin(); it != writes.rend(); ++it)
            CHECK(rev.read_bits(it->second) == it->first);
        CHECK(rev.remaining() == 0);
    }
}

TEST_CASE("contract and exhaustion errors") {
    BitSink sink;
    CHECK_THROWS_AS(sink.write_bits(4, 2), ContractError);  // value too wide
    CHECK_THROWS_AS(sink.write_bits(0, 58), ContractError); // width too wide
    sink.write_bits(1, 1);
    BitBuffer fwd_buf = sink.finish();
    BitCursor fwd(fwd_buf, BitCursor::Direction::forward);
    CHECK(fwd.read_bits(1) == 1);
    CHECK_THROWS_AS(fwd.read_bits(1), StreamExhausted);
    BitBuffer rev_buf = sink.finish();
    BitCursor rev(rev_buf, BitCursor::Direction::reverse);
    rev.read_bits(1);
    CHECK_THROWS_AS(rev.read_bits(1), StreamExhausted);
}

TEST_CASE("partial byte is zero padded, bit count exact") {
    BitSink sink;
    sink.write_bits(1, 3);
    BitBuffer buf = sink.finish();
    CHECK(buf.bytes.size() == 1);
    CHECK(buf.bit_count == 3);
    CHECK(buf.bytes[0] == 0x01);
}
