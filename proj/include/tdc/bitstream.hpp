#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tdc/errors.hpp"

namespace tdc {

// A finalized bit sequence. The final partial byte is zero-padded;
// bit_count records the exact number of valid bits.
struct BitBuffer {
    std::vector<uint8_t> bytes;
    uint64_t bit_count = 0;
};

// Append-only bit writer. Bits are packed LSB-first within each byte,
// bytes in append order. A single call writes at most 57 bits so the
// value plus up to 7 buffered bits always fits the 64-bit accumulator;
// callers split wider values into two calls.
class BitSink {
public:
    static constexpr int kMaxWriteBits = 57;

    // Appends the n least significant bits of value, LSB first.
    // n == 0 is a no-op. Requires value < 2^n.
    void write_bits(uint64_t value, int n) {
        if (n < 0 || n > kMaxWriteBits)
            throw ContractError("write_bits: width out of range");
        if (n < 64 && (value >> n) != 0)
            throw ContractError("write_bits: value does not fit in width");
        acc_ |= value << acc_bits_;
        acc_bits_ += n;
        bit_count_ += static_cast<uint64_t>(n);
        while (acc_bits_ >= 8) {
            bytes_.push_back(static_cast<uint8_t>(acc_ & 0xFF));
            acc_ >>= 8;
            acc_bits_ -= 8;
        }
    }

    uint64_t bit_count() const { return bit_count_; }

    // Snapshot of the stream so far, final partial byte zero-padded.
    // The sink remains usable.
    BitBuffer finish() const {
        BitBuffer out;
        out.bytes = bytes_;
        if (acc_bits_ > 0)
            out.bytes.push_back(static_cast<uint8_t>(acc_ & 0xFF));
        out.bit_count = bit_count_;
        return out;
    }

private:
    std::vector<uint8_t> bytes_;
    uint64_t acc_ = 0;
    int acc_bits_ = 0;
    uint64_t bit_count_ = 0;
};

// Bit reader over a finalized buffer. Forward cursors consume bits in
// write order; reverse cursors consume them in exactly opposite order.
// A value written as one write_bits call is reconstructed by one
// reverse read of the same width.
class BitCursor {
public:
    enum class Direction { forward, reverse };

    BitCursor(std::span<const uint8_t> bytes, uint64_t bit_count, Direction dir)
        : bytes_(bytes), bit_count_(bit_count), dir_(dir),
          pos_(dir == Direction::forward ? 0 : bit_count) {
        if (bit_count_ > bytes_.size() * 8)
            throw ContractError("BitCursor: bit_count exceeds buffer");
    }

    BitCursor(const BitBuffer& buf, Direction dir)
        : BitCursor(buf.bytes, buf.bit_count, dir) {}

    // The cursor is a view; the buffer must outlive it.
    BitCursor(BitBuffer&&, Direction) = delete;

    uint64_t read_bits(int n) {
        if (n < 0 || n > BitSink::kMaxWriteBits)
            throw ContractError("read_bits: width out of range");
        if (static_cast<uint64_t>(n) > remaining())
            throw StreamExhausted("read_bits: fewer than n bits remain");
        uint64_t base;
        if (dir_ == Direction::forward) {
            base = pos_;
            pos_ += static_cast<uint64_t>(n);
        } else {
            pos_ -= static_cast<uint64_t>(n);
            base = pos_;
        }
        return extract(base, n);
    }

    uint64_t remaining() const {
        return dir_ == Direction::forward ? bit_count_ - pos_ : pos_;
    }

    uint64_t position() const { return pos_; }
    Direction direction() const { return dir_; }

private:
    uint64_t extract(uint64_t base, int n) const {
        uint64_t v = 0;
        int got = 0;
        while (got < n) {
            uint64_t bit = base + static_cast<uint64_t>(got);
            uint64_t byte = bit >> 3;
            int off = static_cast<int>(bit & 7);
            int take = 8 - off;
            if (take > n - got) take = n - got;
            uint64_t chunk = (static_cast<uint64_t>(bytes_[byte]) >> off) &
                             ((1ull << take) - 1);
            v |= chunk << got;
            got += take;
        }
        return v;
    }

    std::span<const uint8_t> bytes_;
    uint64_t bit_count_;
    Direction dir_;
    uint64_t pos_;
};

} // namespace tdc
