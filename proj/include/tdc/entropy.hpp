#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tdc/bitstream.hpp"
#include "tdc/errors.hpp"

namespace tdc {

// Per-symbol probabilities. Immutable after construction; the sum must
// be 1 within 1e-9 (from_weights normalizes arbitrary non-negative
// weights, e.g. histogram counts).
class Distribution {
public:
    static Distribution from_probabilities(std::vector<double> probs);
    static Distribution from_weights(std::span<const double> weights);

    size_t size() const { return probs_.size(); }
    double operator[](size_t s) const { return probs_[s]; }
    const std::vector<double>& probabilities() const { return probs_; }

private:
    explicit Distribution(std::vector<double> probs) : probs_(std::move(probs)) {}
    std::vector<double> probs_;
};

// ---------------------------------------------------------------------------
// Prefix codes

struct Codeword {
    uint64_t bits = 0;  // MSB-first: bit (length-1) is emitted first
    uint8_t length = 0; // 0 => symbol has no codeword (zero probability)
};

struct PrefixCode {
    std::vector<Codeword> codewords;
    // Set when exactly one symbol is coded: that symbol's codeword is
    // empty (zero bits), which keeps Kraft equality for the degenerate
    // alphabet.
    std::optional<uint32_t> singleton;

    size_t alphabet_size() const { return codewords.size(); }
    std::vector<uint8_t> lengths() const;
    // Sum of 2^-length over coded symbols.
    double kraft_sum() const;
};

// Optimal prefix code, canonical codeword assignment: codewords are
// allocated in (length, symbol index) order so the output is a pure
// function of the length profile. Zero-probability symbols get no
// codeword.
PrefixCode huffman_build(const Distribution& dist);

// Rebuilds the canonical code from a length profile.
PrefixCode prefix_from_lengths(std::span<const uint8_t> lengths,
                               std::optional<uint32_t> singleton = std::nullopt);

void huffman_encode(std::span<const uint32_t> symbols, const PrefixCode& code,
                    BitSink& sink);
std::vector<uint32_t> huffman_decode(BitCursor& cursor, const PrefixCode& code,
                                     size_t count);

// Canonical table decoder; cheap to build, reusable across calls.
class HuffmanDecoder {
public:
    explicit HuffmanDecoder(const PrefixCode& code);
    uint32_t decode_one(BitCursor& cursor) const;

private:
    int max_len_ = 0;
    std::optional<uint32_t> singleton_;
    std::vector<uint64_t> first_code_;
    std::vector<uint32_t> sym_base_;
    std::vector<uint32_t> symbols_;
};

// Exp-Golomb universal code for non-negative integers:
// floor(log2(x+1)) zero bits, then the binary expansion of x+1 MSB first.
void exp_golomb_encode(uint64_t x, BitSink& sink);
uint64_t exp_golomb_decode(BitCursor& cursor);
int exp_golomb_code_length(uint64_t x);

// Expected bits/value of a length profile under a distribution.
double expected_code_length(std::span<const uint8_t> lengths,
                            const Distribution& dist);

// ---------------------------------------------------------------------------
// tANS

// Quantizes probabilities to integer counts summing to L (a power of
// two). Largest-remainder rounding with a floor of one slot for every
// nonzero-probability symbol; overflow forced by the floor is taken
// back from the largest counts. Deterministic; ties break toward the
// lower symbol index.
std::vector<uint32_t> quantize_probabilities(const Distribution& dist, uint32_t L);

// Pseudorandom symbol spread: slot X visits 0, step, 2*step, ... mod L
// while symbols are dealt in index order, each one Ls[s] times.
std::vector<uint32_t> spread_symbols(std::span<const uint32_t> ls, uint32_t L);

struct DecodeEntry {
    uint32_t symbol = 0;
    uint8_t nb_bits = 0;
    uint32_t new_x = 0; // X-space {0..L-1}; x-space value is new_x + L
};

std::vector<DecodeEntry> build_decoding_table(std::span<const uint32_t> spread);

struct EncodingTables {
    std::vector<uint32_t> table;  // permutation of {L..2L-1}
    std::vector<int64_t> nb;      // per symbol; INT64_MIN for ls == 0
    std::vector<int64_t> offset;  // per symbol, may be negative
    std::vector<uint8_t> k;       // per symbol bit-count bound
};

EncodingTables build_encoding_table(std::span<const uint32_t> spread);

// Complete L-state coder. Immutable after construction.
struct TansAutomaton {
    uint32_t table_log = 0; // R
    uint32_t state_count = 0; // L = 2^R
    std::vector<uint32_t> ls;
    std::vector<uint32_t> spread;
    std::vector<DecodeEntry> decoding;
    EncodingTables encoding;

    uint32_t alphabet_size() const { return static_cast<uint32_t>(ls.size()); }
    bool operator==(const TansAutomaton& o) const {
        return table_log == o.table_log && ls == o.ls && spread == o.spread;
    }
};

// Builds the automaton from quantized counts; spread generated by
// spread_symbols unless an explicit one is injected.
TansAutomaton build_automaton(std::vector<uint32_t> ls, uint32_t table_log,
                              std::optional<std::vector<uint32_t>> spread = std::nullopt);

// Coder state, L <= x <= 2L-1 between steps.
struct CoderState {
    uint32_t x = 0;
};

CoderState tans_initial_state(const TansAutomaton& a);

// Emits (x + nb[s]) >> (R+1) low bits of x, then moves to the next state.
void tans_encode_symbol(CoderState& state, uint32_t symbol,
                        const TansAutomaton& a, BitSink& sink);

// Inverse of tans_encode_symbol when bits are consumed in reverse write
// order; returns the decoded symbol.
uint32_t tans_decode_symbol(CoderState& state, const TansAutomaton& a,
                            BitCursor& cursor);

// Stationary distribution of the state chain under i.i.d. input, by
// power iteration (total-variation change < 1e-12). Falls back to a
// 1e-6 uniform mixing term if the chain fails to settle (periodic).
std::vector<double> stationary_distribution(const TansAutomaton& a,
                                            const Distribution& dist);

struct TansCost {
    double h_prime = 0;  // expected bits/symbol of the automaton
    double delta_h = 0;  // h_prime minus Shannon entropy
};

TansCost tans_expected_bits(const TansAutomaton& a, const Distribution& dist);

} // namespace tdc
