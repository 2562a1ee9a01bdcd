#include "tdc/entropy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <queue>

namespace tdc {

Distribution Distribution::from_probabilities(std::vector<double> probs) {
    if (probs.empty())
        throw ContractError("Distribution: empty alphabet");
    double sum = 0;
    for (double p : probs) {
        if (p < 0 || !std::isfinite(p))
            throw ContractError("Distribution: negative or non-finite probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ContractError("Distribution: probabilities do not sum to 1");
    return Distribution(std::move(probs));
}

Distribution Distribution::from_weights(std::span<const double> weights) {
    if (weights.empty())
        throw ContractError("Distribution: empty alphabet");
    double sum = 0;
    for (double w : weights) {
        if (w < 0 || !std::isfinite(w))
            throw ContractError("Distribution: negative or non-finite weight");
        sum += w;
    }
    if (sum <= 0)
        throw ContractError("Distribution: all weights zero");
    std::vector<double> probs(weights.begin(), weights.end());
    for (double& p : probs) p /= sum;
    return Distribution(std::move(probs));
}

// ---------------------------------------------------------------------------
// Prefix codes

std::vector<uint8_t> PrefixCode::lengths() const {
    std::vector<uint8_t> out(codewords.size());
    for (size_t s = 0; s < codewords.size(); ++s) out[s] = codewords[s].length;
    return out;
}

double PrefixCode::kraft_sum() const {
    if (singleton) return 1.0;
    double sum = 0;
    for (const Codeword& c : codewords)
        if (c.length > 0) sum += std::ldexp(1.0, -static_cast<int>(c.length));
    return sum;
}

namespace {

// Canonical assignment: sort coded symbols by (length, index), hand out
// lexicographically increasing MSB-first codewords.
PrefixCode assign_canonical(const std::vector<uint8_t>& lengths) {
    PrefixCode code;
    code.codewords.resize(lengths.size());
    std::vector<uint32_t> order;
    for (uint32_t s = 0; s < lengths.size(); ++s)
        if (lengths[s] > 0) order.push_back(s);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        if (lengths[a] != lengths[b]) return lengths[a] < lengths[b];
        return a < b;
    });
    uint64_t next = 0;
    int prev_len = order.empty() ? 0 : lengths[order[0]];
    for (uint32_t s : order) {
        next <<= (lengths[s] - prev_len);
        prev_len = lengths[s];
        code.codewords[s] = Codeword{next, lengths[s]};
        ++next;
    }
    return code;
}

} // namespace

PrefixCode huffman_build(const Distribution& dist) {
    const size_t m = dist.size();
    std::vector<uint8_t> lengths(m, 0);

    struct Node {
        double prob;
        uint32_t created; // leaves first, then merge order; ties prefer earlier
        std::vector<uint32_t> symbols;
    };
    auto cmp = [](const Node& a, const Node& b) {
        if (a.prob != b.prob) return a.prob > b.prob;
        return a.created > b.created;
    };
    std::priority_queue<Node, std::vector<Node>, decltype(cmp)> heap(cmp);

    uint32_t created = 0;
    for (uint32_t s = 0; s < m; ++s, ++created)
        if (dist[s] > 0) heap.push(Node{dist[s], created, {s}});

    if (heap.empty())
        throw ContractError("huffman_build: all-zero distribution");

    if (heap.size() == 1) {
        PrefixCode code;
        code.codewords.resize(m);
        code.singleton = heap.top().symbols[0];
        return code;
    }

    while (heap.size() > 1) {
        Node a = heap.top(); heap.pop();
        Node b = heap.top(); heap.pop();
        for (uint32_t s : a.symbols) ++lengths[s];
        for (uint32_t s : b.symbols) ++lengths[s];
        std::vector<uint32_t> merged = std::move(a.symbols);
        merged.insert(merged.end(), b.symbols.begin(), b.symbols.end());
        heap.push(Node{a.prob + b.prob, created++, std::move(merged)});
    }
    return assign_canonical(lengths);
}

PrefixCode prefix_from_lengths(std::span<const uint8_t> lengths,
                               std::optional<uint32_t> singleton) {
    if (singleton) {
        if (*singleton >= lengths.size())
            throw ContractError("prefix_from_lengths: singleton out of range");
        PrefixCode code;
        code.codewords.resize(lengths.size());
        code.singleton = singleton;
        return code;
    }
    std::vector<uint8_t> copy(lengths.begin(), lengths.end());
    PrefixCode code = assign_canonical(copy);
    double kraft = code.kraft_sum();
    if (kraft > 1.0 + 1e-12)
        throw MalformedData("prefix_from_lengths: Kraft sum exceeds 1");
    return code;
}

void huffman_encode(std::span<const uint32_t> symbols, const PrefixCode& code,
                    BitSink& sink) {
    for (uint32_t s : symbols) {
        if (s >= code.codewords.size())
            throw ContractError("huffman_encode: symbol out of alphabet");
        if (code.singleton) {
            if (s != *code.singleton)
                throw ContractError("huffman_encode: symbol has no codeword");
            continue; // the empty codeword
        }
        const Codeword& cw = code.codewords[s];
        if (cw.length == 0)
            throw ContractError("huffman_encode: symbol has no codeword");
        for (int i = cw.length - 1; i >= 0; --i)
            sink.write_bits((cw.bits >> i) & 1u, 1);
    }
}

HuffmanDecoder::HuffmanDecoder(const PrefixCode& code) {
    singleton_ = code.singleton;
    if (singleton_) return;
    for (const Codeword& c : code.codewords)
        max_len_ = std::max(max_len_, static_cast<int>(c.length));
    if (max_len_ == 0)
        throw ContractError("HuffmanDecoder: code has no codewords");

    std::vector<uint32_t> order;
    for (uint32_t s = 0; s < code.codewords.size(); ++s)
        if (code.codewords[s].length > 0) order.push_back(s);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        const auto& ca = code.codewords[a];
        const auto& cb = code.codewords[b];
        if (ca.length != cb.length) return ca.length < cb.length;
        return ca.bits < cb.bits;
    });
    symbols_ = order;
    first_code_.assign(max_len_ + 1, 0);
    sym_base_.assign(max_len_ + 2, 0);
    size_t idx = 0;
    uint64_t next = 0;
    for (int len = 1; len <= max_len_; ++len) {
        next <<= 1;
        first_code_[len] = next;
        sym_base_[len] = static_cast<uint32_t>(idx);
        while (idx < order.size() && code.codewords[order[idx]].length == len) {
            ++idx;
            ++next;
        }
    }
    sym_base_[max_len_ + 1] = static_cast<uint32_t>(idx);
}

uint32_t HuffmanDecoder::decode_one(BitCursor& cursor) const {
    if (singleton_) return *singleton_;
    uint64_t acc = 0;
    for (int len = 1; len <= max_len_; ++len) {
        acc = (acc << 1) | cursor.read_bits(1);
        uint32_t n_len = sym_base_[len + 1] - sym_base_[len];
        if (acc >= first_code_[len] && acc < first_code_[len] + n_len)
            return symbols_[sym_base_[len] + (acc - first_code_[len])];
    }
    throw MalformedData("huffman_decode: invalid codeword");
}

std::vector<uint32_t> huffman_decode(BitCursor& cursor, const PrefixCode& code,
                                     size_t count) {
    HuffmanDecoder decoder(code);
    std::vector<uint32_t> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i) out.push_back(decoder.decode_one(cursor));
    return out;
}

void exp_golomb_encode(uint64_t x, BitSink& sink) {
    if (x > (1ull << 62))
        throw ContractError("exp_golomb_encode: value too large");
    uint64_t v = x + 1;
    int bits = 64 - std::countl_zero(v); // position of MSB, 1-based
    for (int i = 0; i < bits - 1; ++i) sink.write_bits(0, 1);
    for (int i = bits - 1; i >= 0; --i) sink.write_bits((v >> i) & 1u, 1);
}

uint64_t exp_golomb_decode(BitCursor& cursor) {
    int zeros = 0;
    while (cursor.read_bits(1) == 0) {
        ++zeros;
        if (zeros > 62)
            throw MalformedData("exp_golomb_decode: zero run too long");
    }
    uint64_t v = 1;
    for (int i = 0; i < zeros; ++i) v = (v << 1) | cursor.read_bits(1);
    return v - 1;
}

int exp_golomb_code_length(uint64_t x) {
    uint64_t v = x + 1;
    int bits = 64 - std::countl_zero(v);
    return 2 * (bits - 1) + 1;
}

double expected_code_length(std::span<const uint8_t> lengths,
                            const Distribution& dist) {
    if (lengths.size() != dist.size())
        throw ContractError("expected_code_length: alphabet size mismatch");
    double sum = 0;
    for (size_t s = 0; s < lengths.size(); ++s)
        sum += dist[s] * static_cast<double>(lengths[s]);
    return sum;
}

} // namespace tdc
