#include "tdc/entropy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace tdc {

namespace {

int floor_lg(uint64_t v) { return 63 - std::countl_zero(v); }

bool is_power_of_two(uint32_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::vector<uint32_t> counts_from_spread(std::span<const uint32_t> spread) {
    uint32_t m = 0;
    for (uint32_t s : spread) m = std::max(m, s + 1);
    std::vector<uint32_t> ls(m, 0);
    for (uint32_t s : spread) ++ls[s];
    return ls;
}

} // namespace

std::vector<uint32_t> quantize_probabilities(const Distribution& dist, uint32_t L) {
    if (!is_power_of_two(L))
        throw ContractError("quantize_probabilities: L must be a power of two");
    const size_t m = dist.size();
    size_t nonzero = 0;
    for (size_t s = 0; s < m; ++s)
        if (dist[s] > 0) ++nonzero;
    if (nonzero == 0)
        throw ContractError("quantize_probabilities: all-zero distribution");
    if (L < nonzero)
        throw ContractError("quantize_probabilities: L smaller than alphabet support");

    std::vector<uint32_t> ls(m, 0);
    std::vector<double> remainder(m, 0.0);
    uint64_t assigned = 0;
    for (size_t s = 0; s < m; ++s) {
        if (dist[s] <= 0) continue;
        double target = dist[s] * static_cast<double>(L);
        uint64_t base = static_cast<uint64_t>(std::floor(target));
        remainder[s] = target - static_cast<double>(base);
        if (base < 1) base = 1; // floor of one slot for any nonzero symbol
        ls[s] = static_cast<uint32_t>(base);
        assigned += base;
    }

    if (assigned < L) {
        // Hand out missing slots by largest remainder, lower index on ties.
        std::vector<size_t> order;
        for (size_t s = 0; s < m; ++s)
            if (dist[s] > 0) order.push_back(s);
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
            return a < b;
        });
        uint64_t missing = L - assigned;
        for (size_t i = 0; missing > 0; i = (i + 1) % order.size()) {
            ++ls[order[i]];
            --missing;
        }
    } else if (assigned > L) {
        // The floor forced an overshoot; take slots back from the
        // largest counts, lower index on ties.
        uint64_t excess = assigned - L;
        while (excess > 0) {
            size_t victim = 0;
            uint32_t best = 0;
            for (size_t s = 0; s < m; ++s) {
                if (ls[s] > best) {
                    best = ls[s];
                    victim = s;
                }
            }
            if (best <= 1)
                throw ContractError("quantize_probabilities: cannot satisfy floor");
            --ls[victim];
            --excess;
        }
    }
    return ls;
}

std::vector<uint32_t> spread_symbols(std::span<const uint32_t> ls, uint32_t L) {
    if (!is_power_of_two(L))
        throw ContractError("spread_symbols: L must be a power of two");
    uint64_t total = 0;
    for (uint32_t c : ls) total += c;
    if (total != L)
        throw ContractError("spread_symbols: counts do not sum to L");

    uint64_t step = 5ull * L / 8 + 3;
    if (std::gcd(step % L == 0 ? L : step % L, static_cast<uint64_t>(L)) != 1) {
        // The stride formula collides with small power-of-two L (only
        // L <= 8); 3 is coprime with every power of two and keeps the
        // deal pseudorandom.
        step = 3;
    }

    std::vector<uint32_t> spread(L, 0);
    std::vector<bool> used(L, false);
    uint64_t X = 0;
    for (uint32_t s = 0; s < ls.size(); ++s) {
        for (uint32_t i = 0; i < ls[s]; ++i) {
            spread[X] = s;
            used[X] = true;
            X = (X + step) % L;
        }
    }
    for (bool u : used)
        if (!u) throw ContractError("spread_symbols: slot left unassigned");
    return spread;
}

std::vector<DecodeEntry> build_decoding_table(std::span<const uint32_t> spread) {
    const uint32_t L = static_cast<uint32_t>(spread.size());
    if (!is_power_of_two(L))
        throw ContractError("build_decoding_table: spread size must be a power of two");
    const int R = floor_lg(L);
    std::vector<uint32_t> next = counts_from_spread(spread);
    std::vector<DecodeEntry> table(L);
    for (uint32_t X = 0; X < L; ++X) {
        uint32_t s = spread[X];
        uint32_t x = next[s]++;
        int nb_bits = R - floor_lg(x);
        table[X] = DecodeEntry{s, static_cast<uint8_t>(nb_bits),
                               (x << nb_bits) - L};
    }
    return table;
}

EncodingTables build_encoding_table(std::span<const uint32_t> spread) {
    const uint32_t L = static_cast<uint32_t>(spread.size());
    if (!is_power_of_two(L))
        throw ContractError("build_encoding_table: spread size must be a power of two");
    const int R = floor_lg(L);
    const int r = R + 1;
    std::vector<uint32_t> ls = counts_from_spread(spread);
    const size_t m = ls.size();

    EncodingTables enc;
    enc.table.assign(L, 0);
    enc.nb.assign(m, INT64_MIN);
    enc.offset.assign(m, 0);
    enc.k.assign(m, 0);

    int64_t cum = 0;
    for (size_t s = 0; s < m; ++s) {
        enc.offset[s] = -static_cast<int64_t>(ls[s]) + cum;
        cum += ls[s];
        if (ls[s] > 0) {
            int k = R - floor_lg(ls[s]);
            enc.k[s] = static_cast<uint8_t>(k);
            enc.nb[s] = (static_cast<int64_t>(k) << r) -
                        (static_cast<int64_t>(ls[s]) << k);
        }
    }

    std::vector<uint32_t> next = ls;
    for (uint32_t x = L; x < 2 * L; ++x) {
        uint32_t s = spread[x - L];
        enc.table[enc.offset[s] + next[s]++] = x;
    }
    return enc;
}

TansAutomaton build_automaton(std::vector<uint32_t> ls, uint32_t table_log,
                              std::optional<std::vector<uint32_t>> spread) {
    if (table_log > 20)
        throw ContractError("build_automaton: table_log too large");
    const uint32_t L = 1u << table_log;
    uint64_t total = 0;
    for (uint32_t c : ls) total += c;
    if (total != L)
        throw ContractError("build_automaton: counts do not sum to 2^table_log");

    TansAutomaton a;
    a.table_log = table_log;
    a.state_count = L;
    a.ls = std::move(ls);
    if (spread.has_value()) {
        if (spread->size() != L)
            throw ContractError("build_automaton: injected spread has wrong size");
        std::vector<uint32_t> check = counts_from_spread(*spread);
        check.resize(a.ls.size(), 0);
        if (check != a.ls)
            throw ContractError("build_automaton: injected spread does not match counts");
        a.spread = std::move(*spread);
    } else {
        a.spread = spread_symbols(a.ls, L);
    }
    a.decoding = build_decoding_table(a.spread);
    a.encoding = build_encoding_table(a.spread);
    // counts_from_spread may have produced a shorter nb/offset vector if
    // trailing symbols have zero count; pad to the full alphabet.
    a.encoding.nb.resize(a.ls.size(), INT64_MIN);
    a.encoding.k.resize(a.ls.size(), 0);
    if (a.encoding.offset.size() < a.ls.size()) {
        int64_t cum = 0;
        for (uint32_t c : a.ls) cum += c;
        a.encoding.offset.resize(a.ls.size(), cum);
    }
    return a;
}

CoderState tans_initial_state(const TansAutomaton& a) {
    return CoderState{a.state_count};
}

void tans_encode_symbol(CoderState& state, uint32_t symbol,
                        const TansAutomaton& a, BitSink& sink) {
    if (symbol >= a.ls.size() || a.ls[symbol] == 0)
        throw ContractError("tans_encode_symbol: symbol has no slots");
    const uint32_t L = a.state_count;
    if (state.x < L || state.x >= 2 * L)
        throw ContractError("tans_encode_symbol: state out of range");
    const int r = static_cast<int>(a.table_log) + 1;
    int nb_bits = static_cast<int>(
        (static_cast<int64_t>(state.x) + a.encoding.nb[symbol]) >> r);
    sink.write_bits(state.x & ((1ull << nb_bits) - 1), nb_bits);
    state.x = a.encoding.table[a.encoding.offset[symbol] + (state.x >> nb_bits)];
}

uint32_t tans_decode_symbol(CoderState& state, const TansAutomaton& a,
                            BitCursor& cursor) {
    const uint32_t L = a.state_count;
    if (state.x < L || state.x >= 2 * L)
        throw MalformedData("tans_decode_symbol: state out of range");
    const DecodeEntry& t = a.decoding[state.x - L];
    uint32_t X = t.new_x + static_cast<uint32_t>(cursor.read_bits(t.nb_bits));
    state.x = L + X;
    return t.symbol;
}

std::vector<double> stationary_distribution(const TansAutomaton& a,
                                            const Distribution& dist) {
    const uint32_t L = a.state_count;
    for (uint32_t s = 0; s < dist.size(); ++s)
        if (dist[s] > 0 && (s >= a.ls.size() || a.ls[s] == 0))
            throw ContractError("stationary_distribution: automaton misses a supported symbol");

    // Precompute one encode step per (state, symbol).
    const int r = static_cast<int>(a.table_log) + 1;
    std::vector<std::vector<std::pair<uint32_t, double>>> out(L);
    for (uint32_t xi = 0; xi < L; ++xi) {
        uint32_t x = L + xi;
        for (uint32_t s = 0; s < dist.size(); ++s) {
            if (dist[s] <= 0) continue;
            int nb_bits = static_cast<int>(
                (static_cast<int64_t>(x) + a.encoding.nb[s]) >> r);
            uint32_t x2 = a.encoding.table[a.encoding.offset[s] + (x >> nb_bits)];
            out[xi].push_back({x2 - L, dist[s]});
        }
    }

    std::vector<double> rho(L, 1.0 / L);
    std::vector<double> next(L, 0.0);
    double mix = 0.0;
    const uint64_t kMaxIters = 1000000;
    const uint64_t kMixAfter = 200000;
    for (uint64_t it = 0; it < kMaxIters; ++it) {
        std::fill(next.begin(), next.end(), mix / L);
        for (uint32_t xi = 0; xi < L; ++xi) {
            double mass = rho[xi] * (1.0 - mix);
            for (auto [to, p] : out[xi]) next[to] += mass * p;
        }
        double tv = 0;
        for (uint32_t xi = 0; xi < L; ++xi) tv += std::abs(next[xi] - rho[xi]);
        rho.swap(next);
        if (tv < 1e-12) return rho;
        if (it == kMixAfter && mix == 0.0) mix = 1e-6;
    }
    throw Error("stationary_distribution: power iteration did not converge");
}

TansCost tans_expected_bits(const TansAutomaton& a, const Distribution& dist) {
    std::vector<double> rho = stationary_distribution(a, dist);
    const uint32_t L = a.state_count;
    const int r = static_cast<int>(a.table_log) + 1;
    double h_prime = 0;
    for (uint32_t xi = 0; xi < L; ++xi) {
        uint32_t x = L + xi;
        for (uint32_t s = 0; s < dist.size(); ++s) {
            if (dist[s] <= 0) continue;
            int nb_bits = static_cast<int>(
                (static_cast<int64_t>(x) + a.encoding.nb[s]) >> r);
            h_prime += rho[xi] * dist[s] * nb_bits;
        }
    }
    double h = 0;
    for (uint32_t s = 0; s < dist.size(); ++s)
        if (dist[s] > 0) h += dist[s] * std::log2(1.0 / dist[s]);
    return TansCost{h_prime, h_prime - h};
}

} // namespace tdc
