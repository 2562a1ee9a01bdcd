#include "tdc/codec.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <mutex>
#include <sstream>
#include <thread>

namespace tdc {

namespace {

// ---------------------------------------------------------------------------
// CRC-32 (IEEE), byte I/O helpers

uint32_t crc32(std::span<const uint8_t> bytes) {
    static const auto table = [] {
        std::array<uint32_t, 256> t{};
        for (uint32_t i = 0; i < 256; ++i) {
            uint32_t c = i;
            for (int k = 0; k < 8; ++k)
                c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : (c >> 1);
            t[i] = c;
        }
        return t;
    }();
    uint32_t c = 0xFFFFFFFFu;
    for (uint8_t b : bytes) c = table[(c ^ b) & 0xFF] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

struct ByteWriter {
    std::vector<uint8_t> bytes;

    void u8(uint8_t v) { bytes.push_back(v); }
    void u16(uint16_t v) {
        for (int i = 0; i < 2; ++i) bytes.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
    void raw(std::span<const uint8_t> b) { bytes.insert(bytes.end(), b.begin(), b.end()); }
};

struct ByteReader {
    std::span<const uint8_t> bytes;
    size_t pos = 0;

    void need(size_t n) const {
        if (pos + n > bytes.size())
            throw MalformedData("truncated data block");
    }
    uint8_t u8() {
        need(1);
        return bytes[pos++];
    }
    uint16_t u16() {
        need(2);
        uint16_t v = static_cast<uint16_t>(bytes[pos] | (bytes[pos + 1] << 8));
        pos += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(bytes[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(bytes[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
    std::span<const uint8_t> raw(size_t n) {
        need(n);
        auto s = bytes.subspan(pos, n);
        pos += n;
        return s;
    }
};

int bit_length(uint64_t v) { return v == 0 ? 0 : 64 - std::countl_zero(v); }

uint32_t ceil_log2(uint64_t v) {
    return v <= 1 ? 0 : static_cast<uint32_t>(bit_length(v - 1));
}

// Zigzag LEB128, written as whole bytes through the bit sink.
void write_varint_delta(BitSink& sink, int64_t delta) {
    uint64_t z = (static_cast<uint64_t>(delta) << 1) ^
                 static_cast<uint64_t>(delta >> 63);
    do {
        uint8_t b = z & 0x7F;
        z >>= 7;
        if (z) b |= 0x80;
        sink.write_bits(b, 8);
    } while (z);
}

int64_t read_varint_delta(BitCursor& cursor) {
    uint64_t z = 0;
    int shift = 0;
    for (;;) {
        uint8_t b = static_cast<uint8_t>(cursor.read_bits(8));
        z |= static_cast<uint64_t>(b & 0x7F) << shift;
        if (!(b & 0x80)) break;
        shift += 7;
        if (shift > 63) throw MalformedData("ref varint too long");
    }
    return static_cast<int64_t>(z >> 1) ^ -static_cast<int64_t>(z & 1);
}

// ---------------------------------------------------------------------------
// Codebook construction

constexpr uint8_t kCodebookVersion = 1;
constexpr uint8_t kContainerVersion = 1;
const char kCodebookMagic[4] = {'T', 'D', 'C', 'B'};
const char kContainerMagic[4] = {'T', 'D', 'C', '1'};

bool is_numeric(size_t type) { return type != kPulses; }

void validate_config(const CodecConfig& config) {
    if (config.channel_count == 0 || config.channel_count > 128)
        throw ContractError("config: channel count out of range");
    if (config.frame_size == 0)
        throw ContractError("config: frame size must be positive");
    if (config.channel_mode == ChannelMode::classed && config.class_count == 0)
        throw ContractError("config: classed mode needs at least one class");
    for (size_t t = 0; t < kValueTypes; ++t) {
        const ValueStreamConfig& s = config.streams[t];
        if (s.table_log > 15)
            throw ContractError("config: table_log above 15");
        if (s.bin_mode == BinMode::direct && s.coder != CoderKind::exp_golomb)
            throw ContractError("config: direct values require the Exp-Golomb coder");
        if (t == kPulses && s.bin_mode == BinMode::direct)
            throw ContractError("config: pulses cannot use direct mode");
        if (s.bin_mode == BinMode::adaptive && s.adaptive_min_per_bin == 0)
            throw ContractError("config: adaptive_min_per_bin must be positive");
    }
}

std::vector<uint8_t> assign_classes(std::span<const RelativeEvent> corpus,
                                    const CodecConfig& config,
                                    uint16_t& class_count_out) {
    const uint32_t C = config.channel_count;
    std::vector<uint8_t> cls(C, 0);
    switch (config.channel_mode) {
    case ChannelMode::shared:
        class_count_out = 1;
        break;
    case ChannelMode::per_channel:
        class_count_out = static_cast<uint16_t>(C);
        for (uint32_t c = 0; c < C; ++c) cls[c] = static_cast<uint8_t>(c);
        break;
    case ChannelMode::classed: {
        uint16_t k = std::min<uint16_t>(config.class_count,
                                        static_cast<uint16_t>(C));
        class_count_out = k;
        // Nearest mean-width quantile.
        std::vector<double> mean(C, 0.0);
        std::vector<uint64_t> count(C, 0);
        for (const RelativeEvent& ev : corpus) {
            for (const ChannelRecord& rec : ev.channels) {
                for (uint64_t w : rec.widths) {
                    mean[rec.channel] += static_cast<double>(w);
                    ++count[rec.channel];
                }
            }
        }
        for (uint32_t c = 0; c < C; ++c)
            if (count[c]) mean[c] /= static_cast<double>(count[c]);
        std::vector<double> sorted = mean;
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> centers(k);
        for (uint16_t i = 0; i < k; ++i) {
            size_t idx = std::min<size_t>(
                C - 1, static_cast<size_t>((i + 0.5) * C / k));
            centers[i] = sorted[idx];
        }
        for (uint32_t c = 0; c < C; ++c) {
            uint16_t best = 0;
            double best_d = std::abs(mean[c] - centers[0]);
            for (uint16_t i = 1; i < k; ++i) {
                double d = std::abs(mean[c] - centers[i]);
                if (d < best_d) {
                    best_d = d;
                    best = i;
                }
            }
            cls[c] = static_cast<uint8_t>(best);
        }
        break;
    }
    }
    return cls;
}

uint8_t resolve_table_log(const ValueStreamConfig& s, uint32_t max_alphabet) {
    uint32_t min_log = ceil_log2(max_alphabet);
    if (s.coder != CoderKind::tans) return 0;
    if (min_log > 15)
        throw Error("tANS alphabet too large; use fewer bins");
    if (s.table_log != 0) {
        if (s.table_log < min_log)
            throw Error("configured table_log below alphabet requirement");
        return s.table_log;
    }
    return static_cast<uint8_t>(std::min<uint32_t>(15, min_log + 3));
}

CoderTable make_table(CoderKind kind, uint8_t table_log,
                      std::optional<BinningTable> bins,
                      std::span<const double> weights) {
    CoderTable t;
    t.kind = kind;
    t.alphabet = static_cast<uint32_t>(weights.size());
    t.table_log = table_log;
    t.bins = std::move(bins);
    if (kind == CoderKind::exp_golomb) return t;
    Distribution dist = Distribution::from_weights(weights);
    if (kind == CoderKind::tans) {
        t.ls = quantize_probabilities(dist, 1u << table_log);
        t.automaton = build_automaton(t.ls, table_log);
    } else {
        t.prefix = huffman_build(dist);
    }
    return t;
}

} // namespace

void FrameCost::add(const FrameCost& o) {
    event_count += o.event_count;
    for (size_t t = 0; t < kValueTypes; ++t) {
        symbol_bits[t] += o.symbol_bits[t];
        raw_bits[t] += o.raw_bits[t];
    }
    ref_bits += o.ref_bits;
    header_bits += o.header_bits;
}

double FrameCost::bits_per_event(size_t type) const {
    if (event_count == 0) return 0;
    return static_cast<double>(symbol_bits[type] + raw_bits[type]) /
           static_cast<double>(event_count);
}

double FrameCost::total_bits_per_event() const {
    double sum = 0;
    for (size_t t = 0; t < kValueTypes; ++t) sum += bits_per_event(t);
    return sum;
}

CodeBook build_codebook(std::span<const RelativeEvent> corpus,
                        const CodecConfig& config) {
    validate_config(config);
    if (corpus.empty())
        throw ContractError("build_codebook: empty corpus");

    CodeBook book;
    book.config = config;
    book.channel_class = assign_classes(corpus, config, book.class_count);

    // Gather values per (type, class).
    const uint16_t K = book.class_count;
    std::vector<std::vector<uint64_t>> pulses_syms(K);
    std::array<std::vector<std::vector<uint64_t>>, kValueTypes> values;
    for (size_t t = kStart; t < kValueTypes; ++t) values[t].assign(K, {});

    for (const RelativeEvent& ev : corpus) {
        size_t rec_idx = 0;
        for (uint32_t c = 0; c < config.channel_count; ++c) {
            uint32_t count = 0;
            const ChannelRecord* rec = nullptr;
            if (rec_idx < ev.channels.size() && ev.channels[rec_idx].channel == c) {
                rec = &ev.channels[rec_idx];
                count = rec->pulse_count();
                ++rec_idx;
            }
            uint8_t cls = book.channel_class[c];
            pulses_syms[cls].push_back(count <= kPulsesBound ? count
                                                             : kPulsesBound + 1);
            if (!rec) continue;
            values[kStart][cls].push_back(rec->start);
            for (uint64_t w : rec->widths) values[kWidth][cls].push_back(w);
            for (uint64_t d : rec->distances) values[kDistance][cls].push_back(d);
        }
        if (rec_idx != ev.channels.size())
            throw ContractError("build_codebook: channel above channel_count or unsorted");
    }

    // Pulses tables: alphabet 0..bound plus escape. Every symbol gets a
    // floor count of one so that a codebook trained on one corpus can
    // still encode any legal value of another.
    {
        const uint32_t alphabet = kPulsesBound + 2;
        uint8_t table_log = resolve_table_log(config.streams[kPulses], alphabet);
        for (uint16_t k = 0; k < K; ++k) {
            std::vector<double> w(alphabet, 1.0);
            for (uint64_t s : pulses_syms[k]) w[s] += 1.0;
            book.tables[kPulses].push_back(make_table(
                config.streams[kPulses].coder, table_log, std::nullopt, w));
        }
    }

    // Numeric tables: binning plus bin-choice coder.
    for (size_t t = kStart; t < kValueTypes; ++t) {
        const ValueStreamConfig& sc = config.streams[t];
        if (sc.bin_mode == BinMode::direct) {
            for (uint16_t k = 0; k < K; ++k) {
                CoderTable tab;
                tab.kind = CoderKind::exp_golomb;
                tab.alphabet = 0; // direct values, no tables
                book.tables[t].push_back(std::move(tab));
            }
            continue;
        }
        size_t total_values = 0;
        for (uint16_t k = 0; k < K; ++k) total_values += values[t][k].size();
        std::vector<BinningTable> bins;
        uint32_t max_alphabet = 1;
        for (uint16_t k = 0; k < K; ++k) {
            std::vector<uint64_t>& vals = values[t][k];
            std::sort(vals.begin(), vals.end());
            uint64_t max_value = vals.empty() ? 0 : vals.back();
            BinningTable table = [&] {
                if (vals.empty())
                    return BinningTable::from_widths(std::vector<uint8_t>{0});
                if (sc.bin_mode == BinMode::simple) {
                    int total_bits = std::max(1, bit_length(max_value));
                    int low_bits = sc.simple_low_bits != 0
                                       ? sc.simple_low_bits
                                       : std::max(0, total_bits - 4);
                    if (low_bits > total_bits) low_bits = total_bits;
                    return truncate_binning(simple_binning(total_bits, low_bits),
                                            max_value);
                }
                // Scale the per-bin minimum by the class's share of the
                // data so per-class tables keep the bin granularity of
                // the shared table.
                uint64_t min_per_bin = std::max<uint64_t>(
                    1, static_cast<uint64_t>(
                           std::llround(static_cast<double>(sc.adaptive_min_per_bin) *
                                        static_cast<double>(vals.size()) /
                                        static_cast<double>(total_values))));
                return adaptive_binning(vals, min_per_bin, max_value);
            }();
            if (table.bin_count() > 65535)
                throw Error("bin table too large to serialize");
            uint32_t alphabet = static_cast<uint32_t>(table.bin_count()) +
                                (config.escape_enabled ? 1 : 0);
            max_alphabet = std::max(max_alphabet, alphabet);
            bins.push_back(std::move(table));
        }
        uint8_t table_log = resolve_table_log(sc, max_alphabet);
        for (uint16_t k = 0; k < K; ++k) {
            uint32_t alphabet = static_cast<uint32_t>(bins[k].bin_count()) +
                                (config.escape_enabled ? 1 : 0);
            std::vector<double> w(alphabet, 1.0); // floor keeps all bins codable
            for (uint64_t v : values[t][k]) w[bins[k].lookup(v)] += 1.0;
            book.tables[t].push_back(make_table(sc.coder, table_log,
                                                std::move(bins[k]), w));
        }
    }
    return book;
}

// ---------------------------------------------------------------------------
// Codebook serialization

namespace {

void write_stream_config(ByteWriter& w, const ValueStreamConfig& s) {
    w.u8(static_cast<uint8_t>(s.coder));
    w.u8(s.table_log);
    w.u8(static_cast<uint8_t>(s.bin_mode));
    w.u8(s.simple_low_bits);
    w.u32(s.adaptive_min_per_bin);
}

ValueStreamConfig read_stream_config(ByteReader& r) {
    ValueStreamConfig s;
    uint8_t coder = r.u8();
    if (coder > 2) throw MalformedData("codebook: bad coder kind");
    s.coder = static_cast<CoderKind>(coder);
    s.table_log = r.u8();
    uint8_t mode = r.u8();
    if (mode > 2) throw MalformedData("codebook: bad bin mode");
    s.bin_mode = static_cast<BinMode>(mode);
    s.simple_low_bits = r.u8();
    s.adaptive_min_per_bin = r.u32();
    return s;
}

void write_binning(ByteWriter& w, const BinningTable& table) {
    w.u16(static_cast<uint16_t>(table.bin_count()));
    BitSink sink;
    for (uint8_t width : table.widths()) sink.write_bits(width, 6);
    BitBuffer buf = sink.finish();
    w.raw(buf.bytes);
}

BinningTable read_binning(ByteReader& r) {
    uint16_t count = r.u16();
    if (count == 0) throw MalformedData("codebook: empty bin table");
    size_t nbytes = (static_cast<size_t>(count) * 6 + 7) / 8;
    auto raw = r.raw(nbytes);
    BitCursor cursor(raw, static_cast<uint64_t>(count) * 6,
                     BitCursor::Direction::forward);
    std::vector<uint8_t> widths(count);
    for (uint16_t i = 0; i < count; ++i)
        widths[i] = static_cast<uint8_t>(cursor.read_bits(6));
    return BinningTable::from_widths(widths);
}

} // namespace

std::vector<uint8_t> serialize_codebook(const CodeBook& book) {
    ByteWriter w;
    w.raw(std::span<const uint8_t>(
        reinterpret_cast<const uint8_t*>(kCodebookMagic), 4));
    w.u8(kCodebookVersion);

    const CodecConfig& c = book.config;
    w.u16(static_cast<uint16_t>(c.channel_count));
    w.u8(static_cast<uint8_t>(c.channel_mode));
    w.u16(c.class_count);
    w.u32(c.frame_size);
    w.u8(c.store_ref ? 1 : 0);
    w.u8(c.escape_enabled ? 1 : 0);
    for (size_t t = 0; t < kValueTypes; ++t) write_stream_config(w, c.streams[t]);

    w.u16(book.class_count);
    for (uint8_t v : book.channel_class) w.u8(v);

    for (size_t t = 0; t < kValueTypes; ++t) {
        for (const CoderTable& tab : book.tables[t]) {
            w.u32(tab.alphabet);
            if (tab.alphabet == 0) continue; // direct mode
            w.u8(tab.table_log);
            w.u8(tab.bins.has_value() ? 1 : 0);
            if (tab.bins) write_binning(w, *tab.bins);
            if (tab.kind == CoderKind::tans) {
                for (uint32_t ls : tab.ls) w.u16(static_cast<uint16_t>(ls));
            } else if (tab.kind == CoderKind::huffman) {
                for (const Codeword& cw : tab.prefix.codewords) w.u8(cw.length);
                w.u32(tab.prefix.singleton ? *tab.prefix.singleton : 0xFFFFFFFFu);
            }
        }
    }
    return std::move(w.bytes);
}

CodeBook deserialize_codebook(std::span<const uint8_t> bytes) {
    ByteReader r{bytes};
    auto magic = r.raw(4);
    if (std::memcmp(magic.data(), kCodebookMagic, 4) != 0)
        throw MalformedData("codebook: bad magic");
    if (r.u8() != kCodebookVersion)
        throw VersionMismatch("codebook: unsupported version");

    CodeBook book;
    CodecConfig& c = book.config;
    c.channel_count = r.u16();
    uint8_t mode = r.u8();
    if (mode > 2) throw MalformedData("codebook: bad channel mode");
    c.channel_mode = static_cast<ChannelMode>(mode);
    c.class_count = r.u16();
    c.frame_size = r.u32();
    c.store_ref = r.u8() != 0;
    c.escape_enabled = r.u8() != 0;
    for (size_t t = 0; t < kValueTypes; ++t) c.streams[t] = read_stream_config(r);
    validate_config(c);

    book.class_count = r.u16();
    if (book.class_count == 0)
        throw MalformedData("codebook: zero classes");
    book.channel_class.resize(c.channel_count);
    for (uint32_t i = 0; i < c.channel_count; ++i) {
        book.channel_class[i] = r.u8();
        if (book.channel_class[i] >= book.class_count)
            throw MalformedData("codebook: channel class out of range");
    }

    for (size_t t = 0; t < kValueTypes; ++t) {
        for (uint16_t k = 0; k < book.class_count; ++k) {
            CoderTable tab;
            tab.kind = c.streams[t].coder;
            tab.alphabet = r.u32();
            if (tab.alphabet == 0) {
                if (c.streams[t].bin_mode != BinMode::direct)
                    throw MalformedData("codebook: missing tables");
                tab.kind = CoderKind::exp_golomb;
                book.tables[t].push_back(std::move(tab));
                continue;
            }
            if (tab.alphabet > (1u << 16))
                throw MalformedData("codebook: alphabet too large");
            tab.table_log = r.u8();
            if (tab.table_log > 15)
                throw MalformedData("codebook: table_log too large");
            bool has_bins = r.u8() != 0;
            if (has_bins != is_numeric(t))
                throw MalformedData("codebook: bin table presence mismatch");
            if (has_bins) tab.bins = read_binning(r);
            if (tab.kind == CoderKind::tans) {
                tab.ls.resize(tab.alphabet);
                uint64_t total = 0;
                for (uint32_t s = 0; s < tab.alphabet; ++s) {
                    tab.ls[s] = r.u16();
                    total += tab.ls[s];
                }
                if (total != (1ull << tab.table_log))
                    throw MalformedData("codebook: corrupt tANS counts");
                tab.automaton = build_automaton(tab.ls, tab.table_log);
            } else if (tab.kind == CoderKind::huffman) {
                std::vector<uint8_t> lengths(tab.alphabet);
                for (uint32_t s = 0; s < tab.alphabet; ++s) lengths[s] = r.u8();
                uint32_t singleton = r.u32();
                tab.prefix = prefix_from_lengths(
                    lengths, singleton == 0xFFFFFFFFu
                                 ? std::nullopt
                                 : std::optional<uint32_t>(singleton));
            }
            book.tables[t].push_back(std::move(tab));
        }
    }
    if (r.pos != bytes.size())
        throw MalformedData("codebook: trailing bytes");
    return book;
}

// ---------------------------------------------------------------------------
// Frame compression

namespace {

// Forward schedule entry for one symbol of a stream.
struct SymSeq {
    std::vector<uint64_t> syms;
    std::vector<uint8_t> cls;

    void push(uint64_t sym, uint8_t cls_id) {
        syms.push_back(sym);
        cls.push_back(cls_id);
    }
};

void encode_stream(const SymSeq& seq, const std::vector<CoderTable>& tables,
                   CoderKind kind, BitSink& sink, uint32_t* final_state) {
    if (kind == CoderKind::tans) {
        uint32_t L = tables[0].automaton.state_count;
        CoderState state{L};
        for (size_t i = 0; i < seq.syms.size(); ++i)
            tans_encode_symbol(state, static_cast<uint32_t>(seq.syms[i]),
                               tables[seq.cls[i]].automaton, sink);
        *final_state = state.x - L;
    } else if (kind == CoderKind::huffman) {
        for (size_t i = 0; i < seq.syms.size(); ++i) {
            uint32_t sym = static_cast<uint32_t>(seq.syms[i]);
            huffman_encode(std::span<const uint32_t>(&sym, 1),
                           tables[seq.cls[i]].prefix, sink);
        }
    } else {
        for (uint64_t sym : seq.syms) exp_golomb_encode(sym, sink);
    }
}

std::vector<uint64_t> decode_stream(std::span<const uint8_t> payload,
                                    uint64_t bit_count, size_t count,
                                    std::span<const uint8_t> cls,
                                    const std::vector<CoderTable>& tables,
                                    CoderKind kind, uint32_t stored_state) {
    std::vector<uint64_t> out(count);
    if (kind == CoderKind::tans) {
        BitCursor cursor(payload, bit_count, BitCursor::Direction::reverse);
        uint32_t L = tables[0].automaton.state_count;
        if (stored_state >= L)
            throw MalformedData("frame: tANS state out of range");
        CoderState state{L + stored_state};
        for (size_t i = count; i-- > 0;)
            out[i] = tans_decode_symbol(state, tables[cls[i]].automaton, cursor);
        if (state.x != L)
            throw MalformedData("frame: tANS stream did not return to initial state");
        if (cursor.remaining() != 0)
            throw MalformedData("frame: tANS stream not fully consumed");
    } else if (kind == CoderKind::huffman) {
        BitCursor cursor(payload, bit_count, BitCursor::Direction::forward);
        std::vector<std::optional<HuffmanDecoder>> decoders(tables.size());
        for (size_t i = 0; i < count; ++i) {
            auto& dec = decoders[cls[i]];
            if (!dec) dec.emplace(tables[cls[i]].prefix);
            out[i] = dec->decode_one(cursor);
        }
        if (cursor.remaining() != 0)
            throw MalformedData("frame: prefix stream not fully consumed");
    } else {
        BitCursor cursor(payload, bit_count, BitCursor::Direction::forward);
        for (size_t i = 0; i < count; ++i) out[i] = exp_golomb_decode(cursor);
        if (cursor.remaining() != 0)
            throw MalformedData("frame: value stream not fully consumed");
    }
    return out;
}

// Symbol (and raw-bit fate) of one numeric value under a table.
uint64_t numeric_symbol(uint64_t value, const CoderTable& tab, bool escape_enabled) {
    if (tab.kind == CoderKind::exp_golomb && !tab.bins) return value; // direct
    const BinningTable& bins = *tab.bins;
    if (value < bins.total_range()) return bins.lookup(value);
    if (!escape_enabled)
        throw Error("value outside binning range and escapes disabled");
    return bins.bin_count(); // escape symbol
}

} // namespace

std::vector<uint8_t> compress_frame(std::span<const RelativeEvent> events,
                                    const CodeBook& book, FrameCost* cost) {
    const CodecConfig& config = book.config;
    const uint32_t C = config.channel_count;

    SymSeq seq[kValueTypes];
    BitSink raw;
    BitSink ref;
    std::array<uint64_t, kValueTypes> raw_bits{};

    // Pass 1: pulses symbols and their escape extensions (extensions sit
    // at the head of the raw stream so the decoder can recover counts
    // before any other stream).
    for (const RelativeEvent& ev : events) {
        size_t rec_idx = 0;
        for (uint32_t c = 0; c < C; ++c) {
            uint32_t count = 0;
            if (rec_idx < ev.channels.size() && ev.channels[rec_idx].channel == c) {
                count = ev.channels[rec_idx].pulse_count();
                ++rec_idx;
            }
            uint8_t cls = book.channel_class[c];
            if (count <= kPulsesBound) {
                seq[kPulses].push(count, cls);
            } else {
                seq[kPulses].push(kPulsesBound + 1, cls);
                uint64_t before = raw.bit_count();
                exp_golomb_encode(count - kPulsesBound - 1, raw);
                raw_bits[kPulses] += raw.bit_count() - before;
            }
        }
        if (rec_idx != ev.channels.size())
            throw ContractError("compress_frame: channel above channel_count or unsorted");
    }

    // Pass 2: numeric symbols and their low bits, in schedule order:
    // events, channels ascending, start, then width/distance alternating.
    auto emit_numeric = [&](size_t type, uint64_t value, uint8_t cls) {
        const CoderTable& tab = book.tables[type][cls];
        uint64_t before = raw.bit_count();
        if (tab.kind == CoderKind::exp_golomb && !tab.bins) {
            seq[type].push(value, cls); // direct: value goes to the symbol stream
        } else {
            uint64_t sym = numeric_symbol(value, tab, config.escape_enabled);
            seq[type].push(sym, cls);
            if (sym == tab.bins->bin_count()) {
                raw.write_bits(value, kEscapeRawBits);
            } else {
                raw.write_bits(value - tab.bins->bin_start(static_cast<uint32_t>(sym)),
                               tab.bins->bin_width(static_cast<uint32_t>(sym)));
            }
        }
        raw_bits[type] += raw.bit_count() - before;
    };

    int64_t prev_ref = 0;
    for (const RelativeEvent& ev : events) {
        if (config.store_ref) {
            write_varint_delta(ref, static_cast<int64_t>(ev.ref) - prev_ref);
            prev_ref = static_cast<int64_t>(ev.ref);
        }
        for (const ChannelRecord& rec : ev.channels) {
            if (rec.channel >= C)
                throw ContractError("compress_frame: channel out of range");
            if (rec.widths.size() != rec.distances.size() + 1)
                throw ContractError("compress_frame: width/distance mismatch");
            uint8_t cls = book.channel_class[rec.channel];
            emit_numeric(kStart, rec.start, cls);
            for (size_t p = 0; p < rec.widths.size(); ++p) {
                emit_numeric(kWidth, rec.widths[p], cls);
                if (p < rec.distances.size())
                    emit_numeric(kDistance, rec.distances[p], cls);
            }
        }
    }

    // Encode symbol streams.
    std::array<BitBuffer, kValueTypes> sym_payload;
    std::array<uint32_t, kValueTypes> final_states{};
    for (size_t t = 0; t < kValueTypes; ++t) {
        BitSink sink;
        encode_stream(seq[t], book.tables[t], config.streams[t].coder, sink,
                      &final_states[t]);
        sym_payload[t] = sink.finish();
    }
    BitBuffer raw_payload = raw.finish();
    BitBuffer ref_payload = ref.finish();

    // Header: event count, six bit lengths, tANS final states.
    ByteWriter w;
    w.u32(static_cast<uint32_t>(events.size()));
    for (size_t t = 0; t < kValueTypes; ++t) w.u64(sym_payload[t].bit_count);
    w.u64(raw_payload.bit_count);
    w.u64(ref_payload.bit_count);
    {
        BitSink states;
        for (size_t t = 0; t < kValueTypes; ++t)
            if (config.streams[t].coder == CoderKind::tans)
                states.write_bits(final_states[t], book.tables[t][0].table_log);
        BitBuffer buf = states.finish();
        w.raw(buf.bytes);
    }
    for (size_t t = 0; t < kValueTypes; ++t) w.raw(sym_payload[t].bytes);
    w.raw(raw_payload.bytes);
    w.raw(ref_payload.bytes);
    uint32_t crc = crc32(w.bytes);
    w.u32(crc);

    if (cost) {
        FrameCost fc;
        fc.event_count = events.size();
        for (size_t t = 0; t < kValueTypes; ++t) {
            fc.symbol_bits[t] = sym_payload[t].bit_count;
            fc.raw_bits[t] = raw_bits[t];
        }
        fc.ref_bits = ref_payload.bit_count;
        // header_bits covers everything that is not stream payload:
        // the fixed header, final states, per-stream padding, and CRC.
        uint64_t payload_bits = raw_payload.bit_count + ref_payload.bit_count;
        for (size_t t = 0; t < kValueTypes; ++t) payload_bits += sym_payload[t].bit_count;
        fc.header_bits = static_cast<uint64_t>(w.bytes.size()) * 8 - payload_bits;
        cost->add(fc);
    }
    return std::move(w.bytes);
}

std::vector<RelativeEvent> decompress_frame(std::span<const uint8_t> bytes,
                                            const CodeBook& book) {
    const CodecConfig& config = book.config;
    const uint32_t C = config.channel_count;

    if (bytes.size() < 4)
        throw MalformedData("frame: too short");
    uint32_t stored_crc = static_cast<uint32_t>(bytes[bytes.size() - 4]) |
                 (static_cast<uint32_t>(bytes[bytes.size() - 3]) << 8) |
                 (static_cast<uint32_t>(bytes[bytes.size() - 2]) << 16) |
                 (static_cast<uint32_t>(bytes[bytes.size() - 1]) << 24);
    if (crc32(bytes.subspan(0, bytes.size() - 4)) != stored_crc)
        throw CrcMismatch("frame: CRC mismatch");

    ByteReader r{bytes.subspan(0, bytes.size() - 4)};
    uint32_t event_count = r.u32();
    if (event_count > (1u << 26))
        throw MalformedData("frame: event count implausible");
    std::array<uint64_t, kValueTypes> sym_bits{};
    for (size_t t = 0; t < kValueTypes; ++t) sym_bits[t] = r.u64();
    uint64_t raw_bits = r.u64();
    uint64_t ref_bits = r.u64();

    std::array<uint32_t, kValueTypes> final_states{};
    {
        uint64_t state_bits = 0;
        for (size_t t = 0; t < kValueTypes; ++t)
            if (config.streams[t].coder == CoderKind::tans)
                state_bits += book.tables[t][0].table_log;
        auto raw_states = r.raw((state_bits + 7) / 8);
        BitCursor cursor(raw_states, state_bits, BitCursor::Direction::forward);
        for (size_t t = 0; t < kValueTypes; ++t)
            if (config.streams[t].coder == CoderKind::tans)
                final_states[t] = static_cast<uint32_t>(
                    cursor.read_bits(book.tables[t][0].table_log));
    }

    std::array<std::span<const uint8_t>, kValueTypes> sym_payload;
    for (size_t t = 0; t < kValueTypes; ++t)
        sym_payload[t] = r.raw((sym_bits[t] + 7) / 8);
    auto raw_payload = r.raw((raw_bits + 7) / 8);
    auto ref_payload = r.raw((ref_bits + 7) / 8);
    if (r.pos != r.bytes.size())
        throw MalformedData("frame: trailing bytes");

    // Pulses stream: one symbol per (event, channel).
    const size_t pulses_count = static_cast<size_t>(event_count) * C;
    std::vector<uint8_t> pulses_cls(pulses_count);
    for (size_t i = 0; i < pulses_count; ++i)
        pulses_cls[i] = book.channel_class[i % C];
    std::vector<uint64_t> pulses_syms =
        decode_stream(sym_payload[kPulses], sym_bits[kPulses], pulses_count,
                      pulses_cls, book.tables[kPulses],
                      config.streams[kPulses].coder, final_states[kPulses]);

    // Raw cursor: escape extensions first, then per-value low bits.
    BitCursor raw_cursor(raw_payload, raw_bits, BitCursor::Direction::forward);
    std::vector<uint32_t> counts(pulses_count);
    uint64_t total_pulses = 0;
    for (size_t i = 0; i < pulses_count; ++i) {
        uint64_t sym = pulses_syms[i];
        if (sym > kPulsesBound + 1)
            throw MalformedData("frame: pulses symbol out of range");
        uint64_t count = sym <= kPulsesBound
                             ? sym
                             : kPulsesBound + 1 + exp_golomb_decode(raw_cursor);
        total_pulses += count;
        if (count > (1u << 28) || total_pulses > (1ull << 28))
            throw MalformedData("frame: pulse counts implausible");
        counts[i] = static_cast<uint32_t>(count);
    }

    // Schedules for the numeric streams.
    std::array<SymSeq, kValueTypes> sched; // cls only; syms unused here
    for (size_t i = 0; i < pulses_count; ++i) {
        uint32_t count = counts[i];
        if (count == 0) continue;
        uint8_t cls = pulses_cls[i];
        sched[kStart].cls.push_back(cls);
        for (uint32_t p = 0; p < count; ++p) {
            sched[kWidth].cls.push_back(cls);
            if (p + 1 < count) sched[kDistance].cls.push_back(cls);
        }
    }

    std::array<std::vector<uint64_t>, kValueTypes> syms;
    for (size_t t = kStart; t < kValueTypes; ++t)
        syms[t] = decode_stream(sym_payload[t], sym_bits[t], sched[t].cls.size(),
                                sched[t].cls, book.tables[t],
                                config.streams[t].coder, final_states[t]);

    // Forward walk: materialize values from symbols plus raw bits.
    std::array<size_t, kValueTypes> next{};
    auto take_numeric = [&](size_t type, uint8_t channel) -> uint64_t {
        const CoderTable& tab = book.table_for(type, channel);
        uint64_t sym = syms[type][next[type]++];
        if (tab.kind == CoderKind::exp_golomb && !tab.bins) return sym;
        const BinningTable& bins = *tab.bins;
        if (sym < bins.bin_count())
            return bins.bin_start(static_cast<uint32_t>(sym)) +
                   raw_cursor.read_bits(bins.bin_width(static_cast<uint32_t>(sym)));
        if (config.escape_enabled && sym == bins.bin_count())
            return raw_cursor.read_bits(kEscapeRawBits);
        throw MalformedData("frame: bin symbol out of range");
    };

    BitCursor ref_cursor(ref_payload, ref_bits, BitCursor::Direction::forward);
    int64_t prev_ref = 0;

    std::vector<RelativeEvent> events(event_count);
    size_t pos = 0;
    for (uint32_t e = 0; e < event_count; ++e) {
        RelativeEvent& ev = events[e];
        if (config.store_ref) {
            prev_ref += read_varint_delta(ref_cursor);
            ev.ref = static_cast<uint64_t>(prev_ref);
        }
        for (uint32_t c = 0; c < C; ++c, ++pos) {
            uint32_t count = counts[pos];
            if (count == 0) continue;
            ChannelRecord rec;
            rec.channel = static_cast<uint8_t>(c);
            rec.start = take_numeric(kStart, rec.channel);
            for (uint32_t p = 0; p < count; ++p) {
                rec.widths.push_back(take_numeric(kWidth, rec.channel));
                if (p + 1 < count)
                    rec.distances.push_back(take_numeric(kDistance, rec.channel));
            }
            ev.channels.push_back(std::move(rec));
        }
    }
    if (raw_cursor.remaining() != 0)
        throw MalformedData("frame: raw stream not fully consumed");
    if (ref_cursor.remaining() != 0)
        throw MalformedData("frame: ref stream not fully consumed");
    return events;
}

// ---------------------------------------------------------------------------
// Container

namespace {

void write_stream_bytes(std::ostream& out, std::span<const uint8_t> bytes) {
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("container: write failed");
}

void write_directory_entry(std::ostream& out, const FrameEntry& fe) {
    ByteWriter w;
    w.u64(fe.offset);
    w.u64(fe.byte_length);
    w.u32(fe.event_count);
    write_stream_bytes(out, w.bytes);
}

} // namespace

ContainerWriter::ContainerWriter(std::ostream& out, const CodeBook& book,
                                 uint32_t first_seq, uint64_t total_events)
    : out_(out), book_(book), total_events_(total_events) {
    std::vector<uint8_t> codebook = serialize_codebook(book);
    ByteWriter w;
    w.raw(std::span<const uint8_t>(
        reinterpret_cast<const uint8_t*>(kContainerMagic), 4));
    w.u8(kContainerVersion);
    w.u64(codebook.size());
    w.raw(codebook);
    w.u32(first_seq);
    const uint64_t frame_count =
        total_events == 0
            ? 0
            : (total_events + book.config.frame_size - 1) / book.config.frame_size;
    w.u32(static_cast<uint32_t>(frame_count));
    directory_pos_ = w.bytes.size();
    // placeholder directory, patched by finish()
    for (uint64_t f = 0; f < frame_count; ++f) {
        w.u64(0);
        w.u64(0);
        w.u32(0);
    }
    next_offset_ = w.bytes.size();
    write_stream_bytes(out_, w.bytes);
}

void ContainerWriter::flush_frames(unsigned threads, FrameCost* cost,
                                   bool final_chunk) {
    const uint32_t frame_size = book_.config.frame_size;
    for (;;) {
        // Carve up to one batch of frames; a short tail frame is cut
        // only once the declared event total has arrived.
        std::vector<std::span<const RelativeEvent>> slices;
        size_t used = 0;
        while (slices.size() < std::max(1u, threads)) {
            size_t avail = pending_.size() - used;
            size_t take = 0;
            if (avail >= frame_size) take = frame_size;
            else if (final_chunk && avail > 0) take = avail;
            else break;
            slices.push_back(
                std::span<const RelativeEvent>(pending_).subspan(used, take));
            used += take;
        }
        if (slices.empty()) break;

        std::vector<std::vector<uint8_t>> frames(slices.size());
        std::vector<FrameCost> costs(slices.size());
        auto work = [&](size_t f) {
            frames[f] = compress_frame(slices[f], book_, cost ? &costs[f] : nullptr);
        };
        if (threads <= 1 || slices.size() <= 1) {
            for (size_t f = 0; f < slices.size(); ++f) work(f);
        } else {
            std::atomic<size_t> next{0};
            std::vector<std::thread> pool;
            unsigned n = std::min<unsigned>(threads,
                                            static_cast<unsigned>(slices.size()));
            for (unsigned i = 0; i < n; ++i)
                pool.emplace_back([&] {
                    for (size_t f = next.fetch_add(1); f < slices.size();
                         f = next.fetch_add(1))
                        work(f);
                });
            for (auto& t : pool) t.join();
        }
        for (size_t f = 0; f < slices.size(); ++f) {
            entries_.push_back(FrameEntry{next_offset_, frames[f].size(),
                                          static_cast<uint32_t>(slices[f].size())});
            next_offset_ += frames[f].size();
            write_stream_bytes(out_, frames[f]);
            if (cost) cost->add(costs[f]);
        }
        pending_.erase(pending_.begin(), pending_.begin() + used);
    }
}

void ContainerWriter::add_events(std::span<const RelativeEvent> events,
                                 unsigned threads, FrameCost* cost) {
    if (finished_) throw ContractError("ContainerWriter: already finished");
    events_seen_ += events.size();
    if (events_seen_ > total_events_)
        throw ContractError("ContainerWriter: more events than declared");
    pending_.insert(pending_.end(), events.begin(), events.end());
    flush_frames(threads, cost, events_seen_ == total_events_);
}

void ContainerWriter::finish() {
    if (finished_) return;
    if (events_seen_ != total_events_)
        throw ContractError("ContainerWriter: fewer events than declared");
    flush_frames(1, nullptr, true);
    finished_ = true;
    const uint64_t frame_count =
        total_events_ == 0
            ? 0
            : (total_events_ + book_.config.frame_size - 1) /
                  book_.config.frame_size;
    if (entries_.size() != frame_count)
        throw ContractError("ContainerWriter: frame count drifted");
    out_.seekp(static_cast<std::streamoff>(directory_pos_));
    if (!out_) throw Error("container: seek failed");
    for (const FrameEntry& fe : entries_) write_directory_entry(out_, fe);
    out_.seekp(0, std::ios::end);
    out_.flush();
    if (!out_) throw Error("container: write failed");
}

std::vector<uint8_t> compress_container(std::span<const RelativeEvent> events,
                                        const CodeBook& book, uint32_t first_seq,
                                        unsigned threads, FrameCost* cost) {
    std::ostringstream buffer(std::ios::binary);
    ContainerWriter writer(buffer, book, first_seq, events.size());
    writer.add_events(events, threads, cost);
    writer.finish();
    std::string s = std::move(buffer).str();
    return std::vector<uint8_t>(s.begin(), s.end());
}

namespace {

// Guards against corrupt length fields demanding absurd allocations.
constexpr uint64_t kMaxCodebookBytes = 1ull << 30;
constexpr uint64_t kMaxFrameCount = 1ull << 26;
constexpr uint64_t kMaxFrameBytes = 1ull << 32;

} // namespace

ContainerInfo read_container_info(std::span<const uint8_t> bytes) {
    ByteReader r{bytes};
    auto magic = r.raw(4);
    if (std::memcmp(magic.data(), kContainerMagic, 4) != 0)
        throw MalformedData("container: bad magic");
    if (r.u8() != kContainerVersion)
        throw VersionMismatch("container: unsupported version");
    uint64_t codebook_len = r.u64();
    if (codebook_len > kMaxCodebookBytes)
        throw MalformedData("container: codebook length implausible");
    auto codebook_bytes = r.raw(codebook_len);
    ContainerInfo info;
    info.book = deserialize_codebook(codebook_bytes);
    info.first_seq = r.u32();
    uint32_t frame_count = r.u32();
    info.frames.resize(frame_count);
    for (uint32_t f = 0; f < frame_count; ++f) {
        info.frames[f].offset = r.u64();
        info.frames[f].byte_length = r.u64();
        info.frames[f].event_count = r.u32();
        if (info.frames[f].offset + info.frames[f].byte_length > bytes.size())
            throw MalformedData("container: frame out of bounds");
    }
    return info;
}

ContainerInfo read_container_info_stream(std::istream& in) {
    auto read_n = [&](size_t n) {
        std::vector<uint8_t> buf(n);
        in.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(n));
        if (static_cast<size_t>(in.gcount()) != n)
            throw MalformedData("container: truncated header");
        return buf;
    };
    std::vector<uint8_t> head = read_n(4 + 1 + 8);
    ByteReader r{head};
    auto magic = r.raw(4);
    if (std::memcmp(magic.data(), kContainerMagic, 4) != 0)
        throw MalformedData("container: bad magic");
    if (r.u8() != kContainerVersion)
        throw VersionMismatch("container: unsupported version");
    uint64_t codebook_len = r.u64();
    if (codebook_len > kMaxCodebookBytes)
        throw MalformedData("container: codebook length implausible");

    ContainerInfo info;
    std::vector<uint8_t> codebook = read_n(codebook_len);
    info.book = deserialize_codebook(codebook);

    std::vector<uint8_t> counts = read_n(4 + 4);
    ByteReader rc{counts};
    info.first_seq = rc.u32();
    uint32_t frame_count = rc.u32();
    if (frame_count > kMaxFrameCount)
        throw MalformedData("container: frame count implausible");

    std::vector<uint8_t> directory = read_n(static_cast<size_t>(frame_count) * 20);
    ByteReader rd{directory};
    info.frames.resize(frame_count);
    for (uint32_t f = 0; f < frame_count; ++f) {
        info.frames[f].offset = rd.u64();
        info.frames[f].byte_length = rd.u64();
        info.frames[f].event_count = rd.u32();
    }
    return info;
}

std::vector<uint8_t> read_frame_bytes(std::istream& in, const ContainerInfo& info,
                                      size_t frame_index) {
    if (frame_index >= info.frames.size())
        throw ContractError("read_frame_bytes: frame index out of range");
    const FrameEntry& fe = info.frames[frame_index];
    if (fe.byte_length > kMaxFrameBytes)
        throw MalformedData("container: frame length implausible");
    in.clear();
    in.seekg(static_cast<std::streamoff>(fe.offset));
    std::vector<uint8_t> bytes(fe.byte_length);
    in.read(reinterpret_cast<char*>(bytes.data()),
            static_cast<std::streamsize>(fe.byte_length));
    if (static_cast<size_t>(in.gcount()) != fe.byte_length)
        throw MalformedData("container: truncated frame");
    return bytes;
}

std::vector<RelativeEvent> decompress_frame_at(std::span<const uint8_t> container,
                                               const ContainerInfo& info,
                                               size_t frame_index) {
    if (frame_index >= info.frames.size())
        throw ContractError("decompress_frame_at: frame index out of range");
    const FrameEntry& fe = info.frames[frame_index];
    auto events = decompress_frame(
        container.subspan(fe.offset, fe.byte_length), info.book);
    if (events.size() != fe.event_count)
        throw MalformedData("container: frame event count mismatch");
    return events;
}

std::vector<RelativeEvent> decompress_container(std::span<const uint8_t> bytes,
                                                unsigned threads,
                                                uint32_t* first_seq) {
    ContainerInfo info = read_container_info(bytes);
    if (first_seq) *first_seq = info.first_seq;
    std::vector<std::vector<RelativeEvent>> parts(info.frames.size());
    auto work = [&](size_t f) { parts[f] = decompress_frame_at(bytes, info, f); };
    if (threads <= 1 || info.frames.size() <= 1) {
        for (size_t f = 0; f < info.frames.size(); ++f) work(f);
    } else {
        std::atomic<size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        unsigned n = std::min<unsigned>(threads,
                                        static_cast<unsigned>(info.frames.size()));
        for (unsigned i = 0; i < n; ++i)
            pool.emplace_back([&] {
                try {
                    for (size_t f = next.fetch_add(1); f < info.frames.size();
                         f = next.fetch_add(1))
                        work(f);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            });
        for (auto& t : pool) t.join();
        if (error) std::rethrow_exception(error);
    }
    std::vector<RelativeEvent> events;
    for (auto& p : parts)
        for (auto& ev : p) events.push_back(std::move(ev));
    return events;
}

// ---------------------------------------------------------------------------
// Cost report

CostReport report_cost(std::span<const RelativeEvent> corpus,
                       std::span<const ReportConfig> configs) {
    CostReport report;
    for (const ReportConfig& rc : configs) {
        ReportRow row;
        row.label = rc.label;
        if (rc.fixed) {
            FixedCost fc = fixed_cost(corpus, rc.config.channel_count);
            row.type_bits[kPulses] = fc.pulses_bits * fc.pulses_per_event;
            row.type_bits[kStart] = fc.start_bits * fc.starts_per_event;
            row.type_bits[kWidth] = fc.width_bits * fc.widths_per_event;
            row.type_bits[kDistance] = fc.distance_bits * fc.distances_per_event;
            row.total_bits = fc.total_bits_per_event;
        } else {
            CodeBook book = build_codebook(corpus, rc.config);
            FrameCost cost;
            compress_container(corpus, book, 0, 1, &cost);
            for (size_t t = 0; t < kValueTypes; ++t)
                row.type_bits[t] = cost.bits_per_event(t);
            row.total_bits = cost.total_bits_per_event();
            row.ref_bits = cost.event_count
                               ? static_cast<double>(cost.ref_bits) / cost.event_count
                               : 0;
            row.header_bits = cost.event_count
                                  ? static_cast<double>(cost.header_bits) /
                                        cost.event_count
                                  : 0;
            row.codebook_bytes = serialize_codebook(book).size();
        }
        report.rows.push_back(std::move(row));
    }
    report.notes.push_back(
        "not exploited: start is zero exactly once per event; pointing at that "
        "channel instead of coding its zero start would save ~2 bits/event");
    return report;
}

ReportConfig report_preset(const std::string& name, uint32_t channel_count) {
    ReportConfig rc;
    rc.label = name;
    rc.config.channel_count = channel_count;
    auto set_all = [&](CoderKind coder, BinMode mode) {
        for (size_t t = 0; t < kValueTypes; ++t) {
            rc.config.streams[t].coder = coder;
            rc.config.streams[t].bin_mode = mode;
        }
        rc.config.streams[kPulses].bin_mode = BinMode::simple; // unused
    };
    if (name == "fixed") {
        rc.fixed = true;
    } else if (name == "huffman-simple") {
        set_all(CoderKind::huffman, BinMode::simple);
    } else if (name == "tans-adaptive") {
        set_all(CoderKind::tans, BinMode::adaptive);
    } else if (name == "tans-adaptive-perchannel") {
        set_all(CoderKind::tans, BinMode::adaptive);
        rc.config.channel_mode = ChannelMode::per_channel;
    } else if (name == "expgolomb-direct") {
        set_all(CoderKind::exp_golomb, BinMode::direct);
    } else {
        throw Error("unknown report preset: " + name);
    }
    return rc;
}

} // namespace tdc
