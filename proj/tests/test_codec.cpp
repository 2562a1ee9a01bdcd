#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "tdc/codec.hpp"
#include "tdc/datagen.hpp"
#include "tdc/stats.hpp"

using namespace tdc;

namespace {

CodecConfig small_config(uint32_t channels = 8) {
    CodecConfig config;
    config.channel_count = channels;
    config.frame_size = 16;
    return config;
}

std::vector<RelativeEvent> small_corpus(uint64_t seed, size_t n = 64,
                                        uint32_t channels = 8) {
    GenParams params;
    params.seed = seed;
    params.channel_count = channels;
    return generate_events(params, n).events;
}

} // namespace

TEST_CASE("degenerate corpus builds single-symbol tables") {
    RelativeEvent ev;
    ev.ref = 10;
    ev.channels = {{0, 0, {5}, {}}};
    std::vector<RelativeEvent> corpus(20, ev);
    CodecConfig config = small_config(2);
    CodeBook book = build_codebook(corpus, config);
    // all widths equal: one bin, and the table still decodes
    const CoderTable& width = book.tables[kWidth][0];
    REQUIRE(width.bins.has_value());
    CHECK(width.bins->bin_count() == 1);
    auto frame = compress_frame(corpus, book);
    CHECK(decompress_frame(frame, book) == corpus);
}

TEST_CASE("pulses stream rate sits within deltaH of the entropy") {
    // i.i.d. pulse counts drawn from the reference distribution, coded
    // through a shared tANS table.
    std::mt19937_64 rng(3);
    std::discrete_distribution<uint32_t> pick(test::pulses_weights().begin(),
                                              test::pulses_weights().end());
    const uint32_t channels = 48;
    const size_t n_events = 2000;
    std::vector<RelativeEvent> corpus;
    for (size_t e = 0; e < n_events; ++e) {
        RelativeEvent ev;
        ev.ref = 1000 + e * 1000000;
        for (uint32_t c = 0; c < channels; ++c) {
            uint32_t pulses = pick(rng);
            if (pulses == 0) continue;
            ChannelRecord rec;
            rec.channel = (uint8_t)c;
            rec.start = 10 + rng() % 1000;
            for (uint32_t p = 0; p < pulses; ++p) {
                rec.widths.push_back(1 + rng() % 64);
                if (p + 1 < pulses) rec.distances.push_back(1 + rng() % 64);
            }
            ev.channels.push_back(std::move(rec));
        }
        if (ev.channels.empty()) {
            ChannelRecord rec;
            rec.channel = 0;
            rec.start = 0;
            rec.widths = {1};
            ev.channels.push_back(rec);
        } else {
            ev.channels.front().start = 0;
        }
        corpus.push_back(std::move(ev));
    }
    CodecConfig config = small_config(channels);
    config.frame_size = 1 << 20; // one frame, no per-frame state amortization
    CodeBook book = build_codebook(corpus, config);
    FrameCost cost;
    compress_frame(corpus, book, &cost);

    const CoderTable& table = book.tables[kPulses][0];
    // deltaH against the source distribution itself, so the quantization
    // loss of the skewed alphabet is part of the budget
    std::vector<double> source(table.ls.size(), 0.0);
    for (size_t s = 0; s < test::pulses_weights().size(); ++s)
        source[s] = test::pulses_weights()[s];
    double symbols = (double)n_events * channels;
    double rate = (double)cost.symbol_bits[kPulses] / symbols;
    TansCost tc =
        tans_expected_bits(table.automaton, Distribution::from_weights(source));
    CHECK(std::abs(rate - 0.74) <= tc.delta_h + 0.02);
}

TEST_CASE("per-channel tables win on channel-separated widths") {
    // Two channels with disjoint width ranges; a shared table must cover
    // both ranges, per-channel tables do not.
    std::mt19937_64 rng(5);
    std::vector<RelativeEvent> corpus;
    for (size_t e = 0; e < 400; ++e) {
        RelativeEvent ev;
        ev.ref = 50 + e;
        ChannelRecord a;
        a.channel = 0;
        a.start = 0;
        a.widths = {100 + rng() % 16};
        ChannelRecord b;
        b.channel = 1;
        b.start = 1 + rng() % 50;
        b.widths = {100000 + (rng() % 16) * 256};
        ev.channels = {a, b};
        corpus.push_back(std::move(ev));
    }
    CodecConfig shared = small_config(2);
    CodecConfig split = small_config(2);
    split.channel_mode = ChannelMode::per_channel;

    FrameCost shared_cost, split_cost;
    compress_container(corpus, build_codebook(corpus, shared), 0, 1, &shared_cost);
    compress_container(corpus, build_codebook(corpus, split), 0, 1, &split_cost);
    CHECK(split_cost.bits_per_event(kWidth) < shared_cost.bits_per_event(kWidth));
    // and never worse overall beyond quantization noise
    CHECK(split_cost.total_bits_per_event() <
          shared_cost.total_bits_per_event() + 0.5);
}

TEST_CASE("frame round trips") {
    SUBCASE("empty frame") {
        CodecConfig config = small_config();
        CodeBook book = build_codebook(small_corpus(7), config);
        auto frame = compress_frame({}, book);
        CHECK(decompress_frame(frame, book).empty());
    }
    SUBCASE("single event, single pulse") {
        CodecConfig config = small_config(2);
        RelativeEvent ev;
        ev.ref = 42;
        ev.channels = {{1, 0, {7}, {}}};
        std::vector<RelativeEvent> corpus{ev};
        CodeBook book = build_codebook(corpus, config);
        auto frame = compress_frame(corpus, book);
        auto back = decompress_frame(frame, book);
        REQUIRE(back.size() == 1);
        CHECK(back[0] == ev);
    }
    SUBCASE("events with empty channels") {
        CodecConfig config = small_config(4);
        std::vector<RelativeEvent> corpus = small_corpus(11, 8, 4);
        corpus.push_back(RelativeEvent{});              // empty marker
        corpus.push_back(RelativeEvent{12345, {}});     // empty with a ref
        CodeBook book = build_codebook(corpus, config);
        auto frame = compress_frame(corpus, book);
        CHECK(decompress_frame(frame, book) == corpus);
    }
    SUBCASE("pulse count escapes") {
        CodecConfig config = small_config(2);
        RelativeEvent ev;
        ev.ref = 1;
        ChannelRecord rec;
        rec.channel = 0;
        rec.start = 0;
        for (int p = 0; p < 23; ++p) { // far above the escape bound
            rec.widths.push_back(3);
            if (p < 22) rec.distances.push_back(2);
        }
        ev.channels = {rec};
        std::vector<RelativeEvent> corpus{ev};
        CodeBook book = build_codebook(corpus, config);
        auto frame = compress_frame(corpus, book);
        CHECK(decompress_frame(frame, book) == corpus);
    }
    SUBCASE("out-of-range values use the escape bin") {
        CodecConfig config = small_config(2);
        std::vector<RelativeEvent> train = small_corpus(13, 32, 2);
        CodeBook book = build_codebook(train, config);
        RelativeEvent wild;
        wild.ref = 7;
        wild.channels = {{0, 0, {(1ull << 40) + 5}, {}}}; // far past training range
        std::vector<RelativeEvent> corpus{wild};
        auto frame = compress_frame(corpus, book);
        CHECK(decompress_frame(frame, book) == corpus);

        CodecConfig no_escape = config;
        no_escape.escape_enabled = false;
        CodeBook strict = build_codebook(train, no_escape);
        CHECK_THROWS_AS(compress_frame(corpus, strict), Error);
    }
    SUBCASE("store_ref=false zeroes references") {
        CodecConfig config = small_config();
        config.store_ref = false;
        std::vector<RelativeEvent> corpus = small_corpus(17, 8);
        CodeBook book = build_codebook(corpus, config);
        auto back = decompress_frame(compress_frame(corpus, book), book);
        REQUIRE(back.size() == corpus.size());
        for (size_t e = 0; e < corpus.size(); ++e) {
            CHECK(back[e].ref == 0);
            CHECK(back[e].channels == corpus[e].channels);
        }
    }
}

TEST_CASE("global round trip across config combinations") {
    std::mt19937_64 rng(19);
    const CoderKind coders[] = {CoderKind::tans, CoderKind::huffman,
                                CoderKind::exp_golomb};
    const BinMode bin_modes[] = {BinMode::simple, BinMode::adaptive};
    const ChannelMode channel_modes[] = {ChannelMode::shared,
                                         ChannelMode::per_channel,
                                         ChannelMode::classed};
    for (CoderKind coder : coders) {
        for (BinMode bins : bin_modes) {
            for (ChannelMode chan : channel_modes) {
                CodecConfig config = small_config(6);
                config.channel_mode = chan;
                config.class_count = 2;
                config.frame_size = 8;
                for (size_t t = 0; t < kValueTypes; ++t) {
                    config.streams[t].coder = coder;
                    config.streams[t].bin_mode = bins;
                    config.streams[t].adaptive_min_per_bin = 8;
                }
                config.streams[kPulses].bin_mode = BinMode::simple;
                auto corpus = small_corpus(rng(), 40, 6);
                CodeBook book = build_codebook(corpus, config);
                auto container = compress_container(corpus, book);
                CHECK(decompress_container(container) == corpus);
            }
        }
    }
    SUBCASE("direct exp-golomb values") {
        CodecConfig config = small_config(6);
        for (size_t t = kStart; t < kValueTypes; ++t) {
            config.streams[t].coder = CoderKind::exp_golomb;
            config.streams[t].bin_mode = BinMode::direct;
        }
        config.streams[kPulses].coder = CoderKind::exp_golomb;
        auto corpus = small_corpus(23, 40, 6);
        CodeBook book = build_codebook(corpus, config);
        auto container = compress_container(corpus, book);
        CHECK(decompress_container(container) == corpus);
    }
}

TEST_CASE("threaded container matches single-threaded output") {
    CodecConfig config = small_config();
    config.frame_size = 8;
    auto corpus = small_corpus(29, 120);
    CodeBook book = build_codebook(corpus, config);
    auto one = compress_container(corpus, book, 5, 1);
    auto four = compress_container(corpus, book, 5, 4);
    CHECK(one == four);
    CHECK(decompress_container(one, 4) == corpus);
}

TEST_CASE("streaming writer and reader agree with the one-shot paths") {
    CodecConfig config = small_config();
    config.frame_size = 8;
    auto corpus = small_corpus(33, 50);
    CodeBook book = build_codebook(corpus, config);
    auto reference = compress_container(corpus, book, 9, 1);

    std::stringstream stream(std::ios::in | std::ios::out | std::ios::binary);
    ContainerWriter writer(stream, book, 9, corpus.size());
    // uneven chunks, cutting across frame boundaries
    std::span<const RelativeEvent> all(corpus);
    writer.add_events(all.subspan(0, 3));
    writer.add_events(all.subspan(3, 20));
    writer.add_events(all.subspan(23, 27));
    writer.finish();
    std::string text = stream.str();
    std::vector<uint8_t> streamed(text.begin(), text.end());
    CHECK(streamed == reference);

    stream.clear();
    stream.seekg(0);
    ContainerInfo info = read_container_info_stream(stream);
    CHECK(info.first_seq == 9);
    std::vector<RelativeEvent> events;
    for (size_t f = 0; f < info.frames.size(); ++f) {
        auto bytes = read_frame_bytes(stream, info, f);
        for (auto& ev : decompress_frame(bytes, info.book))
            events.push_back(std::move(ev));
    }
    CHECK(events == corpus);
}

TEST_CASE("codebook serialization") {
    SUBCASE("round trip equality across table kinds") {
        std::mt19937_64 rng(31);
        for (CoderKind coder : {CoderKind::tans, CoderKind::huffman}) {
            CodecConfig config = small_config(4);
            config.channel_mode = ChannelMode::classed;
            config.class_count = 2;
            for (size_t t = 0; t < kValueTypes; ++t) config.streams[t].coder = coder;
            auto corpus = small_corpus(rng(), 50, 4);
            CodeBook book = build_codebook(corpus, config);
            std::vector<uint8_t> bytes = serialize_codebook(book);
            CodeBook back = deserialize_codebook(bytes);
            CHECK(back.config == book.config);
            CHECK(back.class_count == book.class_count);
            CHECK(back.channel_class == book.channel_class);
            for (size_t t = 0; t < kValueTypes; ++t) {
                REQUIRE(back.tables[t].size() == book.tables[t].size());
                for (size_t k = 0; k < book.tables[t].size(); ++k) {
                    const CoderTable& a = book.tables[t][k];
                    const CoderTable& b = back.tables[t][k];
                    CHECK(a.alphabet == b.alphabet);
                    CHECK(a.ls == b.ls);
                    if (coder == CoderKind::tans)
                        CHECK(a.automaton == b.automaton);
                    else
                        CHECK(a.prefix.lengths() == b.prefix.lengths());
                    CHECK(a.bins.has_value() == b.bins.has_value());
                    if (a.bins) CHECK(*a.bins == *b.bins);
                }
            }
            CHECK(serialize_codebook(back) == bytes);
        }
    }
    SUBCASE("worked-example automaton survives the round trip") {
        // A codebook whose pulses table carries the 4-state 3:1 coder;
        // the rebuilt automaton must reproduce nb = {2, 12}.
        CodeBook book;
        book.config = small_config(1);
        book.config.streams[kPulses].coder = CoderKind::tans;
        for (size_t t = kStart; t < kValueTypes; ++t) {
            book.config.streams[t].coder = CoderKind::exp_golomb;
            book.config.streams[t].bin_mode = BinMode::simple;
        }
        book.class_count = 1;
        book.channel_class = {0};
        CoderTable pulses;
        pulses.kind = CoderKind::tans;
        pulses.alphabet = 2;
        pulses.table_log = 2;
        pulses.ls = {3, 1};
        pulses.automaton = build_automaton({3, 1}, 2);
        book.tables[kPulses].push_back(std::move(pulses));
        for (size_t t = kStart; t < kValueTypes; ++t) {
            CoderTable tab;
            tab.kind = CoderKind::exp_golomb;
            tab.alphabet = 2;
            tab.table_log = 0;
            tab.bins = BinningTable::from_widths(std::vector<uint8_t>{0});
            book.tables[t].push_back(std::move(tab));
        }
        CodeBook back = deserialize_codebook(serialize_codebook(book));
        const TansAutomaton& a = back.tables[kPulses][0].automaton;
        CHECK(a.ls == std::vector<uint32_t>{3, 1});
        CHECK(a.encoding.nb[0] == 2);
        CHECK(a.encoding.nb[1] == 12);
        CHECK(a.encoding.offset[0] == -3);
        CHECK(a.encoding.offset[1] == 2);
    }
    SUBCASE("truncation always errors, never partial") {
        CodecConfig config = small_config(4);
        CodeBook book = build_codebook(small_corpus(37, 30, 4), config);
        std::vector<uint8_t> bytes = serialize_codebook(book);
        for (size_t cut : {size_t(0), size_t(3), size_t(5), bytes.size() / 2,
                           bytes.size() - 1}) {
            std::vector<uint8_t> trunc(bytes.begin(), bytes.begin() + cut);
            CHECK_THROWS_AS(deserialize_codebook(trunc), Error);
        }
        std::vector<uint8_t> bad_magic = bytes;
        bad_magic[0] ^= 0xFF;
        CHECK_THROWS_AS(deserialize_codebook(bad_magic), MalformedData);
        std::vector<uint8_t> bad_version = bytes;
        bad_version[4] = 99;
        CHECK_THROWS_AS(deserialize_codebook(bad_version), VersionMismatch);
    }
}

TEST_CASE("frame decode error paths") {
    CodecConfig config = small_config();
    auto corpus = small_corpus(61, 20);
    CodeBook book = build_codebook(corpus, config);
    auto frame = compress_frame(corpus, book);

    SUBCASE("truncated payload") {
        for (size_t cut : {size_t(1), size_t(4), frame.size() / 2}) {
            std::vector<uint8_t> trunc(frame.begin(), frame.end() - cut);
            CHECK_THROWS_AS(decompress_frame(trunc, book), Error);
        }
        CHECK_THROWS_AS(
            decompress_frame(std::vector<uint8_t>{1, 2}, book), MalformedData);
    }
    SUBCASE("any header byte flip trips the checksum") {
        for (size_t pos : {size_t(0), size_t(5), size_t(20)}) {
            std::vector<uint8_t> bad = frame;
            bad[pos] ^= 0x40;
            CHECK_THROWS_AS(decompress_frame(bad, book), CrcMismatch);
        }
    }
    SUBCASE("wrong codebook fails loudly, never silently") {
        CodecConfig other_config = small_config();
        other_config.streams[kStart].adaptive_min_per_bin = 2;
        CodeBook other = build_codebook(small_corpus(62, 20), other_config);
        try {
            auto events = decompress_frame(frame, other);
            CHECK(events != corpus); // acceptable only if visibly different
        } catch (const Error&) {
            CHECK(true);
        }
    }
}

TEST_CASE("classed mode groups channels by width scale") {
    // channels 0,1 narrow; channels 2,3 three orders wider
    std::mt19937_64 rng(67);
    std::vector<RelativeEvent> corpus;
    for (int e = 0; e < 200; ++e) {
        RelativeEvent ev;
        ev.ref = 10 + e;
        for (uint8_t c = 0; c < 4; ++c) {
            ChannelRecord rec;
            rec.channel = c;
            rec.start = c == 0 ? 0 : 1 + rng() % 100;
            rec.widths = {c < 2 ? 10 + rng() % 16 : 100000 + rng() % 16000};
            ev.channels.push_back(std::move(rec));
        }
        corpus.push_back(std::move(ev));
    }
    CodecConfig config = small_config(4);
    config.channel_mode = ChannelMode::classed;
    config.class_count = 2;
    CodeBook book = build_codebook(corpus, config);
    CHECK(book.class_count == 2);
    CHECK(book.channel_class[0] == book.channel_class[1]);
    CHECK(book.channel_class[2] == book.channel_class[3]);
    CHECK(book.channel_class[0] != book.channel_class[2]);

    auto container = compress_container(corpus, book);
    CHECK(decompress_container(container) == corpus);
}

TEST_CASE("container writer enforces its event-count contract") {
    CodecConfig config = small_config();
    auto corpus = small_corpus(71, 10);
    CodeBook book = build_codebook(corpus, config);
    std::span<const RelativeEvent> all(corpus);

    std::ostringstream sink(std::ios::binary);
    ContainerWriter writer(sink, book, 0, 10);
    writer.add_events(all.subspan(0, 4));
    CHECK_THROWS_AS(writer.finish(), ContractError); // 6 events missing

    std::ostringstream sink2(std::ios::binary);
    ContainerWriter writer2(sink2, book, 0, 5);
    CHECK_THROWS_AS(writer2.add_events(all), ContractError); // too many
}

TEST_CASE("size accounting matches the container payload") {
    CodecConfig config = small_config();
    config.frame_size = 16;
    auto corpus = small_corpus(41, 100);
    CodeBook book = build_codebook(corpus, config);
    FrameCost cost;
    auto container = compress_container(corpus, book, 0, 1, &cost);
    CHECK(cost.event_count == corpus.size());

    // payload bits from the cost records equal the summed stream bits
    ContainerInfo info = read_container_info(container);
    uint64_t frame_bytes = 0;
    for (const FrameEntry& fe : info.frames) frame_bytes += fe.byte_length;
    uint64_t accounted = 0;
    for (size_t t = 0; t < kValueTypes; ++t)
        accounted += cost.symbol_bits[t] + cost.raw_bits[t];
    accounted += cost.ref_bits + cost.header_bits;
    // header_bits absorbs padding, so accounted bits equal frame bytes
    CHECK(accounted == frame_bytes * 8);
}

TEST_CASE("corruption is detected and contained") {
    CodecConfig config = small_config();
    config.frame_size = 10;
    auto corpus = small_corpus(43, 100);
    CodeBook book = build_codebook(corpus, config);
    auto container = compress_container(corpus, book);
    ContainerInfo info = read_container_info(container);
    REQUIRE(info.frames.size() == 10);

    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 100; ++trial) {
        size_t f = rng() % info.frames.size();
        const FrameEntry& fe = info.frames[f];
        std::vector<uint8_t> copy(container.begin(), container.end());
        uint64_t bit = rng() % (fe.byte_length * 8);
        copy[fe.offset + bit / 8] ^= (uint8_t)(1u << (bit % 8));

        ContainerInfo info2 = read_container_info(copy);
        bool detected = false;
        try {
            auto events = decompress_frame_at(copy, info2, f);
            // an undetected flip must at least not corrupt silently:
            // compare against the original frame content
            auto original = decompress_frame_at(container, info, f);
            detected = events != original ? false : true;
            CHECK(events == original);
        } catch (const Error&) {
            detected = true;
        }
        CHECK(detected);
        // every other frame still decodes to its original content
        size_t other = (f + 1) % info.frames.size();
        CHECK(decompress_frame_at(copy, info2, other) ==
              decompress_frame_at(container, info, other));
    }
}

TEST_CASE("cost report") {
    auto corpus = small_corpus(53, 300, 8);
    SUBCASE("ladder ordering on a generated corpus") {
        std::vector<ReportConfig> configs;
        for (const char* name :
             {"fixed", "huffman-simple", "tans-adaptive", "tans-adaptive-perchannel"})
            configs.push_back(report_preset(name, 8));
        CostReport report = report_cost(corpus, configs);
        REQUIRE(report.rows.size() == 4);
        for (size_t i = 1; i < report.rows.size(); ++i)
            CHECK(report.rows[i].total_bits <= report.rows[i - 1].total_bits);
        CHECK(!report.notes.empty());
    }
    SUBCASE("exp-golomb on wide near-uniform values loses to fixed") {
        std::mt19937_64 rng(59);
        std::vector<RelativeEvent> wide;
        for (int e = 0; e < 200; ++e) {
            RelativeEvent ev;
            ev.ref = 1000 + e;
            ev.channels = {{0, 0, {1 + (rng() % (1ull << 26))}, {}},
                           {1, 1 + rng() % (1ull << 26),
                            {1 + (rng() % (1ull << 26))}, {}}};
            wide.push_back(std::move(ev));
        }
        std::vector<ReportConfig> configs{report_preset("fixed", 8),
                                          report_preset("expgolomb-direct", 8)};
        CostReport report = report_cost(wide, configs);
        CHECK(report.rows[1].total_bits > report.rows[0].total_bits);
    }
    SUBCASE("unknown preset is rejected") {
        CHECK_THROWS_AS(report_preset("zstd", 8), Error);
    }
}
