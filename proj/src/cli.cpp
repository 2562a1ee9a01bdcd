#include "tdc/cli.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "tdc/codec.hpp"
#include "tdc/datagen.hpp"
#include "tdc/event_model.hpp"
#include "tdc/stats.hpp"

namespace tdc {

namespace {

namespace fs = std::filesystem;

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::string& path, std::span<const uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed: " + path);
}

struct IngestResult {
    std::vector<RelativeEvent> events;
    uint32_t first_seq = 0;
    size_t reject_count = 0;
};

// Legacy binary -> filtered relative events; rejects go to an optional
// sidecar (JSON lines), never back into the coded path.
IngestResult ingest_legacy(const std::string& path, uint64_t max_width,
                           const std::string& rejects_path) {
    std::vector<uint8_t> bytes = read_file(path);
    std::vector<EventHits> events = parse_legacy(bytes);
    IngestResult result;
    if (!events.empty()) result.first_seq = events.front().seq;
    std::ofstream rejects;
    if (!rejects_path.empty()) {
        rejects.open(rejects_path, std::ios::trunc);
        if (!rejects) throw Error("cannot write " + rejects_path);
    }
    for (const EventHits& ev : events) {
        PairResult paired = pair_and_filter(ev, max_width);
        result.reject_count += paired.rejects.size();
        if (rejects.is_open()) {
            for (const Hit& h : paired.rejects) {
                nlohmann::json j{{"seq", ev.seq},
                                 {"channel", h.channel},
                                 {"edge", h.edge == Edge::rising ? "rising" : "falling"},
                                 {"time", h.time}};
                rejects << j.dump() << '\n';
            }
        }
        result.events.push_back(to_relative(paired.channels));
    }
    return result;
}

std::vector<EventHits> events_to_hits(std::span<const RelativeEvent> events,
                                      uint32_t first_seq) {
    std::vector<EventHits> out;
    out.reserve(events.size());
    uint32_t seq = first_seq;
    for (const RelativeEvent& rel : events) {
        EventHits ev;
        ev.seq = seq;
        seq = (seq + 1) & ((1u << 30) - 1);
        for (const ChannelPulses& cp : from_relative(rel)) {
            for (const Pulse& p : cp.pulses) {
                ev.hits.push_back(Hit{cp.channel, Edge::rising, p.rise});
                ev.hits.push_back(Hit{cp.channel, Edge::falling, p.fall});
            }
        }
        std::sort(ev.hits.begin(), ev.hits.end(), [](const Hit& a, const Hit& b) {
            if (a.time != b.time) return a.time < b.time;
            if (a.channel != b.channel) return a.channel < b.channel;
            return a.edge == Edge::rising && b.edge == Edge::falling;
        });
        out.push_back(std::move(ev));
    }
    return out;
}

struct CommonCodecFlags {
    std::string pulses_coder = "tans";
    std::string value_coder = "tans";
    std::string bin_mode = "adaptive";
    std::string channel_mode = "shared";
    uint32_t classes = 4;
    uint32_t frame_size = 256;
    uint32_t low_bits = 0;
    uint32_t min_per_bin = 32;
    uint32_t table_log = 0;
    bool no_ref = false;
    bool no_escape = false;
};

CoderKind parse_coder(const std::string& name) {
    if (name == "tans") return CoderKind::tans;
    if (name == "huffman") return CoderKind::huffman;
    if (name == "expgolomb") return CoderKind::exp_golomb;
    throw CLI::ValidationError("--coder", "unknown coder: " + name);
}

CodecConfig make_config(const CommonCodecFlags& f, uint32_t channel_count) {
    CodecConfig config;
    config.channel_count = channel_count;
    config.frame_size = f.frame_size;
    config.store_ref = !f.no_ref;
    config.escape_enabled = !f.no_escape;
    if (f.channel_mode == "shared") {
        config.channel_mode = ChannelMode::shared;
    } else if (f.channel_mode == "per-channel") {
        config.channel_mode = ChannelMode::per_channel;
    } else if (f.channel_mode == "classed") {
        config.channel_mode = ChannelMode::classed;
        config.class_count = static_cast<uint16_t>(f.classes);
    } else {
        throw CLI::ValidationError("--channel-mode",
                                   "unknown mode: " + f.channel_mode);
    }
    BinMode bins;
    if (f.bin_mode == "simple") bins = BinMode::simple;
    else if (f.bin_mode == "adaptive") bins = BinMode::adaptive;
    else if (f.bin_mode == "direct") bins = BinMode::direct;
    else throw CLI::ValidationError("--bin-mode", "unknown mode: " + f.bin_mode);

    config.streams[kPulses].coder = parse_coder(f.pulses_coder);
    config.streams[kPulses].table_log = static_cast<uint8_t>(f.table_log);
    for (size_t t = kStart; t < kValueTypes; ++t) {
        config.streams[t].coder = parse_coder(f.value_coder);
        config.streams[t].table_log = static_cast<uint8_t>(f.table_log);
        config.streams[t].bin_mode = bins;
        config.streams[t].simple_low_bits = static_cast<uint8_t>(f.low_bits);
        config.streams[t].adaptive_min_per_bin = f.min_per_bin;
    }
    return config;
}

void add_codec_flags(CLI::App* cmd, CommonCodecFlags& f) {
    cmd->add_option("--pulses-coder", f.pulses_coder,
                    "Coder for pulse counts: tans|huffman|expgolomb");
    cmd->add_option("--value-coder", f.value_coder,
                    "Coder for bin symbols: tans|huffman|expgolomb");
    cmd->add_option("--bin-mode", f.bin_mode,
                    "Binning for start/width/distance: simple|adaptive|direct");
    cmd->add_option("--channel-mode", f.channel_mode,
                    "Table sharing: shared|per-channel|classed");
    cmd->add_option("--classes", f.classes, "Class count for --channel-mode classed");
    cmd->add_option("--frame-size", f.frame_size, "Events per frame");
    cmd->add_option("--low-bits", f.low_bits,
                    "Low bits for simple binning (0 = max bits - 4)");
    cmd->add_option("--min-per-bin", f.min_per_bin,
                    "Minimum values per adaptive bin");
    cmd->add_option("--table-log", f.table_log, "tANS table size exponent (0 = auto)");
    cmd->add_flag("--no-ref", f.no_ref, "Drop per-event reference times");
    cmd->add_flag("--no-escape", f.no_escape, "Disable out-of-range escape bins");
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

// ---------------------------------------------------------------------------
// Subcommand bodies

int cmd_gen(uint64_t events, uint32_t channels, uint64_t seed, bool calibrated,
            const std::string& out_path, const std::string& json_path,
            std::ostream& log) {
    GenParams params = calibrated ? calibrated_corpus_params(seed) : GenParams{};
    params.seed = seed;
    params.channel_count = channels;
    GeneratedCorpus corpus = generate_events(params, events);
    write_file(out_path, write_legacy(corpus.hit_events));
    if (!json_path.empty()) {
        std::ostringstream os;
        for (const RelativeEvent& ev : corpus.events)
            os << relative_event_to_json(ev) << '\n';
        write_text_file(json_path, os.str());
    }
    log << "generated " << events << " events on " << channels
        << " channels -> " << out_path << "\n";
    return 0;
}

int cmd_analyze(const std::string& in_path, const std::string& out_dir,
                bool per_channel, const std::string& format, uint32_t channels,
                uint64_t max_width, std::ostream& log) {
    IngestResult in = ingest_legacy(in_path, max_width, "");
    fs::create_directories(out_dir);
    const bool json = format == "json";
    auto ext = json ? std::string(".json") : std::string(".csv");

    // One pulse count per (event, channel), zeros included.
    std::vector<uint64_t> pulses, starts, widths, distances;
    std::vector<std::vector<uint64_t>> per_ch_widths(128);
    uint32_t max_channel = 0;
    for (const RelativeEvent& ev : in.events) {
        uint64_t active = 0;
        for (const ChannelRecord& rec : ev.channels) {
            if (rec.channel >= channels)
                throw Error("analyze: channel above --channels");
            ++active;
            pulses.push_back(rec.pulse_count());
            starts.push_back(rec.start);
            max_channel = std::max<uint32_t>(max_channel, rec.channel);
            for (uint64_t w : rec.widths) {
                widths.push_back(w);
                per_ch_widths[rec.channel].push_back(w);
            }
            for (uint64_t d : rec.distances) distances.push_back(d);
        }
        for (uint64_t i = active; i < channels; ++i) pulses.push_back(0);
    }
    if (widths.empty()) throw Error("analyze: no pulses in input");

    // Pulse-count probabilities (values 0..8, escapes folded to 9).
    {
        std::vector<uint64_t> syms;
        syms.reserve(pulses.size());
        for (uint64_t p : pulses)
            syms.push_back(std::min<uint64_t>(p, kPulsesBound + 1));
        Distribution dist = histogram(syms, kPulsesBound + 2);
        std::ofstream os(fs::path(out_dir) / ("pulses_hist" + ext));
        if (json) {
            nlohmann::json arr = nlohmann::json::array();
            for (size_t s = 0; s < dist.size(); ++s)
                arr.push_back({{"value", s}, {"probability", dist[s]}});
            os << arr.dump() << '\n';
        } else {
            os << "value,probability\n";
            for (size_t s = 0; s < dist.size(); ++s)
                os << s << ',' << dist[s] << '\n';
        }
    }

    auto dump_cdf = [&](const std::string& name, std::span<const uint64_t> vals) {
        if (vals.empty()) return;
        EmpiricalCdf cdf = downsample_cdf(empirical_cdf(vals));
        std::ofstream os(fs::path(out_dir) / (name + ext));
        if (json) write_cdf_json(os, cdf);
        else write_cdf_csv(os, cdf);
    };
    dump_cdf("start_cdf", starts);
    dump_cdf("width_cdf", widths);
    dump_cdf("distance_cdf", distances);

    if (per_channel) {
        for (uint32_t c = 0; c <= max_channel; ++c) {
            if (per_ch_widths[c].empty()) continue;
            std::ostringstream name;
            name << "width_cdf_ch" << std::setw(2) << std::setfill('0') << c;
            dump_cdf(name.str(), per_ch_widths[c]);
        }
    }
    log << "analyzed " << in.events.size() << " events -> " << out_dir << "\n";
    return 0;
}

int cmd_build(const std::string& in_path, const std::string& out_path,
              const CommonCodecFlags& flags, uint32_t channels,
              uint64_t max_width, std::ostream& log) {
    IngestResult in = ingest_legacy(in_path, max_width, "");
    CodecConfig config = make_config(flags, channels);
    CodeBook book = build_codebook(in.events, config);
    std::vector<uint8_t> bytes = serialize_codebook(book);
    write_file(out_path, bytes);
    log << "codebook: " << bytes.size() << " bytes, " << book.class_count
        << " class(es) -> " << out_path << "\n";
    return 0;
}

int cmd_compress(const std::string& in_path, const std::string& book_path,
                 const std::string& out_path, const std::string& rejects_path,
                 uint64_t max_width, unsigned threads, std::ostream& log) {
    CodeBook book = deserialize_codebook(read_file(book_path));
    IngestResult in = ingest_legacy(in_path, max_width, rejects_path);

    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + out_path);
    FrameCost cost;
    ContainerWriter writer(out, book, in.first_seq, in.events.size());
    // feed frame-sized chunks; at most `threads` compressed frames live
    const size_t chunk = std::max<size_t>(1, (size_t)book.config.frame_size) *
                         std::max(1u, threads);
    for (size_t begin = 0; begin < in.events.size(); begin += chunk) {
        size_t end = std::min(in.events.size(), begin + chunk);
        writer.add_events(std::span<const RelativeEvent>(in.events)
                              .subspan(begin, end - begin),
                          threads, &cost);
    }
    writer.finish();
    uint64_t bytes = (uint64_t)out.tellp();
    out.close();
    log << "compressed " << in.events.size() << " events ("
        << in.reject_count << " rejected hits) -> " << bytes << " bytes, "
        << std::fixed << std::setprecision(2) << cost.total_bits_per_event()
        << " bits/event payload\n";
    return 0;
}

int cmd_decompress(const std::string& in_path, const std::string& out_path,
                   unsigned threads, std::ostream& log) {
    std::ifstream in(in_path, std::ios::binary);
    if (!in) throw Error("cannot open " + in_path);
    ContainerInfo info = read_container_info_stream(in);
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + out_path);

    LegacyWriter writer;
    uint32_t seq = info.first_seq;
    uint64_t total_events = 0;
    const unsigned batch = std::max(1u, threads);
    for (size_t f = 0; f < info.frames.size(); f += batch) {
        size_t end = std::min(info.frames.size(), f + batch);
        std::vector<std::vector<RelativeEvent>> parts(end - f);
        std::vector<std::vector<uint8_t>> payloads(end - f);
        for (size_t i = f; i < end; ++i)
            payloads[i - f] = read_frame_bytes(in, info, i);
        if (batch == 1 || end - f == 1) {
            for (size_t i = 0; i < parts.size(); ++i)
                parts[i] = decompress_frame(payloads[i], info.book);
        } else {
            std::vector<std::thread> pool;
            std::atomic<size_t> next{0};
            std::exception_ptr error;
            std::mutex error_mutex;
            for (unsigned w = 0; w < std::min<size_t>(batch, parts.size()); ++w)
                pool.emplace_back([&] {
                    try {
                        for (size_t i = next.fetch_add(1); i < parts.size();
                             i = next.fetch_add(1))
                            parts[i] = decompress_frame(payloads[i], info.book);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!error) error = std::current_exception();
                    }
                });
            for (auto& t : pool) t.join();
            if (error) std::rethrow_exception(error);
        }
        std::vector<uint8_t> bytes;
        for (auto& events : parts) {
            for (auto& hits : events_to_hits(events, seq))
                writer.write_event(hits, bytes);
            seq = (uint32_t)(seq + events.size()) & ((1u << 30) - 1);
            total_events += events.size();
        }
        out.write((const char*)bytes.data(), (std::streamsize)bytes.size());
        if (!out) throw Error("write failed: " + out_path);
    }
    log << "decompressed " << total_events << " events -> " << out_path << "\n";
    return 0;
}

int cmd_report(const std::string& in_path, const std::string& configs_csv,
               const std::string& out_path, const std::string& format,
               uint32_t channels, uint64_t max_width, std::ostream& log) {
    IngestResult in = ingest_legacy(in_path, max_width, "");
    std::vector<ReportConfig> configs;
    std::stringstream ss(configs_csv);
    std::string name;
    while (std::getline(ss, name, ','))
        if (!name.empty()) configs.push_back(report_preset(name, channels));
    if (configs.empty()) throw Error("report: no configurations given");

    CostReport report = report_cost(in.events, configs);
    double legacy_bits = 0;
    if (!in.events.empty()) {
        uint64_t words = fs::file_size(in_path) / 4;
        legacy_bits = 32.0 * (double)words / (double)in.events.size();
        std::ostringstream note;
        note << "legacy input coding: " << std::fixed << std::setprecision(1)
             << legacy_bits << " bits/event";
        report.notes.insert(report.notes.begin(), note.str());
    }

    std::ostringstream os;
    if (format == "json") {
        nlohmann::json rows = nlohmann::json::array();
        for (const ReportRow& row : report.rows) {
            nlohmann::json r{{"config", row.label},
                             {"total_bits_per_event", row.total_bits},
                             {"ref_bits_per_event", row.ref_bits},
                             {"header_bits_per_event", row.header_bits},
                             {"codebook_bytes", row.codebook_bytes}};
            for (size_t t = 0; t < kValueTypes; ++t)
                r[kValueTypeNames[t]] = row.type_bits[t];
            rows.push_back(std::move(r));
        }
        nlohmann::json j{{"rows", rows},
                         {"notes", report.notes},
                         {"legacy_bits_per_event", legacy_bits}};
        os << j.dump(2) << '\n';
    } else {
        os << "config,pulses,start,width,distance,total,ref,header,codebook_bytes\n";
        for (const ReportRow& row : report.rows) {
            os << row.label;
            for (size_t t = 0; t < kValueTypes; ++t)
                os << ',' << std::fixed << std::setprecision(3) << row.type_bits[t];
            os << ',' << row.total_bits << ',' << row.ref_bits << ','
               << row.header_bits << ',' << row.codebook_bytes << '\n';
        }
        for (const std::string& note : report.notes) os << "# " << note << '\n';
    }
    if (out_path.empty()) log << os.str();
    else write_text_file(out_path, os.str());
    return 0;
}

// ---------------------------------------------------------------------------
// selftest: the hard-coded sanity anchors for this codec family.

struct SelfTest {
    std::ostream& out;
    int failures = 0;

    void check_near(const std::string& name, double actual, double expected,
                    double tol) {
        bool ok = std::abs(actual - expected) <= tol;
        report(name, ok,
               "expected " + format(expected) + " +- " + format(tol) +
                   ", actual " + format(actual));
    }
    void check_true(const std::string& name, bool ok, const std::string& detail) {
        report(name, ok, detail);
    }
    static std::string format(double v) {
        std::ostringstream os;
        os << std::setprecision(6) << v;
        return os.str();
    }
    void report(const std::string& name, bool ok, const std::string& detail) {
        out << (ok ? "PASS" : "FAIL") << "  " << name << "  (" << detail << ")\n";
        if (!ok) ++failures;
    }
};

int cmd_selftest(bool tamper, std::ostream& out) {
    SelfTest t{out};

    Distribution pulses = default_pulses_distribution();
    Distribution extended = escape_extended_pulses_distribution();

    // Prefix-code costs on the pulse-count distribution.
    {
        std::vector<uint8_t> eg_lengths;
        for (uint64_t x = 0; x < pulses.size(); ++x)
            eg_lengths.push_back(static_cast<uint8_t>(exp_golomb_code_length(x)));
        t.check_near("exp-golomb bits/value", expected_code_length(eg_lengths, pulses),
                     1.30, 0.005);

        PrefixCode code = huffman_build(extended);
        std::vector<uint8_t> lengths = code.lengths();
        const std::vector<uint8_t> want{1, 2, 3, 5, 4, 6, 7, 8, 9};
        bool match = std::equal(want.begin(), want.end(), lengths.begin());
        std::ostringstream detail;
        detail << "lengths";
        for (size_t s = 0; s + 1 < lengths.size(); ++s)
            detail << ' ' << static_cast<int>(lengths[s]);
        t.check_true("huffman code lengths", match, detail.str());
        t.check_near("huffman bits/value",
                     expected_code_length(lengths, extended), 1.23, 0.005);
        t.check_near("shannon entropy", shannon_entropy(pulses), 0.74, 0.005);
    }

    // Four-state worked example.
    {
        TansAutomaton aut =
            build_automaton({3, 1}, 2, std::vector<uint32_t>{0, 1, 0, 0});
        if (tamper) aut.decoding[2].new_x ^= 1; // negative-control hook

        auto dec_sym = [&](int i) { return aut.decoding[i].symbol; };
        bool table_ok =
            dec_sym(0) == 0 && dec_sym(1) == 1 && dec_sym(2) == 0 && dec_sym(3) == 0 &&
            aut.decoding[0].nb_bits == 1 && aut.decoding[1].nb_bits == 2 &&
            aut.decoding[2].nb_bits == 0 && aut.decoding[3].nb_bits == 0 &&
            aut.decoding[0].new_x + 4 == 6 && aut.decoding[1].new_x + 4 == 4 &&
            aut.decoding[2].new_x + 4 == 4 && aut.decoding[3].new_x + 4 == 5;
        t.check_true("decoding table {a,b,a,a} {1,2,0,0} {6,4,4,5}", table_ok,
                     tamper ? "tampered" : "exact");
        bool enc_ok = aut.encoding.nb[0] == 2 && aut.encoding.nb[1] == 12 &&
                      aut.encoding.offset[0] == -3 && aut.encoding.offset[1] == 2 &&
                      aut.encoding.table == std::vector<uint32_t>{4, 6, 7, 5};
        t.check_true("encoding tables nb 2/12, offsets -3/2, {4,6,7,5}", enc_ok,
                     "exact");

        // Encode "baaaabb" from x=4; chunks shown most significant bit
        // first in emission order.
        const std::vector<uint32_t> msg{1, 0, 0, 0, 0, 1, 1};
        BitSink sink;
        CoderState state{4};
        std::vector<std::pair<uint64_t, int>> chunks; // (bit offset, width)
        for (uint32_t s : msg) {
            uint64_t before = sink.bit_count();
            tans_encode_symbol(state, s, aut, sink);
            chunks.push_back({before, static_cast<int>(sink.bit_count() - before)});
        }
        BitBuffer buf = sink.finish();
        std::string display;
        {
            BitCursor cursor(buf, BitCursor::Direction::forward);
            for (auto [offset, width] : chunks) {
                uint64_t v = cursor.read_bits(width);
                for (int i = width - 1; i >= 0; --i)
                    display += ((v >> i) & 1) ? '1' : '0';
            }
        }
        t.check_true("trace bits", display == "00100001", "got " + display);
        t.check_true("trace final state", state.x == 5,
                     "got x=" + std::to_string(state.x));

        try {
            BitCursor back(buf, BitCursor::Direction::reverse);
            CoderState dec_state = state;
            std::vector<uint32_t> decoded(msg.size());
            for (size_t i = msg.size(); i-- > 0;)
                decoded[i] = tans_decode_symbol(dec_state, aut, back);
            std::string diff;
            for (size_t i = 0; i < msg.size(); ++i)
                if (decoded[i] != msg[i])
                    diff += " [" + std::to_string(i) + "] " +
                            std::to_string(decoded[i]) + "!=" + std::to_string(msg[i]);
            t.check_true("trace decode round trip",
                         decoded == msg && dec_state.x == 4,
                         diff.empty() ? "symbols match" : "diff:" + diff);
        } catch (const Error& e) {
            t.check_true("trace decode round trip", false, e.what());
        }

        TansAutomaton clean =
            build_automaton({3, 1}, 2, std::vector<uint32_t>{0, 1, 0, 0});
        Distribution ab = Distribution::from_probabilities({0.75, 0.25});
        std::vector<double> rho = stationary_distribution(clean, ab);
        t.check_near("stationary rho(6)", rho[2], 0.241, 0.01);
        t.check_near("stationary rho(7)", rho[3], 0.188, 0.01);
        t.check_near("deltaH L=4", tans_expected_bits(clean, ab).delta_h, 0.01,
                     0.002);

        TansAutomaton l8 = build_automaton(quantize_probabilities(ab, 8), 3);
        t.check_near("deltaH L=8", tans_expected_bits(l8, ab).delta_h, 0.0018,
                     0.001);
    }

    out << (t.failures == 0 ? "selftest OK\n"
                            : "selftest FAILED (" + std::to_string(t.failures) +
                                  " checks)\n");
    return t.failures == 0 ? 0 : 1;
}

} // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"TDC event-stream compression toolkit"};
    app.fallthrough(); // parent options (e.g. --config) usable after a subcommand
    app.set_config("--config", "", "Read options from a key=value file");

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a synthetic legacy corpus");
    uint64_t gen_events = 1000;
    uint32_t gen_channels = 48;
    uint64_t gen_seed = 1;
    bool gen_calibrated = false;
    std::string gen_out, gen_json;
    gen->add_option("--events,-n", gen_events, "Event count");
    gen->add_option("--channels", gen_channels, "Channel count");
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_flag("--calibrated", gen_calibrated,
                  "Use the full-scale calibration preset");
    gen->add_option("--output,-o", gen_out, "Legacy binary output")->required();
    gen->add_option("--json", gen_json, "Also dump events as JSON lines");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Emit histograms and CDFs");
    std::string an_in, an_out = "analysis", an_format = "csv";
    bool an_per_channel = false;
    uint32_t an_channels = 48;
    uint64_t an_max_width = kDefaultMaxPulseWidth;
    analyze->add_option("--input,-i", an_in, "Legacy binary input")->required();
    analyze->add_option("--outdir,-o", an_out, "Output directory");
    analyze->add_option("--format", an_format, "csv|json");
    analyze->add_flag("--per-channel", an_per_channel, "Per-channel width CDFs");
    analyze->add_option("--channels", an_channels, "Channel count");
    analyze->add_option("--max-width", an_max_width, "Pulse-width filter, ticks");

    // build
    auto* build = app.add_subcommand("build", "Build a codebook from a corpus");
    std::string b_in, b_out;
    uint32_t b_channels = 48;
    uint64_t b_max_width = kDefaultMaxPulseWidth;
    CommonCodecFlags b_flags;
    build->add_option("--input,-i", b_in, "Legacy binary input")->required();
    build->add_option("--output,-o", b_out, "Codebook output")->required();
    build->add_option("--channels", b_channels, "Channel count");
    build->add_option("--max-width", b_max_width, "Pulse-width filter, ticks");
    add_codec_flags(build, b_flags);

    // compress
    auto* compress = app.add_subcommand("compress", "Compress a legacy corpus");
    std::string c_in, c_book, c_out, c_rejects;
    uint64_t c_max_width = kDefaultMaxPulseWidth;
    unsigned c_threads = 1;
    compress->add_option("--input,-i", c_in, "Legacy binary input")->required();
    compress->add_option("--codebook,-b", c_book, "Codebook file")->required();
    compress->add_option("--output,-o", c_out, "Container output")->required();
    compress->add_option("--rejects", c_rejects, "Sidecar for rejected hits");
    compress->add_option("--max-width", c_max_width, "Pulse-width filter, ticks");
    compress->add_option("--threads", c_threads, "Frame-parallel workers")
        ->envname("TDC_THREADS");

    // decompress
    auto* decompress = app.add_subcommand("decompress", "Expand to legacy binary");
    std::string d_in, d_out;
    unsigned d_threads = 1;
    decompress->add_option("--input,-i", d_in, "Container input")->required();
    decompress->add_option("--output,-o", d_out, "Legacy binary output")->required();
    decompress->add_option("--threads", d_threads, "Frame-parallel workers")
        ->envname("TDC_THREADS");

    // report
    auto* report = app.add_subcommand("report", "Compare coding configurations");
    std::string r_in, r_out, r_format = "csv";
    std::string r_configs =
        "fixed,huffman-simple,tans-adaptive,tans-adaptive-perchannel";
    uint32_t r_channels = 48;
    uint64_t r_max_width = kDefaultMaxPulseWidth;
    report->add_option("--input,-i", r_in, "Legacy binary input")->required();
    report->add_option("--configs", r_configs, "Comma-separated preset list");
    report->add_option("--output,-o", r_out, "Report file (default: stdout)");
    report->add_option("--format", r_format, "csv|json");
    report->add_option("--channels", r_channels, "Channel count");
    report->add_option("--max-width", r_max_width, "Pulse-width filter, ticks");

    // selftest
    auto* selftest = app.add_subcommand("selftest", "Run built-in sanity checks");
    bool st_tamper = false;
    selftest->add_flag("--tamper", st_tamper,
                       "Negative control: corrupt a table and expect failure");

    app.require_subcommand(1);

    std::vector<const char*> argv;
    argv.push_back("tdc");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        // 0 covers --help/--version; anything else is a usage error
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed())
            return cmd_gen(gen_events, gen_channels, gen_seed, gen_calibrated,
                           gen_out, gen_json, out);
        if (analyze->parsed())
            return cmd_analyze(an_in, an_out, an_per_channel, an_format,
                               an_channels, an_max_width, out);
        if (build->parsed())
            return cmd_build(b_in, b_out, b_flags, b_channels, b_max_width, out);
        if (compress->parsed())
            return cmd_compress(c_in, c_book, c_out, c_rejects, c_max_width,
                                c_threads, out);
        if (decompress->parsed())
            return cmd_decompress(d_in, d_out, d_threads, out);
        if (report->parsed())
            return cmd_report(r_in, r_configs, r_out, r_format, r_channels,
                              r_max_width, out);
        if (selftest->parsed()) return cmd_selftest(st_tamper, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "usage error: no subcommand\n";
    return 2;
}

} // namespace tdc
