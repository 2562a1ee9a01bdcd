#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tdc/binning.hpp"
#include "tdc/entropy.hpp"
#include "tdc/event_model.hpp"

namespace tdc {

enum class CoderKind : uint8_t { tans = 0, huffman = 1, exp_golomb = 2 };
enum class BinMode : uint8_t { simple = 0, adaptive = 1, direct = 2 };
enum class ChannelMode : uint8_t { shared = 0, per_channel = 1, classed = 2 };

// Value types carried by a frame, in stream order.
enum ValueType : size_t { kPulses = 0, kStart = 1, kWidth = 2, kDistance = 3 };
constexpr size_t kValueTypes = 4;
constexpr const char* kValueTypeNames[kValueTypes] = {"pulses", "start", "width",
                                                      "distance"};

// Pulse counts above this bound are escape-coded.
constexpr uint32_t kPulsesBound = 8;
constexpr int kEscapeRawBits = 57;

struct ValueStreamConfig {
    CoderKind coder = CoderKind::tans;
    uint8_t table_log = 0; // 0 = auto: ceil(log2(alphabet)) + 3
    BinMode bin_mode = BinMode::adaptive;
    uint8_t simple_low_bits = 0; // 0 = auto: bits(max) - 4
    uint32_t adaptive_min_per_bin = 32;

    bool operator==(const ValueStreamConfig&) const = default;
};

struct CodecConfig {
    uint32_t channel_count = 48;
    ChannelMode channel_mode = ChannelMode::shared;
    uint16_t class_count = 1; // target classes for ChannelMode::classed
    uint32_t frame_size = 256;
    bool store_ref = true;
    bool escape_enabled = true; // escape bin for out-of-range numeric values
    std::array<ValueStreamConfig, kValueTypes> streams{}; // bins unused for pulses

    bool operator==(const CodecConfig&) const = default;
};

// Coding tables for one value type and one channel class.
struct CoderTable {
    CoderKind kind = CoderKind::tans;
    uint32_t alphabet = 0; // symbols incl. escape slot
    uint8_t table_log = 0; // resolved, shared by all classes of a type
    std::vector<uint32_t> ls;
    TansAutomaton automaton;
    PrefixCode prefix;
    std::optional<BinningTable> bins; // numeric types, bin modes only
};

struct CodeBook {
    CodecConfig config;
    uint16_t class_count = 1;
    std::vector<uint8_t> channel_class; // size config.channel_count
    std::array<std::vector<CoderTable>, kValueTypes> tables; // [type][class]

    const CoderTable& table_for(size_t type, uint8_t channel) const {
        return tables[type][channel_class[channel]];
    }
};

CodeBook build_codebook(std::span<const RelativeEvent> corpus,
                        const CodecConfig& config);

std::vector<uint8_t> serialize_codebook(const CodeBook& book);
CodeBook deserialize_codebook(std::span<const uint8_t> bytes);

// Per-type bit accounting for one frame (or summed over frames).
struct FrameCost {
    uint64_t event_count = 0;
    std::array<uint64_t, kValueTypes> symbol_bits{}; // entropy-coded streams
    std::array<uint64_t, kValueTypes> raw_bits{};    // low bits + escapes
    uint64_t ref_bits = 0;
    uint64_t header_bits = 0; // frame header incl. states and CRC

    void add(const FrameCost& o);
    double bits_per_event(size_t type) const;
    double total_bits_per_event() const; // four value types only
};

std::vector<uint8_t> compress_frame(std::span<const RelativeEvent> events,
                                    const CodeBook& book,
                                    FrameCost* cost = nullptr);
std::vector<RelativeEvent> decompress_frame(std::span<const uint8_t> bytes,
                                            const CodeBook& book);

// ---------------------------------------------------------------------------
// Container: magic, version, embedded codebook, frame directory, frames.

struct FrameEntry {
    uint64_t offset = 0; // from container start
    uint64_t byte_length = 0;
    uint32_t event_count = 0;
};

struct ContainerInfo {
    CodeBook book;
    uint32_t first_seq = 0;
    std::vector<FrameEntry> frames;
};

std::vector<uint8_t> compress_container(std::span<const RelativeEvent> events,
                                        const CodeBook& book,
                                        uint32_t first_seq = 0,
                                        unsigned threads = 1,
                                        FrameCost* cost = nullptr);

// Streaming writer: frames go to the output as they are produced, so at
// most one batch (= thread count) of compressed frames is in memory.
// The event total must be declared up front; the frame directory is
// patched in place when finish() runs. Output is byte-identical to
// compress_container.
class ContainerWriter {
public:
    ContainerWriter(std::ostream& out, const CodeBook& book, uint32_t first_seq,
                    uint64_t total_events);
    // Feed events in order, any chunk size; internally cut into frames.
    void add_events(std::span<const RelativeEvent> events, unsigned threads = 1,
                    FrameCost* cost = nullptr);
    void finish();

private:
    void flush_frames(unsigned threads, FrameCost* cost, bool final_chunk);

    std::ostream& out_;
    const CodeBook& book_;
    uint64_t total_events_;
    uint64_t events_seen_ = 0;
    uint64_t directory_pos_ = 0;
    uint64_t next_offset_ = 0;
    std::vector<RelativeEvent> pending_;
    std::vector<FrameEntry> entries_;
    bool finished_ = false;
};

ContainerInfo read_container_info(std::span<const uint8_t> bytes);

// Companion reader for seekable streams: parses the header, embedded
// codebook and directory, then serves one frame's payload at a time.
ContainerInfo read_container_info_stream(std::istream& in);
std::vector<uint8_t> read_frame_bytes(std::istream& in, const ContainerInfo& info,
                                      size_t frame_index);

std::vector<RelativeEvent> decompress_frame_at(std::span<const uint8_t> container,
                                               const ContainerInfo& info,
                                               size_t frame_index);

std::vector<RelativeEvent> decompress_container(std::span<const uint8_t> bytes,
                                                unsigned threads = 1,
                                                uint32_t* first_seq = nullptr);

// ---------------------------------------------------------------------------
// Cost comparison across configurations.

struct ReportConfig {
    std::string label;
    bool fixed = false; // fixed-length methodology instead of real coding
    CodecConfig config;
};

struct ReportRow {
    std::string label;
    std::array<double, kValueTypes> type_bits{}; // per event, incl. low bits
    double total_bits = 0;                       // four value types
    double ref_bits = 0;
    double header_bits = 0;
    uint64_t codebook_bytes = 0;
};

struct CostReport {
    std::vector<ReportRow> rows;
    std::vector<std::string> notes;
};

CostReport report_cost(std::span<const RelativeEvent> corpus,
                       std::span<const ReportConfig> configs);

// Named presets for the standard comparison ladder.
ReportConfig report_preset(const std::string& name, uint32_t channel_count);

} // namespace tdc
