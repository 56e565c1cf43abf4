#include "sefeat/feature_io.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>

#include "sefeat/file_util.hpp"

namespace sefeat {
namespace {

constexpr char kMagic[4] = {'S', 'E', 'F', 'M'};
constexpr std::uint64_t kU32Max = std::numeric_limits<std::uint32_t>::max();

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) {
        out.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

struct SefmHeader {
    std::uint32_t rows;
    std::uint32_t cols;
    std::uint32_t used_rows;
};

SefmHeader parse_header(const std::uint8_t* h, std::size_t available) {
    if (available < sizeof(kMagic) || !std::equal(kMagic, kMagic + 4, h)) {
        if (available < sizeof(kMagic)) {
            throw FormatError(FormatErrorKind::TruncatedHeader, "magic",
                              fmt::format("stream ended after {} bytes", available));
        }
        throw FormatError(FormatErrorKind::BadMagic, "magic", "expected \"SEFM\"");
    }
    if (available < kSefmHeaderSize) {
        throw FormatError(FormatErrorKind::TruncatedHeader, "header",
                          fmt::format("stream ended after {} of {} header bytes", available,
                                      kSefmHeaderSize));
    }
    const auto version = static_cast<std::uint16_t>(h[4] | (h[5] << 8));
    if (version != kSefmVersion) {
        throw FormatError(FormatErrorKind::UnsupportedVersion, "version",
                          fmt::format("version {} (supported: {})", version, kSefmVersion));
    }
    SefmHeader header{get_u32(h + 6), get_u32(h + 10), get_u32(h + 14)};
    if (header.cols != kBaselineCols && header.cols != kFullCols) {
        throw FormatError(FormatErrorKind::BadShape, "cols",
                          fmt::format("cols = {}, expected 1 or 14", header.cols));
    }
    if (header.rows == 0) {
        throw FormatError(FormatErrorKind::BadShape, "rows", "rows = 0");
    }
    return header;
}

float decode_f32(const std::uint8_t* p) { return std::bit_cast<float>(get_u32(p)); }

}  // namespace

FormatError::FormatError(FormatErrorKind kind, std::string field, const std::string& detail)
    : Error(fmt::format("sefm {}: {}", field, detail)), kind_(kind), field_(std::move(field)) {}

ManifestError::ManifestError(Kind kind, std::size_t line, const std::string& detail)
    : Error(line ? fmt::format("manifest line {}: {}", line, detail)
                 : fmt::format("manifest: {}", detail)),
      kind_(kind),
      line_(line) {}

void check_feature_shape(const FeatureMatrix& m) {
    if (m.cols() != kBaselineCols && m.cols() != kFullCols) {
        throw FormatError(FormatErrorKind::BadShape, "cols",
                          fmt::format("cols = {}, expected 1 or 14", m.cols()));
    }
    if (m.rows() == 0 || m.rows() > kU32Max || m.used_rows() > kU32Max) {
        throw FormatError(FormatErrorKind::BadShape, "rows",
                          fmt::format("rows = {}, used_rows = {}", m.rows(), m.used_rows()));
    }
    if (m.values().size() != m.rows() * m.cols()) {
        throw FormatError(FormatErrorKind::BadShape, "payload", "value count != rows * cols");
    }
    for (std::size_t r = std::min(m.used_rows(), m.rows()); r < m.rows(); ++r) {
        const auto row = m.row(r);
        if (std::any_of(row.begin(), row.end(), [](double v) { return v != 0.0; })) {
            throw FormatError(FormatErrorKind::BadShape, "payload",
                              fmt::format("padding row {} is not all-zero", r));
        }
    }
}

std::vector<std::uint8_t> encode_feature(const FeatureMatrix& m) {
    check_feature_shape(m);
    std::vector<std::uint8_t> out;
    out.reserve(kSefmHeaderSize + m.values().size() * 4);
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u16(out, kSefmVersion);
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    put_u32(out, static_cast<std::uint32_t>(m.used_rows()));
    for (const double v : m.values()) {
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
    return out;
}

FeatureMatrix decode_feature(std::span<const std::uint8_t> bytes) {
    const auto header = parse_header(bytes.data(), bytes.size());
    const std::uint64_t payload = std::uint64_t{header.rows} * header.cols * 4;
    const std::uint64_t available = bytes.size() - kSefmHeaderSize;
    if (available < payload) {
        throw FormatError(FormatErrorKind::TruncatedPayload, "payload",
                          fmt::format("{} bytes present, header implies {}", available, payload));
    }
    if (available > payload) {
        throw FormatError(FormatErrorKind::TrailingBytes, "payload",
                          fmt::format("{} bytes after payload", available - payload));
    }
    FeatureMatrix m(header.rows, header.cols, header.used_rows);
    const std::uint8_t* p = bytes.data() + kSefmHeaderSize;
    for (auto& v : m.values()) {
        v = decode_f32(p);
        p += 4;
    }
    return m;
}

std::size_t write_feature(const FeatureMatrix& m, std::ostream& sink) {
    const auto bytes = encode_feature(m);
    sink.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!sink) {
        throw IoError("sefm write failed");
    }
    return bytes.size();
}

FeatureMatrix read_feature(std::istream& source) {
    std::uint8_t head[kSefmHeaderSize];
    source.read(reinterpret_cast<char*>(head), kSefmHeaderSize);
    const auto header = parse_header(head, static_cast<std::size_t>(source.gcount()));

    // Read in bounded blocks so a forged header cannot force a huge allocation.
    const std::uint64_t expected = std::uint64_t{header.rows} * header.cols * 4;
    std::vector<std::uint8_t> payload;
    constexpr std::size_t kBlock = 1 << 16;
    while (payload.size() < expected) {
        const auto want = static_cast<std::size_t>(std::min<std::uint64_t>(kBlock, expected - payload.size()));
        const auto old = payload.size();
        payload.resize(old + want);
        source.read(reinterpret_cast<char*>(payload.data() + old), static_cast<std::streamsize>(want));
        const auto got = static_cast<std::size_t>(source.gcount());
        if (got < want) {
            throw FormatError(FormatErrorKind::TruncatedPayload, "payload",
                              fmt::format("{} bytes present, header implies {}", old + got, expected));
        }
    }
    if (source.peek() != std::istream::traits_type::eof()) {
        throw FormatError(FormatErrorKind::TrailingBytes, "payload", "bytes after payload");
    }

    FeatureMatrix m(header.rows, header.cols, header.used_rows);
    const std::uint8_t* p = payload.data();
    for (auto& v : m.values()) {
        v = decode_f32(p);
        p += 4;
    }
    return m;
}

void save_feature_file(const std::filesystem::path& path, const FeatureMatrix& m) {
    write_file_atomic(path, encode_feature(m));
}

FeatureMatrix load_feature_file(const std::filesystem::path& path) {
    return decode_feature(read_file_bytes(path));
}

void export_csv(const FeatureMatrix& m, std::ostream& sink) {
    fmt::memory_buffer buf;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        fmt::format_to(std::back_inserter(buf), "{:.8f}", row[0]);
        for (std::size_t c = 1; c < row.size(); ++c) {
            fmt::format_to(std::back_inserter(buf), ",{}", static_cast<long long>(row[c]));
        }
        buf.push_back('\n');
    }
    sink.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!sink) {
        throw IoError("csv write failed");
    }
}

std::string write_manifest(const DatasetManifest& manifest) {
    std::string out = "path,label\n";
    std::unordered_set<std::string_view> seen;
    for (const auto& e : manifest.entries) {
        if (e.path.empty() || e.path.find_first_of(",\r\n") != std::string::npos) {
            throw ManifestError(ManifestError::Kind::Parse, 0,
                                fmt::format("path '{}' cannot be stored in CSV", e.path));
        }
        if (e.label != 0 && e.label != 1) {
            throw ManifestError(ManifestError::Kind::Parse, 0,
                                fmt::format("label {} for '{}' is not 0 or 1", e.label, e.path));
        }
        if (!seen.insert(e.path).second) {
            throw ManifestError(ManifestError::Kind::DuplicatePath, 0,
                                fmt::format("duplicate path '{}'", e.path));
        }
        out += fmt::format("{},{}\n", e.path, e.label);
    }
    return out;
}

DatasetManifest read_manifest(std::string_view text) {
    DatasetManifest manifest;
    std::unordered_set<std::string> seen;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (!saw_header) {
            if (line != "path,label") {
                throw ManifestError(ManifestError::Kind::Parse, line_no,
                                    "expected header \"path,label\"");
            }
            saw_header = true;
            continue;
        }
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
            throw ManifestError(ManifestError::Kind::Parse, line_no, "expected two fields");
        }
        const auto path = line.substr(0, comma);
        const auto label_text = line.substr(comma + 1);
        if (path.empty()) {
            throw ManifestError(ManifestError::Kind::Parse, line_no, "empty path");
        }
        if (label_text != "0" && label_text != "1") {
            throw ManifestError(ManifestError::Kind::Parse, line_no,
                                fmt::format("label '{}' is not 0 or 1", label_text));
        }
        if (!seen.emplace(path).second) {
            throw ManifestError(ManifestError::Kind::DuplicatePath, line_no,
                                fmt::format("duplicate path '{}'", path));
        }
        manifest.entries.push_back({std::string(path), label_text == "1" ? 1 : 0});
    }
    if (!saw_header) {
        throw ManifestError(ManifestError::Kind::Parse, 1, "missing header");
    }
    return manifest;
}

DatasetManifest load_manifest_file(const std::filesystem::path& path) {
    return read_manifest(read_file_text(path));
}

void save_manifest_file(const std::filesystem::path& path, const DatasetManifest& manifest) {
    write_file_atomic(path, write_manifest(manifest));
}

}  // namespace sefeat
