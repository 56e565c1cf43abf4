#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sefeat/entropy_features.hpp"
#include "sefeat/error.hpp"

namespace sefeat {

// .sefm layout, all little-endian:
//   offset  0  char[4]  magic "SEFM"
//   offset  4  u16      version (1)
//   offset  6  u32      rows
//   offset 10  u32      cols (1 or 14)
//   offset 14  u32      used_rows
//   offset 18  f32[rows * cols] row-major payload, nothing after it
inline constexpr std::size_t kSefmHeaderSize = 18;
inline constexpr std::uint16_t kSefmVersion = 1;

enum class FormatErrorKind {
    BadMagic,
    UnsupportedVersion,
    BadShape,
    TruncatedHeader,
    TruncatedPayload,
    TrailingBytes,
};

class FormatError : public Error {
public:
    FormatError(FormatErrorKind kind, std::string field, const std::string& detail);

    FormatErrorKind kind() const noexcept { return kind_; }
    const std::string& field() const noexcept { return field_; }

private:
    FormatErrorKind kind_;
    std::string field_;
};

/// Throws FormatError(BadShape) unless the matrix can be stored: cols is 1
/// or 14, rows >= 1, the counts fit in u32 and rows past used_rows are zero.
void check_feature_shape(const FeatureMatrix& m);

std::vector<std::uint8_t> encode_feature(const FeatureMatrix& m);
FeatureMatrix decode_feature(std::span<const std::uint8_t> bytes);

/// Returns the number of bytes written: 18 + rows * cols * 4.
std::size_t write_feature(const FeatureMatrix& m, std::ostream& sink);
FeatureMatrix read_feature(std::istream& source);

/// Writes to a temporary sibling and renames it over `path`.
void save_feature_file(const std::filesystem::path& path, const FeatureMatrix& m);
FeatureMatrix load_feature_file(const std::filesystem::path& path);

/// One line per row. Entropy printed fixed with 8 decimals, one-hot
/// columns as integers.
void export_csv(const FeatureMatrix& m, std::ostream& sink);

struct ManifestEntry {
    std::string path;
    int label = 0;  // 0 benign, 1 malware

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

class ManifestError : public Error {
public:
    enum class Kind { Parse, DuplicatePath };

    ManifestError(Kind kind, std::size_t line, const std::string& detail);

    Kind kind() const noexcept { return kind_; }
    /// 1-based line number; 0 when raised while writing.
    std::size_t line() const noexcept { return line_; }

private:
    Kind kind_;
    std::size_t line_;
};

/// CSV with a "path,label" header. Throws ManifestError for entries that
/// cannot be represented (comma or newline in a path, label not 0/1,
/// duplicate paths).
std::string write_manifest(const DatasetManifest& manifest);
DatasetManifest read_manifest(std::string_view text);

DatasetManifest load_manifest_file(const std::filesystem::path& path);
void save_manifest_file(const std::filesystem::path& path, const DatasetManifest& manifest);

}  // namespace sefeat
