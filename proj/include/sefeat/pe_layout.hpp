#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sefeat/section_class.hpp"

namespace sefeat {

using ByteView = std::span<const std::uint8_t>;

/// A classified, non-empty byte range of the file image.
struct SectionSpan {
    std::string raw_name;  // section-table name with trailing NULs stripped; empty for Header/gaps
    SectionClass cls = SectionClass::Undefined;
    std::uint64_t file_offset = 0;
    std::uint64_t raw_size = 0;

    std::uint64_t end() const noexcept { return file_offset + raw_size; }

    friend bool operator==(const SectionSpan&, const SectionSpan&) = default;
};

/// Partition of a whole file into spans. Spans are sorted, disjoint, start
/// with the Header span at offset 0 and cover every byte of the file.
struct LayoutMap {
    std::vector<SectionSpan> spans;
    std::uint64_t total_len = 0;
};

/// Splits a PE image into Header, section and Undefined (gap/overlay) spans
/// using the raw file layout (PointerToRawData / SizeOfRawData).
///
/// Sections with SizeOfRawData == 0 are ignored. Raw sizes running past the
/// end of the file are clamped. Overlapping raw ranges are resolved first-wins
/// in ascending PointerToRawData order. The Header span always extends at
/// least to the end of the section table.
///
/// Throws MalformedPe for a missing MZ or PE signature, an out-of-range
/// e_lfanew, a section table past end of file, or a section whose raw data
/// starts at or beyond end of file.
LayoutMap parse_pe(ByteView file);

/// Bytes of `span` within `file`. Throws OutOfBounds if the span does not fit.
ByteView section_bytes(ByteView file, const SectionSpan& span);

}  // namespace sefeat
