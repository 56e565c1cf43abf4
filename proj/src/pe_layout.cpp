#include "sefeat/pe_layout.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "sefeat/error.hpp"

namespace sefeat {
namespace {

constexpr std::uint64_t kDosHeaderSize = 64;
constexpr std::uint64_t kLfanewOffset = 0x3C;
constexpr std::uint64_t kCoffHeaderSize = 20;
constexpr std::uint64_t kSectionHeaderSize = 40;

std::uint16_t read_u16(ByteView b, std::uint64_t off) {
    return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}

std::uint32_t read_u32(ByteView b, std::uint64_t off) {
    return static_cast<std::uint32_t>(b[off]) | (static_cast<std::uint32_t>(b[off + 1]) << 8) |
           (static_cast<std::uint32_t>(b[off + 2]) << 16) |
           (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

struct RawSection {
    std::string name;
    std::uint64_t offset;
    std::uint64_t size;
    std::size_t index;
};

}  // namespace

LayoutMap parse_pe(ByteView file) {
    const std::uint64_t len = file.size();
    if (len < kDosHeaderSize) {
        throw MalformedPe("DOS header", 0, fmt::format("file is {} bytes, need {}", len, kDosHeaderSize));
    }
    if (file[0] != 'M' || file[1] != 'Z') {
        throw MalformedPe("DOS header", 0, "missing MZ magic");
    }

    const std::uint64_t nt = read_u32(file, kLfanewOffset);
    if (nt + 4 + kCoffHeaderSize > len) {
        throw MalformedPe("e_lfanew", kLfanewOffset,
                          fmt::format("NT headers at {:#x} do not fit in {} bytes", nt, len));
    }
    if (file[nt] != 'P' || file[nt + 1] != 'E' || file[nt + 2] != 0 || file[nt + 3] != 0) {
        throw MalformedPe("NT signature", nt, "missing PE\\0\\0 signature");
    }

    const std::uint64_t coff = nt + 4;
    const std::uint64_t section_count = read_u16(file, coff + 2);
    const std::uint64_t optional_size = read_u16(file, coff + 16);
    const std::uint64_t table = coff + kCoffHeaderSize + optional_size;
    const std::uint64_t table_end = table + section_count * kSectionHeaderSize;
    if (table_end > len) {
        throw MalformedPe("section table", table,
                          fmt::format("{} entries end at {:#x}, past end of file {:#x}",
                                      section_count, table_end, len));
    }

    std::vector<RawSection> sections;
    sections.reserve(section_count);
    for (std::size_t i = 0; i < section_count; ++i) {
        const std::uint64_t entry = table + i * kSectionHeaderSize;
        const std::uint64_t raw_size = read_u32(file, entry + 16);
        const std::uint64_t raw_ptr = read_u32(file, entry + 20);
        if (raw_size == 0) {
            continue;
        }
        if (raw_ptr >= len) {
            throw MalformedPe(fmt::format("section header {}", i), entry + 20,
                              fmt::format("PointerToRawData {:#x} at or past end of file {:#x}",
                                          raw_ptr, len));
        }
        std::string name(reinterpret_cast<const char*>(file.data() + entry), 8);
        while (!name.empty() && name.back() == '\0') {
            name.pop_back();
        }
        sections.push_back({std::move(name), raw_ptr, std::min(raw_size, len - raw_ptr), i});
    }
    std::stable_sort(sections.begin(), sections.end(),
                     [](const RawSection& a, const RawSection& b) { return a.offset < b.offset; });

    std::uint64_t header_end = len;
    if (!sections.empty()) {
        header_end = std::max(sections.front().offset, table_end);
    }

    LayoutMap layout;
    layout.total_len = len;
    layout.spans.push_back({"", SectionClass::Header, 0, header_end});

    std::uint64_t cursor = header_end;
    for (const auto& s : sections) {
        const std::uint64_t start = std::max(s.offset, cursor);
        const std::uint64_t end = s.offset + s.size;
        if (end <= start) {
            continue;  // fully shadowed by earlier spans
        }
        if (start > cursor) {
            layout.spans.push_back({"", SectionClass::Undefined, cursor, start - cursor});
        }
        layout.spans.push_back({s.name, classify_section(s.name), start, end - start});
        cursor = end;
    }
    if (cursor < len) {
        layout.spans.push_back({"", SectionClass::Undefined, cursor, len - cursor});
    }
    return layout;
}

ByteView section_bytes(ByteView file, const SectionSpan& span) {
    if (span.file_offset > file.size() || span.raw_size > file.size() - span.file_offset) {
        throw OutOfBounds(fmt::format("span [{}, {}) exceeds buffer of {} bytes", span.file_offset,
                                      span.file_offset + span.raw_size, file.size()));
    }
    return file.subspan(span.file_offset, span.raw_size);
}

}  // namespace sefeat
