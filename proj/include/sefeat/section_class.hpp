#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace sefeat {

/// Canonical layout classes. The enumerator value is the one-hot index, so
/// the order here is part of the feature format and must not change.
enum class SectionClass : std::uint8_t {
    Header = 0,
    Data = 1,
    Edata = 2,
    Idata = 3,
    Pdata = 4,
    Rdata = 5,
    Rsrc = 6,
    Reloc = 7,
    Text = 8,
    Tls = 9,
    Sdata = 10,
    Xdata = 11,
    Undefined = 12,
};

inline constexpr std::size_t kSectionClassCount = 13;

constexpr std::size_t ordinal(SectionClass c) noexcept { return static_cast<std::size_t>(c); }

/// Inverse of ordinal(); nullopt outside [0, 12].
std::optional<SectionClass> section_class_from_ordinal(std::size_t ordinal) noexcept;

/// Display name: "Header", ".data", ..., "Undefined".
std::string_view section_class_name(SectionClass c) noexcept;

/// Maps a section-table name field (up to 8 bytes, NUL padded) to its class.
/// Trailing NULs are stripped, then the name must match one of the eleven
/// dotted names exactly (case-sensitive). Everything else is Undefined.
/// Never returns Header.
SectionClass classify_section(std::string_view raw_name) noexcept;

}  // namespace sefeat
