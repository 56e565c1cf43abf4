#include "sefeat/section_class.hpp"

#include <utility>

namespace sefeat {
namespace {

constexpr std::array<std::string_view, kSectionClassCount> kNames = {
    "Header", ".data", ".edata", ".idata", ".pdata", ".rdata", ".rsrc",
    ".reloc", ".text", ".tls",   ".sdata", ".xdata", "Undefined",
};

}  // namespace

std::optional<SectionClass> section_class_from_ordinal(std::size_t ordinal) noexcept {
    if (ordinal >= kSectionClassCount) {
        return std::nullopt;
    }
    return static_cast<SectionClass>(ordinal);
}

std::string_view section_class_name(SectionClass c) noexcept {
    const auto i = ordinal(c);
    return i < kNames.size() ? kNames[i] : kNames.back();
}

SectionClass classify_section(std::string_view raw_name) noexcept {
    while (!raw_name.empty() && raw_name.back() == '\0') {
        raw_name.remove_suffix(1);
    }
    // Only the dotted names are eligible; Header and Undefined are structural.
    for (std::size_t i = ordinal(SectionClass::Data); i < ordinal(SectionClass::Undefined); ++i) {
        if (raw_name == kNames[i]) {
            return static_cast<SectionClass>(i);
        }
    }
    return SectionClass::Undefined;
}

}  // namespace sefeat
