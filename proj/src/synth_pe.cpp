#include "sefeat/synth_pe.hpp"

#include <algorithm>
#include <cstring>
#include <limits>

#include <fmt/format.h>

#include "sefeat/file_util.hpp"
#include "sefeat/rng.hpp"

namespace sefeat {
namespace {

constexpr std::uint32_t kLfanew = 0x80;
constexpr std::uint32_t kOptionalHeaderSize = 240;  // PE32+ with 16 data directories
constexpr std::uint32_t kSectionAlignment = 0x1000;
constexpr std::uint64_t kOverlayStream = 0xFFFF'FFFF;

constexpr std::string_view kStubMessage = "This program cannot be run in DOS mode.\r\r\n$";

std::uint64_t align_up(std::uint64_t v, std::uint64_t a) { return (v + a - 1) / a * a; }

void put16(std::vector<std::uint8_t>& b, std::size_t off, std::uint16_t v) {
    b[off] = static_cast<std::uint8_t>(v);
    b[off + 1] = static_cast<std::uint8_t>(v >> 8);
}

void put32(std::vector<std::uint8_t>& b, std::size_t off, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        b[off + i] = static_cast<std::uint8_t>(v >> (8 * i));
    }
}

void put64(std::vector<std::uint8_t>& b, std::size_t off, std::uint64_t v) {
    put32(b, off, static_cast<std::uint32_t>(v));
    put32(b, off + 4, static_cast<std::uint32_t>(v >> 32));
}

std::uint32_t characteristics_for(std::string_view name) {
    if (name == ".text") {
        return 0x60000020;  // code | execute | read
    }
    if (name == ".data" || name == ".sdata" || name == ".tls") {
        return 0xC0000040;  // initialized data | read | write
    }
    return 0x40000040;  // initialized data | read
}

void fill(std::span<std::uint8_t> out, const EntropyProfile& p, SplitMix64& rng) {
    std::visit(
        [&](const auto& prof) {
            using T = std::decay_t<decltype(prof)>;
            if constexpr (std::is_same_v<T, profile::Constant>) {
                std::fill(out.begin(), out.end(), prof.value);
            } else if constexpr (std::is_same_v<T, profile::TwoSymbol>) {
                for (auto& b : out) {
                    b = rng.next_double() < prof.ratio ? prof.a : prof.b;
                }
            } else {
                std::size_t i = 0;
                while (i < out.size()) {
                    std::uint64_t word = rng.next();
                    for (int k = 0; k < 8 && i < out.size(); ++k, ++i) {
                        out[i] = static_cast<std::uint8_t>(word >> (8 * k));
                    }
                }
            }
        },
        p);
}

}  // namespace

void validate_synth_spec(const SynthSpec& spec) {
    if (spec.sections.size() > std::numeric_limits<std::uint16_t>::max()) {
        throw SpecError("sections", fmt::format("{} sections exceed the PE limit of 65535",
                                                spec.sections.size()));
    }
    for (std::size_t i = 0; i < spec.sections.size(); ++i) {
        const auto& s = spec.sections[i];
        const auto where = fmt::format("sections[{}]", i);
        if (s.name.size() > 8) {
            throw SpecError(where, fmt::format("name '{}' is {} bytes, limit is 8", s.name, s.name.size()));
        }
        if (s.name.find('\0') != std::string::npos) {
            throw SpecError(where, "name contains a NUL byte");
        }
        if (s.raw_size == 0) {
            throw SpecError(where, fmt::format("section '{}' has size 0", s.name));
        }
        if (const auto* two = std::get_if<profile::TwoSymbol>(&s.profile)) {
            if (!(two->ratio > 0.0 && two->ratio < 1.0)) {
                throw SpecError(where, fmt::format("two-symbol ratio {} outside (0, 1)", two->ratio));
            }
        }
    }
    const auto placement = synthetic_placement(spec);
    if (placement.file_size > std::numeric_limits<std::uint32_t>::max()) {
        throw SpecError("sections", "image exceeds 4 GiB");
    }
}

SynthPlacement synthetic_placement(const SynthSpec& spec) {
    SynthPlacement p;
    const std::uint64_t table = kLfanew + 4 + 20 + kOptionalHeaderSize;
    p.headers_size = align_up(table + 40 * spec.sections.size(), kSynthFileAlignment);
    std::uint64_t cursor = p.headers_size;
    for (const auto& s : spec.sections) {
        cursor = align_up(cursor, kSynthFileAlignment);
        p.section_offsets.push_back(cursor);
        cursor += s.raw_size;
    }
    p.overlay_offset = cursor;
    p.file_size = cursor + spec.overlay_size;
    return p;
}

std::vector<std::uint8_t> build_synthetic_pe(const SynthSpec& spec) {
    validate_synth_spec(spec);
    const auto placement = synthetic_placement(spec);
    std::vector<std::uint8_t> img(placement.file_size, 0);

    // DOS header + stub text.
    img[0] = 'M';
    img[1] = 'Z';
    put16(img, 0x02, 0x90);  // e_cblp
    put16(img, 0x04, 3);     // e_cp
    put16(img, 0x08, 4);     // e_cparhdr
    put16(img, 0x0C, 0xFFFF);
    put16(img, 0x10, 0xB8);
    put16(img, 0x18, 0x40);
    put32(img, 0x3C, kLfanew);
    std::memcpy(img.data() + 0x4E, kStubMessage.data(), kStubMessage.size());

    // NT signature and COFF file header.
    const std::size_t nt = kLfanew;
    std::memcpy(img.data() + nt, "PE\0\0", 4);
    const std::size_t coff = nt + 4;
    put16(img, coff + 0, 0x8664);  // AMD64
    put16(img, coff + 2, static_cast<std::uint16_t>(spec.sections.size()));
    put16(img, coff + 16, kOptionalHeaderSize);
    put16(img, coff + 18, 0x0022);  // executable | large address aware

    std::uint64_t image_size = kSectionAlignment;
    std::uint32_t code_size = 0;
    std::uint32_t data_size = 0;
    for (const auto& s : spec.sections) {
        image_size += align_up(s.raw_size, kSectionAlignment);
        (s.name == ".text" ? code_size : data_size) +=
            static_cast<std::uint32_t>(align_up(s.raw_size, kSynthFileAlignment));
    }

    // PE32+ optional header.
    const std::size_t opt = coff + 20;
    put16(img, opt + 0, 0x20B);
    img[opt + 2] = 14;  // linker version
    put32(img, opt + 4, code_size);
    put32(img, opt + 8, data_size);
    put32(img, opt + 20, kSectionAlignment);  // BaseOfCode
    put64(img, opt + 24, 0x140000000ULL);    // ImageBase
    put32(img, opt + 32, kSectionAlignment);
    put32(img, opt + 36, kSynthFileAlignment);
    put16(img, opt + 40, 6);  // OS version
    put16(img, opt + 48, 6);  // subsystem version
    put32(img, opt + 56, static_cast<std::uint32_t>(image_size));
    put32(img, opt + 60, static_cast<std::uint32_t>(placement.headers_size));
    put16(img, opt + 68, 3);  // console
    put16(img, opt + 70, 0x8160);
    put64(img, opt + 72, 0x100000);
    put64(img, opt + 80, 0x1000);
    put64(img, opt + 88, 0x100000);
    put64(img, opt + 96, 0x1000);
    put32(img, opt + 108, 16);

    // Section table and raw data.
    const std::size_t table = opt + kOptionalHeaderSize;
    std::uint64_t rva = kSectionAlignment;
    for (std::size_t i = 0; i < spec.sections.size(); ++i) {
        const auto& s = spec.sections[i];
        const std::size_t entry = table + 40 * i;
        std::memcpy(img.data() + entry, s.name.data(), s.name.size());
        put32(img, entry + 8, s.raw_size);
        put32(img, entry + 12, static_cast<std::uint32_t>(rva));
        put32(img, entry + 16, s.raw_size);
        put32(img, entry + 20, static_cast<std::uint32_t>(placement.section_offsets[i]));
        put32(img, entry + 36, characteristics_for(s.name));
        if (s.name == ".text") {
            put32(img, opt + 16, static_cast<std::uint32_t>(rva));  // entry point
        }
        rva += align_up(s.raw_size, kSectionAlignment);

        SplitMix64 rng(derive_seed(spec.seed, i));
        fill(std::span(img).subspan(placement.section_offsets[i], s.raw_size), s.profile, rng);
    }

    SplitMix64 overlay_rng(derive_seed(spec.seed, kOverlayStream));
    fill(std::span(img).subspan(placement.overlay_offset, spec.overlay_size),
         profile::UniformRandom{}, overlay_rng);
    return img;
}

std::uint64_t corpus_file_seed(std::uint64_t corpus_seed, std::size_t recipe, std::size_t index) {
    return derive_seed(derive_seed(corpus_seed, recipe), index);
}

std::string corpus_file_name(std::size_t recipe, std::size_t index) {
    return fmt::format("r{:02}_{:05}.exe", recipe, index);
}

DatasetManifest make_corpus(const CorpusSpec& spec, const std::filesystem::path& out_dir) {
    if (spec.recipes.empty()) {
        throw SpecError("recipes", "corpus has no recipes");
    }
    for (std::size_t r = 0; r < spec.recipes.size(); ++r) {
        const auto& recipe = spec.recipes[r];
        const auto where = fmt::format("recipes[{}]", r);
        if (recipe.count == 0) {
            throw SpecError(where, "count is 0");
        }
        if (recipe.label != 0 && recipe.label != 1) {
            throw SpecError(where, fmt::format("label {} is not 0 or 1", recipe.label));
        }
        validate_synth_spec(recipe.tmpl);
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError(fmt::format("cannot create {}: {}", out_dir.string(), ec.message()));
    }

    DatasetManifest manifest;
    for (std::size_t r = 0; r < spec.recipes.size(); ++r) {
        const auto& recipe = spec.recipes[r];
        for (std::size_t i = 0; i < recipe.count; ++i) {
            SynthSpec file_spec = recipe.tmpl;
            file_spec.seed = corpus_file_seed(spec.seed, r, i);
            const auto name = corpus_file_name(r, i);
            write_file_atomic(out_dir / name, build_synthetic_pe(file_spec));
            manifest.entries.push_back({name, recipe.label});
        }
    }
    save_manifest_file(out_dir / "manifest.csv", manifest);
    return manifest;
}

}  // namespace sefeat
