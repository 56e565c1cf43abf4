#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sefeat/feature_io.hpp"

namespace sefeat {

namespace profile {

struct Constant {
    std::uint8_t value = 0;
};

/// Each byte is `a` with probability `ratio`, else `b`.
struct TwoSymbol {
    std::uint8_t a = 0;
    std::uint8_t b = 0;
    double ratio = 0.5;
};

/// Independent uniform bytes from the seeded generator.
struct UniformRandom {};

}  // namespace profile

using EntropyProfile = std::variant<profile::Constant, profile::TwoSymbol, profile::UniformRandom>;

struct SynthSection {
    std::string name;  // at most 8 bytes, no NULs
    std::uint32_t raw_size = 0;
    EntropyProfile profile;
};

struct SynthSpec {
    std::vector<SynthSection> sections;
    std::uint64_t overlay_size = 0;
    std::uint64_t seed = 0;
};

inline constexpr std::uint32_t kSynthFileAlignment = 512;

/// Where the generator placed each section's raw data, and the overlay.
struct SynthPlacement {
    std::vector<std::uint64_t> section_offsets;
    std::uint64_t headers_size = 0;
    std::uint64_t overlay_offset = 0;
    std::uint64_t file_size = 0;
};

/// Throws SpecError if a name is longer than 8 bytes or contains NUL, a
/// size is zero, a ratio is outside (0, 1) or the image would overflow
/// 32-bit file offsets.
void validate_synth_spec(const SynthSpec& spec);

SynthPlacement synthetic_placement(const SynthSpec& spec);

/// Minimal PE32+ image: DOS header and stub, NT headers, section table, then
/// each section's raw data at the next 512-byte boundary in spec order,
/// followed by `overlay_size` random bytes. SizeOfRawData is the exact
/// requested size; alignment slack between sections is zero-filled.
std::vector<std::uint8_t> build_synthetic_pe(const SynthSpec& spec);

struct CorpusRecipe {
    int label = 0;
    SynthSpec tmpl;  // template; its seed is replaced per file
    std::size_t count = 0;
};

struct CorpusSpec {
    std::uint64_t seed = 0;
    std::vector<CorpusRecipe> recipes;
};

/// Seed of file `index` of recipe `recipe`, derived from the corpus seed.
std::uint64_t corpus_file_seed(std::uint64_t corpus_seed, std::size_t recipe, std::size_t index);

/// Relative file name of file `index` of recipe `recipe`.
std::string corpus_file_name(std::size_t recipe, std::size_t index);

/// Writes every file into `out_dir` (created if needed) plus manifest.csv
/// labelling each file with its recipe label. Returns the manifest.
DatasetManifest make_corpus(const CorpusSpec& spec, const std::filesystem::path& out_dir);

/// Parses the line-oriented corpus description (see docs/synth-format.md).
/// `source` names the input in SpecError locations.
CorpusSpec parse_corpus_spec(std::string_view text, std::string_view source = "<spec>");

}  // namespace sefeat
