#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sefeat/extract.hpp"

namespace sefeat {

struct BenchResult {
    std::string operation;
    std::uint64_t bytes = 0;  // bytes processed per iteration
    double mb_per_s = 0.0;    // from the median iteration time
    std::size_t iterations = 0;
};

inline constexpr std::size_t kMinBenchIterations = 10;

/// shannon_entropy throughput over seeded random buffers, one row per size.
std::vector<BenchResult> bench_entropy(const std::vector<std::size_t>& sizes,
                                       std::size_t iterations = kMinBenchIterations);

/// Parse + feature extraction over every regular file in `corpus_dir`,
/// in memory (nothing is written). Throws IoError if the directory is missing.
BenchResult bench_parse(const std::filesystem::path& corpus_dir, const ExtractConfig& config = {},
                        std::size_t iterations = kMinBenchIterations);

/// "operation,bytes,mb_per_s,iters" header plus one line per result.
void write_bench_csv(const std::vector<BenchResult>& results, std::ostream& out);

}  // namespace sefeat
