#include "sefeat/bench.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>

#include <fmt/format.h>

#include "sefeat/error.hpp"
#include "sefeat/file_util.hpp"
#include "sefeat/rng.hpp"

namespace sefeat {
namespace {

using Clock = std::chrono::steady_clock;

template <typename Fn>
double median_seconds(std::size_t iterations, Fn&& fn) {
    std::vector<double> times;
    times.reserve(iterations);
    for (std::size_t i = 0; i < iterations; ++i) {
        const auto start = Clock::now();
        fn();
        times.push_back(std::chrono::duration<double>(Clock::now() - start).count());
    }
    std::nth_element(times.begin(), times.begin() + times.size() / 2, times.end());
    return times[times.size() / 2];
}

double throughput(std::uint64_t bytes, double seconds) {
    // A timer tick of zero would make throughput infinite; floor at 1ns.
    return static_cast<double>(bytes) / 1e6 / std::max(seconds, 1e-9);
}

}  // namespace

std::vector<BenchResult> bench_entropy(const std::vector<std::size_t>& sizes, std::size_t iterations) {
    iterations = std::max(iterations, kMinBenchIterations);
    std::vector<BenchResult> results;
    for (const auto size : sizes) {
        if (size == 0) {
            continue;
        }
        std::vector<std::uint8_t> buf(size);
        SplitMix64 rng(size);
        for (auto& b : buf) {
            b = static_cast<std::uint8_t>(rng.next());
        }
        volatile double sink = 0.0;
        const double t = median_seconds(iterations, [&] { sink = sink + shannon_entropy(buf); });
        results.push_back({"shannon_entropy", size, throughput(size, t), iterations});
    }
    return results;
}

BenchResult bench_parse(const std::filesystem::path& corpus_dir, const ExtractConfig& config,
                        std::size_t iterations) {
    std::error_code ec;
    if (!std::filesystem::is_directory(corpus_dir, ec)) {
        throw IoError(fmt::format("corpus directory {} not found", corpus_dir.string()));
    }
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::directory_iterator(corpus_dir)) {
        if (entry.is_regular_file()) {
            paths.push_back(entry.path());
        }
    }
    std::sort(paths.begin(), paths.end());

    std::vector<std::vector<std::uint8_t>> files;
    std::uint64_t bytes = 0;
    for (const auto& p : paths) {
        auto data = read_file_bytes(p);
        try {
            (void)parse_pe(data);
        } catch (const MalformedPe&) {
            continue;
        }
        bytes += data.size();
        files.push_back(std::move(data));
    }

    iterations = std::max(iterations, kMinBenchIterations);
    volatile std::size_t sink = 0;
    const double t = median_seconds(iterations, [&] {
        for (const auto& f : files) {
            sink = sink + extract_feature(f, config).used_rows();
        }
    });
    return {"parse_extract", bytes, throughput(bytes, t), iterations};
}

void write_bench_csv(const std::vector<BenchResult>& results, std::ostream& out) {
    out << "operation,bytes,mb_per_s,iters\n";
    for (const auto& r : results) {
        out << fmt::format("{},{},{:.3f},{}\n", r.operation, r.bytes, r.mb_per_s, r.iterations);
    }
}

}  // namespace sefeat
