#include "sefeat/extract.hpp"

#include <atomic>
#include <thread>
#include <unordered_set>

#include <fmt/format.h>

#include "sefeat/error.hpp"
#include "sefeat/file_util.hpp"
#include "sefeat/pe_layout.hpp"

namespace sefeat {

void ExtractConfig::validate() const {
    if (chunk_size == 0) {
        throw RangeError("chunk size must be at least 1");
    }
    if (max_rows == 0) {
        throw RangeError("max rows must be at least 1");
    }
    if (jobs == 0) {
        throw RangeError("jobs must be at least 1");
    }
}

FeatureMatrix extract_feature(ByteView file, const ExtractConfig& config) {
    const auto layout = parse_pe(file);
    return build_feature(file, layout, config.chunk_size, config.max_rows,
                         config.baseline ? FeatureMode::EntropyOnly : FeatureMode::SectionAware);
}

namespace {

ExtractResult extract_one(const std::filesystem::path& input, const ExtractConfig& config) {
    ExtractResult result;
    result.input = input;
    try {
        const auto bytes = read_file_bytes(input);
        const auto feature = extract_feature(bytes, config);
        auto out = config.output_dir / input.stem();
        out += ".sefm";
        save_feature_file(out, feature);
        result.output = std::move(out);
        result.used_rows = feature.used_rows();
    } catch (const MalformedPe& e) {
        result.status = ExtractStatus::Malformed;
        result.message = e.what();
    } catch (const Error& e) {
        result.status = ExtractStatus::IoFailure;
        result.message = e.what();
    }
    return result;
}

}  // namespace

BatchReport extract_batch(const std::vector<ExtractInput>& inputs, const ExtractConfig& config) {
    config.validate();
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) {
        throw IoError(fmt::format("cannot create {}: {}", config.output_dir.string(), ec.message()));
    }

    BatchReport report;
    report.results.resize(inputs.size());

    // Stem collisions are decided up front so the outcome is independent of scheduling.
    std::vector<bool> runnable(inputs.size(), true);
    std::unordered_set<std::string> stems;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (!stems.insert(inputs[i].path.stem().string()).second) {
            runnable[i] = false;
            report.results[i] = {inputs[i].path, {}, ExtractStatus::DuplicateStem,
                                 fmt::format("output stem '{}' already used by an earlier input",
                                             inputs[i].path.stem().string()),
                                 0};
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < inputs.size(); i = next.fetch_add(1)) {
            if (runnable[i]) {
                report.results[i] = extract_one(inputs[i].path, config);
            }
        }
    };
    const std::size_t workers = std::min(config.jobs, std::max<std::size_t>(inputs.size(), 1));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }

    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto& r = report.results[i];
        if (r.status == ExtractStatus::Ok) {
            ++report.processed;
            if (inputs[i].label) {
                report.manifest.entries.push_back(
                    {r.output.filename().string(), *inputs[i].label});
            }
        } else {
            ++report.skipped;
        }
    }
    return report;
}

std::vector<ExtractInput> inputs_from_manifest(const std::filesystem::path& manifest_path) {
    const auto manifest = load_manifest_file(manifest_path);
    const auto base = manifest_path.parent_path();
    std::vector<ExtractInput> inputs;
    inputs.reserve(manifest.entries.size());
    for (const auto& e : manifest.entries) {
        inputs.push_back({base / e.path, e.label});
    }
    return inputs;
}

}  // namespace sefeat
