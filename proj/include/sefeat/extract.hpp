#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sefeat/entropy_features.hpp"
#include "sefeat/feature_io.hpp"

namespace sefeat {

struct ExtractConfig {
    std::size_t chunk_size = kDefaultChunkSize;
    std::size_t max_rows = kDefaultMaxRows;
    bool baseline = false;  // entropy-only <max_rows, 1> output
    std::filesystem::path output_dir = ".";
    std::size_t jobs = 1;

    /// Throws RangeError if a size or the worker count is zero.
    void validate() const;
};

/// Parse + feature for one in-memory image.
FeatureMatrix extract_feature(ByteView file, const ExtractConfig& config);

struct ExtractInput {
    std::filesystem::path path;
    std::optional<int> label;
};

enum class ExtractStatus { Ok, Malformed, IoFailure, DuplicateStem };

struct ExtractResult {
    std::filesystem::path input;
    std::filesystem::path output;  // set when status == Ok
    ExtractStatus status = ExtractStatus::Ok;
    std::string message;
    std::size_t used_rows = 0;
};

struct BatchReport {
    std::vector<ExtractResult> results;  // same order as the inputs
    std::size_t processed = 0;
    std::size_t skipped = 0;
    /// Successfully extracted labelled inputs, paths relative to output_dir.
    DatasetManifest manifest;
};

/// Writes `<stem>.sefm` per input into config.output_dir using config.jobs
/// worker threads. Failing inputs are recorded and skipped. Output bytes do
/// not depend on the worker count. Inputs whose stem repeats an earlier
/// input's stem are skipped as DuplicateStem.
BatchReport extract_batch(const std::vector<ExtractInput>& inputs, const ExtractConfig& config);

/// Reads a PE manifest (paths relative to the manifest's directory).
std::vector<ExtractInput> inputs_from_manifest(const std::filesystem::path& manifest_path);

}  // namespace sefeat
