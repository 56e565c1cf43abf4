// sefeat: section-aware structural entropy features for PE files.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <limits>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sefeat/bench.hpp"
#include "sefeat/entropy_features.hpp"
#include "sefeat/error.hpp"
#include "sefeat/extract.hpp"
#include "sefeat/feature_io.hpp"
#include "sefeat/file_util.hpp"
#include "sefeat/pe_layout.hpp"
#include "sefeat/synth_pe.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitIo = 3;
constexpr int kExitSpec = 4;

int run_inspect(const std::string& path, std::size_t chunk_size) {
    std::vector<std::uint8_t> bytes;
    try {
        bytes = sefeat::read_file_bytes(path);
    } catch (const sefeat::IoError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitIo;
    }
    sefeat::LayoutMap layout;
    try {
        layout = sefeat::parse_pe(bytes);
    } catch (const sefeat::MalformedPe& e) {
        fmt::print(stderr, "error: {}: {}\n", path, e.what());
        return kExitParse;
    }

    fmt::print("{}: {} bytes, {} spans, {} chunks of {} bytes\n", path, layout.total_len,
               layout.spans.size(), sefeat::count_chunks(layout, chunk_size), chunk_size);
    fmt::print("{:<10} {:<8} {:>10} {:>10} {:>7} {:>7} {:>7} {:>7}\n", "class", "name", "offset",
               "size", "chunks", "min_H", "mean_H", "max_H");
    for (const auto& span : layout.spans) {
        const auto chunks = sefeat::chunk_section(sefeat::section_bytes(bytes, span), chunk_size);
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        double sum = 0.0;
        for (const auto c : chunks) {
            const double h = sefeat::shannon_entropy(c);
            lo = std::min(lo, h);
            hi = std::max(hi, h);
            sum += h;
        }
        fmt::print("{:<10} {:<8} {:>#10x} {:>10} {:>7} {:>7.4f} {:>7.4f} {:>7.4f}\n",
                   sefeat::section_class_name(span.cls), span.raw_name.empty() ? "-" : span.raw_name,
                   span.file_offset, span.raw_size, chunks.size(), lo,
                   sum / static_cast<double>(chunks.size()), hi);
    }
    return kExitOk;
}

int run_extract(const std::vector<std::string>& positional, const std::string& manifest_path,
                const sefeat::ExtractConfig& config, bool deterministic) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<sefeat::ExtractInput> inputs;
    if (!manifest_path.empty()) {
        try {
            inputs = sefeat::inputs_from_manifest(manifest_path);
        } catch (const sefeat::Error& e) {
            fmt::print(stderr, "error: {}: {}\n", manifest_path, e.what());
            return kExitIo;
        }
    }
    for (const auto& p : positional) {
        inputs.push_back({p, std::nullopt});
    }
    if (inputs.empty()) {
        fmt::print(stderr, "error: no inputs\n");
        return kExitIo;
    }

    sefeat::BatchReport report;
    try {
        report = sefeat::extract_batch(inputs, config);
        if (!report.manifest.entries.empty()) {
            sefeat::save_manifest_file(config.output_dir / "manifest.csv", report.manifest);
        }
    } catch (const sefeat::Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitIo;
    }

    for (const auto& r : report.results) {
        if (r.status == sefeat::ExtractStatus::Ok) {
            fmt::print("{} -> {} used_rows={}\n", r.input.string(), r.output.string(), r.used_rows);
        } else {
            fmt::print(stderr, "skip {}: {}\n", r.input.string(), r.message);
        }
    }
    fmt::print("processed {}, skipped {}\n", report.processed, report.skipped);
    if (!deterministic) {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        fmt::print("elapsed {:.3f}s with {} job(s)\n", elapsed.count(), config.jobs);
    }
    return report.processed > 0 ? kExitOk : kExitParse;
}

int run_synth(const std::string& spec_path, const std::string& out_dir) {
    std::string text;
    try {
        text = sefeat::read_file_text(spec_path);
    } catch (const sefeat::IoError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitIo;
    }
    try {
        const auto spec = sefeat::parse_corpus_spec(text, spec_path);
        const auto manifest = sefeat::make_corpus(spec, out_dir);
        fmt::print("wrote {} files and manifest.csv to {}\n", manifest.entries.size(), out_dir);
    } catch (const sefeat::SpecError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitSpec;
    } catch (const sefeat::Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitIo;
    }
    return kExitOk;
}

int run_export_csv(const std::string& path, const std::string& out_path) {
    try {
        const auto m = sefeat::load_feature_file(path);
        if (out_path.empty() || out_path == "-") {
            sefeat::export_csv(m, std::cout);
        } else {
            std::ofstream out(out_path);
            if (!out) {
                throw sefeat::IoError(fmt::format("cannot create {}", out_path));
            }
            sefeat::export_csv(m, out);
        }
    } catch (const sefeat::FormatError& e) {
        fmt::print(stderr, "error: {}: {}\n", path, e.what());
        return kExitParse;
    } catch (const sefeat::Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitIo;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Section-aware structural entropy features for PE files"};
    app.require_subcommand(1);

    std::size_t chunk_size = sefeat::kDefaultChunkSize;

    auto* inspect = app.add_subcommand("inspect", "Print the classified layout of a PE file");
    std::string inspect_path;
    inspect->add_option("path", inspect_path, "PE file")->required();
    inspect->add_option("--chunk-size", chunk_size, "Chunk size in bytes")
        ->check(CLI::PositiveNumber);

    auto* extract = app.add_subcommand("extract", "Write a .sefm feature file per input");
    sefeat::ExtractConfig config;
    std::vector<std::string> inputs;
    std::string manifest_path;
    bool deterministic = false;
    std::string out_dir = ".";
    extract->add_option("inputs", inputs, "PE files");
    extract->add_option("--manifest", manifest_path,
                        "Labelled PE manifest (path,label); writes manifest.csv for the outputs");
    extract->add_option("--chunk-size", config.chunk_size, "Chunk size in bytes")
        ->check(CLI::PositiveNumber);
    extract->add_option("--max-rows", config.max_rows, "Rows after pad/truncate")
        ->check(CLI::PositiveNumber);
    extract->add_flag("--baseline", config.baseline, "Entropy column only (<max-rows, 1>)");
    extract->add_option("--out", out_dir, "Output directory");
    extract->add_option("--jobs,-j", config.jobs, "Worker threads")->check(CLI::PositiveNumber);
    extract->add_flag("--deterministic", deterministic, "Suppress timing output");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic PE corpus from a spec file");
    std::string spec_path;
    std::string synth_out = "corpus";
    synth->add_option("spec", spec_path, "Corpus spec file")->required();
    synth->add_option("--out", synth_out, "Output directory");

    auto* csv = app.add_subcommand("export-csv", "Print a .sefm file as CSV");
    std::string csv_path;
    std::string csv_out;
    csv->add_option("path", csv_path, ".sefm file")->required();
    csv->add_option("--out,-o", csv_out, "Output file (default stdout)");

    auto* bench = app.add_subcommand("bench", "Throughput micro-benchmarks (CSV)");
    std::vector<std::size_t> sizes;
    std::string corpus_dir;
    std::size_t iterations = sefeat::kMinBenchIterations;
    bench->add_option("--entropy-sizes", sizes, "Buffer sizes for the entropy kernel");
    bench->add_option("--corpus", corpus_dir, "Directory of PE files for parse+extract");
    bench->add_option("--iters", iterations, "Iterations per measurement (min 10)");

    CLI11_PARSE(app, argc, argv);

    if (*inspect) {
        return run_inspect(inspect_path, chunk_size);
    }
    if (*extract) {
        config.output_dir = out_dir;
        return run_extract(inputs, manifest_path, config, deterministic);
    }
    if (*synth) {
        return run_synth(spec_path, synth_out);
    }
    if (*csv) {
        return run_export_csv(csv_path, csv_out);
    }
    if (*bench) {
        try {
            auto results = sefeat::bench_entropy(sizes, iterations);
            if (!corpus_dir.empty()) {
                results.push_back(sefeat::bench_parse(corpus_dir, {}, iterations));
            }
            sefeat::write_bench_csv(results, std::cout);
        } catch (const sefeat::Error& e) {
            fmt::print(stderr, "error: {}\n", e.what());
            return kExitIo;
        }
    }
    return kExitOk;
}
