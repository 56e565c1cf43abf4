#include "sefeat/entropy_features.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sefeat/error.hpp"

namespace sefeat {

std::array<double, kFullCols> ChunkVec::row() const noexcept {
    std::array<double, kFullCols> out{};
    out[0] = entropy;
    out[1 + ordinal(cls)] = 1.0;
    return out;
}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::size_t used_rows)
    : rows_(rows), cols_(cols), used_rows_(used_rows), values_(rows * cols, 0.0) {}

std::vector<ByteView> chunk_section(ByteView bytes, std::size_t chunk_size) {
    if (chunk_size == 0) {
        throw RangeError("chunk_size must be at least 1");
    }
    std::vector<ByteView> chunks;
    chunks.reserve((bytes.size() + chunk_size - 1) / chunk_size);
    for (std::size_t off = 0; off < bytes.size(); off += chunk_size) {
        chunks.push_back(bytes.subspan(off, std::min(chunk_size, bytes.size() - off)));
    }
    return chunks;
}

double shannon_entropy(ByteView chunk) {
    if (chunk.empty()) {
        throw EmptyChunk("entropy of an empty chunk is undefined");
    }
    std::array<std::uint64_t, 256> histogram{};
    for (const auto b : chunk) {
        ++histogram[b];
    }
    const double n = static_cast<double>(chunk.size());
    double h = 0.0;
    for (const auto count : histogram) {
        if (count != 0) {
            const double p = static_cast<double>(count) / n;
            h -= p * std::log2(p);
        }
    }
    return std::min(h, kMaxEntropy);
}

OneHot one_hot(SectionClass cls) noexcept {
    OneHot v{};
    v[ordinal(cls)] = 1.0;
    return v;
}

ChunkVec chunk_vec(double entropy, SectionClass cls) {
    if (!(entropy >= 0.0 && entropy <= kMaxEntropy)) {
        throw RangeError(fmt::format("entropy {} outside [0, 8]", entropy));
    }
    return ChunkVec{entropy, cls};
}

std::size_t count_chunks(const LayoutMap& layout, std::size_t chunk_size) {
    if (chunk_size == 0) {
        throw RangeError("chunk_size must be at least 1");
    }
    std::size_t total = 0;
    for (const auto& span : layout.spans) {
        total += (span.raw_size + chunk_size - 1) / chunk_size;
    }
    return total;
}

FeatureMatrix build_feature(ByteView file, const LayoutMap& layout, std::size_t chunk_size,
                            std::size_t max_rows, FeatureMode mode) {
    if (max_rows == 0) {
        throw RangeError("max_rows must be at least 1");
    }
    const std::size_t cols = mode == FeatureMode::SectionAware ? kFullCols : kBaselineCols;
    FeatureMatrix feature(max_rows, cols, count_chunks(layout, chunk_size));

    std::size_t row = 0;
    for (const auto& span : layout.spans) {
        const auto bytes = section_bytes(file, span);
        if (row >= max_rows) {
            continue;  // still bounds-check the remaining spans
        }
        for (const auto chunk : chunk_section(bytes, chunk_size)) {
            if (row >= max_rows) {
                break;
            }
            const auto vec = chunk_vec(shannon_entropy(chunk), span.cls);
            if (mode == FeatureMode::SectionAware) {
                const auto values = vec.row();
                std::copy(values.begin(), values.end(), feature.values().begin() + row * cols);
            } else {
                feature.at(row, 0) = vec.entropy;
            }
            ++row;
        }
    }
    return feature;
}

}  // namespace sefeat
