#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sefeat/pe_layout.hpp"
#include "sefeat/section_class.hpp"

namespace sefeat {

inline constexpr std::size_t kDefaultChunkSize = 4096;
inline constexpr std::size_t kDefaultMaxRows = 3600;
inline constexpr std::size_t kFullCols = 1 + kSectionClassCount;  // 14
inline constexpr std::size_t kBaselineCols = 1;
inline constexpr double kMaxEntropy = 8.0;

using OneHot = std::array<double, kSectionClassCount>;

/// One fused row: chunk entropy followed by the section one-hot.
struct ChunkVec {
    double entropy = 0.0;
    SectionClass cls = SectionClass::Undefined;

    std::array<double, kFullCols> row() const noexcept;
};

/// Which columns build_feature emits.
enum class FeatureMode {
    SectionAware,  // <rows, 14>: entropy + one-hot
    EntropyOnly,   // <rows, 1>: entropy stream baseline
};

/// Fixed-shape feature of one file, row-major doubles.
///
/// Rows [0, min(used_rows, rows())) hold chunk rows; the remainder are zero
/// padding. used_rows is the chunk count before truncation.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::size_t rows, std::size_t cols, std::size_t used_rows = 0);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t used_rows() const noexcept { return used_rows_; }
    void set_used_rows(std::size_t n) noexcept { used_rows_ = n; }

    double& at(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(values_).subspan(r * cols_, cols_);
    }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t used_rows_ = 0;
    std::vector<double> values_;
};

/// Splits one section's bytes into consecutive chunk_size pieces; the last
/// piece keeps the remainder. Empty input yields no chunks.
/// Throws RangeError if chunk_size is 0.
std::vector<ByteView> chunk_section(ByteView bytes, std::size_t chunk_size);

/// Shannon entropy of the byte histogram in bits per byte, in [0, 8].
/// Throws EmptyChunk on empty input.
double shannon_entropy(ByteView chunk);

OneHot one_hot(SectionClass cls) noexcept;

/// Throws RangeError unless 0 <= entropy <= 8.
ChunkVec chunk_vec(double entropy, SectionClass cls);

/// Number of chunk rows the layout produces before pad/truncate.
std::size_t count_chunks(const LayoutMap& layout, std::size_t chunk_size);

/// Runs chunking, entropy and one-hot fusion over every span in file order,
/// then zero-pads or truncates to max_rows.
FeatureMatrix build_feature(ByteView file, const LayoutMap& layout,
                            std::size_t chunk_size = kDefaultChunkSize,
                            std::size_t max_rows = kDefaultMaxRows,
                            FeatureMode mode = FeatureMode::SectionAware);

}  // namespace sefeat
