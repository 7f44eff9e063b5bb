#pragma once
// Labeled tabular data: CSV ingestion, standardization and seeded splits.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "oscombine/errors.hpp"

namespace osc {

struct Dataset {
    std::vector<double> features; // row-major, patterns x dims
    int dims = 0;
    std::vector<int> labels; // contiguous in [0, n_classes)
    int n_classes = 0;

    int patterns() const { return static_cast<int>(labels.size()); }
    std::span<const double> row(int p) const {
        return {features.data() + static_cast<std::size_t>(p) * dims,
                static_cast<std::size_t>(dims)};
    }
};

/// Loads a labeled CSV: numeric feature columns, last column an integer
/// class label. Features are standardized per column over the whole file;
/// labels are remapped to a contiguous [0, L). Throws ParseError with the
/// offending line number, InvalidInputError for unusable files.
Dataset load_dataset(const std::filesystem::path& path);

struct SplitSpec {
    double train_frac = 0.5;
    double val_frac = 0.25;
    double test_frac = 0.25;
    std::uint64_t seed = 0;
};

struct Split {
    Dataset train;
    Dataset validation;
    Dataset test;
};

/// Seeded shuffled partition. Validation and test sizes are floors of their
/// fractions; the remainder goes to training. Partitions are disjoint and
/// exhaustive; identical specs give identical partitions.
Split split(const Dataset& dataset, const SplitSpec& spec);

} // namespace osc
