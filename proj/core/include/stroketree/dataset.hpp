#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "stroketree/features.hpp"

namespace stroketree {

/// A feature table. class_names holds the labels in first-appearance order;
/// every row has exactly |feature_names| values.
struct Dataset {
    std::vector<FeatureVector> rows;
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_features() const { return feature_names.size(); }
    std::size_t n_classes() const { return class_names.size(); }

    /// Index of `label` in class_names, or -1.
    int class_index(const std::string& label) const;
};

/// Builds a Dataset from feature vectors; class names are collected in
/// first-appearance order, feature names are taken from the first row.
Dataset make_dataset(std::vector<FeatureVector> rows);

/// Writes header `f1,...,fn,label` and one row per instance. Floats are
/// serialized with shortest round-trip formatting, so write/read is the
/// identity on the table.
void write_csv(const Dataset& ds, const std::filesystem::path& path);

/// Inverse of write_csv. The last column must be named `label`.
Dataset read_csv(const std::filesystem::path& path);

/// Seeded stratified split: per class, a deterministic shuffle, then the
/// first ceil(train_fraction * n_c) rows go to train. Row order within each
/// part follows the original table.
std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double train_fraction,
                                             std::uint64_t seed);

} // namespace stroketree
