#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stroketree/trees.hpp"

namespace stroketree {

struct ForestParams {
    int n_trees = 100;
    int mtry = 0; // features sampled per node; 0 = floor(sqrt(F))
    std::uint64_t seed = 0;
    TreeParams tree_params{}; // gini, fully grown by default
    // Test hook: feed every tree the identity sample 0..n-1 instead of a
    // bootstrap draw. A single-tree forest with this and mtry = F is
    // prediction-equivalent to fit_cart.
    bool identity_bootstrap = false;
};

struct ForestModel {
    std::vector<TreeModel> trees;
    std::vector<std::vector<std::size_t>> bootstrap_indices; // per tree
    ForestParams params;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
};

/// n uniform draws with replacement from 0..n-1.
std::vector<std::size_t> bootstrap_sample(std::size_t n, Rng& rng);

/// Bagged CART ensemble. Tree t trains on its own bootstrap sample with a
/// generator derived from (seed, t), sampling mtry candidate features per
/// node, so the model is a pure function of (train, params).
ForestModel fit_forest(const Dataset& train, const ForestParams& params);

/// Majority vote over the trees; scores are the vote fractions.
Prediction predict_majority(const ForestModel& model, const FeatureVector& x);

/// Mean decrease in impurity per feature, averaged over trees and normalized
/// to sum 1 (uniform when no tree ever split).
std::vector<double> feature_importance(const ForestModel& model);

/// Out-of-bag accuracy: each training row is voted on only by trees whose
/// bootstrap sample missed it. Rows in every bag are skipped.
double oob_accuracy(const ForestModel& model, const Dataset& train);

} // namespace stroketree
