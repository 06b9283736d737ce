#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stroketree/dataset.hpp"
#include "stroketree/rng.hpp"

namespace stroketree {

/// Per-class counts of the rows at one tree node.
struct ClassDistribution {
    std::vector<std::size_t> counts;

    ClassDistribution() = default;
    explicit ClassDistribution(std::size_t n_classes) : counts(n_classes, 0) {}

    std::size_t total() const;
    void add(int class_index, std::size_t n = 1) { counts[class_index] += n; }
    /// Class with the highest count; lowest index wins ties.
    int majority() const;
    /// counts / total, or all-zero when empty.
    std::vector<double> probabilities() const;
};

/// Shannon entropy in bits: -sum p_i log2 p_i.
double entropy(const ClassDistribution& dist);

/// Gini impurity 1 - sum p_i^2. Zero for a pure node.
double gini_impurity(const ClassDistribution& dist);

/// Parent entropy minus the size-weighted entropies of the children. Child
/// totals must sum to the parent total.
double information_gain(const ClassDistribution& parent,
                        const std::vector<ClassDistribution>& children);

enum class Criterion { gini, entropy, info_gain };

const char* criterion_name(Criterion c);
Criterion criterion_from_name(const std::string& name);

struct TreeParams {
    Criterion criterion = Criterion::gini;
    std::optional<int> max_depth; // empty = unlimited
    int min_leaf = 1;
    double min_gain = 0.0;
    int id3_bins = 8;
};

/// One node. A leaf has no children. A `threshold` node has exactly two
/// children (value <= threshold goes left); a `bins` node has one child per
/// slot, with bin_child mapping every bin (including bins that were empty at
/// training time) onto a child slot.
struct TreeNode {
    enum class Kind { leaf, threshold, bins };

    Kind kind = Kind::leaf;
    ClassDistribution dist; // training rows that reached this node
    int feature = -1;
    double threshold = 0.0;          // kind == threshold
    std::vector<double> edges;       // kind == bins; ascending interior edges
    std::vector<int> bin_child;      // kind == bins; size edges.size() + 1
    std::vector<std::unique_ptr<TreeNode>> children;

    bool is_leaf() const { return kind == Kind::leaf; }
};

struct TreeModel {
    std::unique_ptr<TreeNode> root;
    TreeParams params;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
};

struct Prediction {
    std::string label;
    int label_index = -1;
    std::vector<double> scores; // per-class, sums to 1
};

struct SplitCandidate {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0; // impurity decrease under the chosen criterion
};

/// Exact binary split search. Candidate thresholds are midpoints between
/// consecutive distinct sorted values of each candidate feature; rows with
/// value <= threshold go left. Returns the candidate maximizing
/// I(parent) - sum (n_i/n) I(child_i), ties broken by lowest feature index
/// then lowest threshold, or nothing when no candidate has positive decrease.
std::optional<SplitCandidate> best_binary_split(const Dataset& ds,
                                                std::span<const std::size_t> rows,
                                                std::span<const int> feature_indices,
                                                Criterion criterion);

/// CART: recursive binary partitioning over all features. Recursion stops at
/// purity, max_depth, min_leaf, or gain <= min_gain.
TreeModel fit_cart(const Dataset& train, const TreeParams& params);

/// CART on a row subset with optional per-node feature subsampling: at every
/// node `mtry` distinct feature indices are drawn from `rng`. Used by the
/// forest trainer; mtry <= 0 or rng == nullptr means all features.
TreeModel fit_cart_sampled(const Dataset& train, std::span<const std::size_t> rows,
                           const TreeParams& params, int mtry, Rng* rng);

/// ID3: every feature is discretized once, globally, into equal-frequency
/// bins (edges from training quantiles); recursion picks the unused feature
/// with maximum information gain and splits one way per non-empty bin.
TreeModel fit_id3(const Dataset& train, const TreeParams& params);

/// Routes x to a leaf. Bin values outside the training range clamp to the
/// first or last bin; bins that had no training rows route to the sibling
/// that held the majority of them.
Prediction predict(const TreeModel& model, const FeatureVector& x);

/// Graphviz DOT text. Every node is annotated with its split rule, criterion
/// value, sample count, and majority class; edges carry branch conditions.
std::string export_dot(const TreeModel& model);

} // namespace stroketree
