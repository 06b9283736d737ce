#include "stroketree/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stroketree/error.hpp"

namespace stroketree {

namespace {

// Size-weighted impurity decrease of one split, in the tree's criterion.
double node_decrease(const TreeNode& node, Criterion crit) {
    const auto imp = [crit](const ClassDistribution& d) {
        return crit == Criterion::gini ? gini_impurity(d) : entropy(d);
    };
    const double n = static_cast<double>(node.dist.total());
    double dec = imp(node.dist);
    for (const auto& child : node.children)
        dec -= (static_cast<double>(child->dist.total()) / n) * imp(child->dist);
    return dec;
}

void accumulate_importance(const TreeNode& node, double n_root, Criterion crit,
                           std::vector<double>& acc) {
    if (node.is_leaf()) return;
    acc[node.feature] +=
        (static_cast<double>(node.dist.total()) / n_root) * node_decrease(node, crit);
    for (const auto& child : node.children) accumulate_importance(*child, n_root, crit, acc);
}

} // namespace

std::vector<std::size_t> bootstrap_sample(std::size_t n, Rng& rng) {
    if (n == 0)
        throw Error("bootstrap_sample: n must be positive");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = rng.next_index(n);
    return idx;
}

ForestModel fit_forest(const Dataset& train, const ForestParams& params) {
    if (train.rows.empty())
        throw Error("fit_forest: empty training set");
    if (params.n_trees < 1)
        throw Error("fit_forest: n_trees must be positive");
    const int n_features = static_cast<int>(train.feature_names.size());
    int mtry = params.mtry;
    if (mtry == 0)
        mtry = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_features)))));
    if (mtry < 1 || mtry > n_features)
        throw Error("fit_forest: mtry must be in [1, " + std::to_string(n_features) + "]");

    ForestModel model;
    model.params = params;
    model.params.mtry = mtry;
    model.feature_names = train.feature_names;
    model.class_names = train.class_names;
    model.trees.reserve(params.n_trees);
    model.bootstrap_indices.reserve(params.n_trees);

    for (int t = 0; t < params.n_trees; ++t) {
        Rng rng = Rng::derive(params.seed, static_cast<std::uint64_t>(t));
        std::vector<std::size_t> sample;
        if (params.identity_bootstrap) {
            sample.resize(train.rows.size());
            std::iota(sample.begin(), sample.end(), 0);
        } else {
            sample = bootstrap_sample(train.rows.size(), rng);
        }
        model.trees.push_back(fit_cart_sampled(train, sample, params.tree_params, mtry, &rng));
        model.bootstrap_indices.push_back(std::move(sample));
    }
    return model;
}

Prediction predict_majority(const ForestModel& model, const FeatureVector& x) {
    if (model.trees.empty())
        throw Error("predict_majority: empty forest");
    if (x.values.size() != model.feature_names.size())
        throw Error("predict_majority: arity mismatch: vector has " +
                    std::to_string(x.values.size()) + " values, model expects " +
                    std::to_string(model.feature_names.size()));
    std::vector<std::size_t> votes(model.class_names.size(), 0);
    for (const auto& tree : model.trees) ++votes[predict(tree, x).label_index];

    Prediction p;
    std::size_t best = 0;
    for (std::size_t c = 1; c < votes.size(); ++c)
        if (votes[c] > votes[best]) best = c;
    p.label_index = static_cast<int>(best);
    p.label = model.class_names[best];
    p.scores.resize(votes.size());
    for (std::size_t c = 0; c < votes.size(); ++c)
        p.scores[c] = static_cast<double>(votes[c]) / static_cast<double>(model.trees.size());
    return p;
}

std::vector<double> feature_importance(const ForestModel& model) {
    if (model.trees.empty())
        throw Error("feature_importance: empty forest");
    std::vector<double> acc(model.feature_names.size(), 0.0);
    std::vector<double> per_tree(model.feature_names.size(), 0.0);
    for (const auto& tree : model.trees) {
        std::fill(per_tree.begin(), per_tree.end(), 0.0);
        accumulate_importance(*tree.root, static_cast<double>(tree.root->dist.total()),
                              tree.params.criterion, per_tree);
        for (std::size_t f = 0; f < acc.size(); ++f) acc[f] += per_tree[f];
    }
    for (double& v : acc) v /= static_cast<double>(model.trees.size());
    const double sum = std::accumulate(acc.begin(), acc.end(), 0.0);
    if (sum > 0.0) {
        for (double& v : acc) v /= sum;
    } else {
        std::fill(acc.begin(), acc.end(), 1.0 / static_cast<double>(acc.size()));
    }
    return acc;
}

double oob_accuracy(const ForestModel& model, const Dataset& train) {
    if (model.trees.empty())
        throw Error("oob_accuracy: empty forest");
    if (train.rows.size() == 0)
        throw Error("oob_accuracy: empty dataset");

    std::vector<std::vector<bool>> in_bag(model.trees.size(),
                                          std::vector<bool>(train.rows.size(), false));
    for (std::size_t t = 0; t < model.trees.size(); ++t)
        for (std::size_t r : model.bootstrap_indices[t]) in_bag[t][r] = true;

    std::size_t scored = 0, correct = 0;
    std::vector<std::size_t> votes(model.class_names.size());
    for (std::size_t i = 0; i < train.rows.size(); ++i) {
        std::fill(votes.begin(), votes.end(), 0);
        bool any = false;
        for (std::size_t t = 0; t < model.trees.size(); ++t) {
            if (in_bag[t][i]) continue;
            ++votes[predict(model.trees[t], train.rows[i]).label_index];
            any = true;
        }
        if (!any) continue;
        std::size_t best = 0;
        for (std::size_t c = 1; c < votes.size(); ++c)
            if (votes[c] > votes[best]) best = c;
        ++scored;
        const int truth = [&] {
            for (std::size_t c = 0; c < model.class_names.size(); ++c)
                if (model.class_names[c] == train.rows[i].label) return static_cast<int>(c);
            throw Error("oob_accuracy: row label '" + train.rows[i].label +
                        "' missing from model classes");
        }();
        if (static_cast<int>(best) == truth) ++correct;
    }
    if (scored == 0)
        throw Error("oob_accuracy: no out-of-bag rows");
    return static_cast<double>(correct) / static_cast<double>(scored);
}

} // namespace stroketree
