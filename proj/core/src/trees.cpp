#include "stroketree/trees.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "stroketree/error.hpp"

namespace stroketree {

std::size_t ClassDistribution::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

int ClassDistribution::majority() const {
    int best = 0;
    for (std::size_t i = 1; i < counts.size(); ++i)
        if (counts[i] > counts[best]) best = static_cast<int>(i);
    return best;
}

std::vector<double> ClassDistribution::probabilities() const {
    std::vector<double> p(counts.size(), 0.0);
    const std::size_t n = total();
    if (n == 0) return p;
    for (std::size_t i = 0; i < counts.size(); ++i)
        p[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
    return p;
}

double entropy(const ClassDistribution& dist) {
    const std::size_t n = dist.total();
    if (n == 0)
        throw Error("entropy: empty distribution");
    double h = 0.0;
    for (std::size_t c : dist.counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(n);
        h -= p * std::log2(p);
    }
    return h;
}

double gini_impurity(const ClassDistribution& dist) {
    const std::size_t n = dist.total();
    if (n == 0)
        throw Error("gini_impurity: empty distribution");
    double sum_sq = 0.0;
    for (std::size_t c : dist.counts) {
        const double p = static_cast<double>(c) / static_cast<double>(n);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

double information_gain(const ClassDistribution& parent,
                        const std::vector<ClassDistribution>& children) {
    const std::size_t n = parent.total();
    std::size_t child_total = 0;
    for (const auto& c : children) child_total += c.total();
    if (child_total != n)
        throw Error("information_gain: child totals (" + std::to_string(child_total) +
                    ") do not sum to parent total (" + std::to_string(n) + ")");
    double g = entropy(parent);
    for (const auto& c : children) {
        const std::size_t nc = c.total();
        if (nc == 0) continue;
        g -= (static_cast<double>(nc) / static_cast<double>(n)) * entropy(c);
    }
    return std::max(0.0, g);
}

const char* criterion_name(Criterion c) {
    switch (c) {
        case Criterion::gini: return "gini";
        case Criterion::entropy: return "entropy";
        case Criterion::info_gain: return "info_gain";
    }
    return "gini";
}

Criterion criterion_from_name(const std::string& name) {
    if (name == "gini") return Criterion::gini;
    if (name == "entropy") return Criterion::entropy;
    if (name == "info_gain") return Criterion::info_gain;
    throw Error("unknown criterion '" + name + "' (expected gini, entropy, or info_gain)");
}

namespace {

// Dataset with labels resolved to class indices once.
struct LabeledView {
    const Dataset* ds = nullptr;
    std::vector<int> y;
    std::size_t n_classes = 0;

    explicit LabeledView(const Dataset& d) : ds(&d), n_classes(d.class_names.size()) {
        if (d.rows.empty())
            throw Error("fit: empty training set");
        if (d.class_names.size() < 2)
            throw Error("fit: need at least 2 classes");
        std::unordered_map<std::string, int> index;
        for (std::size_t i = 0; i < d.class_names.size(); ++i)
            index[d.class_names[i]] = static_cast<int>(i);
        y.reserve(d.rows.size());
        for (const auto& row : d.rows) {
            auto it = index.find(row.label);
            if (it == index.end())
                throw Error("fit: row label '" + row.label + "' missing from class_names");
            if (row.values.size() != d.feature_names.size())
                throw Error("fit: row width does not match feature_names");
            y.push_back(it->second);
        }
    }

    double value(std::size_t row, int feature) const { return ds->rows[row].values[feature]; }
};

ClassDistribution distribution_of(const LabeledView& view, std::span<const std::size_t> rows) {
    ClassDistribution d(view.n_classes);
    for (std::size_t r : rows) d.add(view.y[r]);
    return d;
}

bool is_pure(const ClassDistribution& d) {
    bool seen = false;
    for (std::size_t c : d.counts) {
        if (c == 0) continue;
        if (seen) return false;
        seen = true;
    }
    return true;
}

double impurity(const ClassDistribution& d, Criterion crit) {
    return crit == Criterion::gini ? gini_impurity(d) : entropy(d);
}

std::optional<SplitCandidate> best_split_on(const LabeledView& view,
                                            std::span<const std::size_t> rows,
                                            std::span<const int> features, Criterion crit) {
    const std::size_t n = rows.size();
    if (n < 2) return std::nullopt;

    const ClassDistribution parent = distribution_of(view, rows);
    const double parent_impurity = impurity(parent, crit);
    const double nd = static_cast<double>(n);

    std::optional<SplitCandidate> best;
    double best_gain = 0.0;

    std::vector<std::pair<double, int>> vals(n); // (value, class)
    for (int f : features) {
        for (std::size_t i = 0; i < n; ++i)
            vals[i] = {view.value(rows[i], f), view.y[rows[i]]};
        std::sort(vals.begin(), vals.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        // Group by distinct value.
        std::vector<double> distinct;
        std::vector<ClassDistribution> group_dist;
        for (std::size_t i = 0; i < n; ++i) {
            if (distinct.empty() || vals[i].first != distinct.back()) {
                distinct.push_back(vals[i].first);
                group_dist.emplace_back(view.n_classes);
            }
            group_dist.back().add(vals[i].second);
        }
        if (distinct.size() < 2) continue;

        ClassDistribution left(view.n_classes);
        std::size_t left_n = 0;
        for (std::size_t g = 0; g + 1 < distinct.size(); ++g) {
            for (std::size_t c = 0; c < view.n_classes; ++c)
                left.counts[c] += group_dist[g].counts[c];
            left_n += group_dist[g].total();

            const double t = (distinct[g] + distinct[g + 1]) / 2.0;
            // Rows with value <= t go left. The midpoint can round onto the
            // upper value when the two are adjacent doubles; fold that group
            // in so the threshold test and the sweep agree.
            ClassDistribution l = left;
            std::size_t ln = left_n;
            if (t >= distinct[g + 1]) {
                if (g + 2 >= distinct.size()) continue; // right side would be empty
                for (std::size_t c = 0; c < view.n_classes; ++c)
                    l.counts[c] += group_dist[g + 1].counts[c];
                ln += group_dist[g + 1].total();
            }
            ClassDistribution r(view.n_classes);
            for (std::size_t c = 0; c < view.n_classes; ++c)
                r.counts[c] = parent.counts[c] - l.counts[c];
            const std::size_t rn = n - ln;

            const double gain = parent_impurity -
                                (static_cast<double>(ln) / nd) * impurity(l, crit) -
                                (static_cast<double>(rn) / nd) * impurity(r, crit);
            if (gain > best_gain) {
                best_gain = gain;
                best = SplitCandidate{f, t, gain};
            }
        }
    }
    return best;
}

struct CartGrower {
    const LabeledView& view;
    const TreeParams& params;
    int mtry;   // <= 0: all features
    Rng* rng;   // feature sampler, may be null

    std::vector<int> sample_features() const {
        const int n_features = static_cast<int>(view.ds->feature_names.size());
        std::vector<int> all(n_features);
        std::iota(all.begin(), all.end(), 0);
        if (mtry <= 0 || rng == nullptr || mtry >= n_features) return all;
        // Partial Fisher-Yates, then sorted so tie-breaks stay index-ordered.
        for (int i = 0; i < mtry; ++i) {
            const std::size_t j = i + rng->next_index(all.size() - i);
            std::swap(all[i], all[j]);
        }
        std::vector<int> picked(all.begin(), all.begin() + mtry);
        std::sort(picked.begin(), picked.end());
        return picked;
    }

    std::unique_ptr<TreeNode> grow(std::vector<std::size_t> rows, int depth) const {
        auto node = std::make_unique<TreeNode>();
        node->dist = distribution_of(view, rows);

        const bool depth_capped = params.max_depth && depth >= *params.max_depth;
        if (is_pure(node->dist) || depth_capped ||
            rows.size() < 2 * static_cast<std::size_t>(params.min_leaf))
            return node;

        const std::vector<int> features = sample_features();
        const auto split = best_split_on(view, rows, features, params.criterion);
        if (!split || split->gain <= params.min_gain) return node;

        std::vector<std::size_t> left, right;
        for (std::size_t r : rows)
            (view.value(r, split->feature) <= split->threshold ? left : right).push_back(r);
        if (left.size() < static_cast<std::size_t>(params.min_leaf) ||
            right.size() < static_cast<std::size_t>(params.min_leaf))
            return node;

        node->kind = TreeNode::Kind::threshold;
        node->feature = split->feature;
        node->threshold = split->threshold;
        node->children.push_back(grow(std::move(left), depth + 1));
        node->children.push_back(grow(std::move(right), depth + 1));
        return node;
    }
};

// Equal-frequency interior edges from the training values of one feature.
std::vector<double> quantile_edges(std::vector<double> values, int bins) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    std::vector<double> edges;
    for (int k = 1; k < bins; ++k) {
        const std::size_t pos = (static_cast<std::size_t>(k) * n) / bins;
        if (pos == 0 || pos >= n) continue;
        const double e = (values[pos - 1] + values[pos]) / 2.0;
        if (edges.empty() || e > edges.back()) edges.push_back(e);
    }
    return edges;
}

std::size_t bin_of(const std::vector<double>& edges, double v) {
    return static_cast<std::size_t>(
        std::lower_bound(edges.begin(), edges.end(), v) - edges.begin());
}

struct Id3Grower {
    const LabeledView& view;
    const TreeParams& params;
    std::vector<std::vector<double>> edges; // per feature, global

    std::unique_ptr<TreeNode> grow(std::vector<std::size_t> rows, std::vector<bool> used,
                                   int depth) const {
        auto node = std::make_unique<TreeNode>();
        node->dist = distribution_of(view, rows);

        const bool depth_capped = params.max_depth && depth >= *params.max_depth;
        if (is_pure(node->dist) || depth_capped ||
            rows.size() < 2 * static_cast<std::size_t>(params.min_leaf))
            return node;

        const int n_features = static_cast<int>(view.ds->feature_names.size());
        int best_feature = -1;
        double best_gain = 0.0;
        for (int f = 0; f < n_features; ++f) {
            if (used[f] || edges[f].empty()) continue;
            std::vector<ClassDistribution> children(edges[f].size() + 1,
                                                    ClassDistribution(view.n_classes));
            for (std::size_t r : rows) children[bin_of(edges[f], view.value(r, f))].add(view.y[r]);
            std::vector<ClassDistribution> non_empty;
            for (auto& c : children)
                if (c.total() > 0) non_empty.push_back(std::move(c));
            if (non_empty.size() < 2) continue;
            const double gain = information_gain(node->dist, non_empty);
            if (gain > best_gain) {
                best_gain = gain;
                best_feature = f;
            }
        }
        if (best_feature < 0 || best_gain <= params.min_gain) return node;

        const auto& fe = edges[best_feature];
        std::vector<std::vector<std::size_t>> bin_rows(fe.size() + 1);
        for (std::size_t r : rows) bin_rows[bin_of(fe, view.value(r, best_feature))].push_back(r);

        // Reject the split when a non-empty bin would underfill a leaf.
        for (const auto& br : bin_rows)
            if (!br.empty() && br.size() < static_cast<std::size_t>(params.min_leaf))
                return node;

        node->kind = TreeNode::Kind::bins;
        node->feature = best_feature;
        node->edges = fe;
        node->bin_child.assign(fe.size() + 1, -1);

        used[best_feature] = true;
        std::size_t biggest = 0, biggest_slot = 0;
        for (std::size_t b = 0; b < bin_rows.size(); ++b) {
            if (bin_rows[b].empty()) continue;
            const std::size_t slot = node->children.size();
            if (bin_rows[b].size() > biggest) {
                biggest = bin_rows[b].size();
                biggest_slot = slot;
            }
            node->bin_child[b] = static_cast<int>(slot);
            node->children.push_back(grow(std::move(bin_rows[b]), used, depth + 1));
        }
        // Bins with no training rows route to the majority sibling.
        for (int& slot : node->bin_child)
            if (slot < 0) slot = static_cast<int>(biggest_slot);
        return node;
    }
};

void append_escaped(std::string& out, const std::string& s) {
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
}

std::string fmt4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string bin_condition(const std::vector<double>& edges, std::size_t b) {
    if (b == 0) return "<= " + fmt4(edges.front());
    if (b == edges.size()) return "> " + fmt4(edges.back());
    return "(" + fmt4(edges[b - 1]) + ", " + fmt4(edges[b]) + "]";
}

struct DotWriter {
    const TreeModel& model;
    std::string out;
    int next_id = 0;

    int emit(const TreeNode& node) {
        const int id = next_id++;
        std::string label;
        if (node.kind == TreeNode::Kind::threshold) {
            append_escaped(label, model.feature_names[node.feature]);
            label += " <= " + fmt4(node.threshold) + "\\n";
        } else if (node.kind == TreeNode::Kind::bins) {
            append_escaped(label, model.feature_names[node.feature]);
            label += " in " + std::to_string(node.edges.size() + 1) + " bins\\n";
        }
        if (model.params.criterion == Criterion::gini)
            label += "gini = " + fmt4(gini_impurity(node.dist));
        else
            label += "entropy = " + fmt4(entropy(node.dist));
        label += "\\nsamples = " + std::to_string(node.dist.total());
        label += "\\nclass = ";
        append_escaped(label, model.class_names[node.dist.majority()]);

        out += "  N" + std::to_string(id) + " [label=\"" + label + "\"];\n";

        if (node.kind == TreeNode::Kind::threshold) {
            const int l = emit(*node.children[0]);
            const int r = emit(*node.children[1]);
            out += "  N" + std::to_string(id) + " -> N" + std::to_string(l) + " [label=\"<= " +
                   fmt4(node.threshold) + "\"];\n";
            out += "  N" + std::to_string(id) + " -> N" + std::to_string(r) + " [label=\"> " +
                   fmt4(node.threshold) + "\"];\n";
        } else if (node.kind == TreeNode::Kind::bins) {
            std::vector<int> child_ids;
            for (const auto& c : node.children) child_ids.push_back(emit(*c));
            for (std::size_t slot = 0; slot < node.children.size(); ++slot) {
                std::string cond;
                for (std::size_t b = 0; b < node.bin_child.size(); ++b) {
                    if (node.bin_child[b] != static_cast<int>(slot)) continue;
                    if (!cond.empty()) cond += " | ";
                    cond += bin_condition(node.edges, b);
                }
                out += "  N" + std::to_string(id) + " -> N" + std::to_string(child_ids[slot]) +
                       " [label=\"" + cond + "\"];\n";
            }
        }
        return id;
    }
};

} // namespace

std::optional<SplitCandidate> best_binary_split(const Dataset& ds,
                                                std::span<const std::size_t> rows,
                                                std::span<const int> feature_indices,
                                                Criterion criterion) {
    if (criterion == Criterion::info_gain)
        throw Error("best_binary_split: criterion must be gini or entropy");
    LabeledView view(ds);
    // Tie-breaks are defined on feature index, not on caller order.
    std::vector<int> features(feature_indices.begin(), feature_indices.end());
    std::sort(features.begin(), features.end());
    return best_split_on(view, rows, features, criterion);
}

TreeModel fit_cart(const Dataset& train, const TreeParams& params) {
    std::vector<std::size_t> rows(train.rows.size());
    std::iota(rows.begin(), rows.end(), 0);
    return fit_cart_sampled(train, rows, params, 0, nullptr);
}

TreeModel fit_cart_sampled(const Dataset& train, std::span<const std::size_t> rows,
                           const TreeParams& params, int mtry, Rng* rng) {
    if (params.criterion == Criterion::info_gain)
        throw Error("fit_cart: criterion must be gini or entropy");
    if (params.min_leaf < 1)
        throw Error("fit_cart: min_leaf must be positive");
    LabeledView view(train);
    CartGrower grower{view, params, mtry, rng};
    TreeModel model;
    model.params = params;
    model.feature_names = train.feature_names;
    model.class_names = train.class_names;
    model.root = grower.grow(std::vector<std::size_t>(rows.begin(), rows.end()), 0);
    return model;
}

TreeModel fit_id3(const Dataset& train, const TreeParams& params) {
    if (params.id3_bins < 2)
        throw Error("fit_id3: id3_bins must be at least 2");
    LabeledView view(train);

    const int n_features = static_cast<int>(train.feature_names.size());
    Id3Grower grower{view, params, {}};
    grower.edges.resize(n_features);
    std::vector<double> column(train.rows.size());
    for (int f = 0; f < n_features; ++f) {
        for (std::size_t i = 0; i < train.rows.size(); ++i) column[i] = train.rows[i].values[f];
        grower.edges[f] = quantile_edges(column, params.id3_bins);
    }

    std::vector<std::size_t> rows(train.rows.size());
    std::iota(rows.begin(), rows.end(), 0);

    TreeModel model;
    model.params = params;
    model.params.criterion = Criterion::info_gain;
    model.feature_names = train.feature_names;
    model.class_names = train.class_names;
    model.root = grower.grow(std::move(rows), std::vector<bool>(n_features, false), 0);
    return model;
}

Prediction predict(const TreeModel& model, const FeatureVector& x) {
    if (x.values.size() != model.feature_names.size())
        throw Error("predict: arity mismatch: vector has " + std::to_string(x.values.size()) +
                    " values, model expects " + std::to_string(model.feature_names.size()));
    const TreeNode* node = model.root.get();
    while (!node->is_leaf()) {
        const double v = x.values[node->feature];
        if (node->kind == TreeNode::Kind::threshold) {
            node = (v <= node->threshold ? node->children[0] : node->children[1]).get();
        } else {
            node = node->children[node->bin_child[bin_of(node->edges, v)]].get();
        }
    }
    Prediction p;
    p.label_index = node->dist.majority();
    p.label = model.class_names[p.label_index];
    p.scores = node->dist.probabilities();
    return p;
}

std::string export_dot(const TreeModel& model) {
    if (!model.root)
        throw Error("export_dot: model has no tree");
    DotWriter w{model};
    w.out = "digraph stroketree {\n  node [shape=box, fontname=\"helvetica\"];\n  edge "
            "[fontname=\"helvetica\"];\n";
    w.emit(*model.root);
    w.out += "}\n";
    return std::move(w.out);
}

} // namespace stroketree
