#include "stroketree/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "stroketree/error.hpp"

namespace stroketree {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "stroketree.model";
constexpr int kVersion = 1;

json node_to_json(const TreeNode& node) {
    json j;
    j["counts"] = node.dist.counts;
    switch (node.kind) {
        case TreeNode::Kind::leaf:
            j["kind"] = "leaf";
            break;
        case TreeNode::Kind::threshold:
            j["kind"] = "threshold";
            j["feature"] = node.feature;
            j["threshold"] = node.threshold;
            j["left"] = node_to_json(*node.children[0]);
            j["right"] = node_to_json(*node.children[1]);
            break;
        case TreeNode::Kind::bins:
            j["kind"] = "bins";
            j["feature"] = node.feature;
            j["edges"] = node.edges;
            j["bin_child"] = node.bin_child;
            j["children"] = json::array();
            for (const auto& c : node.children) j["children"].push_back(node_to_json(*c));
            break;
    }
    return j;
}

std::unique_ptr<TreeNode> node_from_json(const json& j) {
    auto node = std::make_unique<TreeNode>();
    node->dist.counts = j.at("counts").get<std::vector<std::size_t>>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "leaf") {
        node->kind = TreeNode::Kind::leaf;
    } else if (kind == "threshold") {
        node->kind = TreeNode::Kind::threshold;
        node->feature = j.at("feature").get<int>();
        node->threshold = j.at("threshold").get<double>();
        node->children.push_back(node_from_json(j.at("left")));
        node->children.push_back(node_from_json(j.at("right")));
    } else if (kind == "bins") {
        node->kind = TreeNode::Kind::bins;
        node->feature = j.at("feature").get<int>();
        node->edges = j.at("edges").get<std::vector<double>>();
        node->bin_child = j.at("bin_child").get<std::vector<int>>();
        for (const auto& c : j.at("children")) node->children.push_back(node_from_json(c));
    } else {
        throw Error("model load: unknown node kind '" + kind + "'");
    }
    return node;
}

json tree_params_to_json(const TreeParams& p) {
    json j;
    j["criterion"] = criterion_name(p.criterion);
    j["max_depth"] = p.max_depth ? json(*p.max_depth) : json(nullptr);
    j["min_leaf"] = p.min_leaf;
    j["min_gain"] = p.min_gain;
    j["id3_bins"] = p.id3_bins;
    return j;
}

TreeParams tree_params_from_json(const json& j) {
    TreeParams p;
    p.criterion = criterion_from_name(j.at("criterion").get<std::string>());
    if (!j.at("max_depth").is_null()) p.max_depth = j.at("max_depth").get<int>();
    p.min_leaf = j.at("min_leaf").get<int>();
    p.min_gain = j.at("min_gain").get<double>();
    p.id3_bins = j.at("id3_bins").get<int>();
    return p;
}

json header_json(const char* kind, const std::vector<std::string>& features,
                 const std::vector<std::string>& classes) {
    json j;
    j["format"] = kFormat;
    j["format_version"] = kVersion;
    j["kind"] = kind;
    j["feature_names"] = features;
    j["class_names"] = classes;
    return j;
}

void check_header(const json& j) {
    if (!j.is_object() || j.value("format", "") != kFormat)
        throw Error("model load: not a stroketree model document");
    if (j.value("format_version", 0) != kVersion)
        throw Error("model load: unsupported format_version");
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error("model load: no such file: " + path.string());
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("model save: cannot open for writing: " + path.string());
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f)
        throw Error("model save: write failed: " + path.string());
}

} // namespace

std::string serialize_tree(const TreeModel& model) {
    json j = header_json("tree", model.feature_names, model.class_names);
    j["params"] = tree_params_to_json(model.params);
    j["root"] = node_to_json(*model.root);
    return j.dump(1) + "\n";
}

std::string serialize_forest(const ForestModel& model) {
    json j = header_json("forest", model.feature_names, model.class_names);
    json p;
    p["n_trees"] = model.params.n_trees;
    p["mtry"] = model.params.mtry;
    p["seed"] = model.params.seed;
    p["identity_bootstrap"] = model.params.identity_bootstrap;
    p["tree"] = tree_params_to_json(model.params.tree_params);
    j["params"] = p;
    j["bootstrap_indices"] = model.bootstrap_indices;
    j["trees"] = json::array();
    for (const auto& tree : model.trees) j["trees"].push_back(node_to_json(*tree.root));
    return j.dump(1) + "\n";
}

TreeModel deserialize_tree(const std::string& text) {
    json j = json::parse(text, nullptr, true);
    check_header(j);
    if (j.value("kind", "") != "tree")
        throw Error("model load: expected kind 'tree'");
    TreeModel m;
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.class_names = j.at("class_names").get<std::vector<std::string>>();
    m.params = tree_params_from_json(j.at("params"));
    m.root = node_from_json(j.at("root"));
    return m;
}

ForestModel deserialize_forest(const std::string& text) {
    json j = json::parse(text, nullptr, true);
    check_header(j);
    if (j.value("kind", "") != "forest")
        throw Error("model load: expected kind 'forest'");
    ForestModel m;
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.class_names = j.at("class_names").get<std::vector<std::string>>();
    const json& p = j.at("params");
    m.params.n_trees = p.at("n_trees").get<int>();
    m.params.mtry = p.at("mtry").get<int>();
    m.params.seed = p.at("seed").get<std::uint64_t>();
    m.params.identity_bootstrap = p.at("identity_bootstrap").get<bool>();
    m.params.tree_params = tree_params_from_json(p.at("tree"));
    m.bootstrap_indices = j.at("bootstrap_indices").get<std::vector<std::vector<std::size_t>>>();
    for (const auto& t : j.at("trees")) {
        TreeModel tree;
        tree.params = m.params.tree_params;
        tree.feature_names = m.feature_names;
        tree.class_names = m.class_names;
        tree.root = node_from_json(t);
        m.trees.push_back(std::move(tree));
    }
    return m;
}

void save_model_file(const std::filesystem::path& path, const TreeModel& model) {
    write_file(path, serialize_tree(model));
}

void save_model_file(const std::filesystem::path& path, const ForestModel& model) {
    write_file(path, serialize_forest(model));
}

AnyModel load_model_file(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error("model load: invalid JSON in " + path.string() + ": " + e.what());
    }
    check_header(j);
    const std::string kind = j.value("kind", "");
    if (kind == "tree") return deserialize_tree(text);
    if (kind == "forest") return deserialize_forest(text);
    throw Error("model load: unknown kind '" + kind + "' in " + path.string());
}

const std::vector<std::string>& model_feature_names(const AnyModel& model) {
    return std::visit([](const auto& m) -> const std::vector<std::string>& {
        return m.feature_names;
    }, model);
}

const std::vector<std::string>& model_class_names(const AnyModel& model) {
    return std::visit([](const auto& m) -> const std::vector<std::string>& {
        return m.class_names;
    }, model);
}

Prediction model_predict(const AnyModel& model, const FeatureVector& x) {
    if (std::holds_alternative<TreeModel>(model)) return predict(std::get<TreeModel>(model), x);
    return predict_majority(std::get<ForestModel>(model), x);
}

} // namespace stroketree
