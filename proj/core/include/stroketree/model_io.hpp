#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "stroketree/forest.hpp"
#include "stroketree/trees.hpp"

namespace stroketree {

/// Versioned, self-describing JSON documents. load(serialize(m)) reproduces
/// identical predictions; serialization of equal models is byte-identical.
std::string serialize_tree(const TreeModel& model);
std::string serialize_forest(const ForestModel& model);
TreeModel deserialize_tree(const std::string& text);
ForestModel deserialize_forest(const std::string& text);

using AnyModel = std::variant<TreeModel, ForestModel>;

void save_model_file(const std::filesystem::path& path, const TreeModel& model);
void save_model_file(const std::filesystem::path& path, const ForestModel& model);

/// Reads either kind of model, dispatching on the document's `kind` field.
AnyModel load_model_file(const std::filesystem::path& path);

/// Feature names, class names, and prediction for either kind.
const std::vector<std::string>& model_feature_names(const AnyModel& model);
const std::vector<std::string>& model_class_names(const AnyModel& model);
Prediction model_predict(const AnyModel& model, const FeatureVector& x);

} // namespace stroketree
