// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

#include "abex/model_io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

namespace abex {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open '" + path + "'");
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw ModelError("write to '" + path + "' failed");
}

namespace {

json parse_json(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ModelError(std::string(what) + ": invalid JSON");
    return j;
}

AttrKind kind_from_string(const std::string& s, const std::string& where) {
    if (s == "numerical") return AttrKind::Numerical;
    if (s == "categorical") return AttrKind::Categorical;
    if (s == "boolean") return AttrKind::Boolean;
    throw ModelError(where + ": unknown attribute kind '" + s + "'");
}

Tree parse_native_tree(const json& jt, const AttributeSchema& schema, const std::string& where) {
    if (!jt.contains("nodes") || !jt["nodes"].is_array())
        throw ModelError(where + ": missing node array");
    Tree tree;
    std::size_t id = 0;
    for (const json& jn : jt["nodes"]) {
        std::string at = where + ", node " + std::to_string(id++);
        TreeNode node;
        if (jn.contains("weight")) {
            node.weight = jn["weight"].get<double>();
        } else {
            if (!jn.contains("attribute") || !jn.contains("test") ||
                !jn.contains("false_child") || !jn.contains("true_child"))
                throw ModelError(at + ": internal node needs attribute, test and children");
            std::int32_t attr = jn["attribute"].get<std::int32_t>();
            if (attr < 0 || static_cast<std::size_t>(attr) >= schema.size())
                throw ModelError(at + ": attribute index out of range");
            std::string test = jn["test"].get<std::string>();
            if (test == "gt") {
                node.condition = Condition::greater_than(attr, jn.at("threshold").get<double>());
            } else if (test == "eq") {
                std::string label = jn.at("category").get<std::string>();
                std::int32_t cat = schema.category_index(static_cast<std::size_t>(attr), label);
                if (cat < 0)
                    throw ModelError(at + ": category '" + label + "' not declared for '" +
                                     schema[static_cast<std::size_t>(attr)].name + "'");
                node.condition = Condition::equals_category(attr, cat);
            } else if (test == "is_true") {
                node.condition = Condition::is_true(attr);
            } else {
                throw ModelError(at + ": unknown test '" + test + "'");
            }
            node.false_child = jn["false_child"].get<std::int32_t>();
            node.true_child = jn["true_child"].get<std::int32_t>();
        }
        tree.nodes.push_back(node);
    }
    return tree;
}

} // namespace

BoostedTree parse_native_model(const std::string& json_text) {
    json j = parse_json(json_text, "model");
    if (!j.contains("schema") || !j["schema"].is_array())
        throw ModelError("model: missing schema array");

    std::vector<Attribute> attrs;
    for (const json& ja : j["schema"]) {
        Attribute a;
        a.name = ja.at("name").get<std::string>();
        a.kind = kind_from_string(ja.at("kind").get<std::string>(), "attribute '" + a.name + "'");
        if (ja.contains("categories"))
            a.categories = ja["categories"].get<std::vector<std::string>>();
        attrs.push_back(std::move(a));
    }

    BoostedTree bt;
    bt.schema = std::make_shared<AttributeSchema>(std::move(attrs));
    bt.tie_class = j.value("tie_class", 1);
    if (!j.contains("forests") || !j["forests"].is_array() || j["forests"].empty())
        throw ModelError("model: missing forests");
    for (const json& jf : j["forests"]) {
        Forest f;
        f.class_id = jf.value("class", static_cast<std::int32_t>(bt.forests.size() + 1));
        std::string where = "forest " + std::to_string(bt.forests.size());
        if (!jf.contains("trees") || !jf["trees"].is_array())
            throw ModelError(where + ": missing trees");
        std::size_t k = 0;
        for (const json& jt : jf["trees"])
            f.trees.push_back(
                parse_native_tree(jt, *bt.schema, where + ", tree " + std::to_string(k++)));
        bt.forests.push_back(std::move(f));
    }
    validate_model(bt);
    return bt;
}

std::string serialize_native_model(const BoostedTree& bt) {
    json j;
    j["format"] = "abex-model";
    json schema = json::array();
    for (const Attribute& a : bt.schema->attributes()) {
        json ja;
        ja["name"] = a.name;
        ja["kind"] = to_string(a.kind);
        if (a.kind == AttrKind::Categorical) ja["categories"] = a.categories;
        schema.push_back(std::move(ja));
    }
    j["schema"] = std::move(schema);
    if (!bt.is_binary()) j["tie_class"] = bt.tie_class;
    json forests = json::array();
    for (const Forest& f : bt.forests) {
        json jf;
        jf["class"] = f.class_id;
        json trees = json::array();
        for (const Tree& t : f.trees) {
            json nodes = json::array();
            for (const TreeNode& n : t.nodes) {
                json jn;
                if (n.is_leaf()) {
                    jn["weight"] = n.weight;
                } else {
                    jn["attribute"] = n.condition.attribute;
                    switch (n.condition.test) {
                        case TestKind::GreaterThan:
                            jn["test"] = "gt";
                            jn["threshold"] = n.condition.threshold;
                            break;
                        case TestKind::EqualsCategory:
                            jn["test"] = "eq";
                            jn["category"] =
                                (*bt.schema)[static_cast<std::size_t>(n.condition.attribute)]
                                    .categories[static_cast<std::size_t>(n.condition.category)];
                            break;
                        case TestKind::IsTrue:
                            jn["test"] = "is_true";
                            break;
                    }
                    jn["false_child"] = n.false_child;
                    jn["true_child"] = n.true_child;
                }
                nodes.push_back(std::move(jn));
            }
            trees.push_back(json{{"nodes", std::move(nodes)}});
        }
        jf["trees"] = std::move(trees);
        forests.push_back(std::move(jf));
    }
    j["forests"] = std::move(forests);
    return j.dump(2);
}

namespace {

struct XgbNode {
    bool leaf = false;
    double weight = 0.0;
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t yes = -1, no = -1;
};

// Parses one dumped tree into a nodeid-keyed map.
void collect_xgb_nodes(const json& jn, std::map<std::int32_t, XgbNode>& nodes,
                       std::map<std::string, std::int32_t>& feature_ids,
                       const std::string& where) {
    std::int32_t id = jn.at("nodeid").get<std::int32_t>();
    XgbNode node;
    if (jn.contains("leaf") && !jn.contains("split")) {
        node.leaf = true;
        node.weight = jn["leaf"].get<double>();
    } else {
        std::string split = jn.at("split").get<std::string>();
        auto [it, inserted] = feature_ids.try_emplace(split, -1);
        if (inserted && split.size() > 1 && split[0] == 'f') {
            // f-style feature references carry their index
            char* end = nullptr;
            long v = std::strtol(split.c_str() + 1, &end, 10);
            if (end && *end == '\0' && v >= 0) it->second = static_cast<std::int32_t>(v);
        }
        node.feature = -1; // resolved later from feature_ids
        node.threshold = jn.at("split_condition").get<double>();
        node.yes = jn.at("yes").get<std::int32_t>();
        node.no = jn.at("no").get<std::int32_t>();
        if (!jn.contains("children") || !jn["children"].is_array())
            throw ModelError(where + ": split node without children");
        for (const json& child : jn["children"])
            collect_xgb_nodes(child, nodes, feature_ids, where);
    }
    if (!nodes.emplace(id, node).second)
        throw ModelError(where + ": duplicate nodeid " + std::to_string(id));
}

std::int32_t build_tree_rec(const std::map<std::int32_t, XgbNode>& nodes,
                            const std::map<std::string, std::int32_t>& feature_ids,
                            const json& jn, Tree& tree, const std::string& where) {
    std::int32_t id = jn.at("nodeid").get<std::int32_t>();
    const XgbNode& n = nodes.at(id);
    std::int32_t out = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (n.leaf) {
        tree.nodes[out] = TreeNode::leaf(n.weight);
        return out;
    }
    std::int32_t feature = feature_ids.at(jn.at("split").get<std::string>());
    // xgboost: yes-child iff value < threshold; equivalently the no-child is
    // taken iff value > prev(threshold), which our strict test expresses
    double gt = std::nextafter(n.threshold, -std::numeric_limits<double>::infinity());
    std::int32_t yes_node = -1, no_node = -1;
    for (const json& child : jn.at("children")) {
        std::int32_t cid = child.at("nodeid").get<std::int32_t>();
        std::int32_t built = build_tree_rec(nodes, feature_ids, child, tree, where);
        if (cid == n.yes) yes_node = built;
        if (cid == n.no) no_node = built;
    }
    if (yes_node < 0 || no_node < 0)
        throw ModelError(where + ": children of node " + std::to_string(id) +
                         " do not match yes/no ids");
    tree.nodes[out] = TreeNode::internal(Condition::greater_than(feature, gt), yes_node, no_node);
    return out;
}

} // namespace

BoostedTree parse_xgboost_dump(const std::string& json_text, const XgbLoadOptions& opts) {
    if (opts.num_classes < 1) throw ModelError("xgboost dump: num_classes must be >= 1");
    json j = parse_json(json_text, "xgboost dump");
    if (!j.is_array() || j.empty())
        throw ModelError("xgboost dump: expected a nonempty array of trees");

    // First pass over all trees: the feature set and their ids.
    std::map<std::int32_t, XgbNode> scratch;
    std::map<std::string, std::int32_t> feature_ids;
    for (std::size_t k = 0; k < j.size(); ++k) {
        scratch.clear();
        collect_xgb_nodes(j[k], scratch, feature_ids, "tree " + std::to_string(k));
    }

    bool f_style = true;
    for (const auto& [name, id] : feature_ids)
        if (id < 0) f_style = false;

    std::int32_t n_features = opts.num_features;
    std::vector<Attribute> attrs;
    if (f_style) {
        std::int32_t max_id = -1;
        for (const auto& [name, id] : feature_ids) max_id = std::max(max_id, id);
        if (n_features == 0) n_features = max_id + 1;
        if (max_id >= n_features)
            throw ModelError("xgboost dump: feature id exceeds num_features");
        for (std::int32_t i = 0; i < n_features; ++i)
            attrs.push_back({"f" + std::to_string(i), AttrKind::Numerical, {}});
    } else {
        // named features: schema in sorted name order
        std::int32_t next = 0;
        for (auto& [name, id] : feature_ids) id = next++;
        if (n_features != 0 && n_features != next)
            throw ModelError("xgboost dump: num_features does not match named feature count");
        for (const auto& [name, id] : feature_ids)
            attrs.push_back({name, AttrKind::Numerical, {}});
    }

    BoostedTree bt;
    bt.schema = std::make_shared<AttributeSchema>(std::move(attrs));
    bt.tie_class = opts.tie_class;
    std::size_t m = static_cast<std::size_t>(opts.num_classes);
    if (m > 1 && j.size() % m != 0)
        throw ModelError("xgboost dump: tree count not a multiple of num_classes");
    bt.forests.resize(m == 1 ? 1 : m);
    for (std::size_t c = 0; c < bt.forests.size(); ++c)
        bt.forests[c].class_id = static_cast<std::int32_t>(c + 1);

    for (std::size_t k = 0; k < j.size(); ++k) {
        scratch.clear();
        std::map<std::string, std::int32_t> ignore;
        collect_xgb_nodes(j[k], scratch, ignore, "tree " + std::to_string(k));
        Tree tree;
        build_tree_rec(scratch, feature_ids, j[k], tree, "tree " + std::to_string(k));
        bt.forests[m == 1 ? 0 : k % m].trees.push_back(std::move(tree));
    }

    if (opts.base_score != 0.0) {
        Tree bias;
        bias.nodes.push_back(TreeNode::leaf(opts.base_score));
        for (Forest& f : bt.forests) f.trees.push_back(bias);
    }
    validate_model(bt);
    return bt;
}

BoostedTree load_model(const std::string& path, ModelFormat format, const XgbLoadOptions& opts) {
    std::string text = read_file(path);
    try {
        return format == ModelFormat::NativeJson ? parse_native_model(text)
                                                 : parse_xgboost_dump(text, opts);
    } catch (const ModelError& e) {
        throw ModelError(path + ": " + e.what());
    }
}

void save_model(const BoostedTree& bt, const std::string& path) {
    write_file(path, serialize_native_model(bt));
}

} // namespace abex
