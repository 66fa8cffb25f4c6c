// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

#include "abex/model.hpp"

#include <algorithm>
#include <unordered_set>

namespace abex {

const char* to_string(AttrKind kind) {
    switch (kind) {
        case AttrKind::Numerical: return "numerical";
        case AttrKind::Categorical: return "categorical";
        case AttrKind::Boolean: return "boolean";
    }
    return "?";
}

AttributeSchema::AttributeSchema(std::vector<Attribute> attributes)
    : attributes_(std::move(attributes)) {
    std::unordered_set<std::string> names;
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
        const Attribute& a = attributes_[i];
        if (a.name.empty())
            throw ModelError("attribute " + std::to_string(i) + ": empty name");
        if (!names.insert(a.name).second)
            throw ModelError("duplicate attribute name '" + a.name + "'");
        if (a.kind == AttrKind::Categorical) {
            if (a.categories.empty())
                throw ModelError("attribute '" + a.name + "': categorical with no categories");
            if (a.categories.size() > 64)
                throw ModelError("attribute '" + a.name + "': more than 64 categories is not supported");
            std::unordered_set<std::string> labels;
            for (const std::string& c : a.categories)
                if (!labels.insert(c).second)
                    throw ModelError("attribute '" + a.name + "': duplicate category '" + c + "'");
        } else if (!a.categories.empty()) {
            throw ModelError("attribute '" + a.name + "': categories on a non-categorical attribute");
        }
    }
}

std::int32_t AttributeSchema::attribute_index(const std::string& name) const {
    for (std::size_t i = 0; i < attributes_.size(); ++i)
        if (attributes_[i].name == name) return static_cast<std::int32_t>(i);
    return -1;
}

std::int32_t AttributeSchema::category_index(std::size_t i, const std::string& label) const {
    const auto& cats = attributes_[i].categories;
    auto it = std::find(cats.begin(), cats.end(), label);
    return it == cats.end() ? -1 : static_cast<std::int32_t>(it - cats.begin());
}

bool eval_condition(const Condition& c, const Value& v) {
    switch (c.test) {
        case TestKind::GreaterThan:
            if (v.kind() != AttrKind::Numerical)
                throw ModelError("numerical test on a non-numerical value");
            return v.number() > c.threshold;
        case TestKind::EqualsCategory:
            if (v.kind() != AttrKind::Categorical)
                throw ModelError("category test on a non-categorical value");
            return v.category() == c.category;
        case TestKind::IsTrue:
            if (v.kind() != AttrKind::Boolean)
                throw ModelError("Boolean test on a non-Boolean value");
            return v.boolean();
    }
    throw ModelError("unknown test kind");
}

std::int32_t eval_tree_leaf(const Tree& tree, const Instance& x) {
    std::int32_t node = 0;
    while (!tree.nodes[node].is_leaf()) {
        const TreeNode& n = tree.nodes[node];
        node = eval_condition(n.condition, x[n.condition.attribute]) ? n.true_child
                                                                     : n.false_child;
    }
    return node;
}

double eval_tree(const Tree& tree, const Instance& x) {
    return tree.nodes[eval_tree_leaf(tree, x)].weight;
}

std::size_t Forest::node_count() const {
    std::size_t n = 0;
    for (const Tree& t : trees) n += t.node_count();
    return n;
}

double eval_forest(const Forest& forest, const Instance& x) {
    double w = 0.0;
    for (const Tree& t : forest.trees) w += eval_tree(t, x);
    return w;
}

std::size_t BoostedTree::node_count() const {
    std::size_t n = 0;
    for (const Forest& f : forests) n += f.node_count();
    return n;
}

std::vector<double> forest_weights(const BoostedTree& bt, const Instance& x) {
    std::vector<double> w;
    w.reserve(bt.forests.size());
    for (const Forest& f : bt.forests) w.push_back(eval_forest(f, x));
    return w;
}

std::int32_t classify(const BoostedTree& bt, const Instance& x) {
    if (bt.is_binary())
        return eval_forest(bt.forests.front(), x) > 0.0 ? 1 : 0;

    std::vector<double> w = forest_weights(bt, x);
    std::size_t best = 0;
    bool all_equal = true;
    for (std::size_t j = 1; j < w.size(); ++j) {
        if (w[j] != w[0]) all_equal = false;
        if (w[j] > w[best]) best = j;
    }
    if (all_equal) return bt.tie_class;
    return bt.forests[best].class_id;
}

void validate_instance(const AttributeSchema& schema, const Instance& x) {
    if (x.size() != schema.size())
        throw ModelError("instance has " + std::to_string(x.size()) + " values, schema has " +
                         std::to_string(schema.size()) + " attributes");
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Attribute& a = schema[i];
        if (x[i].kind() != a.kind)
            throw ModelError("attribute '" + a.name + "': value kind " +
                             to_string(x[i].kind()) + ", expected " + to_string(a.kind));
        if (a.kind == AttrKind::Categorical) {
            std::int32_t c = x[i].category();
            if (c < 0 || static_cast<std::size_t>(c) >= a.category_count())
                throw ModelError("attribute '" + a.name + "': category index " +
                                 std::to_string(c) + " out of range");
        }
    }
}

Term Term::of_indices(Instance x, const std::vector<std::int32_t>& indices) {
    Term t = Term::empty(std::move(x));
    for (std::int32_t i : indices) {
        if (i < 0 || static_cast<std::size_t>(i) >= t.kept.size())
            throw ModelError("term index " + std::to_string(i) + " out of range");
        t.kept[i] = true;
    }
    return t;
}

std::size_t Term::size() const {
    return static_cast<std::size_t>(std::count(kept.begin(), kept.end(), true));
}

std::vector<std::int32_t> Term::kept_indices() const {
    std::vector<std::int32_t> out;
    for (std::size_t i = 0; i < kept.size(); ++i)
        if (kept[i]) out.push_back(static_cast<std::int32_t>(i));
    return out;
}

bool term_subset(const Term& a, const Term& b) {
    if (a.kept.size() != b.kept.size()) return false;
    for (std::size_t i = 0; i < a.kept.size(); ++i)
        if (a.kept[i] && !b.kept[i]) return false;
    return true;
}

bool term_less(const Term& a, const Term& b) {
    std::size_t sa = a.size(), sb = b.size();
    if (sa != sb) return sa < sb;
    std::vector<std::int32_t> ia = a.kept_indices(), ib = b.kept_indices();
    return std::lexicographical_compare(ia.begin(), ia.end(), ib.begin(), ib.end());
}

} // namespace abex
