// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

#include <cmath>
#include <string>
#include <vector>

#include "abex/bounds.hpp"
#include "abex/model.hpp"

namespace abex {

namespace {

void check_tree_structure(const Tree& tree, const AttributeSchema& schema,
                          const std::string& where) {
    if (tree.nodes.empty()) throw ModelError(where + ": empty tree");
    std::size_t n = tree.nodes.size();
    std::vector<char> seen(n, 0);
    // children must point forward; that rules out cycles and shared subtrees
    for (std::size_t id = 0; id < n; ++id) {
        const TreeNode& node = tree.nodes[id];
        std::string at = where + ", node " + std::to_string(id);
        if (node.is_leaf()) {
            if (node.true_child >= 0)
                throw ModelError(at + ": leaf with a child");
            if (!std::isfinite(node.weight))
                throw ModelError(at + ": non-finite leaf weight");
            continue;
        }
        if (node.true_child < 0)
            throw ModelError(at + ": internal node missing a child");
        for (std::int32_t child : {node.false_child, node.true_child}) {
            if (child <= static_cast<std::int32_t>(id) || static_cast<std::size_t>(child) >= n)
                throw ModelError(at + ": child index " + std::to_string(child) + " out of order");
            if (seen[static_cast<std::size_t>(child)]++)
                throw ModelError(at + ": node " + std::to_string(child) + " has two parents");
        }
        const Condition& c = node.condition;
        if (c.attribute < 0 || static_cast<std::size_t>(c.attribute) >= schema.size())
            throw ModelError(at + ": attribute index " + std::to_string(c.attribute) +
                             " out of range");
        const Attribute& attr = schema[static_cast<std::size_t>(c.attribute)];
        switch (c.test) {
            case TestKind::GreaterThan:
                if (attr.kind != AttrKind::Numerical)
                    throw ModelError(at + ": numerical test on " + to_string(attr.kind) +
                                     " attribute '" + attr.name + "'");
                if (!std::isfinite(c.threshold))
                    throw ModelError(at + ": non-finite threshold");
                break;
            case TestKind::EqualsCategory:
                if (attr.kind != AttrKind::Categorical)
                    throw ModelError(at + ": category test on " + to_string(attr.kind) +
                                     " attribute '" + attr.name + "'");
                if (c.category < 0 ||
                    static_cast<std::size_t>(c.category) >= attr.category_count())
                    throw ModelError(at + ": category index " + std::to_string(c.category) +
                                     " not declared for attribute '" + attr.name + "'");
                break;
            case TestKind::IsTrue:
                if (attr.kind != AttrKind::Boolean)
                    throw ModelError(at + ": Boolean test on " + to_string(attr.kind) +
                                     " attribute '" + attr.name + "'");
                break;
        }
    }
    for (std::size_t id = 1; id < n; ++id)
        if (!seen[id]) throw ModelError(where + ": unreachable node " + std::to_string(id));
}

} // namespace

void validate_model(const BoostedTree& bt) {
    if (!bt.schema) throw ModelError("model has no schema");
    if (bt.forests.empty()) throw ModelError("model has no forests");
    const AttributeSchema& schema = *bt.schema;

    if (bt.is_binary()) {
        if (bt.forests.front().class_id != 1)
            throw ModelError("binary model: forest class id must be 1");
    } else {
        for (std::size_t j = 0; j < bt.forests.size(); ++j)
            if (bt.forests[j].class_id != static_cast<std::int32_t>(j + 1))
                throw ModelError("forest " + std::to_string(j) + ": class id " +
                                 std::to_string(bt.forests[j].class_id) + ", expected " +
                                 std::to_string(j + 1));
        if (bt.tie_class < 1 || static_cast<std::size_t>(bt.tie_class) > bt.forests.size())
            throw ModelError("tie class " + std::to_string(bt.tie_class) + " out of range");
    }

    for (std::size_t j = 0; j < bt.forests.size(); ++j) {
        const Forest& f = bt.forests[j];
        if (f.trees.empty())
            throw ModelError("forest " + std::to_string(j) + ": no trees");
        for (std::size_t k = 0; k < f.trees.size(); ++k) {
            std::string where = "forest " + std::to_string(j) + ", tree " + std::to_string(k);
            check_tree_structure(f.trees[k], schema, where);
            check_path_satisfiability(f.trees[k], schema, where);
        }
    }
}

} // namespace abex
