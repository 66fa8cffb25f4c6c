// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

// Shared test fixtures: the four-attribute running example with three
// regression trees, a tiny independent cell enumerator used to cross-check
// the bounds and oracle modules, and the randomized model corpus.

#ifndef ABEX_TESTS_FIXTURES_HPP
#define ABEX_TESTS_FIXTURES_HPP

#include <algorithm>
#include <set>
#include <vector>

#include "abex/model.hpp"
#include "abex/synthetic.hpp"

namespace abex::testing {

// Binary model over A1 (numerical), A2 (numerical), A3 (categorical b/w/r),
// A4 (Boolean); forest of three trees. Category b has index 0.
inline BoostedTree example_model() {
    std::vector<Attribute> attrs{
        {"A1", AttrKind::Numerical, {}},
        {"A2", AttrKind::Numerical, {}},
        {"A3", AttrKind::Categorical, {"b", "w", "r"}},
        {"A4", AttrKind::Boolean, {}},
    };

    Tree t1;
    t1.nodes = {
        TreeNode::internal(Condition::is_true(3), 1, 2),
        TreeNode::leaf(-0.5),
        TreeNode::internal(Condition::greater_than(1, 1.0), 3, 4),
        TreeNode::leaf(0.4),
        TreeNode::internal(Condition::equals_category(2, 0), 5, 6),
        TreeNode::leaf(-0.3),
        TreeNode::internal(Condition::greater_than(0, 2.0), 7, 8),
        TreeNode::leaf(-0.2),
        TreeNode::leaf(0.3),
    };

    Tree t2;
    t2.nodes = {
        TreeNode::internal(Condition::greater_than(1, 1.0), 1, 2),
        TreeNode::internal(Condition::greater_than(0, 2.0), 3, 4),
        TreeNode::leaf(0.5),
        TreeNode::leaf(-0.2),
        TreeNode::internal(Condition::is_true(3), 5, 6),
        TreeNode::leaf(-0.4),
        TreeNode::leaf(0.3),
    };

    Tree t3;
    t3.nodes = {
        TreeNode::internal(Condition::equals_category(2, 0), 1, 2),
        TreeNode::internal(Condition::greater_than(1, 1.0), 3, 4),
        TreeNode::internal(Condition::greater_than(1, 1.0), 5, 6),
        TreeNode::internal(Condition::greater_than(0, 2.0), 7, 8),
        TreeNode::internal(Condition::is_true(3), 9, 10),
        TreeNode::leaf(-0.4),
        TreeNode::internal(Condition::is_true(3), 11, 12),
        TreeNode::leaf(-0.2),
        TreeNode::leaf(0.2),
        TreeNode::leaf(-0.1),
        TreeNode::internal(Condition::greater_than(0, 2.0), 13, 14),
        TreeNode::leaf(-0.5),
        TreeNode::leaf(0.1),
        TreeNode::leaf(0.2),
        TreeNode::leaf(0.3),
    };

    BoostedTree bt;
    bt.schema = std::make_shared<AttributeSchema>(std::move(attrs));
    Forest f;
    f.class_id = 1;
    f.trees = {std::move(t1), std::move(t2), std::move(t3)};
    bt.forests.push_back(std::move(f));
    validate_model(bt);
    return bt;
}

// x = (A1=4, A2=3, A3=b, A4=1)
inline Instance example_instance() {
    return {Value::number(4.0), Value::number(3.0), Value::category(0), Value::boolean(true)};
}

// Independent cell enumeration, deliberately separate from the library's
// universe code: collects the tested thresholds/categories per attribute by
// walking the model and enumerates one representative per product cell over
// the term's free attributes.
inline std::vector<Instance> enumerate_cell_representatives(const BoostedTree& bt,
                                                            const Term& t) {
    const AttributeSchema& schema = *bt.schema;
    std::size_t n = schema.size();
    std::vector<std::set<double>> thresholds(n);
    std::vector<std::set<std::int32_t>> cats(n);
    std::vector<bool> bool_tested(n, false);
    for (const Forest& f : bt.forests)
        for (const Tree& tree : f.trees)
            for (const TreeNode& node : tree.nodes) {
                if (node.is_leaf()) continue;
                std::size_t a = static_cast<std::size_t>(node.condition.attribute);
                switch (node.condition.test) {
                    case TestKind::GreaterThan: thresholds[a].insert(node.condition.threshold); break;
                    case TestKind::EqualsCategory: cats[a].insert(node.condition.category); break;
                    case TestKind::IsTrue: bool_tested[a] = true; break;
                }
            }

    std::vector<std::vector<Value>> choices(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (t.kept[i]) {
            choices[i] = {t.instance[i]};
            continue;
        }
        switch (schema[i].kind) {
            case AttrKind::Numerical: {
                if (thresholds[i].empty()) {
                    choices[i] = {Value::number(0.0)};
                    break;
                }
                std::vector<double> th(thresholds[i].begin(), thresholds[i].end());
                for (double v : th) choices[i].push_back(Value::number(v));
                choices[i].push_back(Value::number(th.back() + 1.0));
                break;
            }
            case AttrKind::Categorical: {
                for (std::int32_t c : cats[i]) choices[i].push_back(Value::category(c));
                for (std::size_t c = 0; c < schema[i].category_count(); ++c)
                    if (!cats[i].count(static_cast<std::int32_t>(c))) {
                        choices[i].push_back(Value::category(static_cast<std::int32_t>(c)));
                        break; // one representative for the untested rest
                    }
                break;
            }
            case AttrKind::Boolean:
                choices[i].push_back(Value::boolean(false));
                if (bool_tested[i]) choices[i].push_back(Value::boolean(true));
                break;
        }
    }

    std::vector<Instance> out;
    Instance cur(n);
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == n) {
            out.push_back(cur);
            return;
        }
        for (const Value& v : choices[i]) {
            cur[i] = v;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    return out;
}

// Reference abductiveness check built on the enumerator above.
inline bool abductive_by_enumeration(const BoostedTree& bt, const Term& t) {
    std::int32_t cls = classify(bt, t.instance);
    for (const Instance& x : enumerate_cell_representatives(bt, t))
        if (classify(bt, x) != cls) return false;
    return true;
}

// Randomized corpus: small mixed-kind models, at most 5 attributes per kind,
// at most 6 trees, depth at most 4.
inline BoostedTree corpus_model(std::uint64_t index) {
    RandomModelConfig cfg;
    cfg.numerical = 1 + static_cast<std::int32_t>(index % 3);
    cfg.categorical = static_cast<std::int32_t>((index / 3) % 3);
    cfg.boolean = static_cast<std::int32_t>((index / 9) % 3);
    if (cfg.categorical == 0 && cfg.boolean == 0) cfg.boolean = 1;
    cfg.max_categories = 3;
    cfg.classes = (index % 7 == 3) ? 3 : 1;
    cfg.trees_per_class = 1 + static_cast<std::int32_t>(index % (cfg.classes > 1 ? 2 : 6));
    cfg.max_depth = 2 + static_cast<std::int32_t>(index % 3);
    cfg.threshold_grid = 3;
    return random_model(cfg, /*seed=*/0xabe0 + index);
}

inline Instance corpus_instance(const BoostedTree& bt, std::uint64_t index,
                                std::uint64_t draw = 0) {
    return random_instance(*bt.schema, 0x5eed + index * 131 + draw, 3);
}

} // namespace abex::testing

#endif // ABEX_TESTS_FIXTURES_HPP
