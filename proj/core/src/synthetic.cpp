// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

#include "abex/synthetic.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "abex/bounds.hpp"
#include "abex/rng.hpp"

namespace abex {

BoostedTree gen_discrepancy_model(std::int32_t n) {
    if (n < 1) throw ModelError("gen_discrepancy_model: n must be >= 1");
    std::vector<Attribute> attrs;
    for (std::int32_t i = 1; i <= n; ++i)
        attrs.push_back({"A" + std::to_string(i), AttrKind::Boolean, {}});

    BoostedTree bt;
    bt.schema = std::make_shared<AttributeSchema>(std::move(attrs));
    Forest f;
    f.class_id = 1;
    for (std::int32_t i = 0; i < n; ++i) {
        for (double true_leaf : {0.5, -0.5}) {
            Tree t;
            t.nodes.push_back(TreeNode::internal(Condition::is_true(i), 1, 2));
            t.nodes.push_back(TreeNode::leaf(-true_leaf));
            t.nodes.push_back(TreeNode::leaf(true_leaf));
            f.trees.push_back(std::move(t));
        }
    }
    bt.forests.push_back(std::move(f));
    validate_model(bt);
    return bt;
}

namespace {

struct TreeGen {
    const AttributeSchema& schema;
    const RandomModelConfig& cfg;
    std::mt19937_64& rng;
    Tree tree;
    std::vector<std::size_t> usable; // attributes this tree may test

    struct Candidate {
        Condition condition;
    };

    // conditions with both branches feasible under the path state
    std::vector<Candidate> candidates(const Restriction& state) const {
        std::vector<Candidate> out;
        for (std::size_t i : usable) {
            const Attribute& a = schema[i];
            const DomainConstraint& dc = state[i];
            switch (a.kind) {
                case AttrKind::Numerical:
                    for (std::int32_t g = 0; g < cfg.threshold_grid; ++g) {
                        double th = static_cast<double>(g);
                        if (th > dc.lo && th < dc.hi)
                            out.push_back({Condition::greater_than(static_cast<std::int32_t>(i), th)});
                    }
                    break;
                case AttrKind::Categorical: {
                    if (dc.fixed_category >= 0) break;
                    std::uint64_t all = (1ull << a.category_count()) - 1;
                    for (std::size_t c = 0; c < a.category_count(); ++c) {
                        std::int32_t cat = static_cast<std::int32_t>(c);
                        if (dc.excludes(cat)) continue;
                        if (((dc.excluded | (1ull << c)) & all) == all) continue;
                        out.push_back({Condition::equals_category(static_cast<std::int32_t>(i), cat)});
                    }
                    break;
                }
                case AttrKind::Boolean:
                    if (dc.fixed_bool < 0)
                        out.push_back({Condition::is_true(static_cast<std::int32_t>(i))});
                    break;
            }
        }
        return out;
    }

    std::int32_t grow(Restriction& state, std::int32_t depth) {
        std::vector<Candidate> cands = candidates(state);
        bool leaf = depth >= cfg.max_depth || cands.empty() ||
                    (depth > 1 && uniform_index(rng, 5) == 0);
        std::int32_t id = static_cast<std::int32_t>(tree.nodes.size());
        if (leaf) {
            tree.nodes.push_back(TreeNode::leaf(uniform_real(rng, cfg.leaf_lo, cfg.leaf_hi)));
            return id;
        }
        Condition c = cands[uniform_index(rng, cands.size())].condition;
        tree.nodes.emplace_back(); // patched once the children exist
        std::size_t attr = static_cast<std::size_t>(c.attribute);
        DomainConstraint saved = state[attr];
        state[attr] = refine(saved, c, false);
        std::int32_t fc = grow(state, depth + 1);
        state[attr] = refine(saved, c, true);
        std::int32_t tc = grow(state, depth + 1);
        state[attr] = saved;
        tree.nodes[id] = TreeNode::internal(c, fc, tc);
        return id;
    }
};

} // namespace

BoostedTree random_model(const RandomModelConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng = make_rng(seed);
    std::vector<Attribute> attrs;
    for (std::int32_t i = 0; i < cfg.numerical; ++i)
        attrs.push_back({"x" + std::to_string(i), AttrKind::Numerical, {}});
    for (std::int32_t i = 0; i < cfg.categorical; ++i) {
        Attribute a{"c" + std::to_string(i), AttrKind::Categorical, {}};
        std::int32_t cats = 2 + static_cast<std::int32_t>(
                                    uniform_index(rng, static_cast<std::uint64_t>(
                                                           std::max(1, cfg.max_categories - 1))));
        for (std::int32_t k = 0; k < cats; ++k)
            a.categories.push_back(std::string(1, static_cast<char>('a' + k)));
        attrs.push_back(std::move(a));
    }
    for (std::int32_t i = 0; i < cfg.boolean; ++i)
        attrs.push_back({"b" + std::to_string(i), AttrKind::Boolean, {}});
    if (attrs.empty()) throw ModelError("random_model: no attributes");

    BoostedTree bt;
    bt.schema = std::make_shared<AttributeSchema>(std::move(attrs));
    std::size_t m = cfg.classes <= 1 ? 1 : static_cast<std::size_t>(cfg.classes);
    bt.tie_class = 1;
    for (std::size_t c = 0; c < m; ++c) {
        Forest f;
        f.class_id = static_cast<std::int32_t>(c + 1);
        for (std::int32_t k = 0; k < cfg.trees_per_class; ++k) {
            std::vector<std::size_t> usable(bt.schema->size());
            for (std::size_t i = 0; i < usable.size(); ++i) usable[i] = i;
            if (cfg.attributes_per_tree > 0 &&
                static_cast<std::size_t>(cfg.attributes_per_tree) < usable.size()) {
                deterministic_shuffle(usable, rng);
                usable.resize(static_cast<std::size_t>(cfg.attributes_per_tree));
                std::sort(usable.begin(), usable.end());
            }
            TreeGen gen{*bt.schema, cfg, rng, {}, std::move(usable)};
            Restriction state = Restriction::unconstrained(bt.schema);
            gen.grow(state, 0);
            f.trees.push_back(std::move(gen.tree));
        }
        bt.forests.push_back(std::move(f));
    }
    validate_model(bt);
    return bt;
}

Instance random_instance(const AttributeSchema& schema, std::uint64_t seed,
                         std::int32_t threshold_grid) {
    std::mt19937_64 rng = make_rng(seed, 0x1a57a9ce);
    Instance x;
    x.reserve(schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const Attribute& a = schema[i];
        switch (a.kind) {
            case AttrKind::Numerical: {
                // half-integers straddle the grid, integers land on it
                std::uint64_t k = uniform_index(rng, 2 * static_cast<std::uint64_t>(threshold_grid) + 1);
                x.push_back(Value::number(static_cast<double>(k) * 0.5 - 0.5));
                break;
            }
            case AttrKind::Categorical:
                x.push_back(Value::category(
                    static_cast<std::int32_t>(uniform_index(rng, a.category_count()))));
                break;
            case AttrKind::Boolean:
                x.push_back(Value::boolean(uniform_index(rng, 2) == 1));
                break;
        }
    }
    return x;
}

} // namespace abex
