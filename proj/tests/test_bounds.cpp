// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "abex/bounds.hpp"
#include "abex/rng.hpp"
#include "support/fixtures.hpp"

using namespace abex;
using testing::corpus_instance;
using testing::corpus_model;
using testing::enumerate_cell_representatives;
using testing::example_instance;
using testing::example_model;

namespace {

// Reference bounds by direct enumeration (independent of tree_bound).
std::pair<double, double> minmax_by_enumeration(const BoostedTree& bt, const Tree& tree,
                                                const Term& t) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const Instance& x : enumerate_cell_representatives(bt, t)) {
        double w = eval_tree(tree, x);
        lo = std::min(lo, w);
        hi = std::max(hi, w);
    }
    return {lo, hi};
}

} // namespace

TEST_CASE("restriction of a term pins exactly the kept characteristics") {
    BoostedTree bt = example_model();
    Instance x = example_instance();

    Restriction all = restriction_of_term(bt.schema, Term::full(x));
    CHECK(materialize_representative(all) == x); // the unique extension is x

    Restriction none = restriction_of_term(bt.schema, Term::empty(x));
    for (std::size_t i = 0; i < none.size(); ++i) {
        CHECK_FALSE(none[i].pinned);
        CHECK(none[i].fixed_category == -1);
        CHECK(none[i].fixed_bool == -1);
        CHECK(std::isinf(none[i].lo));
        CHECK(std::isinf(none[i].hi));
    }

    Restriction some = restriction_of_term(bt.schema, Term::of_indices(x, {0, 3}));
    CHECK(some[0].pinned);
    CHECK(some[0].pin_value == 4.0);
    CHECK(some[3].fixed_bool == 1);
    CHECK_FALSE(some[1].pinned);
    CHECK(some[2].fixed_category == -1);
}

TEST_CASE("per-tree worst-instance weights match the published example") {
    BoostedTree bt = example_model();
    Instance x = example_instance();
    const Forest& f = bt.forests.front();

    Restriction r = restriction_of_term(bt.schema, Term::of_indices(x, {0, 3}));
    CHECK(tree_bound(f.trees[0], r, BoundDir::Min).weight == -0.3);
    CHECK(tree_bound(f.trees[1], r, BoundDir::Min).weight == 0.3);
    CHECK(tree_bound(f.trees[2], r, BoundDir::Min).weight == -0.4);
    CHECK(forest_bound(f, r, BoundDir::Min) == -0.3 + 0.3 + -0.4);

    Restriction r2 = restriction_of_term(bt.schema, Term::of_indices(x, {1, 3}));
    CHECK(tree_bound(f.trees[0], r2, BoundDir::Min).weight == -0.3);
    CHECK(tree_bound(f.trees[1], r2, BoundDir::Min).weight == 0.5);
    CHECK(tree_bound(f.trees[2], r2, BoundDir::Min).weight == 0.1);
    CHECK(forest_bound(f, r2, BoundDir::Min) == -0.3 + 0.5 + 0.1);

    // frozen, value verified by enumerating the five leaves of the first tree
    Restriction free = restriction_of_term(bt.schema, Term::empty(x));
    CHECK(tree_bound(f.trees[0], free, BoundDir::Max).weight == 0.4);
    auto [lo, hi] = minmax_by_enumeration(bt, f.trees[0], Term::empty(x));
    CHECK(hi == 0.4);
    CHECK(tree_bound(f.trees[0], free, BoundDir::Min).weight == lo);
}

TEST_CASE("bounds on the full term reduce to plain evaluation") {
    BoostedTree bt = example_model();
    Instance x = example_instance();
    const Forest& f = bt.forests.front();
    Restriction r = restriction_of_term(bt.schema, Term::full(x));
    CHECK(forest_bound(f, r, BoundDir::Min) == eval_forest(f, x));
    CHECK(forest_bound(f, r, BoundDir::Max) == eval_forest(f, x));
}

TEST_CASE("bounds are sound, tight, and monotone on the random corpus") {
    std::mt19937_64 rng = make_rng(0xb0117d);
    for (std::uint64_t m = 0; m < 40; ++m) {
        BoostedTree bt = corpus_model(m);
        std::size_t n = bt.schema->size();
        Instance x = corpus_instance(bt, m);

        // random nested pair t (subset) of t2
        Term t2 = Term::full(x);
        Term t = Term::full(x);
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t roll = uniform_index(rng, 3);
            if (roll == 0) {
                t.kept[i] = false;
                t2.kept[i] = false;
            } else if (roll == 1) {
                t.kept[i] = false;
            }
        }

        Restriction rt = restriction_of_term(bt.schema, t);
        Restriction rt2 = restriction_of_term(bt.schema, t2);
        for (const Forest& f : bt.forests)
            for (const Tree& tree : f.trees) {
                BoundResult bmin = tree_bound(tree, rt, BoundDir::Min);
                BoundResult bmax = tree_bound(tree, rt, BoundDir::Max);

                // soundness: every extension of t stays within the bounds
                for (const Instance& ext : enumerate_cell_representatives(bt, t)) {
                    double w = eval_tree(tree, ext);
                    CHECK(bmin.weight <= w);
                    CHECK(w <= bmax.weight);
                }

                // tightness: the witness instance attains the bound
                Instance wmin = materialize_witness(tree, rt, bmin);
                Instance wmax = materialize_witness(tree, rt, bmax);
                validate_instance(*bt.schema, wmin);
                CHECK(eval_tree(tree, wmin) == bmin.weight);
                CHECK(eval_tree(tree, wmax) == bmax.weight);
                for (std::size_t i = 0; i < n; ++i)
                    if (t.kept[i]) {
                        CHECK(wmin[i] == x[i]);
                        CHECK(wmax[i] == x[i]);
                    }

                // monotonicity under term growth
                CHECK(tree_bound(tree, rt2, BoundDir::Min).weight >= bmin.weight);
                CHECK(tree_bound(tree, rt2, BoundDir::Max).weight <= bmax.weight);
            }
    }
}

TEST_CASE("bounds agree with exhaustive enumeration on small models") {
    for (std::uint64_t m = 0; m < 60; ++m) {
        BoostedTree bt = corpus_model(m);
        // keep only models with few distinct conditions
        std::size_t conditions = 0;
        for (const Forest& f : bt.forests)
            for (const Tree& t : f.trees)
                for (const TreeNode& node : t.nodes)
                    if (!node.is_leaf()) ++conditions;
        if (conditions > 12) continue;

        Instance x = corpus_instance(bt, m);
        Term t = Term::full(x);
        for (std::size_t i = 0; i < t.kept.size(); i += 2) t.kept[i] = false;
        Restriction r = restriction_of_term(bt.schema, t);
        for (const Forest& f : bt.forests)
            for (const Tree& tree : f.trees) {
                auto [lo, hi] = minmax_by_enumeration(bt, tree, t);
                CHECK(tree_bound(tree, r, BoundDir::Min).weight == lo);
                CHECK(tree_bound(tree, r, BoundDir::Max).weight == hi);
            }
    }
}

TEST_CASE("tree_bound touches each node at most once") {
    BoostedTree bt = example_model();
    Instance x = example_instance();
    Restriction free = restriction_of_term(bt.schema, Term::empty(x));
    for (const Tree& tree : bt.forests.front().trees) {
        std::uint64_t visited = 0;
        tree_bound(tree, free, BoundDir::Min, &visited);
        CHECK(visited <= tree.node_count());
        CHECK(visited == tree.node_count()); // nothing is frozen when all is free
        visited = 0;
        Restriction full = restriction_of_term(bt.schema, Term::full(x));
        tree_bound(tree, full, BoundDir::Min, &visited);
        CHECK(visited <= tree.node_count());
    }
}

TEST_CASE("intra-path contradictions are pruned by constraint refinement") {
    // a path testing x0 > 5 = true and then x0 > 3 = false is unsatisfiable
    std::vector<Attribute> attrs{{"x0", AttrKind::Numerical, {}}};
    Tree t;
    t.nodes = {
        TreeNode::internal(Condition::greater_than(0, 5.0), 1, 2),
        TreeNode::leaf(1.0),
        TreeNode::internal(Condition::greater_than(0, 3.0), 3, 4),
        TreeNode::leaf(-7.0), // unreachable
        TreeNode::leaf(2.0),
    };
    AttributeSchema schema(attrs);
    CHECK_THROWS_AS(check_path_satisfiability(t, schema, "tree"), ModelError);

    // tree_bound itself never descends the frozen arc
    BoostedTree bt;
    bt.schema = std::make_shared<AttributeSchema>(attrs);
    Restriction free = Restriction::unconstrained(bt.schema);
    CHECK(tree_bound(t, free, BoundDir::Min).weight == 1.0);
    CHECK(tree_bound(t, free, BoundDir::Max).weight == 2.0);
}
