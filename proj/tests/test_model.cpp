// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

#include <algorithm>
#include <chrono>

#include <doctest.h>

#include "abex/model.hpp"
#include "abex/synthetic.hpp"
#include "support/fixtures.hpp"

using namespace abex;
using testing::corpus_instance;
using testing::corpus_model;
using testing::example_instance;
using testing::example_model;

TEST_CASE("condition evaluation is strict") {
    Condition gt = Condition::greater_than(0, 2.0);
    CHECK(eval_condition(gt, Value::number(4.0)));
    CHECK_FALSE(eval_condition(gt, Value::number(2.0)));

    Condition eq = Condition::equals_category(2, 0); // A3 = b
    CHECK_FALSE(eval_condition(eq, Value::category(2))); // r
    CHECK(eval_condition(eq, Value::category(0)));

    Condition bt = Condition::is_true(3);
    CHECK(eval_condition(bt, Value::boolean(true)));
    CHECK_FALSE(eval_condition(bt, Value::boolean(false)));

    CHECK_THROWS_AS(eval_condition(gt, Value::boolean(true)), ModelError);
    CHECK_THROWS_AS(eval_condition(eq, Value::number(1.0)), ModelError);
}

TEST_CASE("example model evaluates to the published weights") {
    BoostedTree bt = example_model();
    Instance x = example_instance();
    const Forest& f = bt.forests.front();

    CHECK(eval_tree(f.trees[0], x) == 0.3);
    CHECK(eval_tree(f.trees[1], x) == 0.5);
    CHECK(eval_tree(f.trees[2], x) == 0.1);
    CHECK(eval_forest(f, x) == 0.3 + 0.5 + 0.1);
    CHECK(classify(bt, x) == 1);
}

TEST_CASE("forest of one zero leaf evaluates to zero and classifies negative") {
    BoostedTree bt;
    bt.schema = std::make_shared<AttributeSchema>(
        std::vector<Attribute>{{"b0", AttrKind::Boolean, {}}});
    Tree t;
    t.nodes.push_back(TreeNode::leaf(0.0));
    Forest f;
    f.class_id = 1;
    f.trees.push_back(t);
    bt.forests.push_back(f);
    validate_model(bt);

    Instance x{Value::boolean(false)};
    CHECK(eval_forest(bt.forests.front(), x) == 0.0);
    CHECK(classify(bt, x) == 0); // weight 0 is not positive
}

TEST_CASE("multi-class ties fall back to the tie class") {
    BoostedTree bt = example_model();
    BoostedTree multi;
    multi.schema = bt.schema;
    for (std::int32_t c = 1; c <= 3; ++c) {
        Forest f = bt.forests.front();
        f.class_id = c;
        multi.forests.push_back(std::move(f));
    }
    multi.tie_class = 2;
    validate_model(multi);
    CHECK(classify(multi, example_instance()) == 2);

    // strict-subset tie: bump one forest so two classes share the maximum
    multi.forests[2].trees[0].nodes[8].weight += 1.0; // classes 3 and...
    Instance x = example_instance();
    std::vector<double> w = forest_weights(multi, x);
    CHECK(w[2] > w[0]);
    CHECK(classify(multi, x) == 3);

    multi.forests[0].trees[0].nodes[8].weight += 1.0; // now classes 1 and 3 tie
    w = forest_weights(multi, x);
    CHECK(w[0] == w[2]);
    CHECK(w[0] > w[1]);
    CHECK(classify(multi, x) == 1); // smallest maximizing class id
}

TEST_CASE("evaluation is deterministic and reaches exactly one leaf") {
    for (std::uint64_t m = 0; m < 25; ++m) {
        BoostedTree bt = corpus_model(m);
        for (std::uint64_t d = 0; d < 4; ++d) {
            Instance x = corpus_instance(bt, m, d);
            std::int32_t c1 = classify(bt, x);
            std::int32_t c2 = classify(bt, x);
            CHECK(c1 == c2);
            std::vector<double> w1 = forest_weights(bt, x);
            std::vector<double> w2 = forest_weights(bt, x);
            CHECK(w1 == w2);
            for (const Forest& f : bt.forests)
                for (const Tree& t : f.trees) {
                    std::int32_t leaf = eval_tree_leaf(t, x);
                    CHECK(t.nodes[static_cast<std::size_t>(leaf)].is_leaf());
                    CHECK(eval_tree(t, x) == t.nodes[static_cast<std::size_t>(leaf)].weight);
                }
        }
    }
}

TEST_CASE("classify runtime scales about linearly with tree count") {
    RandomModelConfig cfg;
    cfg.numerical = 10;
    cfg.categorical = 2;
    cfg.boolean = 2;
    cfg.max_depth = 5;
    cfg.threshold_grid = 6;

    cfg.trees_per_class = 100;
    BoostedTree small = random_model(cfg, 21);
    cfg.trees_per_class = 200;
    BoostedTree large = random_model(cfg, 21);
    Instance x = random_instance(*small.schema, 3, 6);

    auto time_classify = [&](const BoostedTree& bt) {
        auto t0 = std::chrono::steady_clock::now();
        volatile std::int32_t sink = 0;
        for (int rep = 0; rep < 2000; ++rep) sink = classify(bt, x);
        (void)sink;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    std::vector<double> ratios;
    for (int trial = 0; trial < 15; ++trial)
        ratios.push_back(time_classify(large) / time_classify(small));
    std::sort(ratios.begin(), ratios.end());
    double median = ratios[ratios.size() / 2];
    CHECK(median <= 3.0); // ~2x work, with headroom for timer noise
}

TEST_CASE("instance validation catches shape and kind errors") {
    BoostedTree bt = example_model();
    Instance x = example_instance();
    validate_instance(*bt.schema, x);

    Instance short_x(x.begin(), x.begin() + 3);
    CHECK_THROWS_AS(validate_instance(*bt.schema, short_x), ModelError);

    Instance wrong_kind = x;
    wrong_kind[0] = Value::boolean(true);
    CHECK_THROWS_AS(validate_instance(*bt.schema, wrong_kind), ModelError);

    Instance bad_cat = x;
    bad_cat[2] = Value::category(7);
    CHECK_THROWS_AS(validate_instance(*bt.schema, bad_cat), ModelError);
}

TEST_CASE("model validation rejects malformed structures") {
    BoostedTree bt = example_model();

    BoostedTree no_forest;
    no_forest.schema = bt.schema;
    CHECK_THROWS_AS(validate_model(no_forest), ModelError);

    BoostedTree bad_kind = example_model();
    bad_kind.forests[0].trees[0].nodes[0].condition = Condition::greater_than(3, 1.0);
    CHECK_THROWS_AS(validate_model(bad_kind), ModelError);

    BoostedTree bad_cat = example_model();
    bad_cat.forests[0].trees[0].nodes[4].condition = Condition::equals_category(2, 9);
    CHECK_THROWS_AS(validate_model(bad_cat), ModelError);

    BoostedTree bad_child = example_model();
    bad_child.forests[0].trees[0].nodes[6].true_child = 99;
    CHECK_THROWS_AS(validate_model(bad_child), ModelError);
}

TEST_CASE("term bookkeeping") {
    Instance x = example_instance();
    Term full = Term::full(x);
    CHECK(full.size() == 4);
    Term empty = Term::empty(x);
    CHECK(empty.size() == 0);

    Term t = Term::of_indices(x, {0, 3});
    CHECK(t.size() == 2);
    CHECK(t.kept_indices() == std::vector<std::int32_t>{0, 3});
    CHECK(term_subset(t, full));
    CHECK(term_subset(empty, t));
    CHECK_FALSE(term_subset(full, t));

    Term u = Term::of_indices(x, {1, 3});
    CHECK(term_less(t, u));       // {0,3} before {1,3}
    CHECK(term_less(empty, t));   // smaller size first
    CHECK_FALSE(term_less(u, t));
}
