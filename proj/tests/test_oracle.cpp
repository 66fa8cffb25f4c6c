// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

#include <algorithm>

#include <doctest.h>

#include "abex/oracle.hpp"
#include "abex/rng.hpp"
#include "abex/ts.hpp"
#include "support/fixtures.hpp"

using namespace abex;
using testing::corpus_instance;
using testing::corpus_model;
using testing::example_instance;
using testing::example_model;

TEST_CASE("the condition universe of the running example") {
    BoostedTree bt = example_model();
    ConditionUniverse u = build_universe(bt);
    const AttributeSchema& schema = *bt.schema;

    CHECK(u.attributes[0].thresholds == std::vector<double>{2.0});
    CHECK(u.attributes[1].thresholds == std::vector<double>{1.0}); // repeats collapse
    CHECK(u.attributes[2].tested == std::vector<std::int32_t>{0});
    CHECK(u.attributes[2].has_other); // w and r are untested
    CHECK(u.attributes[3].bool_tested);

    CHECK(u.attributes[0].cell_count(schema[0]) == 2);
    CHECK(u.attributes[1].cell_count(schema[1]) == 2);
    CHECK(u.attributes[2].cell_count(schema[2]) == 2);
    CHECK(u.attributes[3].cell_count(schema[3]) == 2);

    // cell lookup is consistent with representatives
    for (std::size_t i = 0; i < schema.size(); ++i)
        for (std::size_t c = 0; c < u.attributes[i].cell_count(schema[i]); ++c)
            CHECK(u.attributes[i].cell_of(schema[i], u.attributes[i].cell_value(schema[i], c)) == c);
}

TEST_CASE("untested attributes collapse to a single cell") {
    std::vector<Attribute> attrs{
        {"x0", AttrKind::Numerical, {}},
        {"c0", AttrKind::Categorical, {"a", "b"}},
        {"b0", AttrKind::Boolean, {}},
    };
    BoostedTree bt;
    bt.schema = std::make_shared<AttributeSchema>(attrs);
    Tree t;
    t.nodes.push_back(TreeNode::leaf(0.25));
    Forest f;
    f.class_id = 1;
    f.trees.push_back(t);
    bt.forests.push_back(f);
    validate_model(bt);

    ConditionUniverse u = build_universe(bt);
    for (std::size_t i = 0; i < attrs.size(); ++i)
        CHECK(u.attributes[i].cell_count((*bt.schema)[i]) == 1);
}

TEST_CASE("brute force decides the published terms") {
    BoostedTree bt = example_model();
    Instance x = example_instance();

    // the four extension cells of {A1=4, A4=1} have weights 0.9 0.3 0.5 0.9;
    // the minimum is the (A2<=1, A3=b) cell, whose leaves sum as below
    const double kMinCell = 0.4 + 0.3 + -0.4;
    OracleVerdict v = is_abductive_bruteforce(bt, Term::of_indices(x, {0, 3}));
    CHECK(v.proved());
    CHECK(v.abductive);
    CHECK(v.nodes_explored == 4);
    CHECK(v.optimal_margin == kMinCell);

    OracleVerdict full = is_abductive_bruteforce(bt, Term::full(x));
    CHECK(full.proved());
    CHECK(full.nodes_explored == 1);

    OracleVerdict empty = is_abductive_bruteforce(bt, Term::empty(x));
    CHECK(empty.disproved());
    CHECK_FALSE(empty.abductive);
    REQUIRE(empty.counterexample.has_value());
    CHECK(classify(bt, *empty.counterexample) == 0);
    CHECK(empty.nodes_explored <= 16); // at most the full cell product
}

TEST_CASE("brute force refuses oversized cell products") {
    BoostedTree bt = example_model();
    Instance x = example_instance();
    CHECK_THROWS_AS(is_abductive_bruteforce(bt, Term::empty(x), /*cell_cap=*/8), ModelError);
}

TEST_CASE("search decides the published terms") {
    BoostedTree bt = example_model();
    Instance x = example_instance();

    // passes the sufficiency test, so the root shortcut settles it
    OracleVerdict t2 = is_abductive(bt, Term::of_indices(x, {1, 3}));
    CHECK(t2.proved());
    CHECK(t2.nodes_explored == 0);
    CHECK(t2.optimal_margin == -0.3 + 0.5 + 0.1);

    // fails the sufficiency test but is abductive; the margin is the
    // minimum extension-cell weight from the brute-force table
    const double kMinCell = 0.4 + 0.3 + -0.4;
    OracleVerdict t1 = is_abductive(bt, Term::of_indices(x, {0, 3}));
    CHECK(t1.proved());
    CHECK(t1.optimal_margin == kMinCell);

    OracleOptions exact;
    exact.exact_margin = true;
    OracleVerdict t1x = is_abductive(bt, Term::of_indices(x, {0, 3}), exact);
    CHECK(t1x.proved());
    CHECK(t1x.optimal_margin == kMinCell);

    OracleVerdict none = is_abductive(bt, Term::empty(x));
    CHECK(none.disproved());
    REQUIRE(none.counterexample.has_value());
    CHECK(classify(bt, *none.counterexample) == 0);
    CHECK(term_subset(Term::empty(x), Term::full(*none.counterexample)));
}

TEST_CASE("search and brute force agree across the corpus") {
    std::mt19937_64 rng = make_rng(0xacc0 + 5);
    std::size_t proved = 0, disproved = 0;
    for (std::uint64_t m = 0; m < 60; ++m) {
        BoostedTree bt = corpus_model(m);
        Instance x = corpus_instance(bt, m);
        for (std::uint64_t k = 0; k < 5; ++k) {
            Term t = Term::full(x);
            for (std::size_t i = 0; i < t.kept.size(); ++i)
                if (uniform_index(rng, 2) == 0) t.kept[i] = false;

            OracleVerdict bf = is_abductive_bruteforce(bt, t);
            OracleVerdict bb = is_abductive(bt, t);
            REQUIRE(bb.status != OracleStatus::Timeout);
            CHECK(bb.abductive == bf.abductive);

            OracleOptions exact;
            exact.exact_margin = true;
            OracleVerdict bx = is_abductive(bt, t, exact);
            CHECK(bx.abductive == bf.abductive);
            if (bf.proved() && bt.is_binary() && classify(bt, x) == 1) {
                CHECK(bx.optimal_margin == bf.optimal_margin);
                CHECK(bb.optimal_margin > 0.0);
                CHECK(bb.optimal_margin <= bf.optimal_margin); // certified lower bound
            }
            if (bf.disproved()) {
                ++disproved;
                REQUIRE(bb.counterexample.has_value());
                CHECK(classify(bt, *bb.counterexample) != classify(bt, x));
                for (std::size_t i = 0; i < t.kept.size(); ++i)
                    if (t.kept[i]) CHECK((*bb.counterexample)[i] == x[i]);
            } else {
                ++proved;
            }
        }
    }
    CHECK(proved > 20);
    CHECK(disproved > 20); // the corpus exercises both verdicts
}

TEST_CASE("the sufficiency bound is admissible for every cell") {
    for (std::uint64_t m = 0; m < 25; ++m) {
        BoostedTree bt = corpus_model(m);
        Instance x = corpus_instance(bt, m);
        std::int32_t cls = classify(bt, x);
        Term t = Term::full(x);
        for (std::size_t i = 0; i < t.kept.size(); i += 2) t.kept[i] = false;

        double bound = ts_bound(bt, restriction_of_term(bt.schema, t), cls).value;
        OracleVerdict bf = is_abductive_bruteforce(bt, t);
        // brute-force optimal_margin is the minimum cell margin when proved
        if (bf.proved()) CHECK(bound <= bf.optimal_margin);
    }
}

TEST_CASE("non-positive margins are counterexamples in the positive binary case") {
    // one Boolean attribute, one tree with leaves 0 (false) and 1 (true):
    // flipping to the 0-weight leaf gives margin 0, which is class 0
    std::vector<Attribute> attrs{{"b0", AttrKind::Boolean, {}}};
    BoostedTree bt;
    bt.schema = std::make_shared<AttributeSchema>(attrs);
    Tree t;
    t.nodes = {TreeNode::internal(Condition::is_true(0), 1, 2), TreeNode::leaf(0.0),
               TreeNode::leaf(1.0)};
    Forest f;
    f.class_id = 1;
    f.trees.push_back(std::move(t));
    bt.forests.push_back(std::move(f));
    validate_model(bt);

    Instance x{Value::boolean(true)};
    CHECK(classify(bt, x) == 1);
    OracleVerdict v = is_abductive(bt, Term::empty(x));
    CHECK(v.disproved());
    REQUIRE(v.counterexample.has_value());
    CHECK((*v.counterexample)[0].boolean() == false);
    CHECK(v.optimal_margin == 0.0);
    CHECK(is_abductive_bruteforce(bt, Term::empty(x)).disproved());
}

TEST_CASE("the search reaches cells that greedy moves cannot") {
    // the one negative cell needs two coordinated flips: any single change
    // from x raises the margin, so only a search that keeps every cell of
    // the partition can find the counterexample
    std::vector<Attribute> attrs{
        {"x0", AttrKind::Numerical, {}},
        {"c0", AttrKind::Categorical, {"a", "b", "c"}},
    };
    BoostedTree bt;
    bt.schema = std::make_shared<AttributeSchema>(attrs);
    Forest f;
    f.class_id = 1;
    Tree bias;
    bias.nodes = {TreeNode::leaf(1.0)};
    Tree t1;
    t1.nodes = {TreeNode::internal(Condition::greater_than(0, 1.0), 1, 2),
                TreeNode::leaf(0.0), TreeNode::leaf(1.0)};
    Tree t2;
    t2.nodes = {TreeNode::internal(Condition::equals_category(1, 0), 1, 2),
                TreeNode::leaf(1.0), TreeNode::leaf(0.0)};
    Tree t3; // -4 only when both moved away from x
    t3.nodes = {TreeNode::internal(Condition::greater_than(0, 1.0), 1, 2),
                TreeNode::leaf(0.0),
                TreeNode::internal(Condition::equals_category(1, 0), 3, 4),
                TreeNode::leaf(-4.0), TreeNode::leaf(0.0)};
    f.trees = {bias, t1, t2, t3};
    bt.forests.push_back(std::move(f));
    validate_model(bt);

    Instance x{Value::number(0.0), Value::category(0)};
    REQUIRE(classify(bt, x) == 1);
    // single flips from x raise the forest weight from 1 to 2
    CHECK(eval_forest(bt.forests.front(), {Value::number(2.0), Value::category(0)}) == 2.0);
    CHECK(eval_forest(bt.forests.front(), {Value::number(0.0), Value::category(1)}) == 2.0);

    OracleVerdict v = is_abductive(bt, Term::empty(x));
    CHECK(v.disproved());
    REQUIRE(v.counterexample.has_value());
    CHECK((*v.counterexample)[0].number() > 1.0);
    CHECK((*v.counterexample)[1].category() != 0);
    CHECK(v.nodes_explored >= 1); // the greedy probe alone cannot get here
    CHECK(is_abductive_bruteforce(bt, Term::empty(x)).disproved());
}

TEST_CASE("an exhausted budget reports a timeout") {
    BoostedTree bt = example_model();
    Instance x = example_instance();
    OracleOptions opts;
    opts.budget.max_nodes = 0;
    // {A1, A4} fails the sufficiency test, so deciding it needs search
    OracleVerdict v = is_abductive(bt, Term::of_indices(x, {0, 3}), opts);
    CHECK(v.status == OracleStatus::Timeout);
    CHECK_FALSE(v.counterexample.has_value());
}
