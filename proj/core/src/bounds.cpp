// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

#include "abex/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace abex {

namespace {

std::uint64_t all_categories_mask(const Attribute& attr) {
    std::size_t k = attr.category_count();
    return k >= 64 ? ~0ull : ((1ull << k) - 1);
}

} // namespace

BranchFeasibility branch_feasibility(const DomainConstraint& dc, const Condition& c,
                                     const Attribute& attr) {
    BranchFeasibility f;
    switch (c.test) {
        case TestKind::GreaterThan: {
            if (dc.pinned) {
                // exact comparison, identical to eval_condition on the pin
                bool t = dc.pin_value > c.threshold;
                f.can_true = t;
                f.can_false = !t;
            } else {
                f.can_true = dc.hi > c.threshold;                  // (max(lo,th), hi] nonempty
                f.can_false = dc.lo < std::min(dc.hi, c.threshold); // (lo, min(hi,th)] nonempty
            }
            return f;
        }
        case TestKind::EqualsCategory: {
            if (dc.fixed_category >= 0) {
                bool t = dc.fixed_category == c.category;
                f.can_true = t;
                f.can_false = !t;
                return f;
            }
            f.can_true = !dc.excludes(c.category);
            std::uint64_t excluded_if_false = dc.excluded | (1ull << c.category);
            f.can_false = (excluded_if_false & all_categories_mask(attr)) !=
                          all_categories_mask(attr);
            return f;
        }
        case TestKind::IsTrue: {
            if (dc.fixed_bool >= 0) {
                bool t = dc.fixed_bool == 1;
                f.can_true = t;
                f.can_false = !t;
            } else {
                f.can_true = f.can_false = true;
            }
            return f;
        }
    }
    throw ModelError("unknown test kind");
}

DomainConstraint refine(const DomainConstraint& dc, const Condition& c, bool outcome) {
    DomainConstraint out = dc;
    switch (c.test) {
        case TestKind::GreaterThan:
            if (!dc.pinned) {
                if (outcome)
                    out.lo = std::max(dc.lo, c.threshold);
                else
                    out.hi = std::min(dc.hi, c.threshold);
            }
            return out;
        case TestKind::EqualsCategory:
            if (dc.fixed_category < 0) {
                if (outcome)
                    out.fixed_category = c.category;
                else
                    out.excluded = dc.excluded | (1ull << c.category);
            }
            return out;
        case TestKind::IsTrue:
            if (dc.fixed_bool < 0) out.fixed_bool = outcome ? 1 : 0;
            return out;
    }
    throw ModelError("unknown test kind");
}

bool constraint_nonempty(const DomainConstraint& dc, const Attribute& attr) {
    switch (attr.kind) {
        case AttrKind::Numerical:
            return dc.pinned || dc.lo < dc.hi;
        case AttrKind::Categorical:
            if (dc.fixed_category >= 0) return true;
            return (dc.excluded & all_categories_mask(attr)) != all_categories_mask(attr);
        case AttrKind::Boolean:
            return true;
    }
    return false;
}

Value representative_value(const DomainConstraint& dc, const Attribute& attr) {
    switch (attr.kind) {
        case AttrKind::Numerical: {
            if (dc.pinned) return Value::number(dc.pin_value);
            bool lo_inf = std::isinf(dc.lo), hi_inf = std::isinf(dc.hi);
            if (lo_inf && hi_inf) return Value::number(0.0);
            if (lo_inf) return Value::number(dc.hi - 1.0);
            if (hi_inf) return Value::number(dc.lo + 1.0);
            double mid = dc.lo + (dc.hi - dc.lo) / 2.0;
            if (!(mid > dc.lo && mid <= dc.hi)) mid = dc.hi; // hi always lies in (lo, hi]
            return Value::number(mid);
        }
        case AttrKind::Categorical: {
            if (dc.fixed_category >= 0) return Value::category(dc.fixed_category);
            for (std::size_t c = 0; c < attr.category_count(); ++c)
                if (!dc.excludes(static_cast<std::int32_t>(c)))
                    return Value::category(static_cast<std::int32_t>(c));
            throw ModelError("attribute '" + attr.name + "': empty category constraint");
        }
        case AttrKind::Boolean:
            return Value::boolean(dc.fixed_bool == 1);
    }
    throw ModelError("unknown attribute kind");
}

Restriction Restriction::unconstrained(SchemaPtr schema) {
    Restriction r;
    r.constraints.assign(schema->size(), DomainConstraint::free_constraint());
    r.schema = std::move(schema);
    return r;
}

void pin_attribute(Restriction& r, std::size_t i, const Value& v) {
    switch (v.kind()) {
        case AttrKind::Numerical: r.constraints[i] = DomainConstraint::pin_number(v.number()); break;
        case AttrKind::Categorical: r.constraints[i] = DomainConstraint::pin_category(v.category()); break;
        case AttrKind::Boolean: r.constraints[i] = DomainConstraint::pin_boolean(v.boolean()); break;
    }
}

Restriction restriction_of_term(const SchemaPtr& schema, const Term& t) {
    Restriction r = Restriction::unconstrained(schema);
    for (std::size_t i = 0; i < t.kept.size(); ++i)
        if (t.kept[i]) pin_attribute(r, i, t.instance[i]);
    return r;
}

namespace {

struct BoundSearch {
    const Tree& tree;
    const AttributeSchema& schema;
    Restriction state; // mutated along the path, restored on backtrack
    BoundDir dir;
    std::uint64_t* visited;

    double best = 0.0;
    std::int32_t best_leaf = -1;
    std::vector<PathStep> trail;
    std::vector<PathStep> best_path;

    BoundSearch(const Tree& t, const Restriction& r, BoundDir d, std::uint64_t* v)
        : tree(t), schema(*r.schema), state(r), dir(d), visited(v) {}

    bool better(double w) const {
        if (best_leaf < 0) return true;
        return dir == BoundDir::Min ? w < best : w > best;
    }

    void visit(std::int32_t node) {
        if (visited) ++*visited;
        const TreeNode& n = tree.nodes[node];
        if (n.is_leaf()) {
            if (better(n.weight)) {
                best = n.weight;
                best_leaf = node;
                best_path = trail;
            }
            return;
        }
        std::size_t attr = static_cast<std::size_t>(n.condition.attribute);
        DomainConstraint saved = state[attr];
        BranchFeasibility f = branch_feasibility(saved, n.condition, schema[attr]);
        if (f.can_false) {
            state[attr] = refine(saved, n.condition, false);
            trail.push_back({node, false});
            visit(n.false_child);
            trail.pop_back();
        }
        if (f.can_true) {
            state[attr] = refine(saved, n.condition, true);
            trail.push_back({node, true});
            visit(n.true_child);
            trail.pop_back();
        }
        state[attr] = saved;
    }
};

} // namespace

BoundResult tree_bound(const Tree& tree, const Restriction& r, BoundDir dir,
                       std::uint64_t* visited) {
    BoundSearch search(tree, r, dir, visited);
    search.visit(0);
    if (search.best_leaf < 0)
        throw ModelError("no valid root-to-leaf path under restriction");
    return {search.best, search.best_leaf, std::move(search.best_path)};
}

namespace {

struct WeightOnlySearch {
    const Tree& tree;
    const AttributeSchema& schema;
    Restriction& state;
    BoundDir dir;
    double best;
    bool found = false;

    void visit(std::int32_t node) {
        const TreeNode& n = tree.nodes[node];
        if (n.is_leaf()) {
            if (!found || (dir == BoundDir::Min ? n.weight < best : n.weight > best)) {
                best = n.weight;
                found = true;
            }
            return;
        }
        std::size_t attr = static_cast<std::size_t>(n.condition.attribute);
        DomainConstraint saved = state[attr];
        BranchFeasibility f = branch_feasibility(saved, n.condition, schema[attr]);
        if (f.can_false) {
            state[attr] = refine(saved, n.condition, false);
            visit(n.false_child);
        }
        if (f.can_true) {
            state[attr] = refine(saved, n.condition, true);
            visit(n.true_child);
        }
        state[attr] = saved;
    }
};

} // namespace

double tree_bound_weight(const Tree& tree, Restriction& state, BoundDir dir) {
    WeightOnlySearch search{tree, *state.schema, state, dir, 0.0};
    search.visit(0);
    if (!search.found) throw ModelError("no valid root-to-leaf path under restriction");
    return search.best;
}

double forest_bound(const Forest& forest, const Restriction& r, BoundDir dir) {
    Restriction state = r;
    double sum = 0.0;
    for (const Tree& t : forest.trees) sum += tree_bound_weight(t, state, dir);
    return sum;
}

Instance materialize_representative(const Restriction& r) {
    Instance x;
    x.reserve(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        x.push_back(representative_value(r[i], (*r.schema)[i]));
    return x;
}

Instance materialize_witness(const Tree& tree, const Restriction& r, const BoundResult& bound) {
    Restriction refined = r;
    for (const PathStep& step : bound.path) {
        const Condition& c = tree.nodes[step.node].condition;
        std::size_t attr = static_cast<std::size_t>(c.attribute);
        refined[attr] = refine(refined[attr], c, step.outcome);
    }
    return materialize_representative(refined);
}

namespace {

void check_paths_rec(const Tree& tree, const AttributeSchema& schema, Restriction& state,
                     std::int32_t node, const std::string& where) {
    const TreeNode& n = tree.nodes[node];
    if (n.is_leaf()) return;
    std::size_t attr = static_cast<std::size_t>(n.condition.attribute);
    DomainConstraint saved = state[attr];
    BranchFeasibility f = branch_feasibility(saved, n.condition, schema[attr]);
    for (bool outcome : {false, true}) {
        bool can = outcome ? f.can_true : f.can_false;
        if (!can)
            throw ModelError(where + ", node " + std::to_string(node) +
                             ": unsatisfiable path through the " +
                             (outcome ? "true" : "false") + " branch (attribute '" +
                             schema[attr].name + "')");
        state[attr] = refine(saved, n.condition, outcome);
        check_paths_rec(tree, schema, state, outcome ? n.true_child : n.false_child, where);
    }
    state[attr] = saved;
}

} // namespace

void check_path_satisfiability(const Tree& tree, const AttributeSchema& schema,
                               const std::string& where) {
    Restriction state;
    state.constraints.assign(schema.size(), DomainConstraint::free_constraint());
    state.schema = std::make_shared<AttributeSchema>(schema);
    check_paths_rec(tree, schema, state, 0, where);
}

} // namespace abex
