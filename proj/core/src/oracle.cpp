// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

#include "abex/oracle.hpp"

#include <algorithm>
#include <limits>

#include "abex/ts.hpp"

namespace abex {

std::size_t AttributeCells::cell_count(const Attribute& attr) const {
    switch (attr.kind) {
        case AttrKind::Numerical: return thresholds.size() + 1;
        case AttrKind::Categorical: return tested.size() + (has_other ? 1 : 0);
        case AttrKind::Boolean: return bool_tested ? 2 : 1;
    }
    return 0;
}

Value AttributeCells::cell_value(const Attribute& attr, std::size_t cell) const {
    switch (attr.kind) {
        case AttrKind::Numerical: {
            std::size_t q = thresholds.size();
            if (q == 0) return Value::number(0.0);
            // cell i <= q-1 is (th[i-1], th[i]]; cell q is (th[q-1], inf)
            if (cell < q) return Value::number(thresholds[cell]);
            return Value::number(thresholds[q - 1] + 1.0);
        }
        case AttrKind::Categorical: {
            if (cell < tested.size()) return Value::category(tested[cell]);
            // the "other" cell: smallest untested declared category
            for (std::size_t c = 0; c < attr.category_count(); ++c)
                if (!std::binary_search(tested.begin(), tested.end(),
                                        static_cast<std::int32_t>(c)))
                    return Value::category(static_cast<std::int32_t>(c));
            throw ModelError("attribute '" + attr.name + "': no untested category");
        }
        case AttrKind::Boolean:
            return Value::boolean(bool_tested && cell == 1);
    }
    throw ModelError("unknown attribute kind");
}

std::size_t AttributeCells::cell_of(const Attribute& attr, const Value& v) const {
    switch (attr.kind) {
        case AttrKind::Numerical: {
            auto it = std::lower_bound(thresholds.begin(), thresholds.end(), v.number());
            return static_cast<std::size_t>(it - thresholds.begin());
        }
        case AttrKind::Categorical: {
            auto it = std::lower_bound(tested.begin(), tested.end(), v.category());
            if (it != tested.end() && *it == v.category())
                return static_cast<std::size_t>(it - tested.begin());
            return tested.size(); // the "other" cell
        }
        case AttrKind::Boolean:
            return bool_tested && v.boolean() ? 1 : 0;
    }
    throw ModelError("unknown attribute kind");
}

ConditionUniverse build_universe(const BoostedTree& bt) {
    const AttributeSchema& schema = *bt.schema;
    ConditionUniverse u;
    u.attributes.resize(schema.size());
    for (const Forest& f : bt.forests)
        for (const Tree& t : f.trees)
            for (const TreeNode& n : t.nodes) {
                if (n.is_leaf()) continue;
                AttributeCells& cells = u.attributes[static_cast<std::size_t>(n.condition.attribute)];
                switch (n.condition.test) {
                    case TestKind::GreaterThan:
                        cells.thresholds.push_back(n.condition.threshold);
                        break;
                    case TestKind::EqualsCategory:
                        cells.tested.push_back(n.condition.category);
                        break;
                    case TestKind::IsTrue:
                        cells.bool_tested = true;
                        break;
                }
            }
    for (std::size_t i = 0; i < schema.size(); ++i) {
        AttributeCells& cells = u.attributes[i];
        std::sort(cells.thresholds.begin(), cells.thresholds.end());
        cells.thresholds.erase(std::unique(cells.thresholds.begin(), cells.thresholds.end()),
                               cells.thresholds.end());
        std::sort(cells.tested.begin(), cells.tested.end());
        cells.tested.erase(std::unique(cells.tested.begin(), cells.tested.end()),
                           cells.tested.end());
        cells.has_other = cells.tested.size() < schema[i].category_count();
    }
    return u;
}

namespace {

double margin_of(const BoostedTree& bt, const std::vector<double>& weights, std::int32_t cls) {
    if (bt.is_binary()) return cls == 1 ? weights[0] : -weights[0];
    double own = 0.0;
    double rival = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < bt.forests.size(); ++j) {
        if (bt.forests[j].class_id == cls)
            own = weights[j];
        else
            rival = std::max(rival, weights[j]);
    }
    return own - rival;
}

} // namespace

OracleVerdict is_abductive_bruteforce(const BoostedTree& bt, const Term& t,
                                      std::uint64_t cell_cap) {
    const AttributeSchema& schema = *bt.schema;
    std::int32_t cls = classify(bt, t.instance);
    ConditionUniverse u = build_universe(bt);

    std::vector<std::size_t> free_attrs;
    std::vector<std::size_t> radix;
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (t.kept[i]) continue;
        std::size_t count = u.attributes[i].cell_count(schema[i]);
        free_attrs.push_back(i);
        radix.push_back(count);
        if (total > cell_cap / count)
            throw ModelError("brute-force cell count exceeds cap of " + std::to_string(cell_cap));
        total *= count;
    }

    OracleVerdict v;
    v.optimal_margin = std::numeric_limits<double>::infinity();
    Instance rep = t.instance; // pinned attributes keep the instance's values
    std::vector<std::size_t> digits(free_attrs.size(), 0);
    for (std::size_t i = 0; i < free_attrs.size(); ++i)
        rep[free_attrs[i]] = u.attributes[free_attrs[i]].cell_value(schema[free_attrs[i]], 0);

    for (std::uint64_t cell = 0;; ++cell) {
        ++v.nodes_explored;
        std::vector<double> w = forest_weights(bt, rep);
        double margin = margin_of(bt, w, cls);
        v.optimal_margin = std::min(v.optimal_margin, margin);
        if (classify(bt, rep) != cls) {
            v.abductive = false;
            v.counterexample = rep;
            v.optimal_margin = margin;
            v.status = OracleStatus::Disproved;
            return v;
        }
        // advance the mixed-radix counter
        std::size_t d = 0;
        for (; d < digits.size(); ++d) {
            if (++digits[d] < radix[d]) {
                rep[free_attrs[d]] =
                    u.attributes[free_attrs[d]].cell_value(schema[free_attrs[d]], digits[d]);
                break;
            }
            digits[d] = 0;
            rep[free_attrs[d]] = u.attributes[free_attrs[d]].cell_value(schema[free_attrs[d]], 0);
        }
        if (d == digits.size()) break;
    }
    v.abductive = true;
    v.status = OracleStatus::Proved;
    return v;
}

namespace {

bool constraint_contains(const DomainConstraint& dc, const Value& v) {
    switch (v.kind()) {
        case AttrKind::Numerical:
            if (dc.pinned) return dc.pin_value == v.number();
            return dc.lo < v.number() && v.number() <= dc.hi;
        case AttrKind::Categorical:
            if (dc.fixed_category >= 0) return dc.fixed_category == v.category();
            return !dc.excludes(v.category());
        case AttrKind::Boolean:
            if (dc.fixed_bool >= 0) return (dc.fixed_bool == 1) == v.boolean();
            return true;
    }
    return false;
}

std::uint64_t mask_of(const std::vector<std::int32_t>& cats) {
    std::uint64_t m = 0;
    for (std::int32_t c : cats) m |= 1ull << c;
    return m;
}

// Splits one free attribute's remaining cell set into two nonempty parts.
// Returns false when the attribute is down to a single cell.
bool split_constraint(const DomainConstraint& dc, const Attribute& attr,
                      const AttributeCells& cells, DomainConstraint& first,
                      DomainConstraint& rest) {
    switch (attr.kind) {
        case AttrKind::Numerical: {
            if (dc.pinned) return false;
            auto begin = std::upper_bound(cells.thresholds.begin(), cells.thresholds.end(), dc.lo);
            auto end = std::lower_bound(cells.thresholds.begin(), cells.thresholds.end(), dc.hi);
            if (begin >= end) return false; // no threshold strictly inside (lo, hi)
            double mid = *(begin + (end - begin) / 2);
            first = dc;
            first.hi = mid;
            rest = dc;
            rest.lo = mid;
            return true;
        }
        case AttrKind::Categorical: {
            if (dc.fixed_category >= 0) return false;
            std::uint64_t declared = attr.category_count() >= 64
                                         ? ~0ull
                                         : (1ull << attr.category_count()) - 1;
            std::uint64_t tested = mask_of(cells.tested) & declared;
            std::uint64_t untested = declared & ~tested;
            std::vector<std::int32_t> live;
            for (std::int32_t c : cells.tested)
                if (!dc.excludes(c)) live.push_back(c);
            bool other_live = (untested & ~dc.excluded) != 0;
            std::size_t count = live.size() + (other_live ? 1 : 0);
            if (count < 2) return false;
            if (!live.empty()) {
                first = dc;
                first.fixed_category = live.front();
                rest = dc;
                rest.excluded |= 1ull << live.front();
            } else {
                // cannot happen with count >= 2 and at most one "other" cell
                return false;
            }
            return true;
        }
        case AttrKind::Boolean: {
            if (dc.fixed_bool >= 0 || !cells.bool_tested) return false;
            first = dc;
            first.fixed_bool = 0;
            rest = dc;
            rest.fixed_bool = 1;
            return true;
        }
    }
    return false;
}

// Greedy counterexample hunt before the search: coordinate descent on the
// margin from the instance itself, free attributes moving to their
// margin-minimizing cell. Finding a differently-classified extension here
// settles the disproof without branching; failure to find one proves
// nothing.
std::optional<Instance> probe_counterexample(const BoostedTree& bt, const Term& t,
                                             const ConditionUniverse& u, std::int32_t cls) {
    const AttributeSchema& schema = *bt.schema;
    Instance cur = t.instance;
    double cur_margin = margin_of(bt, forest_weights(bt, cur), cls);
    for (int sweep = 0; sweep < 2; ++sweep) {
        bool moved = false;
        for (std::size_t i = 0; i < schema.size(); ++i) {
            if (t.kept[i]) continue;
            const AttributeCells& cells = u.attributes[i];
            std::size_t count = cells.cell_count(schema[i]);
            if (count < 2) continue;
            Value best = cur[i];
            for (std::size_t c = 0; c < count; ++c) {
                cur[i] = cells.cell_value(schema[i], c);
                double m = margin_of(bt, forest_weights(bt, cur), cls);
                if (m < cur_margin) {
                    cur_margin = m;
                    best = cur[i];
                    moved = true;
                }
            }
            cur[i] = best;
            if (classify(bt, cur) != cls) return cur;
        }
        if (!moved) break;
    }
    return std::nullopt;
}

// Per-tree bound values under one restriction. A tree's bound depends only
// on the constraints of attributes it tests, so a child node recomputes just
// the trees testing the branched attribute; totals are re-summed in tree
// order, which keeps them bit-identical to a fresh forest_bound.
struct NodeBounds {
    std::vector<std::vector<double>> per_tree; // [forest][tree]
    std::vector<double> totals;
};

struct SearchNode {
    Restriction r;
    NodeBounds bounds;
    double value = 0.0;
    bool holds = false;
};

// Static context of one oracle call.
struct SearchContext {
    const BoostedTree& bt;
    std::int32_t cls;
    std::vector<BoundDir> dirs;                              // per forest
    std::vector<std::vector<std::vector<std::int32_t>>> tested_by; // [forest][attr] -> trees
    std::size_t own = 0;                                     // index of the predicted forest

    explicit SearchContext(const BoostedTree& bt_, std::int32_t cls_) : bt(bt_), cls(cls_) {
        std::size_t n = bt.schema->size();
        for (std::size_t j = 0; j < bt.forests.size(); ++j) {
            bool is_own = bt.is_binary() ? cls == 1 : bt.forests[j].class_id == cls;
            if (!bt.is_binary() && is_own) own = j;
            dirs.push_back(is_own ? BoundDir::Min : BoundDir::Max);
            std::vector<std::vector<std::int32_t>> per_attr(n);
            const Forest& f = bt.forests[j];
            for (std::size_t k = 0; k < f.trees.size(); ++k) {
                std::vector<bool> seen(n, false);
                for (const TreeNode& node : f.trees[k].nodes)
                    if (!node.is_leaf())
                        seen[static_cast<std::size_t>(node.condition.attribute)] = true;
                for (std::size_t a = 0; a < n; ++a)
                    if (seen[a]) per_attr[a].push_back(static_cast<std::int32_t>(k));
            }
            tested_by.push_back(std::move(per_attr));
        }
    }

    NodeBounds full_bounds(Restriction& scratch) const {
        NodeBounds b;
        for (std::size_t j = 0; j < bt.forests.size(); ++j) {
            std::vector<double> tv;
            tv.reserve(bt.forests[j].trees.size());
            double total = 0.0;
            for (const Tree& tree : bt.forests[j].trees) {
                double w = tree_bound_weight(tree, scratch, dirs[j]);
                tv.push_back(w);
                total += w;
            }
            b.per_tree.push_back(std::move(tv));
            b.totals.push_back(total);
        }
        return b;
    }

    // Sufficiency value and test from totals; matches ts_bound exactly.
    SufficiencyBound evaluate(const std::vector<double>& totals) const {
        if (bt.is_binary()) {
            if (cls == 1) return {totals[0], totals[0] > 0.0};
            return {-totals[0], -totals[0] >= 0.0};
        }
        double rival = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < totals.size(); ++j)
            if (j != own) rival = std::max(rival, totals[j]);
        double value = totals[own] - rival;
        return {value, value > 0.0};
    }

    // Totals after constraining one attribute, without building the child
    // node: recomputes only the trees testing it. `scratch` must equal the
    // parent restriction except at `attr`, which already holds the child
    // constraint.
    std::vector<double> child_totals(const NodeBounds& parent, std::size_t attr,
                                     Restriction& scratch,
                                     std::vector<std::vector<double>>* patches) const {
        std::vector<double> totals(bt.forests.size());
        for (std::size_t j = 0; j < bt.forests.size(); ++j) {
            const std::vector<std::int32_t>& affected = tested_by[j][attr];
            std::vector<double> fresh;
            fresh.reserve(affected.size());
            for (std::int32_t k : affected)
                fresh.push_back(tree_bound_weight(bt.forests[j].trees[static_cast<std::size_t>(k)],
                                                  scratch, dirs[j]));
            double total = 0.0;
            std::size_t next = 0;
            for (std::size_t k = 0; k < parent.per_tree[j].size(); ++k) {
                bool changed = next < affected.size() &&
                               affected[next] == static_cast<std::int32_t>(k);
                total += changed ? fresh[next++] : parent.per_tree[j][k];
            }
            totals[j] = total;
            if (patches) (*patches)[j] = std::move(fresh);
        }
        return totals;
    }

    // Child node assembled from the parent plus one constrained attribute.
    SearchNode make_child(const SearchNode& parent, std::size_t attr,
                          const DomainConstraint& dc,
                          const std::vector<std::vector<double>>& patches,
                          const std::vector<double>& totals) const {
        SearchNode child;
        child.r = parent.r;
        child.r[attr] = dc;
        child.bounds = parent.bounds;
        for (std::size_t j = 0; j < bt.forests.size(); ++j) {
            const std::vector<std::int32_t>& affected = tested_by[j][attr];
            for (std::size_t i = 0; i < affected.size(); ++i)
                child.bounds.per_tree[j][static_cast<std::size_t>(affected[i])] = patches[j][i];
            child.bounds.totals[j] = totals[j];
        }
        SufficiencyBound s = evaluate(totals);
        child.value = s.value;
        child.holds = s.holds;
        return child;
    }
};

} // namespace

OracleVerdict is_abductive(const BoostedTree& bt, const Term& t, const OracleOptions& opts) {
    const AttributeSchema& schema = *bt.schema;
    std::int32_t cls = classify(bt, t.instance);
    ConditionUniverse u = build_universe(bt);
    SearchContext ctx(bt, cls);

    auto start = std::chrono::steady_clock::now();
    auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                std::chrono::duration<double>(opts.budget.wall_seconds));
    if (opts.budget.deadline && *opts.budget.deadline < deadline)
        deadline = *opts.budget.deadline;

    OracleVerdict v;
    v.optimal_margin = std::numeric_limits<double>::infinity();

    SearchNode root;
    root.r = restriction_of_term(bt.schema, t);
    root.bounds = ctx.full_bounds(root.r);
    SufficiencyBound root_bound = ctx.evaluate(root.bounds.totals);
    root.value = root_bound.value;
    root.holds = root_bound.holds;
    if (!opts.exact_margin && opts.root_shortcut && root_bound.holds) {
        v.abductive = true;
        v.optimal_margin = root_bound.value;
        v.status = OracleStatus::Proved;
        return v;
    }

    if (std::optional<Instance> ce = probe_counterexample(bt, t, u, cls)) {
        v.abductive = false;
        v.optimal_margin = margin_of(bt, forest_weights(bt, *ce), cls);
        v.counterexample = std::move(*ce);
        v.status = OracleStatus::Disproved;
        return v;
    }

    double lower = std::numeric_limits<double>::infinity();  // certified lower bound
    double incumbent = std::numeric_limits<double>::infinity(); // best evaluated cell margin

    auto prunable = [&](double value, bool holds) {
        if (!holds) return false;
        return !opts.exact_margin || value >= incumbent;
    };

    std::vector<SearchNode> stack;
    if (prunable(root.value, root.holds))
        lower = std::min(lower, root.value);
    else
        stack.push_back(std::move(root));

    std::vector<std::vector<double>> patch_first(bt.forests.size());
    std::vector<std::vector<double>> patch_rest(bt.forests.size());

    while (!stack.empty()) {
        if (v.nodes_explored >= opts.budget.max_nodes ||
            ((v.nodes_explored & 0x3f) == 0 && std::chrono::steady_clock::now() >= deadline)) {
            v.status = OracleStatus::Timeout;
            v.abductive = false;
            return v;
        }
        SearchNode node = std::move(stack.back());
        stack.pop_back();
        ++v.nodes_explored;
        // the incumbent may have improved since this node was pushed
        if (prunable(node.value, node.holds)) {
            lower = std::min(lower, node.value);
            continue;
        }

        // one-step lookahead: branch on the free attribute whose best child
        // bound improves most on the parent bound, ties by index
        bool branched = false;
        std::size_t branch_attr = 0;
        DomainConstraint best_first, best_rest;
        std::vector<double> totals_first, totals_rest;
        double best_improvement = -std::numeric_limits<double>::infinity();
        Restriction scratch = node.r;
        for (std::size_t i = 0; i < schema.size(); ++i) {
            if (t.kept[i]) continue;
            DomainConstraint first, rest;
            if (!split_constraint(node.r[i], schema[i], u.attributes[i], first, rest)) continue;
            scratch[i] = first;
            std::vector<double> tf = ctx.child_totals(node.bounds, i, scratch, nullptr);
            scratch[i] = rest;
            std::vector<double> tr = ctx.child_totals(node.bounds, i, scratch, nullptr);
            scratch[i] = node.r[i];
            double improvement =
                std::max(ctx.evaluate(tf).value, ctx.evaluate(tr).value) - node.value;
            if (!branched || improvement > best_improvement) {
                branched = true;
                branch_attr = i;
                best_improvement = improvement;
                best_first = first;
                best_rest = rest;
                totals_first = std::move(tf);
                totals_rest = std::move(tr);
            }
        }

        if (!branched) {
            // fully assigned: a single cell of the universe
            Instance rep = materialize_representative(node.r);
            std::vector<double> w = forest_weights(bt, rep);
            double margin = margin_of(bt, w, cls);
            lower = std::min(lower, margin);
            incumbent = std::min(incumbent, margin);
            if (classify(bt, rep) != cls) {
                v.abductive = false;
                v.counterexample = std::move(rep);
                v.optimal_margin = margin;
                v.status = OracleStatus::Disproved;
                return v;
            }
            continue;
        }

        // rebuild the chosen children's patches (per-tree values) once
        scratch[branch_attr] = best_first;
        ctx.child_totals(node.bounds, branch_attr, scratch, &patch_first);
        SearchNode child_first =
            ctx.make_child(node, branch_attr, best_first, patch_first, totals_first);
        scratch[branch_attr] = best_rest;
        ctx.child_totals(node.bounds, branch_attr, scratch, &patch_rest);
        SearchNode child_rest =
            ctx.make_child(node, branch_attr, best_rest, patch_rest, totals_rest);

        // push the child holding the instance's own value first so that the
        // other child is explored first; counterexamples tend to lie away
        // from the instance
        bool first_has_x = constraint_contains(child_first.r[branch_attr], t.instance[branch_attr]);
        SearchNode* ordered[2] = {&child_first, &child_rest};
        if (!first_has_x) std::swap(ordered[0], ordered[1]); // x-child pushed first
        for (SearchNode* child : ordered) {
            if (prunable(child->value, child->holds))
                lower = std::min(lower, child->value);
            else
                stack.push_back(std::move(*child));
        }
    }

    v.abductive = true;
    v.status = OracleStatus::Proved;
    v.optimal_margin = opts.exact_margin ? incumbent : std::min(lower, incumbent);
    return v;
}

} // namespace abex
