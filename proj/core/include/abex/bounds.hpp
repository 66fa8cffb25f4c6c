// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

/**
 * \file bounds.hpp
 *
 * Worst/best-instance weights per tree under a restriction. A restriction
 * constrains each attribute independently (interval, category state, or
 * Boolean state); a term pins a subset of an instance's values and leaves
 * the rest free. tree_bound() walks a tree once, refining the constraint of
 * the tested attribute along each path and skipping arcs whose outcome is
 * impossible under the current state — the frozen arcs. The surviving
 * root-to-leaf paths enumerate exactly the leaves reachable by instances
 * satisfying the restriction, so the minimal (maximal) surviving leaf weight
 * is the worst-instance (best-instance) tree weight.
 */

#ifndef ABEX_BOUNDS_HPP
#define ABEX_BOUNDS_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "abex/model.hpp"

namespace abex {

enum class BoundDir : std::uint8_t { Min, Max };

/// Per-attribute domain constraint. Trivially copyable; the interpretation
/// follows the attribute's kind:
///  - numerical: an exact pin, or the half-open interval (lo, hi];
///  - categorical: a fixed category, or a bitmask of excluded categories;
///  - Boolean: optionally fixed to 0 or 1.
struct DomainConstraint {
    // numerical
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    double pin_value = 0.0;
    bool pinned = false;
    // categorical
    std::int32_t fixed_category = -1;
    std::uint64_t excluded = 0;
    // Boolean
    std::int8_t fixed_bool = -1;

    static DomainConstraint free_constraint() { return {}; }
    static DomainConstraint pin_number(double v) {
        DomainConstraint c;
        c.pinned = true;
        c.pin_value = v;
        return c;
    }
    static DomainConstraint interval(double lo, double hi) {
        DomainConstraint c;
        c.lo = lo;
        c.hi = hi;
        return c;
    }
    static DomainConstraint pin_category(std::int32_t cat) {
        DomainConstraint c;
        c.fixed_category = cat;
        return c;
    }
    static DomainConstraint pin_boolean(bool b) {
        DomainConstraint c;
        c.fixed_bool = b ? 1 : 0;
        return c;
    }

    bool excludes(std::int32_t cat) const { return (excluded >> cat) & 1u; }
};

/// Which outcomes of a condition are possible under a constraint.
struct BranchFeasibility {
    bool can_false = false;
    bool can_true = false;
};

BranchFeasibility branch_feasibility(const DomainConstraint& dc, const Condition& c,
                                     const Attribute& attr);

/// Constraint after taking the given outcome of the condition.
/// Precondition: that outcome is feasible.
DomainConstraint refine(const DomainConstraint& dc, const Condition& c, bool outcome);

/// Whether the constraint denotes at least one value of the attribute.
bool constraint_nonempty(const DomainConstraint& dc, const Attribute& attr);

/// A deterministic representative value satisfying the constraint:
/// pinned/fixed values as is; otherwise the interval midpoint (lo+1 / hi-1
/// at infinite ends, 0 when unconstrained), the smallest non-excluded
/// category, or Boolean 0.
Value representative_value(const DomainConstraint& dc, const Attribute& attr);

/// Per-attribute constraints, one per schema attribute.
struct Restriction {
    SchemaPtr schema;
    std::vector<DomainConstraint> constraints;

    static Restriction unconstrained(SchemaPtr schema);

    std::size_t size() const { return constraints.size(); }
    DomainConstraint& operator[](std::size_t i) { return constraints[i]; }
    const DomainConstraint& operator[](std::size_t i) const { return constraints[i]; }
};

/// Restriction pinning each kept characteristic of the term to its value and
/// leaving the other attributes unconstrained.
Restriction restriction_of_term(const SchemaPtr& schema, const Term& t);

/// Pins attribute i of r to the term value x[i] (in place).
void pin_attribute(Restriction& r, std::size_t i, const Value& v);

/// One recorded condition outcome along a witness path.
struct PathStep {
    std::int32_t node = -1;
    bool outcome = false;
};

/// A bound together with the valid root-to-leaf path attaining it.
struct BoundResult {
    double weight = 0.0;
    std::int32_t leaf = -1;
    std::vector<PathStep> path;
};

/// Minimal (dir == Min) or maximal (dir == Max) leaf weight over the valid
/// root-to-leaf paths of `tree` under `r`, with a witness path. Single pass,
/// each node visited at most once (`visited` counts them when given). Throws
/// ModelError if no path survives, which cannot happen for a validated model
/// and a nonempty restriction.
BoundResult tree_bound(const Tree& tree, const Restriction& r, BoundDir dir,
                       std::uint64_t* visited = nullptr);

/// tree_bound without the witness bookkeeping. `state` is used as scratch
/// and is restored before returning.
double tree_bound_weight(const Tree& tree, Restriction& state, BoundDir dir);

/// Sum of tree_bound over the forest's trees, in tree order.
double forest_bound(const Forest& forest, const Restriction& r, BoundDir dir);

/// An instance that satisfies `r`, follows the witness path, and therefore
/// attains the bound in that tree. Free attributes take representative
/// values of their path-refined constraints.
Instance materialize_witness(const Tree& tree, const Restriction& r, const BoundResult& bound);

/// An instance satisfying `r` built from representative values alone.
Instance materialize_representative(const Restriction& r);

/// Throws ModelError naming the first unsatisfiable root-to-leaf path, if
/// any. Used at model load; explanation code may then assume every path of
/// every tree is satisfiable.
void check_path_satisfiability(const Tree& tree, const AttributeSchema& schema,
                               const std::string& where);

} // namespace abex

#endif // ABEX_BOUNDS_HPP
