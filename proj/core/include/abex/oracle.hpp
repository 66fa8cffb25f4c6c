// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

/**
 * \file oracle.hpp
 *
 * Exact decision of "is this term an abductive explanation": does every
 * instance extending the term receive the same class? The decision is
 * coNP-complete for boosted trees, so both procedures here are exponential
 * in the worst case. They rest on the cell decomposition of instance space:
 * within a cell every condition of the model has a fixed truth value, so the
 * model is constant there and one representative per cell decides the whole
 * cell.
 *
 * is_abductive_bruteforce() enumerates every cell consistent with the term.
 * is_abductive() runs a branch-and-bound over restrictions, pruning with the
 * per-tree sufficiency bound; it terminates early with a counterexample as
 * soon as a cell of a different class is found.
 *
 * The margin of a cell is the signed quantity that certifies the class:
 * w(F, .) for a positive binary instance, -w(F, .) for a negative one, and
 * w(F^i, .) - max of the other forest weights in the multi-class case.
 */

#ifndef ABEX_ORACLE_HPP
#define ABEX_ORACLE_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "abex/bounds.hpp"
#include "abex/model.hpp"

namespace abex {

/// Cell decomposition of one attribute's domain, induced by the conditions
/// appearing in the model. Numerical: intervals between consecutive distinct
/// thresholds. Categorical: one cell per tested category, plus one "other"
/// cell when some declared category is untested. Boolean: two cells when
/// tested, one otherwise.
struct AttributeCells {
    std::vector<double> thresholds;   // sorted, distinct
    std::vector<std::int32_t> tested; // sorted category ids
    bool has_other = false;
    bool bool_tested = false;

    std::size_t cell_count(const Attribute& attr) const;

    /// Representative value of the given cell.
    Value cell_value(const Attribute& attr, std::size_t cell) const;

    /// Cell containing the given value.
    std::size_t cell_of(const Attribute& attr, const Value& v) const;
};

struct ConditionUniverse {
    std::vector<AttributeCells> attributes;
};

/// Collects and deduplicates the conditions of the model per attribute.
ConditionUniverse build_universe(const BoostedTree& bt);

enum class OracleStatus : std::uint8_t { Proved, Disproved, Timeout };

struct OracleVerdict {
    /// Meaningful only when status != Timeout.
    bool abductive = false;
    std::optional<Instance> counterexample;
    /// Proved: the minimum cell margin (exact-margin mode and brute force),
    /// or a certified positive lower bound on it (default search mode).
    /// Disproved: the margin of the counterexample's cell.
    double optimal_margin = 0.0;
    std::uint64_t nodes_explored = 0;
    OracleStatus status = OracleStatus::Timeout;

    bool proved() const { return status == OracleStatus::Proved; }
    bool disproved() const { return status == OracleStatus::Disproved; }
};

struct OracleBudget {
    std::uint64_t max_nodes = 10'000'000;
    double wall_seconds = 100.0;
    /// Hard deadline; effective limit is the earlier of this and wall_seconds.
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct OracleOptions {
    OracleBudget budget{};
    /// Compute the exact minimum margin on proved verdicts. Disables the
    /// root shortcut and weakens pruning to branches that cannot improve the
    /// incumbent; slower, but optimal_margin then equals the brute-force
    /// minimum.
    bool exact_margin = false;
    /// Return Proved immediately when the term already passes the per-tree
    /// sufficiency test (sound; ignored in exact-margin mode).
    bool root_shortcut = true;
};

/// Exhaustive check over every cell consistent with the term. Throws
/// ModelError when the product of free-attribute cell counts exceeds
/// `cell_cap`; use is_abductive() in that case.
OracleVerdict is_abductive_bruteforce(const BoostedTree& bt, const Term& t,
                                      std::uint64_t cell_cap = 1ull << 24);

/// Branch-and-bound over restrictions extending the term. Branches split a
/// free attribute's cell set; the attribute is chosen by a one-step
/// lookahead on the bound improvement, and the branch holding the instance's
/// own value is explored last. A branch is pruned when its sufficiency bound
/// already certifies the class. Exhaustion proves the term; any evaluated
/// cell of a different class disproves it with a counterexample.
OracleVerdict is_abductive(const BoostedTree& bt, const Term& t,
                           const OracleOptions& opts = {});

} // namespace abex

#endif // ABEX_ORACLE_HPP
