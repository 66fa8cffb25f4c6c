// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

/**
 * \file ts.hpp
 *
 * Tree-specific explanations. The sufficiency test compares per-tree bounds
 * instead of joint worst instances: for the predicted class the sum of
 * worst-instance weights must beat, for every other class, the sum of
 * best-instance weights (sign tests in the binary case). The test is sound —
 * whenever it holds, the term is an abductive explanation — but incomplete,
 * since different trees need not share a worst instance. ts_explain greedily
 * drops characteristics that keep the test true; the result passes the test
 * while no proper subset obtained by dropping one more characteristic does.
 */

#ifndef ABEX_TS_HPP
#define ABEX_TS_HPP

#include <cstdint>
#include <vector>

#include "abex/bounds.hpp"
#include "abex/model.hpp"

namespace abex {

/// Elimination order: a permutation of the candidate attribute indices.
using Ordering = std::vector<std::int32_t>;

/// Identity ordering over a term's kept indices.
Ordering instance_ordering(const Term& t);

/// Seed-derived random permutation of a term's kept indices; `run` selects
/// the substream, so runs replay independently of evaluation order.
Ordering random_ordering(const Term& t, std::uint64_t seed, std::uint64_t run);

enum class OrderingPolicy : std::uint8_t { InstanceOrder, Random };

struct TsConfig {
    std::uint64_t runs = 1000;
    std::uint64_t seed = 0;
    OrderingPolicy policy = OrderingPolicy::Random;
};

/// Margin of the tree-specific sufficiency test on a restriction, and
/// whether the test holds:
///  - binary, class 1: value = sum of per-tree minima, holds iff value > 0;
///  - binary, class 0: value = -(sum of per-tree maxima), holds iff value >= 0;
///  - multi-class: value = min-bound of the predicted class minus the largest
///    max-bound of any other class, holds iff value > 0.
/// The value is also an admissible lower bound on the true margin of every
/// instance satisfying the restriction, which is what the oracle prunes with.
struct SufficiencyBound {
    double value = 0.0;
    bool holds = false;
};

SufficiencyBound ts_bound(const BoostedTree& bt, const Restriction& r, std::int32_t cls);

/// The incomplete implicant test for a term. `cls` must be the class
/// assigned to the term's instance; throws ModelError otherwise.
bool ts_test(const BoostedTree& bt, const Term& t, std::int32_t cls);

/// Per-call instrumentation; counters are cumulative across the call.
struct TsStats {
    std::uint64_t tests = 0;
};

/// Greedy elimination over `ord` starting from the full term of x.
/// Each candidate is dropped iff the sufficiency test still holds without
/// it. The result is a tree-specific explanation whenever the test holds on
/// the full term (always, outside of exact weight ties); it is abductive in
/// every case, the full term being its own trivial explanation.
Term ts_explain(const BoostedTree& bt, const Instance& x, const Ordering& ord,
                TsStats* stats = nullptr);

struct TsMultiResult {
    Term best;
    std::size_t min_size = 0;
    std::size_t max_size = 0;
    double mean_size = 0.0;
    std::uint64_t runs = 0;
};

/// Runs ts_explain under cfg.runs orderings and returns a shortest result;
/// ties go to the lexicographically smallest kept-index set. Deterministic
/// for a fixed seed.
TsMultiResult ts_explain_multi(const BoostedTree& bt, const Instance& x, const TsConfig& cfg,
                               TsStats* stats = nullptr);

} // namespace abex

#endif // ABEX_TS_HPP
