// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

/**
 * \file sr.hpp
 *
 * Sufficient reasons: subset-minimal abductive explanations, computed by
 * deletion-based greedy minimization on top of the exact oracle. Each
 * characteristic is dropped iff the term without it is still proved
 * abductive; disproofs established against a superset stay valid for every
 * subset, so one pass yields a subset-minimal result whenever no oracle call
 * timed out. Seeding the pass with a tree-specific explanation instead of
 * the full term removes most characteristics before the first oracle call.
 */

#ifndef ABEX_SR_HPP
#define ABEX_SR_HPP

#include <chrono>
#include <cstdint>

#include "abex/model.hpp"
#include "abex/oracle.hpp"
#include "abex/ts.hpp"

namespace abex {

struct SrResult {
    Term term;
    /// True iff every kept characteristic's removal was disproved with no
    /// timeout, i.e. the term is a proved sufficient reason.
    bool minimal_proved = false;
    /// Removal tests issued (the upfront seed validation is not counted).
    std::uint64_t oracle_calls = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t oracle_nodes = 0;
    std::chrono::duration<double> elapsed{0.0};
};

struct SrConfig {
    OracleOptions oracle{};
    /// Validate that the seed itself is abductive before minimizing.
    /// Skipped automatically for a full term, which is trivially abductive.
    bool validate_seed = true;
};

/// Greedy minimization of `seed` along `ord` (a permutation of the seed's
/// kept indices). A timeout keeps the characteristic and clears
/// minimal_proved, so the result is abductive in every case. Throws
/// ModelError when the seed itself is disproved.
SrResult sr_explain(const BoostedTree& bt, const Term& seed, const Ordering& ord,
                    const SrConfig& cfg = {});

struct PipelineConfig {
    TsConfig ts{};
    SrConfig sr{};
    OrderingPolicy sr_ordering = OrderingPolicy::InstanceOrder;
    std::uint64_t sr_seed = 0;
};

struct PipelineResult {
    TsMultiResult ts;
    SrResult sr;
    std::chrono::duration<double> ts_elapsed{0.0};
};

/// Runs ts_explain_multi, then sr_explain seeded with the shortest
/// tree-specific explanation. The final term is a subset of the tree-specific
/// one, which is a subset of the full term.
PipelineResult ts_sr_pipeline(const BoostedTree& bt, const Instance& x,
                              const PipelineConfig& cfg = {});

} // namespace abex

#endif // ABEX_SR_HPP
