// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

/**
 * \file synthetic.hpp
 *
 * Model generators for fixtures, tests and benchmarks. Generated trees pick
 * conditions consistent with the constraints already on the path, so every
 * root-to-leaf path is satisfiable by construction and the models pass
 * validation.
 */

#ifndef ABEX_SYNTHETIC_HPP
#define ABEX_SYNTHETIC_HPP

#include <cstdint>

#include "abex/model.hpp"

namespace abex {

/// The n-attribute cancellation model: one forest of 2n depth-1 Boolean
/// trees in pairs T_i+ (leaves -0.5 / 0.5 on A_i) and T_i- (leaves
/// 0.5 / -0.5), so every instance gets total weight 0 and class 0. Per-tree
/// best instances disagree across a pair, which makes the full term the
/// unique tree-specific explanation of the all-zero instance even though the
/// empty term is its unique sufficient reason.
BoostedTree gen_discrepancy_model(std::int32_t n);

struct RandomModelConfig {
    std::int32_t numerical = 2;
    std::int32_t categorical = 1;
    std::int32_t boolean = 1;
    std::int32_t max_categories = 3;
    std::int32_t classes = 1;       // 1 = binary
    std::int32_t trees_per_class = 3;
    std::int32_t max_depth = 3;
    /// Numerical thresholds are drawn from {0, 1, ..., grid - 1}.
    std::int32_t threshold_grid = 4;
    double leaf_lo = -1.0;
    double leaf_hi = 1.0;
    /// When > 0, each tree tests a random subset of this many attributes,
    /// like per-tree feature subsampling in boosting libraries.
    std::int32_t attributes_per_tree = 0;
};

/// Deterministic random model for the given seed.
BoostedTree random_model(const RandomModelConfig& cfg, std::uint64_t seed);

/// Deterministic random instance conforming to the schema. Numerical values
/// land between and beyond grid thresholds.
Instance random_instance(const AttributeSchema& schema, std::uint64_t seed,
                         std::int32_t threshold_grid = 4);

} // namespace abex

#endif // ABEX_SYNTHETIC_HPP
