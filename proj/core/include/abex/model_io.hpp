// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

/**
 * \file model_io.hpp
 *
 * Model serialization. Two input formats are supported:
 *
 *  - the native JSON format (schema, forests, node arrays; see the README
 *    for the full description), round-trippable via serialize_native_model;
 *
 *  - the XGBoost JSON trees dump (`get_dump(dump_format="json")`): an array
 *    of trees with split / split_condition / yes / no / leaf fields. Splits
 *    test `value < split_condition` with the "yes" child on true; they are
 *    mapped to strict greater-than conditions on the largest double below
 *    the threshold, which is pointwise equivalent. For multi-class boosters
 *    tree k is assigned to class (k mod num_classes) + 1. A nonzero
 *    base_score is folded in as one constant single-leaf tree per forest.
 *
 * Every loaded model is validated (schema consistency, path satisfiability)
 * before being returned.
 */

#ifndef ABEX_MODEL_IO_HPP
#define ABEX_MODEL_IO_HPP

#include <string>

#include "abex/model.hpp"

namespace abex {

enum class ModelFormat : std::uint8_t { NativeJson, XgboostDump };

struct XgbLoadOptions {
    /// 1 = binary booster; m >= 2 = multi-class with round-robin trees.
    std::int32_t num_classes = 1;
    /// Raw-margin bias added per forest (0 adds nothing).
    double base_score = 0.0;
    /// Attribute count; 0 infers it from the highest feature id seen.
    std::int32_t num_features = 0;
    std::int32_t tie_class = 1;
};

BoostedTree parse_native_model(const std::string& json_text);
BoostedTree parse_xgboost_dump(const std::string& json_text, const XgbLoadOptions& opts = {});

BoostedTree load_model(const std::string& path, ModelFormat format,
                       const XgbLoadOptions& opts = {});

std::string serialize_native_model(const BoostedTree& bt);
void save_model(const BoostedTree& bt, const std::string& path);

/// Reads a whole file; throws ModelError on I/O failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

} // namespace abex

#endif // ABEX_MODEL_IO_HPP
