// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

/**
 * \file batch.hpp
 *
 * Batch explanation of an instance file against one model, with per-instance
 * time limits and a JSON report. Instances are processed by a worker pool;
 * per-instance seeds are derived from the batch seed and the instance index,
 * so results do not depend on scheduling. Failures are recorded per instance
 * and do not stop the batch.
 */

#ifndef ABEX_BATCH_HPP
#define ABEX_BATCH_HPP

#include <optional>
#include <string>
#include <vector>

#include "abex/model.hpp"
#include "abex/sr.hpp"
#include "abex/ts.hpp"

namespace abex {

enum class RunMode : std::uint8_t { Ts, Sr, TsSr, Check };

const char* to_string(RunMode mode);
std::optional<RunMode> run_mode_from_string(const std::string& s);

struct RunConfig {
    RunMode mode = RunMode::TsSr;
    std::uint64_t runs = 1000;
    std::uint64_t seed = 0;
    OrderingPolicy ts_policy = OrderingPolicy::Random;
    OrderingPolicy sr_policy = OrderingPolicy::InstanceOrder;
    /// Per-instance wall-clock limit.
    double timeout_seconds = 100.0;
    std::uint64_t oracle_max_nodes = 10'000'000;
    /// Worker threads; 0 picks the hardware concurrency.
    unsigned jobs = 0;
};

struct TsRecordStats {
    std::uint64_t runs = 0;
    std::size_t min_size = 0;
    std::size_t max_size = 0;
    double mean_size = 0.0;
};

struct InstanceRecord {
    std::size_t index = 0;
    std::int32_t predicted = 0;
    std::string mode;
    /// Kept characteristics, attribute name and value text, in schema order.
    std::vector<std::pair<std::string, std::string>> explanation;
    std::size_t explanation_size = 0;
    std::size_t attribute_count = 0;
    double reduction_rate = 0.0;
    std::optional<TsRecordStats> ts;
    std::uint64_t oracle_calls = 0;
    std::uint64_t oracle_timeouts = 0;
    std::uint64_t oracle_nodes = 0;
    std::optional<bool> minimal_proved;
    std::optional<bool> abductive; // check mode
    std::optional<double> margin;  // check mode
    bool timed_out = false;
    double elapsed_seconds = 0.0;
    std::string error; // empty on success
};

struct ReportAggregates {
    std::size_t instances = 0;
    std::size_t failures = 0;
    std::size_t timeouts = 0;
    double mean_size = 0.0;
    double mean_reduction_rate = 0.0;
    double mean_elapsed_seconds = 0.0;
    double mean_oracle_calls = 0.0;
};

/// Means run over the successful records; exact recomputation is asserted
/// in the tests.
ReportAggregates compute_aggregates(const std::vector<InstanceRecord>& records);

struct Report {
    std::string mode;
    std::uint64_t runs = 0;
    std::uint64_t seed = 0;
    double timeout_seconds = 0.0;
    std::vector<InstanceRecord> records;
    ReportAggregates aggregates;

    bool any_timeout() const;
    bool any_failure() const;
};

/// `terms` is required for Check mode (one kept-index list per instance) and
/// ignored otherwise.
Report run_batch(const BoostedTree& bt, const std::vector<Instance>& instances,
                 const RunConfig& cfg,
                 const std::vector<std::vector<std::int32_t>>* terms = nullptr);

std::string report_to_json(const Report& report);

} // namespace abex

#endif // ABEX_BATCH_HPP
