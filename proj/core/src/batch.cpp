// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

#include "abex/batch.hpp"

#include <atomic>
#include <chrono>
#include <thread>

#include <json.hpp>

#include "abex/instance_io.hpp"
#include "abex/rng.hpp"

namespace abex {

const char* to_string(RunMode mode) {
    switch (mode) {
        case RunMode::Ts: return "ts";
        case RunMode::Sr: return "sr";
        case RunMode::TsSr: return "ts-sr";
        case RunMode::Check: return "check";
    }
    return "?";
}

std::optional<RunMode> run_mode_from_string(const std::string& s) {
    if (s == "ts") return RunMode::Ts;
    if (s == "sr") return RunMode::Sr;
    if (s == "ts-sr") return RunMode::TsSr;
    if (s == "check") return RunMode::Check;
    return std::nullopt;
}

ReportAggregates compute_aggregates(const std::vector<InstanceRecord>& records) {
    ReportAggregates agg;
    agg.instances = records.size();
    std::size_t ok = 0;
    double size_sum = 0, reduction_sum = 0, elapsed_sum = 0, calls_sum = 0;
    for (const InstanceRecord& r : records) {
        if (!r.error.empty()) {
            ++agg.failures;
            continue;
        }
        ++ok;
        if (r.timed_out) ++agg.timeouts;
        size_sum += static_cast<double>(r.explanation_size);
        reduction_sum += r.reduction_rate;
        elapsed_sum += r.elapsed_seconds;
        calls_sum += static_cast<double>(r.oracle_calls);
    }
    if (ok > 0) {
        agg.mean_size = size_sum / static_cast<double>(ok);
        agg.mean_reduction_rate = reduction_sum / static_cast<double>(ok);
        agg.mean_elapsed_seconds = elapsed_sum / static_cast<double>(ok);
        agg.mean_oracle_calls = calls_sum / static_cast<double>(ok);
    }
    return agg;
}

bool Report::any_timeout() const {
    for (const InstanceRecord& r : records)
        if (r.timed_out) return true;
    return false;
}

bool Report::any_failure() const {
    for (const InstanceRecord& r : records)
        if (!r.error.empty()) return true;
    return false;
}

namespace {

void fill_explanation(InstanceRecord& rec, const AttributeSchema& schema, const Term& t) {
    rec.explanation_size = t.size();
    rec.attribute_count = t.attribute_count();
    rec.reduction_rate =
        1.0 - static_cast<double>(rec.explanation_size) / static_cast<double>(rec.attribute_count);
    for (std::size_t i = 0; i < t.kept.size(); ++i)
        if (t.kept[i])
            rec.explanation.emplace_back(schema[i].name, format_value(schema, i, t.instance[i]));
}

void process_instance(const BoostedTree& bt, const Instance& x, std::size_t index,
                      const RunConfig& cfg, const std::vector<std::vector<std::int32_t>>* terms,
                      InstanceRecord& rec) {
    const AttributeSchema& schema = *bt.schema;
    auto start = std::chrono::steady_clock::now();
    auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                std::chrono::duration<double>(cfg.timeout_seconds));
    rec.index = index;
    rec.mode = to_string(cfg.mode);
    validate_instance(schema, x);
    rec.predicted = classify(bt, x);

    std::uint64_t instance_seed = derive_stream(cfg.seed, index);
    OracleOptions oracle;
    oracle.budget.max_nodes = cfg.oracle_max_nodes;
    oracle.budget.wall_seconds = cfg.timeout_seconds;
    oracle.budget.deadline = deadline;

    switch (cfg.mode) {
        case RunMode::Ts: {
            TsConfig ts{cfg.runs, instance_seed, cfg.ts_policy};
            TsMultiResult r = ts_explain_multi(bt, x, ts);
            rec.ts = TsRecordStats{r.runs, r.min_size, r.max_size, r.mean_size};
            fill_explanation(rec, schema, r.best);
            break;
        }
        case RunMode::Sr: {
            Term seed_term = Term::full(x);
            Ordering ord = cfg.sr_policy == OrderingPolicy::Random
                               ? random_ordering(seed_term, instance_seed, 0)
                               : instance_ordering(seed_term);
            SrConfig sr;
            sr.oracle = oracle;
            SrResult r = sr_explain(bt, seed_term, ord, sr);
            rec.oracle_calls = r.oracle_calls;
            rec.oracle_timeouts = r.timeouts;
            rec.oracle_nodes = r.oracle_nodes;
            rec.minimal_proved = r.minimal_proved;
            rec.timed_out = r.timeouts > 0;
            fill_explanation(rec, schema, r.term);
            break;
        }
        case RunMode::TsSr: {
            PipelineConfig pipe;
            pipe.ts = TsConfig{cfg.runs, instance_seed, cfg.ts_policy};
            pipe.sr.oracle = oracle;
            pipe.sr_ordering = cfg.sr_policy;
            pipe.sr_seed = instance_seed;
            PipelineResult r = ts_sr_pipeline(bt, x, pipe);
            rec.ts = TsRecordStats{r.ts.runs, r.ts.min_size, r.ts.max_size, r.ts.mean_size};
            rec.oracle_calls = r.sr.oracle_calls;
            rec.oracle_timeouts = r.sr.timeouts;
            rec.oracle_nodes = r.sr.oracle_nodes;
            rec.minimal_proved = r.sr.minimal_proved;
            rec.timed_out = r.sr.timeouts > 0;
            fill_explanation(rec, schema, r.sr.term);
            break;
        }
        case RunMode::Check: {
            if (terms == nullptr || index >= terms->size())
                throw ModelError("check mode: no term for instance " + std::to_string(index));
            Term t = Term::of_indices(x, (*terms)[index]);
            OracleVerdict v = is_abductive(bt, t, oracle);
            rec.oracle_calls = 1;
            rec.oracle_nodes = v.nodes_explored;
            rec.timed_out = v.status == OracleStatus::Timeout;
            if (rec.timed_out) ++rec.oracle_timeouts;
            if (!rec.timed_out) {
                rec.abductive = v.abductive;
                rec.margin = v.optimal_margin;
            }
            fill_explanation(rec, schema, t);
            break;
        }
    }
    rec.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

Report run_batch(const BoostedTree& bt, const std::vector<Instance>& instances,
                 const RunConfig& cfg, const std::vector<std::vector<std::int32_t>>* terms) {
    if (cfg.mode == RunMode::Check) {
        if (terms == nullptr)
            throw ModelError("check mode needs a terms file");
        if (terms->size() != instances.size())
            throw ModelError("terms file has " + std::to_string(terms->size()) +
                             " entries for " + std::to_string(instances.size()) + " instances");
    }

    Report report;
    report.mode = to_string(cfg.mode);
    report.runs = cfg.runs;
    report.seed = cfg.seed;
    report.timeout_seconds = cfg.timeout_seconds;
    report.records.resize(instances.size());

    unsigned jobs = cfg.jobs != 0 ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, std::max<std::size_t>(instances.size(), 1));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= instances.size()) return;
            InstanceRecord& rec = report.records[i];
            try {
                process_instance(bt, instances[i], i, cfg, terms, rec);
            } catch (const std::exception& e) {
                rec.index = i;
                rec.mode = to_string(cfg.mode);
                rec.error = e.what();
            }
        }
    };

    if (jobs <= 1 || instances.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    report.aggregates = compute_aggregates(report.records);
    return report;
}

std::string report_to_json(const Report& report) {
    nlohmann::json j;
    j["mode"] = report.mode;
    j["runs"] = report.runs;
    j["seed"] = report.seed;
    j["timeout_seconds"] = report.timeout_seconds;
    nlohmann::json records = nlohmann::json::array();
    for (const InstanceRecord& r : report.records) {
        nlohmann::json jr;
        jr["index"] = r.index;
        jr["mode"] = r.mode;
        if (!r.error.empty()) {
            jr["error"] = r.error;
            records.push_back(std::move(jr));
            continue;
        }
        jr["predicted"] = r.predicted;
        nlohmann::json expl = nlohmann::json::array();
        for (const auto& [name, value] : r.explanation)
            expl.push_back({{"attribute", name}, {"value", value}});
        jr["explanation"] = std::move(expl);
        jr["size"] = r.explanation_size;
        jr["attributes"] = r.attribute_count;
        jr["reduction_rate"] = r.reduction_rate;
        if (r.ts) {
            jr["ts"] = {{"runs", r.ts->runs},
                        {"min_size", r.ts->min_size},
                        {"max_size", r.ts->max_size},
                        {"mean_size", r.ts->mean_size}};
        }
        jr["oracle"] = {{"calls", r.oracle_calls},
                        {"timeouts", r.oracle_timeouts},
                        {"nodes", r.oracle_nodes}};
        if (r.minimal_proved) jr["minimal_proved"] = *r.minimal_proved;
        if (r.abductive) jr["abductive"] = *r.abductive;
        if (r.margin) jr["margin"] = *r.margin;
        jr["timed_out"] = r.timed_out;
        jr["elapsed_seconds"] = r.elapsed_seconds;
        records.push_back(std::move(jr));
    }
    j["records"] = std::move(records);
    j["aggregates"] = {{"instances", report.aggregates.instances},
                       {"failures", report.aggregates.failures},
                       {"timeouts", report.aggregates.timeouts},
                       {"mean_size", report.aggregates.mean_size},
                       {"mean_reduction_rate", report.aggregates.mean_reduction_rate},
                       {"mean_elapsed_seconds", report.aggregates.mean_elapsed_seconds},
                       {"mean_oracle_calls", report.aggregates.mean_oracle_calls}};
    return j.dump(2);
}

} // namespace abex
