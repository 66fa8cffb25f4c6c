// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

// Batch explanation CLI. Loads a model and an instance file, runs the
// selected explanation mode per instance, and writes a JSON report.
// Exit codes: 0 full success, 2 when any per-instance timeout occurred,
// 1 on errors.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "abex/batch.hpp"
#include "abex/instance_io.hpp"
#include "abex/model_io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"abductive explanations for boosted-tree classifiers"};
    app.name("explain");

    std::string model_path, instances_path, terms_path, out_path, mode_str = "ts-sr",
                                                                  format_str = "native";
    abex::RunConfig cfg;
    abex::XgbLoadOptions xgb;
    std::int32_t tie_class = 0;
    std::string ts_ordering = "random", sr_ordering = "instance";

    app.add_option("--model", model_path, "model file")->required();
    app.add_option("--instances", instances_path, "CSV instance file")->required();
    app.add_option("--mode", mode_str, "ts | sr | ts-sr | check")
        ->check(CLI::IsMember({"ts", "sr", "ts-sr", "check"}));
    app.add_option("--runs", cfg.runs, "TS orderings per instance (default 1000)");
    app.add_option("--seed", cfg.seed, "base seed");
    app.add_option("--timeout", cfg.timeout_seconds, "per-instance time limit in seconds");
    app.add_option("--tie-class", tie_class, "override the model's tie class");
    app.add_option("--format", format_str, "native | xgb")
        ->check(CLI::IsMember({"native", "xgb"}));
    app.add_option("--out", out_path, "report path (default: stdout)");
    app.add_option("--terms", terms_path, "terms file, required for check mode");
    app.add_option("--classes", xgb.num_classes, "xgb: class count (1 = binary)");
    app.add_option("--base-score", xgb.base_score, "xgb: raw-margin bias");
    app.add_option("--xgb-features", xgb.num_features, "xgb: attribute count override");
    app.add_option("--oracle-nodes", cfg.oracle_max_nodes, "oracle node budget per call");
    app.add_option("--jobs", cfg.jobs, "worker threads (0 = hardware)");
    app.add_option("--ts-ordering", ts_ordering, "random | instance")
        ->check(CLI::IsMember({"random", "instance"}));
    app.add_option("--sr-ordering", sr_ordering, "instance | random")
        ->check(CLI::IsMember({"random", "instance"}));

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.mode = *abex::run_mode_from_string(mode_str);
        cfg.ts_policy = ts_ordering == "random" ? abex::OrderingPolicy::Random
                                                : abex::OrderingPolicy::InstanceOrder;
        cfg.sr_policy = sr_ordering == "random" ? abex::OrderingPolicy::Random
                                                : abex::OrderingPolicy::InstanceOrder;
        if (tie_class != 0) xgb.tie_class = tie_class;

        abex::BoostedTree bt = abex::load_model(
            model_path,
            format_str == "native" ? abex::ModelFormat::NativeJson : abex::ModelFormat::XgboostDump,
            xgb);
        if (tie_class != 0) {
            bt.tie_class = tie_class;
            abex::validate_model(bt);
        }

        std::vector<abex::Instance> instances =
            abex::load_instances_csv(instances_path, *bt.schema);
        std::vector<std::vector<std::int32_t>> terms;
        if (cfg.mode == abex::RunMode::Check) {
            if (terms_path.empty()) {
                std::cerr << "check mode needs --terms\n";
                return 1;
            }
            terms = abex::load_terms_json(terms_path, *bt.schema);
        }

        abex::Report report = abex::run_batch(bt, instances, cfg,
                                              cfg.mode == abex::RunMode::Check ? &terms : nullptr);
        std::string json = abex::report_to_json(report);
        if (out_path.empty())
            std::cout << json << "\n";
        else
            abex::write_file(out_path, json);

        if (report.any_failure()) {
            for (const abex::InstanceRecord& r : report.records)
                if (!r.error.empty())
                    std::cerr << "instance " << r.index << ": " << r.error << "\n";
            return 1;
        }
        return report.any_timeout() ? 2 : 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
