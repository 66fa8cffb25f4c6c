// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

#include <benchmark/benchmark.h>

#include "abex/bounds.hpp"
#include "abex/oracle.hpp"
#include "abex/synthetic.hpp"
#include "abex/ts.hpp"

namespace {

abex::BoostedTree bench_model(std::int64_t trees) {
    abex::RandomModelConfig cfg;
    cfg.numerical = 12;
    cfg.categorical = 2;
    cfg.boolean = 2;
    cfg.trees_per_class = static_cast<std::int32_t>(trees);
    cfg.max_depth = 4;
    cfg.threshold_grid = 6;
    return abex::random_model(cfg, 7);
}

void BM_Classify(benchmark::State& state) {
    abex::BoostedTree bt = bench_model(state.range(0));
    abex::Instance x = abex::random_instance(*bt.schema, 11, 6);
    for (auto _ : state) benchmark::DoNotOptimize(abex::classify(bt, x));
}
BENCHMARK(BM_Classify)->Arg(25)->Arg(50)->Arg(100)->Arg(200);

void BM_ForestBound(benchmark::State& state) {
    abex::BoostedTree bt = bench_model(state.range(0));
    abex::Instance x = abex::random_instance(*bt.schema, 11, 6);
    abex::Term t = abex::Term::full(x);
    t.kept[0] = t.kept[3] = false;
    abex::Restriction r = abex::restriction_of_term(bt.schema, t);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            abex::forest_bound(bt.forests.front(), r, abex::BoundDir::Min));
}
BENCHMARK(BM_ForestBound)->Arg(50)->Arg(200);

void BM_TsExplain(benchmark::State& state) {
    abex::BoostedTree bt = bench_model(state.range(0));
    abex::Instance x = abex::random_instance(*bt.schema, 11, 6);
    abex::Ordering ord = abex::instance_ordering(abex::Term::full(x));
    for (auto _ : state) benchmark::DoNotOptimize(abex::ts_explain(bt, x, ord));
}
BENCHMARK(BM_TsExplain)->Arg(25)->Arg(50)->Arg(100)->Arg(200);

void BM_Oracle(benchmark::State& state) {
    abex::BoostedTree bt = bench_model(25);
    abex::Instance x = abex::random_instance(*bt.schema, 11, 6);
    abex::Term t = abex::Term::full(x);
    for (std::size_t i = 0; i < t.kept.size(); i += 2) t.kept[i] = false;
    for (auto _ : state) benchmark::DoNotOptimize(abex::is_abductive(bt, t));
}
BENCHMARK(BM_Oracle);

} // namespace

BENCHMARK_MAIN();
