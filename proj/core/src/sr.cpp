// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

#include "abex/sr.hpp"

namespace abex {

SrResult sr_explain(const BoostedTree& bt, const Term& seed, const Ordering& ord,
                    const SrConfig& cfg) {
    auto start = std::chrono::steady_clock::now();
    SrResult out;
    out.term = seed;

    if (cfg.validate_seed && seed.size() < seed.attribute_count()) {
        OracleVerdict check = is_abductive(bt, seed, cfg.oracle);
        if (check.disproved())
            throw ModelError("sr_explain: seed term is not an abductive explanation");
        out.oracle_nodes += check.nodes_explored;
        // a timeout here is tolerated; minimization stays sound regardless
    }

    bool any_timeout = false;
    for (std::int32_t i : ord) {
        if (i < 0 || static_cast<std::size_t>(i) >= seed.attribute_count())
            throw ModelError("sr_explain: ordering index " + std::to_string(i) + " out of range");
        if (!out.term.kept[static_cast<std::size_t>(i)])
            throw ModelError("sr_explain: ordering names a characteristic the seed does not keep");
        Term candidate = out.term.without(static_cast<std::size_t>(i));
        OracleVerdict verdict = is_abductive(bt, candidate, cfg.oracle);
        ++out.oracle_calls;
        out.oracle_nodes += verdict.nodes_explored;
        switch (verdict.status) {
            case OracleStatus::Proved:
                out.term = std::move(candidate);
                break;
            case OracleStatus::Disproved:
                break; // the characteristic is needed
            case OracleStatus::Timeout:
                ++out.timeouts;
                any_timeout = true;
                break; // keep it; minimality is no longer certain
        }
    }
    out.minimal_proved = !any_timeout;
    out.elapsed = std::chrono::steady_clock::now() - start;
    return out;
}

PipelineResult ts_sr_pipeline(const BoostedTree& bt, const Instance& x,
                              const PipelineConfig& cfg) {
    PipelineResult out;
    auto ts_start = std::chrono::steady_clock::now();
    out.ts = ts_explain_multi(bt, x, cfg.ts);
    out.ts_elapsed = std::chrono::steady_clock::now() - ts_start;

    Ordering ord = cfg.sr_ordering == OrderingPolicy::Random
                       ? random_ordering(out.ts.best, cfg.sr_seed, 0)
                       : instance_ordering(out.ts.best);
    out.sr = sr_explain(bt, out.ts.best, ord, cfg.sr);
    return out;
}

} // namespace abex
