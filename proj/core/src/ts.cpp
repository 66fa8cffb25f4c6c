// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

#include "abex/ts.hpp"

#include <algorithm>
#include <limits>

#include "abex/rng.hpp"

namespace abex {

Ordering instance_ordering(const Term& t) {
    return t.kept_indices();
}

Ordering random_ordering(const Term& t, std::uint64_t seed, std::uint64_t run) {
    Ordering ord = t.kept_indices();
    std::mt19937_64 rng = make_rng(seed, run);
    deterministic_shuffle(ord, rng);
    return ord;
}

SufficiencyBound ts_bound(const BoostedTree& bt, const Restriction& r, std::int32_t cls) {
    if (bt.is_binary()) {
        const Forest& f = bt.forests.front();
        if (cls == 1) {
            double value = forest_bound(f, r, BoundDir::Min);
            return {value, value > 0.0};
        }
        double value = -forest_bound(f, r, BoundDir::Max);
        return {value, value >= 0.0};
    }
    const Forest* predicted = nullptr;
    for (const Forest& f : bt.forests)
        if (f.class_id == cls) predicted = &f;
    if (predicted == nullptr) throw ModelError("class " + std::to_string(cls) + " has no forest");
    double own = forest_bound(*predicted, r, BoundDir::Min);
    double rival = -std::numeric_limits<double>::infinity();
    for (const Forest& f : bt.forests) {
        if (f.class_id == cls) continue;
        rival = std::max(rival, forest_bound(f, r, BoundDir::Max));
    }
    double value = own - rival;
    return {value, value > 0.0};
}

bool ts_test(const BoostedTree& bt, const Term& t, std::int32_t cls) {
    if (classify(bt, t.instance) != cls)
        throw ModelError("ts_test: class " + std::to_string(cls) +
                         " is not the class of the term's instance");
    return ts_bound(bt, restriction_of_term(bt.schema, t), cls).holds;
}

Term ts_explain(const BoostedTree& bt, const Instance& x, const Ordering& ord, TsStats* stats) {
    std::int32_t cls = classify(bt, x);
    Term t = Term::full(x);
    Restriction r = restriction_of_term(bt.schema, t);
    for (std::int32_t i : ord) {
        if (i < 0 || static_cast<std::size_t>(i) >= x.size())
            throw ModelError("ts_explain: ordering index " + std::to_string(i) + " out of range");
        std::size_t attr = static_cast<std::size_t>(i);
        DomainConstraint saved = r[attr];
        r[attr] = DomainConstraint::free_constraint();
        if (stats) ++stats->tests;
        if (ts_bound(bt, r, cls).holds)
            t.kept[attr] = false;
        else
            r[attr] = saved;
    }
    return t;
}

TsMultiResult ts_explain_multi(const BoostedTree& bt, const Instance& x, const TsConfig& cfg,
                               TsStats* stats) {
    if (cfg.runs == 0) throw ModelError("ts_explain_multi: runs must be >= 1");
    Term full = Term::full(x);
    TsMultiResult out;
    out.runs = cfg.runs;
    out.min_size = std::numeric_limits<std::size_t>::max();
    double size_sum = 0.0;
    for (std::uint64_t run = 0; run < cfg.runs; ++run) {
        Ordering ord = cfg.policy == OrderingPolicy::Random
                           ? random_ordering(full, cfg.seed, run)
                           : instance_ordering(full);
        Term t = ts_explain(bt, x, ord, stats);
        std::size_t size = t.size();
        size_sum += static_cast<double>(size);
        out.min_size = std::min(out.min_size, size);
        out.max_size = std::max(out.max_size, size);
        if (run == 0 || term_less(t, out.best)) out.best = std::move(t);
    }
    out.mean_size = size_sum / static_cast<double>(cfg.runs);
    return out;
}

} // namespace abex
