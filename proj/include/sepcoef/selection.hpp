// Copyright (c) 2026 sepcoef contributors
// SPDX-License-Identifier: Apache-2.0
//
// Model-free variable ranking by the separation coefficient: greedy
// forward selection and exhaustive best-subset search. Predictors are
// standardized by default so the nearest-neighbor search sees comparable
// ranges. Candidate evaluations inside one step use independent derived
// seeds, so tie-break draws cannot systematically favor column order.

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "sepcoef/core.hpp"
#include "sepcoef/estimators.hpp"
#include "sepcoef/parallel.hpp"
#include "sepcoef/rng.hpp"

namespace sepcoef {

struct SelectionOptions {
    bool standardize = true;
    LambdaVariant variant = LambdaVariant::nn_standard;
    std::size_t max_p = 20; // best-subset budget: 2^p - 1 evaluations
};

struct SelectionTrace {
    enum class Method { forward, best_subset };

    struct Step {
        std::size_t added_column;
        double lambda_after;
    };

    struct SubsetScore {
        std::vector<std::size_t> columns;
        double lambda;
    };

    Method method = Method::forward;
    std::vector<Step> steps;               // accepted steps, in order
    std::vector<std::size_t> selected;     // final variable set (ascending)
    std::vector<SubsetScore> all_subsets;  // best_subset only, ranked best-first
};

namespace detail_select {

inline double evaluate_subset(const ObservationSet& obs, std::vector<std::size_t> cols,
                              std::uint64_t eval_seed, LambdaVariant variant) {
    std::sort(cols.begin(), cols.end());
    return lambda_nn(obs.with_columns(cols), eval_seed, variant).value;
}

} // namespace detail_select

/// Greedy forward selection: at each step add the candidate maximizing the
/// coefficient, as long as it strictly improves the incumbent. Ties go to
/// the lowest column index. The first step always accepts its argmax (the
/// empty set has no coefficient), so a pure-noise input yields a single
/// step with a near-zero value.
inline SelectionTrace forward_select(const ObservationSet& obs, std::uint64_t seed,
                                     const SelectionOptions& opts = {}) {
    const ObservationSet work =
        opts.standardize
            ? preprocess(obs, {PreprocessSpec::Mode::standardize, false}).data
            : obs;
    const std::size_t p = work.p();

    SelectionTrace trace;
    trace.method = SelectionTrace::Method::forward;

    std::vector<std::size_t> current;
    std::vector<bool> in_set(p, false);
    double incumbent = -std::numeric_limits<double>::infinity();

    for (std::size_t step = 0; current.size() < p; ++step) {
        std::vector<std::size_t> candidates;
        for (std::size_t c = 0; c < p; ++c)
            if (!in_set[c]) candidates.push_back(c);

        std::vector<double> scores(candidates.size());
        parallel_for(0, candidates.size(), [&](std::size_t i) {
            auto cols = current;
            cols.push_back(candidates[i]);
            scores[i] = detail_select::evaluate_subset(
                work, std::move(cols), rng::derive_key(seed, rng::kSelection, step, candidates[i]),
                opts.variant);
        }, 1);

        std::size_t best = 0;
        for (std::size_t i = 1; i < candidates.size(); ++i)
            if (scores[i] > scores[best]) best = i; // strict >, keeps lowest index on ties

        if (!(scores[best] > incumbent)) break;
        incumbent = scores[best];
        in_set[candidates[best]] = true;
        current.push_back(candidates[best]);
        trace.steps.push_back({candidates[best], incumbent});
    }

    trace.selected = current;
    std::sort(trace.selected.begin(), trace.selected.end());
    return trace;
}

/// Exhaustive search over all non-empty predictor subsets. Returns the
/// full ranking (best first; ties broken toward smaller, lexicographically
/// earlier subsets) and the argmax as the selected set.
inline SelectionTrace best_subset_select(const ObservationSet& obs, std::uint64_t seed,
                                         const SelectionOptions& opts = {}) {
    const std::size_t p = obs.p();
    if (p > opts.max_p) throw SubsetBudgetExceeded(p, opts.max_p);

    const ObservationSet work =
        opts.standardize
            ? preprocess(obs, {PreprocessSpec::Mode::standardize, false}).data
            : obs;

    const std::size_t n_subsets = (std::size_t{1} << p) - 1;
    std::vector<double> scores(n_subsets);
    parallel_for(0, n_subsets, [&](std::size_t i) {
        const std::size_t mask = i + 1;
        std::vector<std::size_t> cols;
        for (std::size_t c = 0; c < p; ++c)
            if (mask & (std::size_t{1} << c)) cols.push_back(c);
        scores[i] = detail_select::evaluate_subset(
            work, std::move(cols), rng::derive_key(seed, rng::kSelection, 0, mask),
            opts.variant);
    }, 1);

    SelectionTrace trace;
    trace.method = SelectionTrace::Method::best_subset;
    trace.all_subsets.reserve(n_subsets);
    for (std::size_t i = 0; i < n_subsets; ++i) {
        const std::size_t mask = i + 1;
        SelectionTrace::SubsetScore s;
        for (std::size_t c = 0; c < p; ++c)
            if (mask & (std::size_t{1} << c)) s.columns.push_back(c);
        s.lambda = scores[i];
        trace.all_subsets.push_back(std::move(s));
    }
    std::stable_sort(trace.all_subsets.begin(), trace.all_subsets.end(),
                     [](const auto& a, const auto& b) {
                         if (a.lambda != b.lambda) return a.lambda > b.lambda;
                         if (a.columns.size() != b.columns.size())
                             return a.columns.size() < b.columns.size();
                         return a.columns < b.columns;
                     });
    trace.selected = trace.all_subsets.front().columns;
    return trace;
}

} // namespace sepcoef
