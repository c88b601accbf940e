// Copyright (c) 2026 sepcoef contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "sepcoef/core.hpp"
#include "sepcoef/estimators.hpp"
#include "sepcoef/parallel.hpp"
#include "sepcoef/rng.hpp"

namespace sepcoef {

/// Outcome of the permutation test of H0: all conditional distributions of
/// the response coincide. p_value = #{replicate >= observed} / N, the
/// uncorrected counting form; the +1/(N+1) variant sits behind a flag.
struct PermutationResult {
    double observed = 0.0;
    std::vector<double> replicates;
    double p_value = 0.0;
    std::size_t n_perms = 0;
    std::uint64_t seed = 0;
    bool plus_one_correction = false;
};

/// Permute the predictor rows (kept intact as vectors) against the fixed
/// response N times and re-estimate. Replicates run in parallel; each one
/// derives its permutation and estimator seeds from (seed, replicate), so
/// the replicate vector is reproducible and order-independent.
inline PermutationResult permutation_test(const ObservationSet& obs, std::size_t n_perms,
                                          std::uint64_t seed,
                                          LambdaVariant variant = LambdaVariant::nn_standard,
                                          bool plus_one_correction = false) {
    if (n_perms < 1) throw std::invalid_argument("permutation_test: need n_perms >= 1");

    PermutationResult result;
    result.n_perms = n_perms;
    result.seed = seed;
    result.plus_one_correction = plus_one_correction;
    result.observed = lambda_nn(obs, rng::derive_key(seed, rng::kObserved), variant).value;

    result.replicates.resize(n_perms);
    parallel_for(0, n_perms, [&](std::size_t k) {
        CounterRng perm_rng(rng::derive_key(seed, rng::kPermutation, k, 0));
        const auto perm = random_permutation(obs.n(), perm_rng);
        ObservationSet permuted(obs.x().permute_rows(perm), obs.y(), obs.column_names());
        result.replicates[k] =
            lambda_nn(permuted, rng::derive_key(seed, rng::kPermutation, k, 1), variant).value;
    }, 1);

    std::size_t count = 0;
    for (double r : result.replicates)
        if (r >= result.observed) ++count;
    result.p_value = plus_one_correction
                         ? static_cast<double>(count + 1) / static_cast<double>(n_perms + 1)
                         : static_cast<double>(count) / static_cast<double>(n_perms);
    return result;
}

} // namespace sepcoef
