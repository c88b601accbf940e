// Copyright (c) 2026 sepcoef contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sepcoef/inference.hpp"
#include "sepcoef/rng.hpp"

using namespace sepcoef;

namespace {
ObservationSet uniforms(std::size_t n, std::uint64_t seed, bool y_equals_x) {
    CounterRng rng(rng::mix64(seed));
    Matrix x(n, 1);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = rng.uniform01();
        y[i] = y_equals_x ? x(i, 0) : rng.uniform01();
    }
    return ObservationSet(std::move(x), std::move(y));
}
} // namespace

TEST_CASE("replaying the seed reproduces the replicate vector", "[inference]") {
    const auto obs = uniforms(80, 1, false);
    const auto a = permutation_test(obs, 50, 99);
    const auto b = permutation_test(obs, 50, 99);
    CHECK(a.replicates == b.replicates);
    CHECK(a.observed == b.observed);
    CHECK(a.p_value == b.p_value);
}

TEST_CASE("p-value is self-consistent with stored replicates", "[inference]") {
    const auto obs = uniforms(60, 2, false);
    const auto res = permutation_test(obs, 73, 5);
    std::size_t count = 0;
    for (double r : res.replicates)
        if (r >= res.observed) ++count;
    CHECK(res.p_value == static_cast<double>(count) / 73.0);
    CHECK((res.p_value >= 0.0 && res.p_value <= 1.0));

    const auto corrected = permutation_test(obs, 73, 5, LambdaVariant::nn_standard, true);
    CHECK(corrected.p_value == static_cast<double>(count + 1) / 74.0);
}

TEST_CASE("perfect dependence defeats every permutation", "[inference]") {
    const auto obs = uniforms(100, 3, true); // y = x, continuous
    const auto res = permutation_test(obs, 500, 77);
    CHECK(res.p_value == 0.0);
    CHECK(res.observed > 0.9);
}

TEST_CASE("degenerate predictors propagate the estimator error", "[inference]") {
    Matrix x(4, 1, {3, 3, 3, 3});
    const ObservationSet obs(std::move(x), {1, 2, 3, 4});
    CHECK_THROWS_AS(permutation_test(obs, 10, 0), AllPredictorsTied);
}

TEST_CASE("observed statistic ranks uniformly among replicates under the null",
          "[inference][statistical]") {
    // decile counts of the p-value over independent outer replications;
    // chi-square GOF with 9 df at the 0.001 level is 27.88
    const std::size_t outer = 200, n_perms = 99;
    std::vector<int> decile(10, 0);
    for (std::uint64_t r = 0; r < outer; ++r) {
        const auto obs = uniforms(80, 1000 + r, false);
        const auto res = permutation_test(obs, n_perms, 31 * r + 7);
        auto d = static_cast<std::size_t>(res.p_value * 10.0);
        if (d > 9) d = 9;
        ++decile[d];
    }
    double chi2 = 0.0;
    const double expect = outer / 10.0;
    for (int c : decile) chi2 += (c - expect) * (c - expect) / expect;
    CHECK(chi2 < 27.88);
}
