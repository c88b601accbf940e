// Copyright (c) 2026 sepcoef contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "sepcoef/core.hpp"
#include "sepcoef/rng.hpp"

using namespace sepcoef;

namespace {
ObservationSet make(std::vector<double> xcol, std::vector<double> y) {
    const std::size_t n = xcol.size();
    Matrix x(n, 1, std::move(xcol));
    return ObservationSet(std::move(x), std::move(y));
}
} // namespace

TEST_CASE("construction enforces shape and finiteness", "[core]") {
    CHECK_THROWS_AS(make({1.0}, {1.0}), std::invalid_argument);          // n < 2
    CHECK_THROWS_AS(make({1.0, 2.0}, {1.0}), std::invalid_argument);     // length mismatch
    CHECK_THROWS_AS(make({1.0, NAN}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(make({1.0, 2.0}, {1.0, INFINITY}), std::invalid_argument);
    CHECK_NOTHROW(make({0.0, 1.0}, {1.0, 2.0})); // minimal valid 2x1 set
}

TEST_CASE("validate reports degeneracy instead of throwing", "[core]") {
    const auto constant_x = validate(make({3.0, 3.0, 3.0}, {1.0, 2.0, 3.0}));
    CHECK(constant_x.all_predictors_degenerate);
    CHECK_FALSE(constant_x.ok());

    const auto constant_y = validate(make({1.0, 2.0, 3.0}, {5.0, 5.0, 5.0}));
    CHECK(constant_y.response_degenerate);
    CHECK_FALSE(constant_y.ok());

    const auto fine = validate(make({0.0, 1.0}, {1.0, 2.0}));
    CHECK(fine.ok());
    CHECK(fine.n == 2);
    CHECK(fine.p == 1);
    CHECK(fine.row_tie_share == 0.0);
}

TEST_CASE("group_by_x partitions by exact equality in lexicographic order", "[core]") {
    const auto gs = group_by_x(make({1, 1, 2}, {5, 6, 7}));
    REQUIRE(gs.group_count() == 2);
    CHECK(gs.groups[0].key == std::vector<double>{1.0});
    CHECK(gs.groups[0].y_values == std::vector<double>{5.0, 6.0});
    CHECK(gs.groups[1].y_values == std::vector<double>{7.0});
    CHECK(gs.weight(0) == Catch::Approx(2.0 / 3.0));
    CHECK(gs.weight(1) == Catch::Approx(1.0 / 3.0));

    // all-distinct x: n singleton groups
    const auto singletons = group_by_x(make({4, 2, 9, 1}, {1, 2, 3, 4}));
    CHECK(singletons.group_count() == 4);

    // two-column keys
    Matrix x(3, 2, {0, 0, 0, 0, 0, 1});
    const auto two = group_by_x(ObservationSet(std::move(x), {1, 2, 3}));
    REQUIRE(two.group_count() == 2);
    CHECK(two.groups[0].indices.size() == 2);
    CHECK(two.groups[1].indices.size() == 1);
}

TEST_CASE("group_by_x reassembly preserves the multiset of pairs", "[core]") {
    CounterRng rng(31);
    std::vector<double> xs(40), ys(40);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = static_cast<double>(rng.uniform_below(6));
        ys[i] = rng.uniform01();
    }
    const auto obs = make(xs, ys);
    const auto gs = group_by_x(obs);
    std::vector<std::pair<double, double>> original, rebuilt;
    for (std::size_t i = 0; i < xs.size(); ++i) original.emplace_back(xs[i], ys[i]);
    for (const auto& g : gs.groups)
        for (std::size_t i = 0; i < g.indices.size(); ++i)
            rebuilt.emplace_back(g.key[0], g.y_values[i]);
    std::sort(original.begin(), original.end());
    std::sort(rebuilt.begin(), rebuilt.end());
    CHECK(original == rebuilt);
}

TEST_CASE("preprocess: none is identity, rank is idempotent", "[core]") {
    const auto obs = make({10, 20, 20}, {3, 1, 2});

    const auto none = preprocess(obs, {PreprocessSpec::Mode::none, false});
    CHECK(none.data.x().data() == obs.x().data());
    CHECK(none.data.y() == obs.y());

    const auto ranked = preprocess(obs, {PreprocessSpec::Mode::rank, false});
    CHECK(ranked.data.x().column(0) == std::vector<double>{1.0, 2.5, 2.5});
    const auto twice = preprocess(ranked.data, {PreprocessSpec::Mode::rank, false});
    CHECK(twice.data.x().data() == ranked.data.x().data());
}

TEST_CASE("preprocess: standardize uses sample sd and flags degenerate columns", "[core]") {
    // [0, 2]: mean 1, sample sd sqrt(2) -> [-0.7071..., +0.7071...]
    const auto std2 = preprocess(make({0, 2}, {1, 2}), {PreprocessSpec::Mode::standardize, false});
    CHECK(std2.data.x()(0, 0) == Catch::Approx(-0.70710678118654746).epsilon(1e-15));
    CHECK(std2.data.x()(1, 0) == Catch::Approx(0.70710678118654746).epsilon(1e-15));

    Matrix x(3, 2, {1, 5, 1, 7, 1, 9});
    const auto res =
        preprocess(ObservationSet(std::move(x), {1, 2, 3}), {PreprocessSpec::Mode::standardize, false});
    REQUIRE(res.degenerate_columns == std::vector<std::size_t>{0});
    CHECK(res.data.x()(0, 0) == 1.0); // left unchanged
    CHECK(res.data.x().column(1) == std::vector<double>{-1.0, 0.0, 1.0});
}

TEST_CASE("preprocess: rank_y midranks the response", "[core]") {
    const auto obs = make({1, 2, 3}, {10, 30, 30});
    const auto res = preprocess(obs, {PreprocessSpec::Mode::none, true});
    CHECK(res.data.y() == std::vector<double>{1.0, 2.5, 2.5});
}
