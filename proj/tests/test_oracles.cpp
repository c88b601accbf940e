// Copyright (c) 2026 sepcoef contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "brute.hpp"
#include "sepcoef/estimators.hpp"
#include "sepcoef/oracles.hpp"

using namespace sepcoef;
using namespace sepcoef::models;

TEST_CASE("closed forms at pinned points", "[oracles]") {
    CHECK(lambda_exact(BFNormal{1.5, 2.0, 1.5, 5.0, 0.5}) == 0.0); // equal means
    CHECK(lambda_exact(UniformShift{1.0}) == 1.0);                 // complete separation
    CHECK(lambda_exact(UniformShift{0.0}) == 0.0);
    CHECK(lambda_exact(BernoulliPair{0.0, 1.0}) == 1.0);
    CHECK(lambda_exact(ExponentialPair{2.0, 2.0}) == 0.0);
    CHECK(lambda_exact(MarshallOlkin{1.0}) == 1.0);
    CHECK(lambda_exact(MarshallOlkin{0.0}) == 0.0);
    CHECK(lambda_exact(FrechetCopula{0.3, 0.3}) == 0.0); // comparable but dependent
    CHECK(lambda_exact(FrechetCopula{1.0, 0.0}) == 1.0);
    CHECK(lambda_exact(EFGM{0.0, 1}) == 0.0);
    CHECK(lambda_exact(EFGM{1.0, 1}) == Catch::Approx(2.0 / 27.0).epsilon(1e-15));

    // bivariate normal: (2/pi) asin(rho^2), evaluated with libm asin
    const double rho = 0.7;
    const double expected = 2.0 / 3.14159265358979323846 * std::asin(rho * rho);
    CHECK(lambda_exact(MVNormal{Matrix(2, 2, {1, rho, rho, 1})}) ==
          Catch::Approx(expected).epsilon(1e-14));
    CHECK(expected == Catch::Approx(0.3260064619447081).epsilon(1e-13));
}

TEST_CASE("invalid parameters are rejected", "[oracles]") {
    CHECK_THROWS_AS(lambda_exact(BFNormal{0, -1, 0, 1, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(lambda_exact(UniformShift{1.5}), std::invalid_argument);
    CHECK_THROWS_AS(lambda_exact(BernoulliPair{-0.1, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(lambda_exact(ExponentialPair{0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(lambda_exact(FrechetCopula{0.7, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(lambda_exact(EFGM{1.5, 1}), std::invalid_argument);
    // non positive definite sigma
    CHECK_THROWS_AS(lambda_exact(MVNormal{Matrix(2, 2, {1, 2, 2, 1})}), std::invalid_argument);
}

TEST_CASE("psi_exact values and anti-symmetry", "[oracles]") {
    CHECK(psi_exact(BFNormal{0, 1, 0, 1, 0.5}) == 0.5); // identical groups
    CHECK(psi_exact(BernoulliPair{0.3, 0.3}) == 0.5);
    CHECK(psi_exact(UniformShift{0.0}) == 0.5);
    CHECK(psi_exact(BernoulliPair{0.0, 1.0}) == 1.0);
    CHECK(psi_exact(BFNormal{0, 1, 2, 1, 0.5}) ==
          Catch::Approx(0.9213503964748575).epsilon(1e-15)); // Phi(sqrt 2)

    // swapping the groups flips psi to 1 - psi
    struct TwoGroup {
        ClosedFormModel fwd, rev;
    };
    const std::vector<TwoGroup> cases{
        {BFNormal{0, 1, 2, 4, 0.5}, BFNormal{2, 4, 0, 1, 0.5}},
        {BernoulliPair{0.2, 0.7}, BernoulliPair{0.7, 0.2}},
        {ExponentialPair{1.0, 3.5}, ExponentialPair{3.5, 1.0}},
    };
    for (const auto& c : cases)
        CHECK(std::abs(psi_exact(c.fwd) + psi_exact(c.rev) - 1.0) < 1e-12);

    CHECK_THROWS_AS(psi_exact(MarshallOlkin{0.5}), std::invalid_argument);
}

TEST_CASE("two-group identity lambda = (2 psi - 1)^2", "[oracles]") {
    const std::vector<ClosedFormModel> two_group{
        BFNormal{0, 1, 2, 1, 0.5},    BFNormal{-1, 0.5, 3, 4, 0.25},
        UniformShift{0.35},           UniformShift{0.8},
        BernoulliPair{0.1, 0.65},     ExponentialPair{0.7, 2.2},
        ClosedFormModel{frechet_class_table()},
    };
    for (const auto& m : two_group) {
        const double d = 2.0 * psi_exact(m) - 1.0;
        CHECK(std::abs(lambda_exact(m) - d * d) < 1e-12);
    }
}

TEST_CASE("finite table oracle: pinned tables", "[oracles]") {
    // the Frechet-class extreme: exactly (8/9)^2, never 1
    CHECK(lambda_exact(ClosedFormModel{frechet_class_table()}) == 64.0 / 81.0);
    for (std::uint64_t a10 = 0; a10 <= 2; ++a10)
        for (std::uint64_t a20 = 0; a20 + a10 <= 3 && a20 <= 2; ++a20) {
            if (3 - a10 - a20 > 2) continue;
            CHECK(lambda_exact(ClosedFormModel{frechet_class_table(a10, a20)}) <=
                  64.0 / 81.0 + 1e-15);
        }

    // three-group paradox family: exactly q / (2 - 3q)
    struct Q {
        std::uint64_t num, den;
        double q;
    };
    for (const Q q : {Q{1, 10, 0.1}, Q{1, 4, 0.25}, Q{2, 5, 0.4}}) {
        const double expected = q.q / (2.0 - 3.0 * q.q);
        CHECK(lambda_exact(ClosedFormModel{three_group_paradox_table(q.num, q.den)}) ==
              Catch::Approx(expected).epsilon(1e-12));
    }

    // two groups with disjoint response supports
    const FinitePMF disjoint({0.0, 1.0}, {0.0, 1.0}, {{1, 0}, {0, 1}});
    CHECK(lambda_finite_pmf(disjoint) == 1.0);

    // independent product table
    const FinitePMF indep({0.0, 1.0, 2.0}, {0.0, 1.0}, {{2, 2}, {3, 3}, {1, 1}});
    CHECK(lambda_finite_pmf(indep) == 0.0);

    CHECK_THROWS_AS(lambda_finite_pmf(FinitePMF({0.0, 1.0}, {0.0}, {{1}, {1}})), SingleGroup);
}

TEST_CASE("finite table oracle equals the defining double sum", "[oracles]") {
    for (std::uint64_t t = 0; t < 50; ++t) {
        CounterRng rng(rng::mix64(t) ^ 0xF1717AB1E);
        const std::size_t ny = 2 + rng.uniform_below(4); // up to 5 atoms
        const std::size_t nx = 2 + rng.uniform_below(4);
        std::vector<double> ya(ny), xa(nx);
        for (std::size_t i = 0; i < ny; ++i) ya[i] = static_cast<double>(i);
        for (std::size_t j = 0; j < nx; ++j) xa[j] = static_cast<double>(j);
        std::vector<std::vector<std::uint64_t>> w(ny, std::vector<std::uint64_t>(nx));
        for (auto& row : w)
            for (auto& cell : row) cell = rng.uniform_below(20);
        // keep at least two live columns
        w[0][0] += 1;
        w[ny - 1][nx - 1] += 1;
        const FinitePMF table(ya, xa, w);
        const double fast = lambda_finite_pmf(table);
        const double ref = brute::finite_lambda(table);
        CHECK(std::abs(fast - ref) < 1e-12);
        CHECK((fast >= 0.0 && fast <= 1.0 + 1e-15));
    }
}

TEST_CASE("all closed forms stay inside [0,1]; normal families strictly below 1",
          "[oracles]") {
    CounterRng rng(0xBEEF);
    for (int t = 0; t < 40; ++t) {
        const double mu = rng.uniform(-5, 5);
        const double bf = lambda_exact(BFNormal{0, 0.3 + rng.uniform01(), mu,
                                                0.3 + rng.uniform01(), 0.5});
        CHECK((bf >= 0.0 && bf < 1.0));
        const double rho = rng.uniform01() * 0.999;
        const double mvn = lambda_exact(MVNormal{Matrix(2, 2, {1, rho, rho, 1})});
        CHECK((mvn >= 0.0 && mvn < 1.0));
    }
}

TEST_CASE("samplers hit their targets", "[oracles][sampling]") {
    // group frequency concentration
    const auto bern = sample(BernoulliPair{0.2, 0.9}, 1000000, 11);
    double share1 = 0.0;
    for (std::size_t i = 0; i < bern.n(); ++i) share1 += bern.x()(i, 0) == 1.0 ? 1.0 : 0.0;
    share1 /= static_cast<double>(bern.n());
    CHECK(std::abs(share1 - 0.5) < 0.003);

    // disjoint supports at delta = 1
    const auto us = sample(UniformShift{1.0}, 5000, 12);
    double max1 = -1e300, min2 = 1e300;
    for (std::size_t i = 0; i < us.n(); ++i) {
        if (us.x()(i, 0) == 1.0)
            max1 = std::max(max1, us.y()[i]);
        else
            min2 = std::min(min2, us.y()[i]);
    }
    CHECK(max1 <= min2);

    // independent normal coordinates: tiny sample correlation
    const auto mvn = sample(MVNormal{Matrix(2, 2, {1, 0, 0, 1})}, 100000, 13);
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    const auto n = static_cast<double>(mvn.n());
    for (std::size_t i = 0; i < mvn.n(); ++i) {
        const double a = mvn.x()(i, 0), b = mvn.y()[i];
        sx += a;
        sy += b;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    const double cov = sxy / n - sx / n * (sy / n);
    const double r = cov / std::sqrt((sxx / n - sx / n * (sx / n)) *
                                     (syy / n - sy / n * (sy / n)));
    CHECK(std::abs(r) < 0.01);
}

TEST_CASE("copula samplers reproduce their closed-form coefficients",
          "[oracles][sampling]") {
    struct Case {
        ClosedFormModel model;
        std::uint64_t seed;
    };
    const std::vector<Case> cases{
        {MarshallOlkin{0.5}, 21},  // lambda = 1/3
        {FrechetCopula{0.6, 0.2}, 22},
        {EFGM{1.0, 1}, 23},
        {EFGM{0.9, 2}, 25}, // multivariate: lambda = 2 * 0.81 / 81
        {MVNormal{Matrix(2, 2, {1, 0.6, 0.6, 1})}, 24},
    };
    for (const auto& c : cases) {
        const auto obs = sample(c.model, 20000, c.seed);
        const double est = lambda_nn(obs, c.seed + 1).value;
        CHECK(std::abs(est - lambda_exact(c.model)) < 0.05);
    }
}

TEST_CASE("adding a predictor never lowers the population coefficient",
          "[oracles]") {
    // nested multivariate normal models: the multiple correlation grows
    // with the predictor set, so the coefficient does too
    CounterRng rng(0x16A1);
    for (int t = 0; t < 25; ++t) {
        const double rxy = rng.uniform(-0.7, 0.7);
        const double rzy = rng.uniform(-0.7, 0.7);
        const double rxz = rng.uniform(-0.5, 0.5);
        Matrix full(3, 3, {1, rxz, rxy, rxz, 1, rzy, rxy, rzy, 1});
        Matrix sub(2, 2, {1, rxy, rxy, 1});
        double with_both;
        try {
            with_both = lambda_exact(MVNormal{full});
        } catch (const std::invalid_argument&) {
            continue; // drew a non-positive-definite combination
        }
        CHECK(with_both >= lambda_exact(MVNormal{sub}) - 1e-12);
    }
}

TEST_CASE("finite table sampler matches cell frequencies", "[oracles][sampling]") {
    const auto table = three_group_paradox_table(1, 4);
    const auto obs = sample(ClosedFormModel{table}, 200000, 31);
    double w2 = 0.0;
    for (std::size_t i = 0; i < obs.n(); ++i) w2 += obs.x()(i, 0) == 2.0 ? 1.0 : 0.0;
    CHECK(std::abs(w2 / static_cast<double>(obs.n()) - 0.5) < 0.01); // middle group mass 1/2
}
