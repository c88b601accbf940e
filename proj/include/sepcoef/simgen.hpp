// Copyright (c) 2026 sepcoef contributors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic generators for the synthetic experiments, parameterized by
// sample size and seed, plus a runner that repeats a scenario and
// summarizes per-rep estimates boxplot-style.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sepcoef/core.hpp"
#include "sepcoef/estimators.hpp"
#include "sepcoef/normal.hpp"
#include "sepcoef/oracles.hpp"
#include "sepcoef/parallel.hpp"
#include "sepcoef/rng.hpp"

namespace sepcoef {

enum class ScenarioId {
    intro_discretization, // X ~ U(-1,1), Y = -X^2 + U(-0.1, 0.1); optional binning
    s1_bvn,               // bivariate normal with correlation rho
    s2a_bf,               // two balanced groups, N(0,1) vs N(2,1)
    s2b_bf,               // two balanced groups, N(0,1) vs N(2,4)
    s3_discretize,        // stratified U(-1,1) design, Y = X^2 + N(0, 0.1^2), k bins
    s4a_noise,            // four groups, Y = U(l, l+1) + sigma * U(-1,1)
    s4b_cosine,           // Y = X cos(X Z) + U(0,1), predictors (X, Z)
    s5a_indep,            // independent uniforms
    s5b_scale,            // Y ~ U(-|1-2X|, |1-2X|)
    s5c_rademacher,       // Y = R * Z with interval scale driven by X
    s5d_misspec,          // residuals of a linear fit to Y = X^2 + 0.1 eps
};

inline const char* to_string(ScenarioId id) {
    switch (id) {
        case ScenarioId::intro_discretization: return "intro";
        case ScenarioId::s1_bvn: return "s1";
        case ScenarioId::s2a_bf: return "s2a";
        case ScenarioId::s2b_bf: return "s2b";
        case ScenarioId::s3_discretize: return "s3";
        case ScenarioId::s4a_noise: return "s4a";
        case ScenarioId::s4b_cosine: return "s4b";
        case ScenarioId::s5a_indep: return "s5a";
        case ScenarioId::s5b_scale: return "s5b";
        case ScenarioId::s5c_rademacher: return "s5c";
        case ScenarioId::s5d_misspec: return "s5d";
    }
    return "?";
}

struct ScenarioSpec {
    ScenarioId id = ScenarioId::s1_bvn;
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    std::size_t reps = 1;
    double rho = 0.0;   // s1
    double sigma = 0.0; // s4a
    std::size_t k = 0;  // bin count for intro / s3; 0 = ungrouped
};

namespace detail_sim {

inline void check_spec(const ScenarioSpec& s) {
    if (s.n < 2) throw std::invalid_argument("scenario: need n >= 2");
    if (s.id == ScenarioId::s1_bvn && !(s.rho >= 0.0 && s.rho <= 1.0))
        throw std::invalid_argument("scenario s1: rho must be in [0,1]");
    if (s.id == ScenarioId::s4a_noise && !(s.sigma >= 0.0))
        throw std::invalid_argument("scenario s4a: sigma must be >= 0");
    if (s.id == ScenarioId::s3_discretize && s.k != 0 && s.n % s.k != 0)
        throw std::invalid_argument("scenario s3: k must divide n");
}

/// Bin index (1..k) of v over equal-length subintervals of [-1, 1].
inline double bin_index(double v, std::size_t k) {
    auto b = static_cast<long long>(std::floor((v + 1.0) / 2.0 * static_cast<double>(k)));
    b = std::max(0LL, std::min(b, static_cast<long long>(k) - 1));
    return static_cast<double>(b + 1);
}

} // namespace detail_sim

/// One dataset from the scenario's exact distributional recipe.
inline ObservationSet generate(const ScenarioSpec& spec) {
    detail_sim::check_spec(spec);
    const std::size_t n = spec.n;
    CounterRng rng(rng::derive_key(spec.seed, rng::kGenerate,
                                   static_cast<std::uint64_t>(spec.id)));

    switch (spec.id) {
        case ScenarioId::intro_discretization: {
            Matrix x(n, 1);
            std::vector<double> y(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double v = rng.uniform(-1.0, 1.0);
                y[i] = -v * v + rng.uniform(-0.1, 0.1);
                x(i, 0) = spec.k == 0 ? v : detail_sim::bin_index(v, spec.k);
            }
            return ObservationSet(std::move(x), std::move(y), {"x"});
        }
        case ScenarioId::s1_bvn: {
            Matrix x(n, 1);
            std::vector<double> y(n);
            const double s = std::sqrt(1.0 - spec.rho * spec.rho);
            for (std::size_t i = 0; i < n; ++i) {
                const double z1 = norm_quantile(rng.uniform_open01());
                const double z2 = norm_quantile(rng.uniform_open01());
                x(i, 0) = z1;
                y[i] = spec.rho * z1 + s * z2;
            }
            return ObservationSet(std::move(x), std::move(y), {"x"});
        }
        case ScenarioId::s2a_bf:
        case ScenarioId::s2b_bf: {
            // balanced design: the first floor(n/2) rows form group 0
            const double sd1 = spec.id == ScenarioId::s2a_bf ? 1.0 : 2.0;
            Matrix x(n, 1);
            std::vector<double> y(n);
            const std::size_t n0 = n / 2;
            for (std::size_t i = 0; i < n; ++i) {
                const double z = norm_quantile(rng.uniform_open01());
                const bool group0 = i < n0;
                x(i, 0) = group0 ? 0.0 : 1.0;
                y[i] = group0 ? z : 2.0 + sd1 * z;
            }
            return ObservationSet(std::move(x), std::move(y), {"x"});
        }
        case ScenarioId::s3_discretize: {
            // jittered stratified design: one draw per width-2/n cell, so
            // any k dividing n puts exactly n/k points in each bin and
            // k = n yields all-singleton groups by construction
            Matrix x(n, 1);
            std::vector<double> y(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double u = rng.uniform01();
                const double v =
                    -1.0 + 2.0 * (static_cast<double>(i) + u) / static_cast<double>(n);
                y[i] = v * v + 0.1 * norm_quantile(rng.uniform_open01());
                x(i, 0) = spec.k == 0 ? v : detail_sim::bin_index(v, spec.k);
            }
            return ObservationSet(std::move(x), std::move(y), {"x"});
        }
        case ScenarioId::s4a_noise: {
            static const double level[2][2] = {{0.0, 1.0}, {2.0, 3.0}};
            Matrix x(n, 2);
            std::vector<double> y(n);
            for (std::size_t i = 0; i < n; ++i) {
                const auto cell = rng.uniform_below(4);
                const std::size_t a = cell / 2, b = cell % 2;
                x(i, 0) = static_cast<double>(a + 1);
                x(i, 1) = static_cast<double>(b + 1);
                y[i] = level[a][b] + rng.uniform01() + spec.sigma * rng.uniform(-1.0, 1.0);
            }
            return ObservationSet(std::move(x), std::move(y), {"x1", "x2"});
        }
        case ScenarioId::s4b_cosine: {
            Matrix x(n, 2);
            std::vector<double> y(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double s = rng.uniform01() < 0.5 ? -1.0 : 1.0;
                const double z = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
                x(i, 0) = s;
                x(i, 1) = z;
                y[i] = s * std::cos(s * z) + rng.uniform01();
            }
            return ObservationSet(std::move(x), std::move(y), {"x", "z"});
        }
        case ScenarioId::s5a_indep: {
            Matrix x(n, 1);
            std::vector<double> y(n);
            for (std::size_t i = 0; i < n; ++i) {
                x(i, 0) = rng.uniform01();
                y[i] = rng.uniform01();
            }
            return ObservationSet(std::move(x), std::move(y), {"x"});
        }
        case ScenarioId::s5b_scale: {
            Matrix x(n, 1);
            std::vector<double> y(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double v = rng.uniform01();
                const double w = std::abs(1.0 - 2.0 * v);
                x(i, 0) = v;
                y[i] = rng.uniform(-w, w);
            }
            return ObservationSet(std::move(x), std::move(y), {"x"});
        }
        case ScenarioId::s5c_rademacher: {
            Matrix x(n, 1);
            std::vector<double> y(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double v = rng.uniform01();
                const double hi = std::pow(-v * v + 2.0 * v, 0.9);
                const double z = rng.uniform(0.5 * hi, hi);
                const double r = rng.uniform01() < 0.5 ? -1.0 : 1.0;
                x(i, 0) = v;
                y[i] = r * z;
            }
            return ObservationSet(std::move(x), std::move(y), {"x"});
        }
        case ScenarioId::s5d_misspec: {
            // nonlinear truth, misspecified linear fit, residuals as response
            std::vector<double> xv(n), yv(n);
            for (std::size_t i = 0; i < n; ++i) {
                xv[i] = rng.uniform(-1.0, 1.0);
                yv[i] = xv[i] * xv[i] + 0.1 * norm_quantile(rng.uniform_open01());
            }
            double mx = 0.0, my = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                mx += xv[i];
                my += yv[i];
            }
            mx /= static_cast<double>(n);
            my /= static_cast<double>(n);
            double sxy = 0.0, sxx = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                sxy += (xv[i] - mx) * (yv[i] - my);
                sxx += (xv[i] - mx) * (xv[i] - mx);
            }
            const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
            const double intercept = my - slope * mx;
            Matrix x(n, 1);
            std::vector<double> resid(n);
            for (std::size_t i = 0; i < n; ++i) {
                x(i, 0) = xv[i];
                resid[i] = yv[i] - intercept - slope * xv[i];
            }
            return ObservationSet(std::move(x), std::move(resid), {"x"});
        }
    }
    throw std::logic_error("generate: unknown scenario");
}

/// Five-number summary with linearly interpolated quartiles.
struct BoxStats {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

inline double quantile_linear(std::vector<double> sorted, double p) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

inline BoxStats box_stats(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    BoxStats b;
    b.min = values.front();
    b.max = values.back();
    b.q1 = quantile_linear(values, 0.25);
    b.median = quantile_linear(values, 0.50);
    b.q3 = quantile_linear(values, 0.75);
    return b;
}

/// One estimator track of a scenario run: the per-rep values, their
/// five-number summary and the closed-form target when one exists.
struct SeriesSummary {
    std::string name;
    std::vector<double> values;
    BoxStats box;
    std::optional<double> oracle;
};

struct ScenarioSummary {
    ScenarioSpec spec;
    std::vector<SeriesSummary> series;

    const SeriesSummary& at(const std::string& name) const {
        for (const auto& s : series)
            if (s.name == name) return s;
        throw std::invalid_argument("ScenarioSummary: no series named " + name);
    }
};

/// Run spec.reps independent repetitions (parallel, per-rep derived seeds)
/// and collect per-rep estimates. The nearest-neighbor estimator switches
/// to the within-group-exclusion variant whenever the scenario's
/// construction pushes the tied-x pair share above the advice threshold.
inline ScenarioSummary run_scenario(const ScenarioSpec& spec) {
    detail_sim::check_spec(spec);
    if (spec.reps < 1) throw std::invalid_argument("run_scenario: need reps >= 1");

    // binned and few-group designs take the within-group-exclusion variant;
    // it coincides with the standard one once predictor ties vanish
    const bool grouped_x =
        spec.id == ScenarioId::s2a_bf || spec.id == ScenarioId::s2b_bf ||
        spec.id == ScenarioId::s4a_noise ||
        ((spec.id == ScenarioId::s3_discretize || spec.id == ScenarioId::intro_discretization) &&
         spec.k != 0);
    const LambdaVariant nn_variant =
        grouped_x ? LambdaVariant::nn_between_group : LambdaVariant::nn_standard;

    const bool with_rank =
        spec.id == ScenarioId::s2a_bf || spec.id == ScenarioId::s2b_bf ||
        (spec.id == ScenarioId::s3_discretize && spec.k != 0);
    const bool with_xi = spec.id == ScenarioId::s5a_indep || spec.id == ScenarioId::s5b_scale ||
                         spec.id == ScenarioId::s5c_rademacher ||
                         spec.id == ScenarioId::s5d_misspec;
    const bool marginal_lambdas = spec.id == ScenarioId::s4b_cosine;

    std::vector<double> lam(spec.reps), lam_rank(spec.reps), xi(spec.reps);
    std::vector<double> lam_x(spec.reps), lam_z(spec.reps);

    parallel_for(0, spec.reps, [&](std::size_t r) {
        ScenarioSpec rep_spec = spec;
        rep_spec.seed = rng::derive_key(spec.seed, rng::kScenarioRep, r);
        const ObservationSet obs = generate(rep_spec);
        const std::uint64_t est_seed = rng::derive_key(rep_spec.seed, rng::kEstimator);

        lam[r] = lambda_nn(obs, est_seed, nn_variant).value;
        if (with_rank) lam_rank[r] = lambda_rank_based(obs).value;
        if (with_xi) xi[r] = chatterjee_xi(obs.x().column(0), obs.y(), est_seed);
        if (marginal_lambdas) {
            const std::size_t cx[] = {0}, cz[] = {1};
            lam_x[r] = lambda_nn(obs.with_columns(cx), est_seed,
                                 LambdaVariant::nn_between_group)
                           .value;
            lam_z[r] = lambda_nn(obs.with_columns(cz), est_seed,
                                 LambdaVariant::nn_standard)
                           .value;
        }
    }, 1);

    std::optional<double> oracle;
    switch (spec.id) {
        case ScenarioId::s1_bvn:
            oracle = models::lambda_exact(models::MVNormal{
                Matrix(2, 2, {1.0, spec.rho, spec.rho, 1.0})});
            break;
        case ScenarioId::s2a_bf:
            oracle = models::lambda_exact(models::BFNormal{0.0, 1.0, 2.0, 1.0, 0.5});
            break;
        case ScenarioId::s2b_bf:
            oracle = models::lambda_exact(models::BFNormal{0.0, 1.0, 2.0, 4.0, 0.5});
            break;
        case ScenarioId::s4a_noise:
            if (spec.sigma == 0.0) oracle = 1.0; // disjoint supports
            break;
        case ScenarioId::s5a_indep:
        case ScenarioId::s5b_scale:
        case ScenarioId::s5c_rademacher:
            oracle = 0.0; // stochastically comparable by construction
            break;
        default:
            break;
    }

    ScenarioSummary out;
    out.spec = spec;
    const char* lam_name = nn_variant == LambdaVariant::nn_between_group
                               ? "lambda_nn_between_group"
                               : "lambda_nn";
    if (marginal_lambdas) {
        out.series.push_back({"lambda_nn_x", std::move(lam_x), {}, std::nullopt});
        out.series.push_back({"lambda_nn_z", std::move(lam_z), {}, std::nullopt});
        out.series.push_back({"lambda_nn_xz", std::move(lam), {}, std::nullopt});
    } else {
        out.series.push_back({lam_name, std::move(lam), {}, oracle});
    }
    if (with_rank) out.series.push_back({"lambda_rank", std::move(lam_rank), {}, oracle});
    if (with_xi) out.series.push_back({"xi", std::move(xi), {}, std::nullopt});
    for (auto& s : out.series) s.box = box_stats(s.values);
    return out;
}

/// Per-rep CSV: one row per repetition, one column per estimator series.
inline std::string to_csv(const ScenarioSummary& summary) {
    std::ostringstream os;
    os.precision(17);
    os << "rep";
    for (const auto& s : summary.series) os << "," << s.name;
    os << "\n";
    for (std::size_t r = 0; r < summary.spec.reps; ++r) {
        os << r;
        for (const auto& s : summary.series) os << "," << s.values[r];
        os << "\n";
    }
    return os.str();
}

} // namespace sepcoef
