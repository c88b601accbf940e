// Copyright (c) 2026 sepcoef contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "sepcoef/common.hpp"
#include "sepcoef/concordance.hpp"
#include "sepcoef/core.hpp"
#include "sepcoef/neighbors.hpp"
#include "sepcoef/rng.hpp"

namespace sepcoef {

enum class LambdaVariant { nn_standard, nn_between_group, rank_based };

inline const char* to_string(LambdaVariant v) {
    switch (v) {
        case LambdaVariant::nn_standard: return "nn_standard";
        case LambdaVariant::nn_between_group: return "nn_between_group";
        case LambdaVariant::rank_based: return "rank_based";
    }
    return "?";
}

/// A separation-coefficient estimate. value = numerator / denominator with
/// denominator in (0, 1]. The population target lies in [0, 1]; finite-n
/// values may dip below zero and are reported as-is.
struct LambdaEstimate {
    double value = 0.0;
    double numerator = 0.0;   // pair-averaged signed sum
    double denominator = 0.0; // tie-corrected normalizer
    LambdaVariant variant = LambdaVariant::nn_standard;
    std::size_t n = 0;
    std::size_t p = 0;
    std::uint64_t seed = 0;

    // raw integer ingredients of the nearest-neighbor variants, exposed so
    // exactness can be checked against a quadratic reference
    long long signed_sum = 0;
    std::uint64_t tied_x_pairs = 0;
    double tied_x_share = 0.0;
    bool between_group_recommended = false; // tied share > 0.2 under nn_standard
};

/// Share of tied predictor pairs above which the within-group-exclusion
/// variant is suggested for the standard estimator.
inline constexpr double kBetweenGroupAdviceThreshold = 0.2;

/// Nearest-neighbor estimator of the separation coefficient: the pair
/// statistic between the responses and the responses of each row's
/// predictor-space nearest neighbor, normalized by the non-tied pair
/// share. The between_group variant drops numerator pairs whose predictor
/// rows coincide while keeping the C(n,2) divisor, so the denominator
/// performs the same compensation as in the standard variant.
inline LambdaEstimate lambda_nn(const ObservationSet& obs, std::uint64_t seed,
                                LambdaVariant variant = LambdaVariant::nn_standard) {
    if (variant == LambdaVariant::rank_based)
        throw std::invalid_argument("lambda_nn: use lambda_rank_based for the rank variant");
    const std::size_t n = obs.n();
    const auto groups = detail::group_row_indices(obs.x(), false);

    std::uint64_t tied = 0;
    for (std::size_t g = 0; g < groups.group_count(); ++g)
        tied += detail::pairs_of(groups.group_size(g));
    const std::uint64_t pairs = detail::pairs_of(n);
    if (tied == pairs) throw AllPredictorsTied();

    const NeighborMap nm = build_neighbor_map(obs.x(), seed, groups);
    const auto& y = obs.y();
    std::vector<double> y_of_neighbor(n);
    for (std::size_t k = 0; k < n; ++k) y_of_neighbor[k] = y[nm.neighbor_index[k]];

    long long raw = signed_pair_sum(y, y_of_neighbor).value;
    if (variant == LambdaVariant::nn_between_group) {
        for (std::size_t gi = 0; gi < groups.group_count(); ++gi) {
            const auto g = groups.group(gi);
            if (g.size() < 2) continue;
            std::vector<double> ya(g.size()), yb(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) {
                ya[i] = y[g[i]];
                yb[i] = y_of_neighbor[g[i]];
            }
            raw -= signed_pair_sum(ya, yb).value;
        }
    }

    LambdaEstimate est;
    est.variant = variant;
    est.n = n;
    est.p = obs.p();
    est.seed = seed;
    est.signed_sum = raw;
    est.tied_x_pairs = tied;
    est.tied_x_share = static_cast<double>(tied) / static_cast<double>(pairs);
    // literal transcription of the estimator's definition
    est.numerator = static_cast<double>(raw) / static_cast<double>(pairs);
    est.denominator = 1.0 - static_cast<double>(tied) / static_cast<double>(pairs);
    est.value = est.numerator / est.denominator;
    est.between_group_recommended = variant == LambdaVariant::nn_standard &&
                                    est.tied_x_share > kBetweenGroupAdviceThreshold;
    return est;
}

/// Classical midrank estimate of the relative effect of group 2 over
/// group 1, computed on the pooled sample:
/// psi = (mean rank of group 2 - (n2+1)/2) / n1.
struct RelativeEffectEstimate {
    double psi = 0.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

inline RelativeEffectEstimate psi_hat(std::span<const double> y1, std::span<const double> y2) {
    if (y1.empty() || y2.empty()) throw std::invalid_argument("psi_hat: empty group");
    const std::size_t n1 = y1.size(), n2 = y2.size();
    std::vector<double> pooled;
    pooled.reserve(n1 + n2);
    pooled.insert(pooled.end(), y1.begin(), y1.end());
    pooled.insert(pooled.end(), y2.begin(), y2.end());
    const auto ranks = midranks(pooled);
    double mean2 = 0.0;
    for (std::size_t i = n1; i < n1 + n2; ++i) mean2 += ranks[i];
    mean2 /= static_cast<double>(n2);
    RelativeEffectEstimate out;
    out.n1 = n1;
    out.n2 = n2;
    out.psi = (mean2 - (static_cast<double>(n2) + 1.0) / 2.0) / static_cast<double>(n1);
    return out;
}

inline RelativeEffectEstimate psi_hat(const std::vector<double>& y1,
                                      const std::vector<double>& y2) {
    return psi_hat(std::span<const double>(y1), std::span<const double>(y2));
}

namespace detail_est {

/// Integer pair kernel behind the rank-based estimator:
/// T = n_i n_j (2 psi_hat(i, j) - 1) = 2 * ranksum(j) - n_j (n_j + 1) - n_i n_j,
/// an exact integer with T(i,j) = -T(j,i), so squared terms cannot depend
/// on group labeling or orientation.
inline long long psi_pair_kernel(std::span<const double> yi, std::span<const double> yj) {
    std::vector<double> pooled;
    pooled.reserve(yi.size() + yj.size());
    pooled.insert(pooled.end(), yi.begin(), yi.end());
    pooled.insert(pooled.end(), yj.begin(), yj.end());
    const auto ranks = midranks(pooled);
    double twice_ranksum_j = 0.0; // midranks are halves: doubling makes integers
    for (std::size_t k = yi.size(); k < pooled.size(); ++k)
        twice_ranksum_j += 2.0 * ranks[k];
    const auto ni = static_cast<long long>(yi.size());
    const auto nj = static_cast<long long>(yj.size());
    return std::llround(twice_ranksum_j) - nj * (nj + 1) - ni * nj;
}

} // namespace detail_est

/// Rank-based estimator for grouped predictors: the group-weighted mean of
/// squared pairwise effects over the non-tie mass. Everything before the
/// final few divisions is integer, which makes the estimate exactly one for
/// all-singleton groups with untied responses and exactly invariant under
/// relabelings of the group keys.
inline LambdaEstimate lambda_rank_based(const ObservationSet& obs) {
    const GroupedSample gs = group_by_x(obs);
    const std::size_t m = gs.group_count();
    if (m < 2) throw SingleGroup();

    const auto n = static_cast<long long>(obs.n());
    long long sum_sq = 0;
    for (const auto& g : gs.groups) {
        const auto c = static_cast<long long>(g.indices.size());
        sum_sq += c * c;
    }
    const long long denom_scaled = n * n - sum_sq; // n^2 * (1 - sum q_i^2)

    // n^2 * 2 sum_{i<j} q_i q_j (2 psi - 1)^2 with the pair terms
    // 2 T^2 / (n_i n_j); summed in value order for label independence
    std::vector<double> terms;
    terms.reserve(m * (m - 1) / 2);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const long long t =
                detail_est::psi_pair_kernel(gs.groups[i].y_values, gs.groups[j].y_values);
            const double w = static_cast<double>(gs.groups[i].indices.size()) *
                             static_cast<double>(gs.groups[j].indices.size());
            terms.push_back(2.0 * (static_cast<double>(t) * static_cast<double>(t)) / w);
        }
    }
    std::sort(terms.begin(), terms.end());
    double numer_scaled = 0.0;
    for (double t : terms) numer_scaled += t;

    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    LambdaEstimate est;
    est.variant = LambdaVariant::rank_based;
    est.n = obs.n();
    est.p = obs.p();
    est.numerator = numer_scaled / n2;
    est.denominator = static_cast<double>(denom_scaled) / n2;
    est.value = est.numerator / est.denominator;
    est.tied_x_pairs = static_cast<std::uint64_t>((sum_sq - n) / 2);
    est.tied_x_share =
        static_cast<double>(est.tied_x_pairs) / static_cast<double>(detail::pairs_of(obs.n()));
    return est;
}

/// Chatterjee's rank correlation for a scalar predictor, in the tie-robust
/// form: sort by x (ties broken uniformly at random with the given seed),
/// then xi = 1 - n * sum |r_{(i+1)} - r_{(i)}| / (2 * sum l_i (n - l_i))
/// with r_i = #{y_j <= y_i} and l_i = #{y_j >= y_i}. Degenerate y yields
/// NaN (the coefficient is undefined there).
inline double chatterjee_xi(std::span<const double> x, std::span<const double> y,
                            std::uint64_t seed) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n)
        throw std::invalid_argument("chatterjee_xi: need matching vectors, n >= 2");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    CounterRng rng(rng::derive_key(seed, rng::kXiTie));
    fisher_yates(std::span<std::size_t>(order), rng);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });

    std::vector<double> sorted_y(y.begin(), y.end());
    std::sort(sorted_y.begin(), sorted_y.end());
    auto count_le = [&](double v) {
        return static_cast<double>(std::upper_bound(sorted_y.begin(), sorted_y.end(), v) -
                                   sorted_y.begin());
    };
    auto count_ge = [&](double v) {
        return static_cast<double>(sorted_y.end() -
                                   std::lower_bound(sorted_y.begin(), sorted_y.end(), v));
    };

    double num = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        num += std::abs(count_le(y[order[i + 1]]) - count_le(y[order[i]]));
    num *= static_cast<double>(n);

    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double l = count_ge(y[i]);
        den += l * (static_cast<double>(n) - l);
    }
    den *= 2.0;

    if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return 1.0 - num / den;
}

inline double chatterjee_xi(const std::vector<double>& x, const std::vector<double>& y,
                            std::uint64_t seed) {
    return chatterjee_xi(std::span<const double>(x), std::span<const double>(y), seed);
}

} // namespace sepcoef
