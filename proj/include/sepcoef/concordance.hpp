// Copyright (c) 2026 sepcoef contributors
// SPDX-License-Identifier: Apache-2.0
//
// O(n log n) pair kernels. All pair counts are accumulated in 64-bit
// integers; nothing here touches floating point except the input values
// themselves, so results are exact and must match the O(n^2) reference
// integer-for-integer.

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "sepcoef/common.hpp"

namespace sepcoef {

/// Decomposition of sum_{k<l} sgn(a_k - a_l) * sgn(b_k - b_l).
/// Pairs tied in either coordinate contribute zero to value.
struct SignedPairSum {
    long long concordant = 0;
    long long discordant = 0;
    long long value = 0;       // concordant - discordant
    long long pairs_total = 0; // C(n, 2)
};

namespace detail {

/// Strict inversions (v_i > v_j for i < j) by bottom-up merge sort.
/// Equal elements are kept stable and never counted.
inline std::uint64_t count_inversions(std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> buf(n);
    std::uint64_t inversions = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
            const std::size_t mid = lo + width;
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t li = lo, ri = mid, out = lo;
            while (li < mid && ri < hi) {
                if (v[li] <= v[ri]) {
                    buf[out++] = v[li++];
                } else {
                    inversions += mid - li; // the remaining left run is strictly greater
                    buf[out++] = v[ri++];
                }
            }
            while (li < mid) buf[out++] = v[li++];
            while (ri < hi) buf[out++] = v[ri++];
            std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
                      buf.begin() + static_cast<std::ptrdiff_t>(hi),
                      v.begin() + static_cast<std::ptrdiff_t>(lo));
        }
    }
    return inversions;
}

inline std::uint64_t tied_pairs_sorted_runs(std::span<const double> sorted) {
    std::uint64_t tied = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i + 1;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        tied += pairs_of(j - i);
        i = j;
    }
    return tied;
}

} // namespace detail

/// Knight-style evaluation of the raw concordant-discordant difference.
/// Sort by (a, b), count strict b-inversions S by merge sort, and correct
/// for ties: value = C(n,2) - T_a - T_b + T_ab - 2S with T_* the tied-pair
/// counts in a, in b, and jointly.
inline SignedPairSum signed_pair_sum(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("signed_pair_sum: length mismatch");
    const std::size_t n = a.size();
    if (n < 2) throw std::invalid_argument("signed_pair_sum: need n >= 2");

    // packed pairs sort contiguously, which matters at n in the millions
    struct AB {
        double a, b;
    };
    std::vector<AB> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = {a[i], b[i]};
    std::sort(s.begin(), s.end(), [](const AB& u, const AB& v) {
        if (u.a != v.a) return u.a < v.a;
        return u.b < v.b;
    });

    // tied pairs in a and jointly in (a, b), from runs of the sorted order
    std::uint64_t tied_a = 0, tied_ab = 0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j < n && s[j].a == s[i].a) {
                std::size_t k = j + 1;
                while (k < n && s[k].a == s[i].a && s[k].b == s[j].b) ++k;
                tied_ab += detail::pairs_of(k - j);
                j = k;
            }
            tied_a += detail::pairs_of(j - i);
            i = j;
        }
    }

    std::vector<double> b_in_a_order(n);
    for (std::size_t i = 0; i < n; ++i) b_in_a_order[i] = s[i].b;
    const std::uint64_t swaps = detail::count_inversions(b_in_a_order);
    // b_in_a_order is now sorted; reuse it for the b tie count
    const std::uint64_t tied_b = detail::tied_pairs_sorted_runs(b_in_a_order);

    SignedPairSum out;
    out.pairs_total = static_cast<long long>(detail::pairs_of(n));
    out.discordant = static_cast<long long>(swaps);
    out.concordant = out.pairs_total - static_cast<long long>(tied_a) -
                     static_cast<long long>(tied_b) + static_cast<long long>(tied_ab) -
                     static_cast<long long>(swaps);
    out.value = out.concordant - out.discordant;
    return out;
}

inline SignedPairSum signed_pair_sum(const std::vector<double>& a,
                                     const std::vector<double>& b) {
    return signed_pair_sum(std::span<const double>(a), std::span<const double>(b));
}

/// Number of unordered pairs of exactly equal rows, via lexicographic sort.
inline std::uint64_t tie_pair_count(const Matrix& rows) {
    const std::size_t n = rows.rows();
    if (n < 2) throw std::invalid_argument("tie_pair_count: need n >= 2");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return detail::row_less(rows, i, j); });
    std::uint64_t tied = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && detail::row_equal(rows, order[i], order[j])) ++j;
        tied += detail::pairs_of(j - i);
        i = j;
    }
    return tied;
}

/// Midranks: R_i = 1/2 + sum_j [ 1{v_j < v_i} + 1/2 * 1{v_j = v_i} ],
/// the sum running over all j including i. Tied values share the average
/// of the ranks a stable sort would hand out.
inline std::vector<double> midranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && v[order[j]] == v[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) r[order[k]] = avg;
        i = j;
    }
    return r;
}

inline std::vector<double> midranks(const std::vector<double>& v) {
    return midranks(std::span<const double>(v));
}

} // namespace sepcoef
