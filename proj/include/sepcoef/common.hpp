// Copyright (c) 2026 sepcoef contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sepcoef {

/// Base class for all estimation / model errors raised by the library.
/// I/O errors (CSV parsing) derive from CsvError instead so callers can
/// distinguish bad input files from degenerate data.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Every predictor row equals every other row: the tie-corrected
/// denominator of the nearest-neighbor estimator is zero.
struct AllPredictorsTied : Error {
    AllPredictorsTied() : Error("all predictor rows are identical; estimator denominator is zero") {}
};

/// The grouped (rank-based) estimator needs at least two distinct groups.
struct SingleGroup : Error {
    SingleGroup() : Error("predictor rows form a single group; rank-based estimator undefined") {}
};

/// Best-subset search over p predictors would exceed the configured budget.
struct SubsetBudgetExceeded : Error {
    explicit SubsetBudgetExceeded(std::size_t p, std::size_t max_p)
        : Error("best-subset selection over p=" + std::to_string(p) +
                " predictors exceeds max_p=" + std::to_string(max_p)) {}
};

struct CsvError : Error {
    using Error::Error;
};

/// Dense row-major matrix of doubles. Small by design: the library only
/// needs row access, column extraction and shape checks.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_)
            throw std::invalid_argument("Matrix: data size does not match rows*cols");
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

    std::vector<double> column(std::size_t j) const {
        std::vector<double> out(rows_);
        for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
        return out;
    }

    /// New matrix keeping only the given columns, in the given order.
    Matrix select_columns(std::span<const std::size_t> cols) const {
        Matrix out(rows_, cols.size());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = (*this)(i, cols[j]);
        return out;
    }

    /// New matrix with rows reordered as rows[i] = this->row(perm[i]).
    Matrix permute_rows(std::span<const std::size_t> perm) const {
        Matrix out(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(perm[i], j);
        return out;
    }

    const std::vector<double>& data() const { return data_; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

namespace detail {

inline bool row_equal(const Matrix& m, std::size_t a, std::size_t b) {
    for (std::size_t j = 0; j < m.cols(); ++j)
        if (m(a, j) != m(b, j)) return false;
    return true;
}

inline bool row_less(const Matrix& m, std::size_t a, std::size_t b) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
        if (m(a, j) < m(b, j)) return true;
        if (m(a, j) > m(b, j)) return false;
    }
    return false;
}

/// Partition of row indices into groups of exactly equal rows, stored
/// CSR-style. With lexicographic=true groups are ordered by their key row;
/// otherwise the order is unspecified but deterministic, which admits a
/// fast path for all-distinct data. Rows within a group are ascending.
/// Exact floating-point equality defines a tie.
struct RowGroups {
    std::vector<std::uint32_t> group_of; // group id per row
    std::vector<std::uint32_t> rows;     // row ids, grouped
    std::vector<std::uint32_t> offsets;  // group g occupies [offsets[g], offsets[g+1])

    std::size_t group_count() const { return offsets.size() - 1; }
    std::size_t group_size(std::size_t g) const { return offsets[g + 1] - offsets[g]; }
    std::span<const std::uint32_t> group(std::size_t g) const {
        return {rows.data() + offsets[g], offsets[g + 1] - offsets[g]};
    }
    bool all_distinct() const { return group_count() == group_of.size(); }
};

inline std::uint64_t hash_mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_row(const Matrix& m, std::size_t i) {
    std::uint64_t h = 0x2545F4914F6CDD1DULL;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double v = m(i, j);
        if (v == 0.0) v = 0.0; // fold -0.0 onto +0.0, matching operator==
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        h = hash_mix64(h ^ bits);
    }
    return h;
}

inline RowGroups group_row_indices(const Matrix& m, bool lexicographic = true) {
    const std::size_t n = m.rows();
    RowGroups rg;

    if (!lexicographic) {
        // distinct rows hash distinctly (collisions only cost the fallback)
        std::vector<std::uint64_t> hashes(n);
        for (std::size_t i = 0; i < n; ++i) hashes[i] = hash_row(m, i);
        std::vector<std::uint64_t> sorted = hashes;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) {
            rg.group_of.resize(n);
            rg.rows.resize(n);
            rg.offsets.resize(n + 1);
            for (std::size_t i = 0; i < n; ++i) {
                rg.group_of[i] = static_cast<std::uint32_t>(i);
                rg.rows[i] = static_cast<std::uint32_t>(i);
                rg.offsets[i] = static_cast<std::uint32_t>(i);
            }
            rg.offsets[n] = static_cast<std::uint32_t>(n);
            return rg;
        }
    }

    std::vector<std::uint32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return row_less(m, a, b); });

    rg.group_of.assign(n, 0);
    rg.rows.reserve(n);
    rg.offsets.push_back(0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && row_equal(m, order[i], order[j])) ++j;
        const auto gid = static_cast<std::uint32_t>(rg.offsets.size() - 1);
        const std::size_t begin = rg.rows.size();
        for (std::size_t k = i; k < j; ++k) {
            rg.rows.push_back(order[k]);
            rg.group_of[order[k]] = gid;
        }
        std::sort(rg.rows.begin() + static_cast<std::ptrdiff_t>(begin), rg.rows.end());
        rg.offsets.push_back(static_cast<std::uint32_t>(rg.rows.size()));
        i = j;
    }
    return rg;
}

inline std::uint64_t pairs_of(std::uint64_t n) { return n * (n - 1) / 2; }

} // namespace detail

} // namespace sepcoef
