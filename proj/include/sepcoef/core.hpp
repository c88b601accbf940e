// Copyright (c) 2026 sepcoef contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sepcoef/common.hpp"
#include "sepcoef/concordance.hpp"

namespace sepcoef {

/// The universal estimation input: n rows of (x-vector in R^p, scalar y).
/// Construction enforces shape and finiteness (n >= 2, p >= 1, no NaN/Inf);
/// degeneracy of columns or of y is a reportable condition, not a
/// constructor error, so that validate() can describe it.
class ObservationSet {
  public:
    ObservationSet(Matrix x, std::vector<double> y,
                   std::vector<std::string> column_names = {})
        : x_(std::move(x)), y_(std::move(y)), column_names_(std::move(column_names)) {
        if (x_.rows() < 2) throw std::invalid_argument("ObservationSet: need n >= 2 rows");
        if (x_.cols() < 1) throw std::invalid_argument("ObservationSet: need p >= 1 predictors");
        if (y_.size() != x_.rows())
            throw std::invalid_argument("ObservationSet: y length must equal number of rows");
        for (double v : x_.data())
            if (!std::isfinite(v))
                throw std::invalid_argument("ObservationSet: non-finite predictor entry");
        for (double v : y_)
            if (!std::isfinite(v))
                throw std::invalid_argument("ObservationSet: non-finite response entry");
        if (!column_names_.empty() && column_names_.size() != x_.cols())
            throw std::invalid_argument("ObservationSet: column_names size mismatch");
    }

    std::size_t n() const { return x_.rows(); }
    std::size_t p() const { return x_.cols(); }
    const Matrix& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }
    const std::vector<std::string>& column_names() const { return column_names_; }

    /// Same rows, predictor columns restricted to `cols` (in that order).
    ObservationSet with_columns(std::span<const std::size_t> cols) const {
        std::vector<std::string> names;
        if (!column_names_.empty())
            for (std::size_t c : cols) names.push_back(column_names_[c]);
        return ObservationSet(x_.select_columns(cols), y_, std::move(names));
    }

  private:
    Matrix x_;
    std::vector<double> y_;
    std::vector<std::string> column_names_;
};

/// Rows partitioned by exact x-row equality, in lexicographic key order.
struct GroupedSample {
    struct Group {
        std::vector<double> key;          // the shared x row
        std::vector<std::size_t> indices; // ascending row indices
        std::vector<double> y_values;     // y in index order
    };
    std::vector<Group> groups;
    std::size_t n = 0;

    std::size_t group_count() const { return groups.size(); }
    double weight(std::size_t i) const {
        return static_cast<double>(groups[i].indices.size()) / static_cast<double>(n);
    }
};

inline GroupedSample group_by_x(const ObservationSet& obs) {
    const auto rg = detail::group_row_indices(obs.x());
    GroupedSample gs;
    gs.n = obs.n();
    gs.groups.reserve(rg.group_count());
    for (std::size_t gi = 0; gi < rg.group_count(); ++gi) {
        const auto rows = rg.group(gi);
        GroupedSample::Group g;
        const auto key = obs.x().row(rows.front());
        g.key.assign(key.begin(), key.end());
        g.indices.assign(rows.begin(), rows.end());
        g.y_values.reserve(rows.size());
        for (std::size_t r : rows) g.y_values.push_back(obs.y()[r]);
        gs.groups.push_back(std::move(g));
    }
    return gs;
}

/// Report-only validation: nothing throws, every finding is enumerated.
struct ValidationReport {
    std::size_t n = 0;
    std::size_t p = 0;
    std::vector<bool> column_degenerate; // column takes a single value
    bool response_degenerate = false;
    bool all_predictors_degenerate = false;
    std::vector<double> column_tie_share; // tied-pair share per column
    double row_tie_share = 0.0;           // share of exactly equal x-row pairs
    std::vector<std::string> errors;      // violations of estimation preconditions
    bool ok() const { return errors.empty(); }
};

inline ValidationReport validate(const ObservationSet& obs) {
    ValidationReport rep;
    rep.n = obs.n();
    rep.p = obs.p();
    const std::uint64_t pairs = detail::pairs_of(rep.n);

    rep.column_degenerate.resize(rep.p);
    rep.column_tie_share.resize(rep.p);
    bool any_nondegenerate = false;
    for (std::size_t j = 0; j < rep.p; ++j) {
        auto col = obs.x().column(j);
        std::sort(col.begin(), col.end());
        std::uint64_t tied = 0;
        std::size_t i = 0;
        while (i < col.size()) {
            std::size_t k = i + 1;
            while (k < col.size() && col[k] == col[i]) ++k;
            tied += detail::pairs_of(k - i);
            i = k;
        }
        rep.column_tie_share[j] = static_cast<double>(tied) / static_cast<double>(pairs);
        rep.column_degenerate[j] = (col.front() == col.back());
        if (!rep.column_degenerate[j]) any_nondegenerate = true;
    }
    rep.all_predictors_degenerate = !any_nondegenerate;

    rep.row_tie_share =
        static_cast<double>(tie_pair_count(obs.x())) / static_cast<double>(pairs);

    const auto& y = obs.y();
    rep.response_degenerate =
        std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); });

    if (rep.response_degenerate) rep.errors.push_back("response degenerate");
    if (rep.all_predictors_degenerate) rep.errors.push_back("all predictors degenerate");
    return rep;
}

/// Predictor preprocessing ahead of the nearest-neighbor search.
/// rank replaces each column by midranks; standardize centers and scales by
/// the sample standard deviation (divisor n-1). rank_y additionally
/// midranks the response (a strictly monotone change, harmless to the
/// estimators).
struct PreprocessSpec {
    enum class Mode { none, rank, standardize };
    Mode mode = Mode::none;
    bool rank_y = false;
};

struct PreprocessResult {
    ObservationSet data;
    std::vector<std::size_t> degenerate_columns; // left unchanged by standardize
};

inline PreprocessResult preprocess(const ObservationSet& obs, const PreprocessSpec& spec) {
    const std::size_t n = obs.n(), p = obs.p();
    Matrix x = obs.x();
    std::vector<double> y = obs.y();
    std::vector<std::size_t> degenerate;

    if (spec.mode == PreprocessSpec::Mode::rank) {
        for (std::size_t j = 0; j < p; ++j) {
            const auto ranked = midranks(obs.x().column(j));
            for (std::size_t i = 0; i < n; ++i) x(i, j) = ranked[i];
        }
    } else if (spec.mode == PreprocessSpec::Mode::standardize) {
        for (std::size_t j = 0; j < p; ++j) {
            auto col = obs.x().column(j);
            double mean = 0.0;
            for (double v : col) mean += v;
            mean /= static_cast<double>(n);
            double ss = 0.0;
            for (double v : col) ss += (v - mean) * (v - mean);
            const double sd = std::sqrt(ss / static_cast<double>(n - 1));
            if (sd == 0.0) {
                degenerate.push_back(j);
                continue;
            }
            for (std::size_t i = 0; i < n; ++i) x(i, j) = (col[i] - mean) / sd;
        }
    }

    if (spec.rank_y) y = midranks(y);

    return PreprocessResult{ObservationSet(std::move(x), std::move(y), obs.column_names()),
                            std::move(degenerate)};
}

} // namespace sepcoef
