// Copyright (c) 2026 sepcoef contributors
// SPDX-License-Identifier: Apache-2.0
//
// Exact population values of the separation coefficient and the relative
// effect for the parametric families with closed forms, plus seeded
// samplers for each family. These are the ground truth that every
// convergence test measures against, so the evaluation here favors exact
// arithmetic wherever the inputs allow it: finite tables are integer
// weight matrices and their coefficient is assembled from integer
// intermediates.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <variant>
#include <vector>

#include "sepcoef/common.hpp"
#include "sepcoef/core.hpp"
#include "sepcoef/normal.hpp"
#include "sepcoef/rng.hpp"

namespace sepcoef::models {

/// Two normal treatment groups (Behrens-Fisher situation).
struct BFNormal {
    double mu1 = 0.0, var1 = 1.0;
    double mu2 = 0.0, var2 = 1.0;
    double q = 0.5; // P(group 1); the coefficient does not depend on it
};

/// Centered multivariate normal (X, Y) with Y as the last coordinate.
struct MVNormal {
    Matrix sigma; // (p+1) x (p+1), positive definite
};

/// Y|group1 ~ U[0,1], Y|group2 ~ U[delta, 1+delta], delta in [0,1].
struct UniformShift {
    double delta = 0.0;
};

struct BernoulliPair {
    double p1 = 0.0, p2 = 0.0;
};

struct ExponentialPair {
    double rate1 = 1.0, rate2 = 1.0;
};

/// Marshall-Olkin copula with first parameter fixed at 1, beta in [0,1].
struct MarshallOlkin {
    double beta = 0.0;
};

/// Frechet copula: alpha * M + (1 - alpha - beta) * Pi + beta * W.
struct FrechetCopula {
    double alpha = 0.0, beta = 0.0;
};

/// One-parameter EFGM copula of (X_1..X_p, Y), alpha in [-1,1].
struct EFGM {
    double alpha = 0.0;
    std::size_t p = 1;
};

/// Finite joint table held as integer weights w[y][x]; probabilities are
/// w / total. Integer weights keep the coefficient evaluation exact for
/// rational tables.
class FinitePMF {
  public:
    FinitePMF(std::vector<double> y_atoms, std::vector<double> x_atoms,
              std::vector<std::vector<std::uint64_t>> weights)
        : y_atoms_(std::move(y_atoms)), x_atoms_(std::move(x_atoms)),
          weights_(std::move(weights)) {
        if (weights_.size() != y_atoms_.size())
            throw std::invalid_argument("FinitePMF: weights rows must match y atoms");
        for (const auto& row : weights_)
            if (row.size() != x_atoms_.size())
                throw std::invalid_argument("FinitePMF: weights cols must match x atoms");
        if (!std::is_sorted(y_atoms_.begin(), y_atoms_.end()) ||
            std::adjacent_find(y_atoms_.begin(), y_atoms_.end()) != y_atoms_.end())
            throw std::invalid_argument("FinitePMF: y atoms must be strictly ascending");
        if (!std::is_sorted(x_atoms_.begin(), x_atoms_.end()) ||
            std::adjacent_find(x_atoms_.begin(), x_atoms_.end()) != x_atoms_.end())
            throw std::invalid_argument("FinitePMF: x atoms must be strictly ascending");
        total_ = 0;
        col_totals_.assign(x_atoms_.size(), 0);
        for (const auto& row : weights_)
            for (std::size_t j = 0; j < row.size(); ++j) {
                col_totals_[j] += row[j];
                total_ += row[j];
            }
        if (total_ == 0) throw std::invalid_argument("FinitePMF: all weights are zero");
        if (total_ > (1ULL << 26))
            throw std::invalid_argument("FinitePMF: total weight too large for exact evaluation");
    }

    const std::vector<double>& y_atoms() const { return y_atoms_; }
    const std::vector<double>& x_atoms() const { return x_atoms_; }
    std::uint64_t weight(std::size_t yi, std::size_t xj) const { return weights_[yi][xj]; }
    std::uint64_t col_total(std::size_t xj) const { return col_totals_[xj]; }
    std::uint64_t total() const { return total_; }

    /// Number of x atoms with positive mass.
    std::size_t support_size() const {
        std::size_t m = 0;
        for (auto c : col_totals_) m += c > 0 ? 1 : 0;
        return m;
    }

    /// Integer kernel: S_ij = sum_y w[y][j] * (2 * cum_{<y}[i] + w[y][i]),
    /// so that Psi(col i, col j) = S_ij / (2 * W_i * W_j).
    std::uint64_t psi_kernel(std::size_t i, std::size_t j) const {
        std::uint64_t cum_i = 0, s = 0;
        for (std::size_t y = 0; y < y_atoms_.size(); ++y) {
            s += weights_[y][j] * (2 * cum_i + weights_[y][i]);
            cum_i += weights_[y][i];
        }
        return s;
    }

  private:
    std::vector<double> y_atoms_;
    std::vector<double> x_atoms_;
    std::vector<std::vector<std::uint64_t>> weights_;
    std::vector<std::uint64_t> col_totals_;
    std::uint64_t total_ = 0;
};

using ClosedFormModel = std::variant<BFNormal, MVNormal, UniformShift, BernoulliPair,
                                     ExponentialPair, MarshallOlkin, FrechetCopula, EFGM,
                                     FinitePMF>;

/// The Frechet-class table with fixed margins P(X=0)=P(X=1)=1/2 and
/// P(Y=y)=1/3 for y in {0,1,2}, parameterized by a_{1,0} and a_{2,0} in
/// units of 1/6. No member of this class is completely separated; the
/// coefficient is ((8/3)(a_{2,1} - a_{0,1}))^2 <= (8/9)^2.
inline FinitePMF frechet_class_table(std::uint64_t a10_sixths = 1,
                                     std::uint64_t a20_sixths = 2) {
    if (a10_sixths > 2 || a20_sixths > 2 || a10_sixths + a20_sixths > 3)
        throw std::invalid_argument("frechet_class_table: parameters leave a negative cell");
    const std::uint64_t a00 = 3 - a10_sixths - a20_sixths;
    if (a00 > 2) throw std::invalid_argument("frechet_class_table: a_{0,0} exceeds its margin");
    return FinitePMF({0.0, 1.0, 2.0}, {0.0, 1.0},
                     {{a00, 2 - a00}, {a10_sixths, 2 - a10_sixths},
                      {a20_sixths, 2 - a20_sixths}});
}

/// Three-group construction with q_1 = q_3 = q, exhibiting the weighting
/// paradox: the middle group sits exactly between the outer ones in the
/// pairwise-effect sense, and the coefficient equals q / (2 - 3q).
/// q is passed as the exact rational q_num / q_den, q <= 1/2.
inline FinitePMF three_group_paradox_table(std::uint64_t q_num, std::uint64_t q_den) {
    if (q_num == 0 || 2 * q_num > q_den)
        throw std::invalid_argument("three_group_paradox_table: need 0 < q <= 1/2");
    const std::uint64_t mid = q_den - 2 * q_num; // weight of the middle group (x=2)
    // doubled so the middle group's two response atoms split evenly
    return FinitePMF({0.0, 1.0, 2.0, 3.0}, {1.0, 2.0, 3.0},
                     {{0, mid, 0},
                      {2 * q_num, 0, 0},
                      {0, 0, 2 * q_num},
                      {0, mid, 0}});
}

namespace detail_oracle {

/// In-place lower Cholesky; returns false if the matrix is not positive
/// definite.
inline bool cholesky(Matrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) return false;
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > 0.0)) return false;
        a(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / a(j, j);
        }
        for (std::size_t i = 0; i < j; ++i) a(i, j) = 0.0;
    }
    return true;
}

/// Solve A v = b with A given by its lower Cholesky factor L (A = L L^T).
inline std::vector<double> cholesky_solve(const Matrix& l, std::vector<double> b) {
    const std::size_t n = l.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) b[i] -= l(i, k) * b[k];
        b[i] /= l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) b[i] -= l(k, i) * b[k];
        b[i] /= l(i, i);
    }
    return b;
}

inline double mvn_rho_squared(const MVNormal& m) {
    const std::size_t d = m.sigma.rows();
    if (d < 2 || m.sigma.cols() != d)
        throw std::invalid_argument("MVNormal: sigma must be square, at least 2x2");
    const std::size_t p = d - 1;
    const double var_y = m.sigma(p, p);
    if (!(var_y > 0.0)) throw std::invalid_argument("MVNormal: response variance must be > 0");
    Matrix s11(p, p);
    std::vector<double> s12(p);
    for (std::size_t i = 0; i < p; ++i) {
        s12[i] = m.sigma(i, p);
        for (std::size_t j = 0; j < p; ++j) s11(i, j) = m.sigma(i, j);
    }
    if (!cholesky(s11)) throw std::invalid_argument("MVNormal: sigma_XX not positive definite");
    const auto v = cholesky_solve(s11, s12);
    double r2 = 0.0;
    for (std::size_t i = 0; i < p; ++i) r2 += s12[i] * v[i];
    r2 /= var_y;
    if (r2 < 0.0) r2 = 0.0;
    if (r2 >= 1.0)
        throw std::invalid_argument("MVNormal: sigma not positive definite (rho^2 >= 1)");
    return r2;
}

inline void check_probability(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(what) + " not in [0,1]");
}

} // namespace detail_oracle

inline double lambda_finite_pmf(const FinitePMF& t);

/// Exact separation coefficient of the model.
inline double lambda_exact(const ClosedFormModel& model) {
    return std::visit(
        [](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, BFNormal>) {
                if (!(m.var1 > 0.0 && m.var2 > 0.0))
                    throw std::invalid_argument("BFNormal: variances must be > 0");
                if (!(m.q > 0.0 && m.q < 1.0))
                    throw std::invalid_argument("BFNormal: q must be in (0,1)");
                const double z = (m.mu1 - m.mu2) / std::sqrt(m.var1 + m.var2);
                const double d = 2.0 * norm_cdf(z) - 1.0;
                return d * d;
            } else if constexpr (std::is_same_v<T, MVNormal>) {
                return (2.0 / 3.14159265358979323846) *
                       std::asin(detail_oracle::mvn_rho_squared(m));
            } else if constexpr (std::is_same_v<T, UniformShift>) {
                if (!(m.delta >= 0.0 && m.delta <= 1.0))
                    throw std::invalid_argument("UniformShift: delta must be in [0,1]");
                return m.delta * m.delta * (2.0 - m.delta) * (2.0 - m.delta);
            } else if constexpr (std::is_same_v<T, BernoulliPair>) {
                detail_oracle::check_probability(m.p1, "BernoulliPair: p1");
                detail_oracle::check_probability(m.p2, "BernoulliPair: p2");
                return (m.p2 - m.p1) * (m.p2 - m.p1);
            } else if constexpr (std::is_same_v<T, ExponentialPair>) {
                if (!(m.rate1 > 0.0 && m.rate2 > 0.0))
                    throw std::invalid_argument("ExponentialPair: rates must be > 0");
                const double d = (m.rate2 - m.rate1) / (m.rate1 + m.rate2);
                return d * d;
            } else if constexpr (std::is_same_v<T, MarshallOlkin>) {
                detail_oracle::check_probability(m.beta, "MarshallOlkin: beta");
                return m.beta / (2.0 - m.beta);
            } else if constexpr (std::is_same_v<T, FrechetCopula>) {
                detail_oracle::check_probability(m.alpha, "FrechetCopula: alpha");
                detail_oracle::check_probability(m.beta, "FrechetCopula: beta");
                if (m.alpha + m.beta > 1.0)
                    throw std::invalid_argument("FrechetCopula: alpha + beta must be <= 1");
                const double d = m.alpha - m.beta;
                const double s = m.alpha + m.beta;
                return d * d * (s * s + 2.0) / 3.0;
            } else if constexpr (std::is_same_v<T, EFGM>) {
                if (!(m.alpha >= -1.0 && m.alpha <= 1.0))
                    throw std::invalid_argument("EFGM: alpha must be in [-1,1]");
                if (m.p < 1) throw std::invalid_argument("EFGM: p must be >= 1");
                return 2.0 * m.alpha * m.alpha /
                       std::pow(3.0, static_cast<double>(m.p) + 2.0);
            } else {
                static_assert(std::is_same_v<T, FinitePMF>);
                return lambda_finite_pmf(m);
            }
        },
        model);
}

/// Exact coefficient of a finite table: the group-weighted mean of squared
/// pairwise effects over the non-tie mass, assembled from the integer
/// kernels S_ij so rational tables evaluate exactly. The two-group case
/// reduces to a single division.
inline double lambda_finite_pmf(const FinitePMF& t) {
    const std::size_t mx = t.x_atoms().size();
    std::vector<std::size_t> live;
    for (std::size_t j = 0; j < mx; ++j)
        if (t.col_total(j) > 0) live.push_back(j);
    if (live.size() < 2) throw SingleGroup();

    const auto w_total = static_cast<long long>(t.total());
    long long sum_sq = 0;
    for (std::size_t j : live) {
        const auto c = static_cast<long long>(t.col_total(j));
        sum_sq += c * c;
    }
    const long long denom_scaled = w_total * w_total - sum_sq;

    if (live.size() == 2) {
        const auto wi = static_cast<long long>(t.col_total(live[0]));
        const auto wj = static_cast<long long>(t.col_total(live[1]));
        const long long d = static_cast<long long>(t.psi_kernel(live[0], live[1])) - wi * wj;
        return (static_cast<double>(d) * static_cast<double>(d)) /
               (static_cast<double>(wi * wj) * static_cast<double>(wi * wj));
    }

    double acc = 0.0; // 2 * sum_{i<j} (S_ij - W_i W_j)^2 / (W_i W_j)
    for (std::size_t a = 0; a < live.size(); ++a) {
        for (std::size_t b = a + 1; b < live.size(); ++b) {
            const auto wi = static_cast<long long>(t.col_total(live[a]));
            const auto wj = static_cast<long long>(t.col_total(live[b]));
            const long long d =
                static_cast<long long>(t.psi_kernel(live[a], live[b])) - wi * wj;
            acc += 2.0 * (static_cast<double>(d) * static_cast<double>(d)) /
                   static_cast<double>(wi * wj);
        }
    }
    return acc / static_cast<double>(denom_scaled);
}

/// Exact relative effect of group 1 versus group 2 for two-group families.
inline double psi_exact(const ClosedFormModel& model) {
    return std::visit(
        [](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, BFNormal>) {
                if (!(m.var1 > 0.0 && m.var2 > 0.0))
                    throw std::invalid_argument("BFNormal: variances must be > 0");
                return norm_cdf((m.mu2 - m.mu1) / std::sqrt(m.var1 + m.var2));
            } else if constexpr (std::is_same_v<T, UniformShift>) {
                if (!(m.delta >= 0.0 && m.delta <= 1.0))
                    throw std::invalid_argument("UniformShift: delta must be in [0,1]");
                return (1.0 + 2.0 * m.delta - m.delta * m.delta) / 2.0;
            } else if constexpr (std::is_same_v<T, BernoulliPair>) {
                detail_oracle::check_probability(m.p1, "BernoulliPair: p1");
                detail_oracle::check_probability(m.p2, "BernoulliPair: p2");
                return (1.0 + m.p2 - m.p1) / 2.0;
            } else if constexpr (std::is_same_v<T, ExponentialPair>) {
                if (!(m.rate1 > 0.0 && m.rate2 > 0.0))
                    throw std::invalid_argument("ExponentialPair: rates must be > 0");
                return m.rate1 / (m.rate1 + m.rate2);
            } else if constexpr (std::is_same_v<T, FinitePMF>) {
                std::vector<std::size_t> live;
                for (std::size_t j = 0; j < m.x_atoms().size(); ++j)
                    if (m.col_total(j) > 0) live.push_back(j);
                if (live.size() != 2)
                    throw std::invalid_argument("psi_exact: table is not two-group");
                const double s = static_cast<double>(m.psi_kernel(live[0], live[1]));
                return s / (2.0 * static_cast<double>(m.col_total(live[0])) *
                            static_cast<double>(m.col_total(live[1])));
            } else {
                throw std::invalid_argument("psi_exact: model is not a two-group family");
            }
        },
        model);
}

/// i.i.d. draws from the model's joint law. Copula families are sampled by
/// inverse transform with uniform marginals; the Marshall-Olkin copula by
/// its max-representation; EFGM by the closed-form conditional quantile.
inline ObservationSet sample(const ClosedFormModel& model, std::size_t n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("sample: need n >= 2");
    (void)lambda_exact(model); // parameter validation up front
    CounterRng rng(rng::derive_key(seed, rng::kGenerate));

    return std::visit(
        [&](const auto& m) -> ObservationSet {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, BFNormal>) {
                Matrix x(n, 1);
                std::vector<double> y(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const bool g1 = rng.uniform01() < m.q;
                    const double z = norm_quantile(rng.uniform_open01());
                    x(i, 0) = g1 ? 1.0 : 2.0;
                    y[i] = g1 ? m.mu1 + std::sqrt(m.var1) * z : m.mu2 + std::sqrt(m.var2) * z;
                }
                return ObservationSet(std::move(x), std::move(y));
            } else if constexpr (std::is_same_v<T, MVNormal>) {
                Matrix l = m.sigma;
                if (!detail_oracle::cholesky(l))
                    throw std::invalid_argument("MVNormal: sigma not positive definite");
                const std::size_t d = l.rows();
                const std::size_t p = d - 1;
                Matrix x(n, p);
                std::vector<double> y(n), z(d), row(d);
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t k = 0; k < d; ++k)
                        z[k] = norm_quantile(rng.uniform_open01());
                    for (std::size_t r = 0; r < d; ++r) {
                        double s = 0.0;
                        for (std::size_t k = 0; k <= r; ++k) s += l(r, k) * z[k];
                        row[r] = s;
                    }
                    for (std::size_t j = 0; j < p; ++j) x(i, j) = row[j];
                    y[i] = row[p];
                }
                return ObservationSet(std::move(x), std::move(y));
            } else if constexpr (std::is_same_v<T, UniformShift>) {
                Matrix x(n, 1);
                std::vector<double> y(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const bool g1 = rng.uniform01() < 0.5;
                    const double u = rng.uniform01();
                    x(i, 0) = g1 ? 1.0 : 2.0;
                    y[i] = g1 ? u : m.delta + u;
                }
                return ObservationSet(std::move(x), std::move(y));
            } else if constexpr (std::is_same_v<T, BernoulliPair>) {
                Matrix x(n, 1);
                std::vector<double> y(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const bool g1 = rng.uniform01() < 0.5;
                    const double u = rng.uniform01();
                    x(i, 0) = g1 ? 1.0 : 2.0;
                    y[i] = (u < (g1 ? m.p1 : m.p2)) ? 1.0 : 0.0;
                }
                return ObservationSet(std::move(x), std::move(y));
            } else if constexpr (std::is_same_v<T, ExponentialPair>) {
                Matrix x(n, 1);
                std::vector<double> y(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const bool g1 = rng.uniform01() < 0.5;
                    const double u = rng.uniform_open01();
                    x(i, 0) = g1 ? 1.0 : 2.0;
                    y[i] = -std::log(u) / (g1 ? m.rate1 : m.rate2);
                }
                return ObservationSet(std::move(x), std::move(y));
            } else if constexpr (std::is_same_v<T, MarshallOlkin>) {
                Matrix x(n, 1);
                std::vector<double> y(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const double u3 = rng.uniform_open01();
                    const double u2 = rng.uniform_open01();
                    x(i, 0) = u3;
                    if (m.beta <= 0.0)
                        y[i] = u2;
                    else if (m.beta >= 1.0)
                        y[i] = u3;
                    else
                        y[i] = std::max(std::pow(u2, 1.0 / (1.0 - m.beta)),
                                        std::pow(u3, 1.0 / m.beta));
                }
                return ObservationSet(std::move(x), std::move(y));
            } else if constexpr (std::is_same_v<T, FrechetCopula>) {
                Matrix x(n, 1);
                std::vector<double> y(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const double w = rng.uniform01();
                    const double u = rng.uniform_open01();
                    const double v = rng.uniform_open01();
                    x(i, 0) = u;
                    if (w < m.alpha)
                        y[i] = u; // comonotone component
                    else if (w < m.alpha + m.beta)
                        y[i] = 1.0 - u; // countermonotone component
                    else
                        y[i] = v; // independence component
                }
                return ObservationSet(std::move(x), std::move(y));
            } else if constexpr (std::is_same_v<T, EFGM>) {
                Matrix x(n, m.p);
                std::vector<double> y(n);
                for (std::size_t i = 0; i < n; ++i) {
                    double prod = 1.0;
                    for (std::size_t j = 0; j < m.p; ++j) {
                        const double u = rng.uniform_open01();
                        x(i, j) = u;
                        prod *= 1.0 - 2.0 * u;
                    }
                    const double w = m.alpha * prod;
                    const double t = rng.uniform_open01();
                    if (std::abs(w) < 1e-15) {
                        y[i] = t;
                    } else {
                        const double b = 1.0 + w;
                        y[i] = (b - std::sqrt(b * b - 4.0 * w * t)) / (2.0 * w);
                    }
                }
                return ObservationSet(std::move(x), std::move(y));
            } else {
                static_assert(std::is_same_v<T, FinitePMF>);
                const auto& ya = m.y_atoms();
                const auto& xa = m.x_atoms();
                std::vector<std::uint64_t> cum;
                std::vector<std::pair<std::size_t, std::size_t>> cells;
                std::uint64_t running = 0;
                for (std::size_t yi = 0; yi < ya.size(); ++yi)
                    for (std::size_t xj = 0; xj < xa.size(); ++xj)
                        if (m.weight(yi, xj) > 0) {
                            running += m.weight(yi, xj);
                            cum.push_back(running);
                            cells.emplace_back(yi, xj);
                        }
                Matrix x(n, 1);
                std::vector<double> y(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const std::uint64_t r = rng.uniform_below(m.total());
                    const std::size_t c = static_cast<std::size_t>(
                        std::upper_bound(cum.begin(), cum.end(), r) - cum.begin());
                    y[i] = ya[cells[c].first];
                    x(i, 0) = xa[cells[c].second];
                }
                return ObservationSet(std::move(x), std::move(y));
            }
        },
        model);
}

} // namespace sepcoef::models
