// Copyright (c) 2026 sepcoef contributors
// SPDX-License-Identifier: Apache-2.0
//
// Exact Euclidean nearest-neighbor assignment over predictor rows.
// Distances are squared (argmin-equivalent), ties are detected by exact
// equality of squared distances, and every minimizer enters a uniform
// seeded draw. Duplicate rows are grouped first: a duplicated row's
// minimizers are exactly the other members of its group (distance zero),
// and a unique row's candidate set carries each duplicate as a separate
// index, so the draw is uniform over rows, not over distinct points.

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include "sepcoef/common.hpp"
#include "sepcoef/parallel.hpp"
#include "sepcoef/rng.hpp"

namespace sepcoef {

struct NeighborMap {
    std::vector<std::uint32_t> neighbor_index; // N(k), 0-based, never equal to k
    std::vector<std::uint32_t> tie_counts;     // rows achieving the minimal distance
    std::uint64_t seed = 0;
};

namespace detail {

/// Canonical squared distance; the single definition shared by the tree,
/// the brute-force path and any external oracle keeps comparisons exact.
inline double sq_dist(const double* a, const double* b, std::size_t p) {
    double s = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

/// k-d tree over distinct points with tie-preserving traversal. A subtree
/// is pruned only when its splitting-plane distance strictly exceeds the
/// incumbent, so co-minimal points are never lost; round-to-nearest is
/// monotone, which keeps the plane bound valid in floating point too.
/// Coordinates are stored leaf-contiguous, and slot_order() exposes that
/// layout so callers can batch queries with spatial locality.
class KdTree {
  public:
    explicit KdTree(const Matrix& pts) : p_(pts.cols()) {
        const std::size_t m = pts.rows();
        idx_.resize(m);
        std::iota(idx_.begin(), idx_.end(), std::uint32_t{0});
        nodes_.reserve(2 * m / kLeafSize + 2);

        if (m > kParallelBuildThreshold && std::thread::hardware_concurrency() > 1) {
            // split the root once, then grow the two subtrees on separate
            // threads into private arenas (they touch disjoint idx_ ranges)
            const std::size_t dim = widest_dimension(pts, 0, m);
            const std::size_t mid = m / 2;
            std::nth_element(idx_.begin(), idx_.begin() + static_cast<std::ptrdiff_t>(mid),
                             idx_.end(), [&](std::uint32_t a, std::uint32_t b) {
                                 return pts(a, dim) < pts(b, dim);
                             });
            Node root;
            root.split_dim = static_cast<std::uint16_t>(dim);
            root.split_val = pts(idx_[mid], dim);
            nodes_.push_back(root);
            std::vector<Node> left_arena, right_arena;
            std::int32_t left_root = -1;
            std::thread worker(
                [&] { left_root = build(pts, 0, mid, left_arena); });
            const std::int32_t right_root = build(pts, mid, m, right_arena);
            worker.join();
            nodes_[0].left = left_root + append_arena(left_arena);
            nodes_[0].right = right_root + append_arena(right_arena);
            root_ = 0;
        } else {
            root_ = build(pts, 0, m, nodes_);
        }

        coords_.resize(m * p_);
        slot_of_.resize(m);
        for (std::size_t s = 0; s < m; ++s) {
            const auto src = pts.row(idx_[s]);
            std::copy(src.begin(), src.end(), coords_.begin() + static_cast<std::ptrdiff_t>(s * p_));
            slot_of_[idx_[s]] = static_cast<std::uint32_t>(s);
        }
    }

    /// Point ids in leaf-contiguous order; querying in this order keeps
    /// consecutive traversals on overlapping tree paths.
    std::span<const std::uint32_t> slot_order() const { return idx_; }

    /// Collect every distinct-point id at exactly the minimal distance
    /// from point self_id (which is skipped).
    void nearest(std::uint32_t self_id, std::vector<std::uint32_t>& ties,
                 double& best_sq) const {
        nearest_slot(slot_of_[self_id], ties, best_sq);
    }

    /// Same query addressed by storage slot (see slot_order()), sparing the
    /// id-to-slot gather when the caller already iterates in slot order.
    void nearest_slot(std::uint32_t self_slot, std::vector<std::uint32_t>& ties,
                      double& best_sq) const {
        ties.clear();
        best_sq = std::numeric_limits<double>::infinity();
        switch (p_) {
            case 1: search<1>(root_, self_slot, ties, best_sq); break;
            case 2: search<2>(root_, self_slot, ties, best_sq); break;
            case 3: search<3>(root_, self_slot, ties, best_sq); break;
            default: search<0>(root_, self_slot, ties, best_sq); break;
        }
        for (auto& t : ties) t = idx_[t]; // slots back to point ids
    }

  private:
    static constexpr std::size_t kLeafSize = 16;
    static constexpr std::size_t kSpreadSample = 64;
    static constexpr std::size_t kParallelBuildThreshold = 200000;

    struct Node {
        double split_val = 0.0;
        std::int32_t left = -1, right = -1;
        std::uint32_t begin = 0, end = 0; // leaf slot range
        std::uint16_t split_dim = 0;
        bool leaf = false;
    };

    /// Move an arena into nodes_, shifting its internal child links; the
    /// caller adds the returned base to the arena-local root index.
    std::int32_t append_arena(std::vector<Node>& arena) {
        const auto base = static_cast<std::int32_t>(nodes_.size());
        for (Node& node : arena) {
            if (!node.leaf) {
                node.left += base;
                node.right += base;
            }
            nodes_.push_back(node);
        }
        arena.clear();
        return base;
    }

    std::size_t widest_dimension(const Matrix& pts, std::size_t lo, std::size_t hi) const {
        // sampled spread is enough to pick a reasonable split axis
        double mn[64], mx[64];
        const std::size_t p = p_;
        for (std::size_t d = 0; d < p; ++d) {
            mn[d] = pts(idx_[lo], d);
            mx[d] = mn[d];
        }
        const std::size_t stride = std::max<std::size_t>(1, (hi - lo) / kSpreadSample);
        for (std::size_t i = lo; i < hi; i += stride) {
            for (std::size_t d = 0; d < p; ++d) {
                const double v = pts(idx_[i], d);
                mn[d] = std::min(mn[d], v);
                mx[d] = std::max(mx[d], v);
            }
        }
        std::size_t dim = 0;
        double widest = mx[0] - mn[0];
        for (std::size_t d = 1; d < p; ++d) {
            if (mx[d] - mn[d] > widest) {
                widest = mx[d] - mn[d];
                dim = d;
            }
        }
        return dim;
    }

    std::int32_t build(const Matrix& pts, std::size_t lo, std::size_t hi,
                       std::vector<Node>& arena) {
        Node node;
        if (hi - lo <= kLeafSize) {
            node.leaf = true;
            node.begin = static_cast<std::uint32_t>(lo);
            node.end = static_cast<std::uint32_t>(hi);
            arena.push_back(node);
            return static_cast<std::int32_t>(arena.size() - 1);
        }
        const std::size_t dim = widest_dimension(pts, lo, hi);
        const std::size_t mid = lo + (hi - lo) / 2;
        std::nth_element(
            idx_.begin() + static_cast<std::ptrdiff_t>(lo),
            idx_.begin() + static_cast<std::ptrdiff_t>(mid),
            idx_.begin() + static_cast<std::ptrdiff_t>(hi),
            [&](std::uint32_t a, std::uint32_t b) { return pts(a, dim) < pts(b, dim); });
        node.split_dim = static_cast<std::uint16_t>(dim);
        node.split_val = pts(idx_[mid], dim);
        arena.push_back(node);
        const auto self = static_cast<std::int32_t>(arena.size() - 1);
        const auto l = build(pts, lo, mid, arena);
        const auto r = build(pts, mid, hi, arena);
        arena[static_cast<std::size_t>(self)].left = l;
        arena[static_cast<std::size_t>(self)].right = r;
        return self;
    }

    /// P > 0 fixes the dimension at compile time for the hot leaf scans;
    /// the arithmetic (ascending-coordinate sum of squares) is identical to
    /// sq_dist, so results match it bit-for-bit.
    template <int P>
    void search(std::int32_t ni, std::uint32_t self_slot, std::vector<std::uint32_t>& ties,
                double& best_sq) const {
        const Node& node = nodes_[static_cast<std::size_t>(ni)];
        const std::size_t p = P > 0 ? static_cast<std::size_t>(P) : p_;
        const double* q = coords_.data() + static_cast<std::size_t>(self_slot) * p;
        if (node.leaf) {
            const double* row = coords_.data() + static_cast<std::size_t>(node.begin) * p;
            for (std::uint32_t s = node.begin; s < node.end; ++s, row += p) {
                if (s == self_slot) continue;
                double d2;
                if constexpr (P > 0) {
                    d2 = 0.0;
                    for (int j = 0; j < P; ++j) {
                        const double d = q[j] - row[j];
                        d2 += d * d;
                    }
                } else {
                    d2 = sq_dist(q, row, p);
                }
                if (d2 < best_sq) {
                    best_sq = d2;
                    ties.clear();
                    ties.push_back(s);
                } else if (d2 == best_sq) {
                    ties.push_back(s);
                }
            }
            return;
        }
        const double delta = q[node.split_dim] - node.split_val;
        const std::int32_t near_child = delta < 0.0 ? node.left : node.right;
        const std::int32_t far_child = delta < 0.0 ? node.right : node.left;
        search<P>(near_child, self_slot, ties, best_sq);
        if (delta * delta <= best_sq) search<P>(far_child, self_slot, ties, best_sq);
    }

    std::size_t p_;
    std::vector<double> coords_;       // leaf-contiguous, slot-major
    std::vector<std::uint32_t> idx_;   // slot -> point id
    std::vector<std::uint32_t> slot_of_; // point id -> slot
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

} // namespace detail

/// Exact nearest neighbors for every row of x, ties broken uniformly at
/// random with per-row draws derived from the seed, hence independent of
/// traversal and thread order. Brute force takes over above kBruteForceDim
/// predictors, where k-d pruning stops paying off.
inline NeighborMap build_neighbor_map(const Matrix& x, std::uint64_t seed,
                                      const detail::RowGroups& groups) {
    constexpr std::size_t kBruteForceDim = 12;
    const std::size_t n = x.rows();
    if (n < 2) throw std::invalid_argument("build_neighbor_map: need n >= 2");

    NeighborMap nm;
    nm.seed = seed;
    nm.neighbor_index.resize(n);
    nm.tie_counts.resize(n);

    // duplicated rows first: minimal distance is zero, minimizers are peers
    const std::size_t m = groups.group_count();
    const bool has_duplicates = !groups.all_distinct();
    if (has_duplicates) {
        parallel_for(0, n, [&](std::size_t k) {
            const auto own = groups.group(groups.group_of[k]);
            if (own.size() < 2) return;
            CounterRng rng(rng::derive_key(seed, rng::kNeighborTie, k));
            nm.tie_counts[k] = static_cast<std::uint32_t>(own.size() - 1);
            std::size_t idx = static_cast<std::size_t>(rng.uniform_below(own.size() - 1));
            if (own[idx] >= k) ++idx; // own is ascending and contains k once
            nm.neighbor_index[k] = own[idx];
        });
    }

    // distinct-point matrix; with no duplicates the input doubles as it
    Matrix distinct_storage;
    const Matrix* distinct = &x;
    if (has_duplicates) {
        distinct_storage = Matrix(m, x.cols());
        for (std::size_t g = 0; g < m; ++g) {
            const auto src = x.row(groups.group(g).front());
            std::copy(src.begin(), src.end(), distinct_storage.row(g).begin());
        }
        distinct = &distinct_storage;
    }

    const bool use_tree = x.cols() <= kBruteForceDim && m > 32;
    std::unique_ptr<detail::KdTree> tree;
    if (use_tree) tree = std::make_unique<detail::KdTree>(*distinct);

    const bool all_distinct = !has_duplicates;

    // queries for singleton-group rows
    auto finish_query = [&](std::uint32_t gid, std::vector<std::uint32_t>& tied_ids,
                            std::vector<std::uint32_t>& candidates) {
        // expand tied distinct points into row indices, ascending; with no
        // duplicates anywhere, point ids are row ids already
        std::vector<std::uint32_t>* cand = &tied_ids;
        if (!all_distinct) {
            candidates.clear();
            for (std::uint32_t id : tied_ids) {
                const auto rows = groups.group(id);
                candidates.insert(candidates.end(), rows.begin(), rows.end());
            }
            cand = &candidates;
        }
        std::sort(cand->begin(), cand->end());
        const std::uint32_t k = all_distinct ? gid : groups.group(gid).front();
        CounterRng rng(rng::derive_key(seed, rng::kNeighborTie, k));
        nm.tie_counts[k] = static_cast<std::uint32_t>(cand->size());
        const std::size_t pick = static_cast<std::size_t>(rng.uniform_below(cand->size()));
        nm.neighbor_index[k] = (*cand)[pick];
    };

    if (tree) {
        // visit in leaf order: consecutive queries share tree paths
        const auto order = tree->slot_order();
        parallel_for(0, m, [&, order](std::size_t s) {
            thread_local std::vector<std::uint32_t> tied_ids, candidates;
            const std::uint32_t gid = order[s];
            if (groups.group_size(gid) > 1) return;
            double best;
            tree->nearest_slot(static_cast<std::uint32_t>(s), tied_ids, best);
            finish_query(gid, tied_ids, candidates);
        });
    } else {
        parallel_for(0, m, [&](std::size_t g) {
            thread_local std::vector<std::uint32_t> tied_ids, candidates;
            const auto gid = static_cast<std::uint32_t>(g);
            if (groups.group_size(gid) > 1) return;
            tied_ids.clear();
            double best = std::numeric_limits<double>::infinity();
            const double* q = distinct->row(gid).data();
            for (std::uint32_t other = 0; other < m; ++other) {
                if (other == gid) continue;
                const double d2 = detail::sq_dist(q, distinct->row(other).data(), x.cols());
                if (d2 < best) {
                    best = d2;
                    tied_ids.clear();
                    tied_ids.push_back(other);
                } else if (d2 == best) {
                    tied_ids.push_back(other);
                }
            }
            finish_query(gid, tied_ids, candidates);
        });
    }

    return nm;
}

inline NeighborMap build_neighbor_map(const Matrix& x, std::uint64_t seed) {
    return build_neighbor_map(x, seed, detail::group_row_indices(x, false));
}

} // namespace sepcoef
