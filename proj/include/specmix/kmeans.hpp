#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"
#include "random.hpp"

namespace specmix {

struct KMeansConfig {
    int restarts = 10;
    int max_iters = 300;
    double tol = 1e-6;          // stop when relative inertia improvement falls below this
    std::uint64_t seed = 0;
    bool normalize_rows = false;

    void validate() const {
        detail::require(restarts >= 1, ErrorCode::InvalidArgument, "restarts must be >= 1");
        detail::require(max_iters >= 1, ErrorCode::InvalidArgument, "max_iters must be >= 1");
        detail::require(tol > 0.0, ErrorCode::InvalidArgument, "tol must be positive");
    }
};

struct KMeansResult {
    Labels labels;
    Eigen::MatrixXd centers;      // K x dims
    double inertia = 0.0;
    int iterations = 0;
    int repairs = 0;
    std::vector<double> history;  // inertia after each assignment step of the winning run
};

namespace detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline double squared_distance(const RowMatrix& pts, Index i, const RowMatrix& centers, Index k) {
    return (pts.row(i) - centers.row(k)).squaredNorm();
}

/// k-means++ seeding: first center uniform, then proportional to squared distance.
inline RowMatrix kmeanspp_init(const RowMatrix& pts, int K, Rng& rng) {
    const Index n = pts.rows();
    RowMatrix centers(K, pts.cols());
    centers.row(0) = pts.row(static_cast<Index>(uniform_index(rng, static_cast<std::uint64_t>(n))));
    std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    for (int k = 1; k < K; ++k) {
        double total = 0.0;
        for (Index i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_distance(pts, i, centers, k - 1));
            total += d2[i];
        }
        Index pick = n - 1;
        if (total > 0.0) {
            const double target = uniform01(rng) * total;
            double acc = 0.0;
            for (Index i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Index>(uniform_index(rng, static_cast<std::uint64_t>(n)));
        }
        centers.row(k) = pts.row(pick);
    }
    return centers;
}

}  // namespace detail

/**
 * One Lloyd run from the given centers. An empty cluster is reseeded at the
 * point farthest from its current center.
 */
inline KMeansResult lloyd(const Eigen::MatrixXd& points, const Eigen::MatrixXd& initial_centers, int max_iters,
                          double tol) {
    const detail::RowMatrix pts = points;
    detail::RowMatrix centers = initial_centers;
    const Index n = pts.rows();
    const auto K = static_cast<int>(centers.rows());

    KMeansResult res;
    res.labels.assign(static_cast<std::size_t>(n), 0);
    std::vector<double> dist(static_cast<std::size_t>(n));
    double prev = std::numeric_limits<double>::infinity();

    for (int it = 0; it < max_iters; ++it) {
        bool changed = false;
        double inertia = 0.0;
        for (Index i = 0; i < n; ++i) {
            int best = 0;
            double bd = detail::squared_distance(pts, i, centers, 0);
            for (int k = 1; k < K; ++k) {
                const double d = detail::squared_distance(pts, i, centers, k);
                if (d < bd) {
                    bd = d;
                    best = k;
                }
            }
            if (it == 0 || res.labels[i] != best) changed = true;
            res.labels[i] = best;
            dist[i] = bd;
            inertia += bd;
        }

        std::vector<Index> counts(static_cast<std::size_t>(K), 0);
        for (int l : res.labels) ++counts[l];
        for (int k = 0; k < K; ++k) {
            if (counts[k] > 0) continue;
            Index far = -1;
            for (Index i = 0; i < n; ++i) {
                if (counts[res.labels[i]] > 1 && (far < 0 || dist[i] > dist[far])) far = i;
            }
            if (far < 0) continue;  // every cluster is a singleton
            inertia -= dist[far];
            --counts[res.labels[far]];
            res.labels[far] = k;
            ++counts[k];
            dist[far] = 0.0;
            ++res.repairs;
            changed = true;
        }

        centers.setZero();
        for (Index i = 0; i < n; ++i) centers.row(res.labels[i]) += pts.row(i);
        for (int k = 0; k < K; ++k) {
            if (counts[k] > 0) centers.row(k) /= static_cast<double>(counts[k]);
        }

        // Inertia against the updated centers.
        inertia = 0.0;
        for (Index i = 0; i < n; ++i) inertia += detail::squared_distance(pts, i, centers, res.labels[i]);
        res.history.push_back(inertia);
        res.iterations = it + 1;
        res.inertia = inertia;
        if (!changed) break;
        if (it > 0 && prev - inertia <= tol * prev) break;
        prev = inertia;
    }
    res.centers = centers;
    return res;
}

/// Best of `restarts` k-means++ initialized Lloyd runs.
inline KMeansResult kmeans(const Eigen::MatrixXd& points, int K, const KMeansConfig& cfg = {}) {
    cfg.validate();
    detail::require(K >= 1, ErrorCode::InvalidArgument, "K must be positive");
    detail::require(points.rows() >= K, ErrorCode::InvalidArgument, "fewer rows than clusters");

    Eigen::MatrixXd data = points;
    if (cfg.normalize_rows) {
        for (Index i = 0; i < data.rows(); ++i) {
            const double nrm = data.row(i).norm();
            if (nrm > 0.0) data.row(i) /= nrm;
        }
    }
    const detail::RowMatrix pts = data;

    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < cfg.restarts; ++r) {
        Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(r)}));
        const detail::RowMatrix init = detail::kmeanspp_init(pts, K, rng);
        KMeansResult run = lloyd(data, init, cfg.max_iters, cfg.tol);
        if (run.inertia < best.inertia) best = std::move(run);
    }
    return best;
}

}  // namespace specmix
