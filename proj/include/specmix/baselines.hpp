#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"
#include "random.hpp"

namespace specmix {

/// K-modes / K-prototypes configuration. gamma is only used by kprototypes;
/// a negative value selects 0.5 * mean numeric column variance.
struct PartitionalConfig {
    int K = 2;
    std::uint64_t seed = 0;
    int max_iters = 100;
    int restarts = 10;
    double gamma = -1.0;
};

struct PrototypeSet {
    Eigen::MatrixXd centers;   // K x R
    CategoryMatrix modes;      // K x Q
    double gamma = 0.0;
};

struct PartitionalResult {
    Labels labels;
    PrototypeSet prototypes;
    double cost = 0.0;
    int iterations = 0;
    int repairs = 0;
    std::vector<double> history;  // objective after each iteration of the winning run
};

namespace detail {

/// K distinct row indices drawn uniformly.
inline std::vector<Index> sample_distinct_rows(Index n, int K, Rng& rng) {
    std::vector<Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Index{0});
    for (int k = 0; k < K; ++k) {
        const auto j = k + static_cast<Index>(uniform_index(rng, static_cast<std::uint64_t>(n - k)));
        std::swap(idx[k], idx[j]);
    }
    idx.resize(static_cast<std::size_t>(K));
    return idx;
}

inline int hamming(const CategoryMatrix& cat, Index i, const CategoryMatrix& modes, Index k) {
    int d = 0;
    for (Index l = 0; l < cat.cols(); ++l) d += cat(i, l) != modes(k, l);
    return d;
}

/**
 * Shared alternating minimization for k-modes (numeric part empty, gamma = 1)
 * and k-prototypes. The first assignment breaks ties by lowest cluster index;
 * later a point moves only on strict improvement, which keeps the objective
 * monotone. An empty cluster takes the point with the largest current cost.
 */
inline PartitionalResult alternate(const Eigen::MatrixXd& num, const CategoryMatrix& cat,
                                   const std::vector<int>& cards, const std::vector<Index>& init, double gamma,
                                   int max_iters) {
    const Index n = std::max(num.rows(), cat.rows());
    const auto K = static_cast<int>(init.size());
    const Index R = num.cols();
    const Index Q = cat.cols();

    PartitionalResult res;
    PrototypeSet& proto = res.prototypes;
    proto.gamma = gamma;
    proto.centers.resize(K, R);
    proto.modes.resize(K, Q);
    for (int k = 0; k < K; ++k) {
        if (R) proto.centers.row(k) = num.row(init[k]);
        if (Q) proto.modes.row(k) = cat.row(init[k]);
    }

    auto cost_of = [&](Index i, int k) {
        double c = 0.0;
        if (R) c += (num.row(i) - proto.centers.row(k)).squaredNorm();
        if (Q) c += gamma * hamming(cat, i, proto.modes, k);
        return c;
    };

    res.labels.assign(static_cast<std::size_t>(n), -1);
    std::vector<double> cost(static_cast<std::size_t>(n));
    for (int it = 0; it < max_iters; ++it) {
        bool changed = false;
        for (Index i = 0; i < n; ++i) {
            int& cur = res.labels[i];
            int best = cur;
            double bc = cur >= 0 ? cost_of(i, cur) : std::numeric_limits<double>::infinity();
            for (int k = 0; k < K; ++k) {
                const double c = cost_of(i, k);
                if (c < bc) {
                    bc = c;
                    best = k;
                }
            }
            if (best != cur) changed = true;
            cur = best;
            cost[i] = bc;
        }

        std::vector<Index> counts(static_cast<std::size_t>(K), 0);
        for (int l : res.labels) ++counts[l];
        for (int k = 0; k < K; ++k) {
            if (counts[k] > 0) continue;
            Index far = -1;
            for (Index i = 0; i < n; ++i) {
                if (counts[res.labels[i]] > 1 && (far < 0 || cost[i] > cost[far])) far = i;
            }
            if (far < 0) continue;
            --counts[res.labels[far]];
            res.labels[far] = k;
            ++counts[k];
            ++res.repairs;
            changed = true;
        }

        // Prototype update: means and per-column modes (lowest category index on ties).
        if (R) {
            proto.centers.setZero();
            for (Index i = 0; i < n; ++i) proto.centers.row(res.labels[i]) += num.row(i);
            for (int k = 0; k < K; ++k) proto.centers.row(k) /= static_cast<double>(counts[k]);
        }
        for (Index l = 0; l < Q; ++l) {
            Eigen::MatrixXi freq = Eigen::MatrixXi::Zero(K, cards[l]);
            for (Index i = 0; i < n; ++i) ++freq(res.labels[i], cat(i, l));
            for (int k = 0; k < K; ++k) {
                Index arg = 0;
                freq.row(k).maxCoeff(&arg);
                proto.modes(k, l) = static_cast<int>(arg);
            }
        }

        double total = 0.0;
        for (Index i = 0; i < n; ++i) total += cost_of(i, res.labels[i]);
        res.history.push_back(total);
        res.cost = total;
        res.iterations = it + 1;
        if (!changed) break;
    }
    return res;
}

}  // namespace detail

/// Alternating modes / Hamming-nearest-mode clustering of categorical rows.
inline PartitionalResult kmodes(const CategoryMatrix& cat, const std::vector<int>& cardinalities,
                                const PartitionalConfig& cfg) {
    detail::require(cat.cols() >= 1, ErrorCode::CategoricalRequired, "kmodes needs categorical features");
    detail::require(static_cast<Index>(cardinalities.size()) == cat.cols(), ErrorCode::DimensionMismatch,
                    "cardinalities length differs from Q");
    detail::require(cfg.K >= 1, ErrorCode::InvalidArgument, "K must be positive");
    detail::require(cat.rows() >= cfg.K, ErrorCode::InvalidArgument, "fewer rows than clusters");
    const Eigen::MatrixXd none(cat.rows(), 0);
    PartitionalResult best;
    best.cost = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, cfg.restarts); ++r) {
        Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(r)}));
        const auto init = detail::sample_distinct_rows(cat.rows(), cfg.K, rng);
        auto run = detail::alternate(none, cat, cardinalities, init, 1.0, cfg.max_iters);
        if (run.cost < best.cost) best = std::move(run);
    }
    return best;
}

inline PartitionalResult kmodes(const MixedDataset& ds, const PartitionalConfig& cfg) {
    return kmodes(ds.categorical, ds.cardinalities, cfg);
}

inline double default_prototype_gamma(const MixedDataset& ds) {
    if (ds.numeric_count() == 0) return 1.0;
    const Eigen::MatrixXd centered = ds.numeric.rowwise() - ds.numeric.colwise().mean();
    const double mean_var = centered.array().square().colwise().mean().mean();
    return 0.5 * mean_var;
}

/// Squared Euclidean distance to the numeric center plus gamma times Hamming distance to the mode.
inline PartitionalResult kprototypes(const MixedDataset& ds, const PartitionalConfig& cfg) {
    ds.validate();
    detail::require(ds.numeric_count() >= 1, ErrorCode::NumericRequired, "kprototypes needs numeric features");
    detail::require(ds.categorical_count() >= 1, ErrorCode::CategoricalRequired,
                    "kprototypes needs categorical features");
    detail::require(cfg.K >= 1, ErrorCode::InvalidArgument, "K must be positive");
    detail::require(ds.size() >= cfg.K, ErrorCode::InvalidArgument, "fewer rows than clusters");
    const double gamma = cfg.gamma >= 0.0 ? cfg.gamma : default_prototype_gamma(ds);
    PartitionalResult best;
    best.cost = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, cfg.restarts); ++r) {
        Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(r)}));
        const auto init = detail::sample_distinct_rows(ds.size(), cfg.K, rng);
        auto run = detail::alternate(ds.numeric, ds.categorical, ds.cardinalities, init, gamma, cfg.max_iters);
        if (run.cost < best.cost) best = std::move(run);
    }
    return best;
}

}  // namespace specmix
