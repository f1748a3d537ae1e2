#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <map>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"

namespace specmix {

/// Counts of (predicted cluster, true class) pairs. Label values are
/// compacted to 0..K-1 in ascending order of the original ids.
struct ContingencyTable {
    Eigen::MatrixXi counts;  // K_pred x K_true
    Index n = 0;

    static ContingencyTable build(const Labels& pred, const Labels& truth) {
        detail::require(pred.size() == truth.size(), ErrorCode::DimensionMismatch, "label vectors differ in length");
        auto compact = [](const Labels& l) {
            std::map<int, int> ids;
            for (int v : l) ids.emplace(v, 0);
            int next = 0;
            for (auto& [k, v] : ids) v = next++;
            return ids;
        };
        const auto pid = compact(pred);
        const auto tid = compact(truth);
        ContingencyTable t;
        t.n = static_cast<Index>(pred.size());
        t.counts = Eigen::MatrixXi::Zero(static_cast<Index>(pid.size()), static_cast<Index>(tid.size()));
        for (std::size_t i = 0; i < pred.size(); ++i) ++t.counts(pid.at(pred[i]), tid.at(truth[i]));
        return t;
    }
};

enum class PurityMode { Weighted, Macro };

/**
 * Weighted: (1/n) sum_k max_j |cluster k and class j|.
 * Macro: mean over nonempty clusters of the per-cluster majority fraction.
 */
inline double purity(const Labels& pred, const Labels& truth, PurityMode mode = PurityMode::Weighted) {
    detail::require(!pred.empty(), ErrorCode::InvalidArgument, "purity of an empty labeling");
    const auto t = ContingencyTable::build(pred, truth);
    if (mode == PurityMode::Weighted) {
        long total = 0;
        for (Index k = 0; k < t.counts.rows(); ++k) total += t.counts.row(k).maxCoeff();
        return static_cast<double>(total) / static_cast<double>(t.n);
    }
    std::vector<double> fractions;
    for (Index k = 0; k < t.counts.rows(); ++k) {
        const int size = t.counts.row(k).sum();
        if (size == 0) continue;
        fractions.push_back(static_cast<double>(t.counts.row(k).maxCoeff()) / size);
    }
    // Summing in sorted order keeps the result independent of cluster ids.
    std::sort(fractions.begin(), fractions.end());
    double acc = 0.0;
    for (double f : fractions) acc += f;
    return acc / static_cast<double>(fractions.size());
}

/// Smallest class size over largest class size.
inline double imbalance_ratio(const Labels& truth) {
    detail::require(!truth.empty(), ErrorCode::InvalidArgument, "imbalance ratio of an empty labeling");
    std::map<int, long> sizes;
    for (int v : truth) ++sizes[v];
    long lo = std::numeric_limits<long>::max(), hi = 0;
    for (const auto& [k, s] : sizes) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    return static_cast<double>(lo) / static_cast<double>(hi);
}

namespace detail {

/// Maximum-weight assignment on a square matrix (Hungarian algorithm, O(m^3)).
/// Returns the column assigned to each row.
inline std::vector<int> hungarian_max(const Eigen::MatrixXd& profit) {
    const int m = static_cast<int>(profit.rows());
    const double big = profit.maxCoeff();
    // Minimize cost = big - profit. 1-based potentials, standard e-maxx form.
    std::vector<double> u(m + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= m; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, std::numeric_limits<double>::infinity());
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = std::numeric_limits<double>::infinity();
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = (big - profit(i0 - 1, j - 1)) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> assign(static_cast<std::size_t>(m), -1);
    for (int j = 1; j <= m; ++j) {
        if (p[j]) assign[p[j] - 1] = j - 1;
    }
    return assign;
}

}  // namespace detail

/**
 * Best fraction of positions on which a and a relabeling of b agree.
 * Exact (Hungarian) when both sides have at most 12 clusters, greedy above.
 */
inline double label_agreement(const Labels& a, const Labels& b) {
    detail::require(a.size() == b.size(), ErrorCode::DimensionMismatch, "label vectors differ in length");
    if (a.empty()) return 1.0;
    const auto t = ContingencyTable::build(a, b);
    const Index m = std::max(t.counts.rows(), t.counts.cols());
    Eigen::MatrixXd profit = Eigen::MatrixXd::Zero(m, m);
    profit.topLeftCorner(t.counts.rows(), t.counts.cols()) = t.counts.cast<double>();

    double matched = 0.0;
    if (m <= 12) {
        const auto assign = detail::hungarian_max(profit);
        for (Index i = 0; i < m; ++i) matched += profit(i, assign[i]);
    } else {
        std::vector<char> row_used(m, 0), col_used(m, 0);
        for (Index step = 0; step < m; ++step) {
            double best = -1.0;
            Index bi = -1, bj = -1;
            for (Index i = 0; i < m; ++i) {
                if (row_used[i]) continue;
                for (Index j = 0; j < m; ++j) {
                    if (!col_used[j] && profit(i, j) > best) {
                        best = profit(i, j);
                        bi = i;
                        bj = j;
                    }
                }
            }
            row_used[bi] = col_used[bj] = 1;
            matched += best;
        }
    }
    return matched / static_cast<double>(a.size());
}

}  // namespace specmix
