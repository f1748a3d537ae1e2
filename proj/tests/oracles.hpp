#pragma once

// Test-only reference computations. Everything here works on explicitly
// materialized dense matrices and direct sums, independent of the operator
// and reduction paths used by the library.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "specmix/specmix.hpp"

namespace oracle {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// sum_k cut(A_k, V \ A_k) / vol(A_k) by direct double sums over a dense weight matrix.
inline double ncut(const MatrixXd& w, const std::vector<int>& labels, int K) {
    std::vector<double> cut(K, 0.0), vol(K, 0.0);
    for (Index i = 0; i < w.rows(); ++i) {
        for (Index j = 0; j < w.cols(); ++j) {
            vol[labels[i]] += w(i, j);
            if (labels[i] != labels[j]) cut[labels[i]] += w(i, j);
        }
    }
    double s = 0.0;
    for (int k = 0; k < K; ++k) s += cut[k] / vol[k];
    return s;
}

/// K smallest generalized eigenpairs via Eigen's Cholesky-based solver.
struct DensePairs {
    VectorXd values;
    MatrixXd vectors;
};

inline DensePairs generalized(const MatrixXd& w, int K) {
    const VectorXd d = w.rowwise().sum();
    const MatrixXd dm = d.asDiagonal();
    const MatrixXd l = dm - w;
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(l, dm);
    return {es.eigenvalues().head(K), es.eigenvectors().leftCols(K)};
}

inline DensePairs generalized_all(const MatrixXd& w) {
    return generalized(w, static_cast<int>(w.rows()));
}

/// Largest principal angle between the column spans of a and b under the inner product <x, y> = x^T M y.
inline double principal_angle(const MatrixXd& a, const MatrixXd& b, const MatrixXd& m) {
    Eigen::LLT<MatrixXd> chol(m);
    const MatrixXd ua = chol.matrixU() * a;
    const MatrixXd ub = chol.matrixU() * b;
    const MatrixXd qa = Eigen::HouseholderQR<MatrixXd>(ua).householderQ() * MatrixXd::Identity(ua.rows(), ua.cols());
    const MatrixXd qb = Eigen::HouseholderQR<MatrixXd>(ub).householderQ() * MatrixXd::Identity(ub.rows(), ub.cols());
    // Sine form: accurate for tiny angles, unlike acos of the cosines.
    const MatrixXd resid = qb - qa * (qa.transpose() * qb);
    Eigen::JacobiSVD<MatrixXd> rs(resid);
    return std::asin(std::min(1.0, rs.singularValues().maxCoeff()));
}

inline double principal_angle(const MatrixXd& a, const MatrixXd& b) {
    return principal_angle(a, b, MatrixXd::Identity(a.rows(), a.rows()));
}

/// Random categorical dataset with every level used.
inline specmix::MixedDataset random_categorical(specmix::Index n, const std::vector<int>& cards, specmix::Rng& rng) {
    specmix::MixedDataset ds;
    ds.categorical.resize(n, static_cast<Index>(cards.size()));
    ds.cardinalities = cards;
    for (std::size_t l = 0; l < cards.size(); ++l) {
        for (Index i = 0; i < n; ++i) {
            ds.categorical(i, static_cast<Index>(l)) =
                i < cards[l] ? static_cast<int>(i)
                             : static_cast<int>(specmix::uniform_index(rng, static_cast<std::uint64_t>(cards[l])));
        }
    }
    return ds;
}

inline specmix::MixedDataset random_mixed(specmix::Index n, specmix::Index R, const std::vector<int>& cards,
                                          specmix::Rng& rng) {
    specmix::MixedDataset ds = random_categorical(n, cards, rng);
    ds.numeric.resize(n, R);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < R; ++j) ds.numeric(i, j) = 2.0 * specmix::uniform01(rng) - 1.0;
    return ds;
}

/// Random labels in [0, K) with every value present (first K positions seeded).
inline std::vector<int> random_surjective_labels(std::size_t size, int K, specmix::Rng& rng) {
    std::vector<int> l(size);
    for (std::size_t i = 0; i < size; ++i)
        l[i] = i < static_cast<std::size_t>(K) ? static_cast<int>(i)
                                               : static_cast<int>(specmix::uniform_index(rng, static_cast<std::uint64_t>(K)));
    // Shuffle so the guaranteed representatives are not always the data nodes.
    for (std::size_t i = size; i > 1; --i) std::swap(l[i - 1], l[specmix::uniform_index(rng, i)]);
    return l;
}

}  // namespace oracle
