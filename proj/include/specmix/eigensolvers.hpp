#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "error.hpp"
#include "random.hpp"

namespace specmix {

/// K smallest eigenpairs, ascending, with per-pair residual norms.
struct EigenPairs {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    Eigen::VectorXd residuals;

    double max_residual() const { return residuals.size() ? residuals.maxCoeff() : 0.0; }
};

enum class SolverKind { Auto, Dense, Lanczos };

struct EigenOptions {
    SolverKind kind = SolverKind::Auto;
    Eigen::Index dense_limit = 2048;  // Auto picks the dense solver up to this dimension
    double lanczos_tol = 1e-10;       // relative Ritz residual for locking
    std::uint64_t seed = 0x5eed;      // Lanczos start vectors
};

namespace detail {

/// Flip each column so its largest-magnitude entry is positive (first such entry on ties).
inline void canonicalize_signs(Eigen::MatrixXd& v) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            if (std::abs(v(i, j)) > best) {
                best = std::abs(v(i, j));
                arg = i;
            }
        }
        if (v(arg, j) < 0.0) v.col(j) = -v.col(j);
    }
}

using BlockOperator = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

/**
 * Lanczos with full reorthogonalization and explicit deflation.
 *
 * Each round runs on A + s V V^T, where V holds the locked vectors and s
 * exceeds the spectral spread, so locked pairs move to the top of the
 * spectrum. Only the smallest Ritz pair is locked per round, which finds
 * eigenvalues of any multiplicity up to K. A final Rayleigh-Ritz step on the
 * locked basis sorts and cleans the pairs.
 */
inline EigenPairs lanczos_smallest(const BlockOperator& op, Eigen::Index dim, int K, double tol,
                                   std::uint64_t seed) {
    using Eigen::Index;
    using Eigen::MatrixXd;
    using Eigen::VectorXd;
    Rng rng(seed);
    MatrixXd locked(dim, 0);
    const Index max_total = 10 * dim;
    Index total_iters = 0;
    double norm_est = 1.0;

    auto project_out = [&](VectorXd& w, const MatrixXd& basis, Index cols) {
        if (cols == 0) return;
        w.noalias() -= basis.leftCols(cols) * (basis.leftCols(cols).transpose() * w);
    };

    while (locked.cols() < K) {
        const Index room = dim;
        const double shift = 3.0 * norm_est;
        auto shifted = [&](const VectorXd& x) -> VectorXd {
            VectorXd w = op(x);
            if (locked.cols() > 0) w.noalias() += shift * (locked * (locked.transpose() * x));
            return w;
        };
        VectorXd q(dim);
        for (Index i = 0; i < dim; ++i) q(i) = uniform01(rng) - 0.5;
        for (int pass = 0; pass < 2; ++pass) project_out(q, locked, locked.cols());
        q.normalize();

        MatrixXd basis(dim, std::min<Index>(room, 64));
        std::vector<double> alpha, beta;
        basis.col(0) = q;
        bool done = false;
        for (Index j = 0; !done; ++j) {
            detail::require(total_iters++ < max_total, ErrorCode::NoConvergence,
                            "Lanczos did not converge within 10*dim iterations");
            VectorXd w = shifted(basis.col(j));
            const double a = basis.col(j).dot(w);
            alpha.push_back(a);
            for (int pass = 0; pass < 2; ++pass) project_out(w, basis, j + 1);
            const double b = w.norm();
            norm_est = std::max(norm_est, std::abs(a) + b + (j > 0 ? beta.back() : 0.0));

            const Index m = j + 1;
            const bool exhausted = m == room || b <= 1e-13 * norm_est;
            if (exhausted || m % 5 == 0 || m < 5) {
                Eigen::SelfAdjointEigenSolver<MatrixXd> tri;
                MatrixXd t = MatrixXd::Zero(m, m);
                for (Index i = 0; i < m; ++i) {
                    t(i, i) = alpha[i];
                    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
                }
                tri.compute(t);
                const double ritz_res = std::abs(b * tri.eigenvectors()(m - 1, 0));
                if (exhausted || ritz_res <= tol * norm_est) {
                    VectorXd y = basis.leftCols(m) * tri.eigenvectors().col(0);
                    for (int pass = 0; pass < 2; ++pass) project_out(y, locked, locked.cols());
                    y.normalize();
                    locked.conservativeResize(Eigen::NoChange, locked.cols() + 1);
                    locked.col(locked.cols() - 1) = y;
                    done = true;
                    continue;
                }
            }
            beta.push_back(b);
            if (basis.cols() <= m) basis.conservativeResize(Eigen::NoChange, std::min<Index>(room, 2 * basis.cols()));
            basis.col(m) = w / b;
        }
    }

    // Rayleigh-Ritz on the locked subspace.
    const MatrixXd av = op(locked);
    MatrixXd h = locked.transpose() * av;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> small(h);
    EigenPairs out;
    out.values = small.eigenvalues();
    out.vectors = locked * small.eigenvectors();
    return out;
}

}  // namespace detail

/// K algebraically smallest eigenpairs of a dense symmetric matrix.
inline EigenPairs symmetric_smallest_eigs(const Eigen::MatrixXd& a, int K, const EigenOptions& opts = {}) {
    using Eigen::Index;
    detail::require(a.rows() == a.cols(), ErrorCode::DimensionMismatch, "matrix must be square");
    detail::require(K >= 1 && K <= a.rows(), ErrorCode::InvalidArgument, "K must lie in [1, dimension]");
    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    detail::require(asym <= 1e-10, ErrorCode::InvalidArgument, "matrix is not symmetric");

    const bool dense = opts.kind == SolverKind::Dense ||
                       (opts.kind == SolverKind::Auto && a.rows() <= opts.dense_limit);
    EigenPairs out;
    if (dense) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
        detail::require(es.info() == Eigen::Success, ErrorCode::NoConvergence, "dense eigensolver failed");
        out.values = es.eigenvalues().head(K);
        out.vectors = es.eigenvectors().leftCols(K);
    } else {
        out = detail::lanczos_smallest([&](const Eigen::MatrixXd& x) -> Eigen::MatrixXd { return a * x; },
                                       a.rows(), K, opts.lanczos_tol, opts.seed);
    }
    detail::canonicalize_signs(out.vectors);
    out.residuals = (a * out.vectors - out.vectors * out.values.asDiagonal()).colwise().norm().transpose();
    return out;
}

/// Operator form; always uses Lanczos unless kind == Dense, in which case the operator is materialized.
inline EigenPairs symmetric_smallest_eigs(const detail::BlockOperator& op, Eigen::Index dim, int K,
                                          const EigenOptions& opts = {}) {
    detail::require(K >= 1 && K <= dim, ErrorCode::InvalidArgument, "K must lie in [1, dimension]");
    const bool dense = opts.kind == SolverKind::Dense ||
                       (opts.kind == SolverKind::Auto && dim <= opts.dense_limit);
    if (dense) {
        Eigen::MatrixXd a = op(Eigen::MatrixXd::Identity(dim, dim));
        a = 0.5 * (a + a.transpose()).eval();
        EigenOptions dense_opts = opts;
        dense_opts.kind = SolverKind::Dense;
        return symmetric_smallest_eigs(a, K, dense_opts);
    }
    EigenPairs out = detail::lanczos_smallest(op, dim, K, opts.lanczos_tol, opts.seed);
    detail::canonicalize_signs(out.vectors);
    out.residuals = (op(out.vectors) - out.vectors * out.values.asDiagonal()).colwise().norm().transpose();
    return out;
}

/**
 * K smallest pairs of L v = mu D v with L = D - W.
 *
 * Solved through L_sym = I - D^-1/2 W D^-1/2 and mapped back with
 * v = D^-1/2 u, so returned vectors are D-orthonormal. Residuals are
 * ||L v - mu D v|| in the original problem.
 *
 * `graph` needs node_count(), apply(MatrixXd) and dense(); the degree vector
 * is passed separately.
 */
template <class Graph>
EigenPairs generalized_smallest_eigs(const Graph& graph, const Eigen::VectorXd& degrees, int K,
                                     const EigenOptions& opts = {}) {
    using Eigen::Index;
    using Eigen::MatrixXd;
    const Index dim = graph.node_count();
    detail::require(degrees.size() == dim, ErrorCode::DimensionMismatch, "degree vector length differs");
    detail::require(K >= 1 && K <= dim, ErrorCode::InvalidArgument, "K must lie in [1, dimension]");
    detail::require((degrees.array() > 0.0).all(), ErrorCode::DegenerateGraph,
                    "graph has a node with zero degree");
    const Eigen::VectorXd inv_sqrt = degrees.array().rsqrt();

    const bool dense = opts.kind == SolverKind::Dense ||
                       (opts.kind == SolverKind::Auto && dim <= opts.dense_limit);
    EigenPairs sym;
    if (dense) {
        MatrixXd a = -(inv_sqrt.asDiagonal() * graph.dense() * inv_sqrt.asDiagonal());
        a.diagonal().array() += 1.0;
        a = 0.5 * (a + a.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
        detail::require(es.info() == Eigen::Success, ErrorCode::NoConvergence, "dense eigensolver failed");
        sym.values = es.eigenvalues().head(K);
        sym.vectors = es.eigenvectors().leftCols(K);
    } else {
        auto op = [&](const MatrixXd& x) -> MatrixXd {
            return x - inv_sqrt.asDiagonal() * graph.apply(inv_sqrt.asDiagonal() * x);
        };
        sym = detail::lanczos_smallest(op, dim, K, opts.lanczos_tol, opts.seed);
    }

    EigenPairs out;
    out.values = sym.values;
    out.vectors = inv_sqrt.asDiagonal() * sym.vectors;
    detail::canonicalize_signs(out.vectors);
    const MatrixXd lv = degrees.asDiagonal() * out.vectors - graph.apply(out.vectors);
    const MatrixXd dv = degrees.asDiagonal() * out.vectors;
    out.residuals = (lv - dv * out.values.asDiagonal()).colwise().norm().transpose();
    return out;
}

inline EigenPairs generalized_smallest_eigs(const Eigen::MatrixXd& weights, const Eigen::VectorXd& degrees,
                                            int K, const EigenOptions& opts = {}) {
    struct DenseView {
        const Eigen::MatrixXd& w;
        Eigen::Index node_count() const { return w.rows(); }
        Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const { return w * x; }
        const Eigen::MatrixXd& dense() const { return w; }
    };
    detail::require(weights.rows() == weights.cols(), ErrorCode::DimensionMismatch, "weights must be square");
    return generalized_smallest_eigs(DenseView{weights}, degrees, K, opts);
}

}  // namespace specmix
