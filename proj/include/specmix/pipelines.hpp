#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "eigensolvers.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "kmeans.hpp"

namespace specmix {

struct SpecMixConfig {
    int K = 2;
    /// One value broadcast to every categorical variable, or one per variable.
    std::vector<double> lambdas = {1.0};
    KMeansConfig kmeans;
    std::uint64_t seed = 0;
    EigenOptions eigen;

    std::vector<double> resolve_lambdas(Index Q) const {
        detail::require(K >= 2, ErrorCode::InvalidArgument, "K must be at least 2");
        detail::require(!lambdas.empty(), ErrorCode::InvalidArgument, "no lambda given");
        for (double l : lambdas) detail::require(l >= 0.0, ErrorCode::InvalidArgument, "lambda must be >= 0");
        if (lambdas.size() == 1) return std::vector<double>(static_cast<std::size_t>(Q), lambdas.front());
        detail::require(static_cast<Index>(lambdas.size()) == Q, ErrorCode::DimensionMismatch,
                        "expected 1 or Q lambda values");
        return lambdas;
    }

    KMeansConfig kmeans_config() const {
        KMeansConfig k = kmeans;
        k.seed = seed;
        return k;
    }
};

struct StageTimings {
    double graph = 0.0;
    double eigensolve = 0.0;
    double kmeans = 0.0;
    double total() const { return graph + eigensolve + kmeans; }
};

struct ClusteringResult {
    std::string method;
    Labels labels;
    Eigen::VectorXd eigenvalues;
    Index embedding_rows_used = 0;
    StageTimings timings;
    int K = 0;
    std::vector<double> lambdas;
    std::uint64_t seed = 0;
    double max_residual = 0.0;
    double inertia = 0.0;
};

namespace detail {
class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - start_).count();
        start_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point start_;
};
}  // namespace detail

/// Normalized spectral clustering on the numeric similarity graph alone.
inline ClusteringResult numeric_spectral(const MixedDataset& ds, const SpecMixConfig& cfg) {
    ds.validate();
    detail::require(cfg.K >= 2, ErrorCode::InvalidArgument, "K must be at least 2");
    detail::require(cfg.K <= ds.size(), ErrorCode::InvalidArgument, "K exceeds the number of datapoints");
    detail::Stopwatch sw;
    ClusteringResult res;
    res.method = "numeric-spectral";
    res.K = cfg.K;
    res.seed = cfg.seed;
    res.lambdas.assign(static_cast<std::size_t>(ds.categorical_count()), 0.0);

    const BaseWeights w = base_similarity(ds);
    res.timings.graph = sw.lap();
    const EigenPairs eig = generalized_smallest_eigs(w, w.degrees(), cfg.K, cfg.eigen);
    res.timings.eigensolve = sw.lap();
    const KMeansResult km = kmeans(eig.vectors, cfg.K, cfg.kmeans_config());
    res.timings.kmeans = sw.lap();

    res.labels = km.labels;
    res.eigenvalues = eig.values;
    res.embedding_rows_used = eig.vectors.rows();
    res.max_residual = eig.max_residual();
    res.inertia = km.inertia;
    return res;
}

/**
 * Spectral clustering of the augmented graph. K-means runs on all n + t
 * eigenvector rows; only the first n labels are returned. Variables whose
 * lambda is zero get no extra nodes; with every lambda zero this is exactly
 * numeric_spectral().
 */
inline ClusteringResult specmix(const MixedDataset& input, const SpecMixConfig& cfg) {
    input.validate();
    detail::require(input.numeric_count() >= 1, ErrorCode::NumericRequired,
                    "numeric features required; use onlycat");
    detail::require(cfg.K <= input.size(), ErrorCode::InvalidArgument, "K exceeds the number of datapoints");
    const std::vector<double> lambdas = cfg.resolve_lambdas(input.categorical_count());

    bool any = false;
    for (double l : lambdas) any = any || l > 0.0;
    if (!any) {
        ClusteringResult res = numeric_spectral(input, cfg);
        res.method = "specmix";
        res.lambdas = lambdas;
        return res;
    }

    const MixedDataset ds = prune_categories(input);
    detail::Stopwatch sw;
    ClusteringResult res;
    res.method = "specmix";
    res.K = cfg.K;
    res.seed = cfg.seed;
    res.lambdas = lambdas;

    std::vector<OneHotMatrix> encoders;
    std::vector<double> active;
    for (Index l = 0; l < ds.categorical_count(); ++l) {
        if (lambdas[l] <= 0.0) continue;
        encoders.push_back(one_hot(ds, l));
        active.push_back(lambdas[l]);
    }
    const AugmentedGraph graph = assemble_augmented(base_similarity(ds), std::move(encoders), std::move(active));
    res.timings.graph = sw.lap();
    const EigenPairs eig = generalized_smallest_eigs(graph, graph.degrees(), cfg.K, cfg.eigen);
    res.timings.eigensolve = sw.lap();
    const KMeansResult km = kmeans(eig.vectors, cfg.K, cfg.kmeans_config());
    res.timings.kmeans = sw.lap();

    res.labels.assign(km.labels.begin(), km.labels.begin() + ds.size());
    res.eigenvalues = eig.values;
    res.embedding_rows_used = eig.vectors.rows();
    res.max_residual = eig.max_residual();
    res.inertia = km.inertia;
    return res;
}

// ---------------------------------------------------------------------------
// Categorical-only path

/**
 * H = [lambda_1 H_1 ... lambda_Q H_Q], stored sparsely. Every row has
 * exactly Q nonzeros and sums to lambda = sum of lambda_l.
 */
class StackedEncoder {
public:
    StackedEncoder(std::vector<OneHotMatrix> encoders, std::vector<double> lambdas)
        : encoders_(std::move(encoders)), lambdas_(std::move(lambdas)) {
        detail::require(!encoders_.empty(), ErrorCode::CategoricalRequired, "no categorical variables");
        detail::require(encoders_.size() == lambdas_.size(), ErrorCode::DimensionMismatch,
                        "need one lambda per categorical variable");
        Index next = 0;
        for (std::size_t l = 0; l < encoders_.size(); ++l) {
            detail::require(encoders_[l].rows() == encoders_.front().rows(), ErrorCode::DimensionMismatch,
                            "encoders differ in row count");
            detail::require(lambdas_[l] > 0.0, ErrorCode::InvalidArgument, "lambda must be positive");
            offsets_.push_back(next);
            next += encoders_[l].cols();
            row_sum_ += lambdas_[l];
        }
        cols_ = next;
        column_sums_.resize(cols_);
        for (std::size_t l = 0; l < encoders_.size(); ++l) {
            for (Index j = 0; j < encoders_[l].cols(); ++j) {
                column_sums_(offsets_[l] + j) = lambdas_[l] * static_cast<double>(encoders_[l].column_sums()[j]);
            }
        }
    }

    Index rows() const { return encoders_.front().rows(); }
    Index cols() const { return cols_; }
    double row_sum() const { return row_sum_; }
    const Eigen::VectorXd& column_sums() const { return column_sums_; }
    const std::vector<OneHotMatrix>& encoders() const { return encoders_; }
    const std::vector<double>& lambdas() const { return lambdas_; }
    Index offset(std::size_t l) const { return offsets_[l]; }

    /// H * x for x with t rows.
    Eigen::MatrixXd multiply(const Eigen::MatrixXd& x) const {
        Eigen::MatrixXd y = Eigen::MatrixXd::Zero(rows(), x.cols());
        for (Index c = 0; c < x.cols(); ++c) {
            for (std::size_t l = 0; l < encoders_.size(); ++l) {
                const auto& enc = encoders_[l];
                const double lam = lambdas_[l];
                const Index off = offsets_[l];
                for (Index i = 0; i < rows(); ++i) y(i, c) += lam * x(off + enc.category(i), c);
            }
        }
        return y;
    }

    /// H^T * x for x with n rows.
    Eigen::MatrixXd transpose_multiply(const Eigen::MatrixXd& x) const {
        Eigen::MatrixXd y = Eigen::MatrixXd::Zero(cols(), x.cols());
        for (Index c = 0; c < x.cols(); ++c) {
            for (std::size_t l = 0; l < encoders_.size(); ++l) {
                const auto& enc = encoders_[l];
                const double lam = lambdas_[l];
                const Index off = offsets_[l];
                for (Index i = 0; i < rows(); ++i) y(off + enc.category(i), c) += lam * x(i, c);
            }
        }
        return y;
    }

    Eigen::MatrixXd dense() const {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(rows(), cols());
        for (std::size_t l = 0; l < encoders_.size(); ++l) {
            for (Index i = 0; i < rows(); ++i) h(i, offsets_[l] + encoders_[l].category(i)) = lambdas_[l];
        }
        return h;
    }

private:
    std::vector<OneHotMatrix> encoders_;
    std::vector<double> lambdas_;
    std::vector<Index> offsets_;
    Index cols_ = 0;
    double row_sum_ = 0.0;
    Eigen::VectorXd column_sums_;
};

inline StackedEncoder stacked_encoder(const MixedDataset& ds, const std::vector<double>& lambdas) {
    detail::require(ds.categorical_count() >= 1, ErrorCode::CategoricalRequired,
                    "categorical features required");
    detail::require(static_cast<Index>(lambdas.size()) == ds.categorical_count(), ErrorCode::DimensionMismatch,
                    "need one lambda per categorical variable");
    std::vector<OneHotMatrix> enc;
    for (Index l = 0; l < ds.categorical_count(); ++l) enc.push_back(one_hot(ds, l));
    return StackedEncoder(std::move(enc), lambdas);
}

/// Datapoints on one side, category levels on the other, edge weights from H; no self-loops.
class BipartiteGraph {
public:
    explicit BipartiteGraph(const StackedEncoder& h) : h_(h) {
        degree_.resize(node_count());
        degree_.head(h.rows()).setConstant(h.row_sum());
        degree_.tail(h.cols()) = h.column_sums();
    }
    Index node_count() const { return h_.rows() + h_.cols(); }
    const Eigen::VectorXd& degrees() const { return degree_; }
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
        Eigen::MatrixXd y(node_count(), x.cols());
        y.topRows(h_.rows()) = h_.multiply(x.bottomRows(h_.cols()));
        y.bottomRows(h_.cols()) = h_.transpose_multiply(x.topRows(h_.rows()));
        return y;
    }
    Eigen::MatrixXd laplacian_apply(const Eigen::MatrixXd& x) const {
        return degree_.asDiagonal() * x - apply(x);
    }
    Eigen::MatrixXd dense() const {
        const Index n = h_.rows();
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(node_count(), node_count());
        const Eigen::MatrixXd h = h_.dense();
        w.topRightCorner(n, h_.cols()) = h;
        w.bottomLeftCorner(h_.cols(), n) = h.transpose();
        return w;
    }

private:
    const StackedEncoder& h_;
    Eigen::VectorXd degree_;
};

struct BipartiteReduction {
    Eigen::MatrixXd weights;       // W_Q = H^T D_H^-1 H, t x t
    Eigen::VectorXd degrees;       // D_Q
    Eigen::VectorXd row_degrees;   // D_H

    Index node_count() const { return weights.rows(); }
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const { return weights * x; }
    const Eigen::MatrixXd& dense() const { return weights; }
};

/// Built in O(n Q^2) from the sparse rows of H.
inline BipartiteReduction build_bipartite_reduction(const StackedEncoder& h) {
    detail::require(h.row_sum() > 0.0, ErrorCode::DegenerateGraph, "rows of H must have positive sum");
    for (Index j = 0; j < h.cols(); ++j) {
        detail::require(h.column_sums()(j) > 0.0, ErrorCode::DegenerateGraph,
                        "category column " + std::to_string(j) + " has no datapoints");
    }
    const auto& enc = h.encoders();
    const auto& lam = h.lambdas();
    const std::size_t Q = enc.size();
    BipartiteReduction red;
    red.row_degrees = Eigen::VectorXd::Constant(h.rows(), h.row_sum());
    red.weights = Eigen::MatrixXd::Zero(h.cols(), h.cols());
    const double inv = 1.0 / h.row_sum();
    for (Index i = 0; i < h.rows(); ++i) {
        for (std::size_t a = 0; a < Q; ++a) {
            const Index ca = h.offset(a) + enc[a].category(i);
            for (std::size_t b = 0; b < Q; ++b) {
                const Index cb = h.offset(b) + enc[b].category(i);
                red.weights(ca, cb) += lam[a] * lam[b] * inv;
            }
        }
    }
    red.degrees = red.weights.rowwise().sum();
    return red;
}

struct TransferCutResult {
    EigenPairs reduced;      // (gamma, u) on the t category nodes
    EigenPairs lifted;       // (mu, v) on the n + t bipartite nodes, v D-orthonormal
    Eigen::MatrixXd embedding;  // first n rows of the lifted vectors
};

/**
 * Solves the t x t reduced problem L_Q u = gamma D_Q u and lifts each pair to
 * the bipartite graph:
 *
 *   mu = 1 - sqrt(1 - gamma)       (equivalently gamma = mu (2 - mu))
 *   f  = D_H^-1 H u / (1 - mu),    v = [f; u] / sqrt(2)
 *
 * Lifted residuals are measured against the bipartite graph in O(nQK).
 */
inline TransferCutResult transfer_cut(const StackedEncoder& h, int K, const EigenOptions& opts = {}) {
    detail::require(K >= 1 && K <= h.cols(), ErrorCode::InvalidArgument,
                    "K must not exceed the number of category levels");
    const BipartiteReduction red = build_bipartite_reduction(h);
    TransferCutResult out;
    out.reduced = generalized_smallest_eigs(red, red.degrees, K, opts);
    const double gamma_k = out.reduced.values(K - 1);
    detail::require(gamma_k < 1.0 - 1e-9, ErrorCode::SpectralGap, "insufficient bipartite spectral gap");

    const Index n = h.rows();
    const Index t = h.cols();
    Eigen::VectorXd mu(K);
    for (int i = 0; i < K; ++i) mu(i) = 1.0 - std::sqrt(std::max(0.0, 1.0 - out.reduced.values(i)));

    const Eigen::MatrixXd& u = out.reduced.vectors;
    Eigen::MatrixXd f = red.row_degrees.cwiseInverse().asDiagonal() * h.multiply(u);
    for (int i = 0; i < K; ++i) f.col(i) /= (1.0 - mu(i));

    out.lifted.values = mu;
    out.lifted.vectors.resize(n + t, K);
    out.lifted.vectors.topRows(n) = f;
    out.lifted.vectors.bottomRows(t) = u;
    out.lifted.vectors *= std::sqrt(0.5);

    const BipartiteGraph bip(h);
    const Eigen::MatrixXd dv = bip.degrees().asDiagonal() * out.lifted.vectors;
    out.lifted.residuals = (bip.laplacian_apply(out.lifted.vectors) - dv * mu.asDiagonal())
                               .colwise()
                               .norm()
                               .transpose();
    out.embedding = out.lifted.vectors.topRows(n);
    return out;
}

/// Categorical-only clustering in time linear in n.
inline ClusteringResult onlycat(const MixedDataset& input, const SpecMixConfig& cfg) {
    input.validate();
    detail::require(input.categorical_count() >= 1, ErrorCode::CategoricalRequired,
                    "categorical features required");
    const std::vector<double> lambdas = cfg.resolve_lambdas(input.categorical_count());
    for (double l : lambdas) detail::require(l > 0.0, ErrorCode::InvalidArgument, "onlycat needs lambda > 0");
    detail::require(cfg.K <= input.size(), ErrorCode::InvalidArgument, "K exceeds the number of datapoints");
    const MixedDataset ds = prune_categories(input);

    detail::Stopwatch sw;
    ClusteringResult res;
    res.method = "onlycat";
    res.K = cfg.K;
    res.seed = cfg.seed;
    res.lambdas = lambdas;

    const StackedEncoder h = stacked_encoder(ds, lambdas);
    res.timings.graph = sw.lap();
    const TransferCutResult tc = transfer_cut(h, cfg.K, cfg.eigen);
    res.timings.eigensolve = sw.lap();
    const KMeansResult km = kmeans(tc.embedding, cfg.K, cfg.kmeans_config());
    res.timings.kmeans = sw.lap();

    res.labels = km.labels;
    res.eigenvalues = tc.lifted.values;
    res.embedding_rows_used = tc.embedding.rows();
    res.max_residual = tc.lifted.max_residual();
    res.inertia = km.inertia;
    return res;
}

}  // namespace specmix
