#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"

namespace specmix {

/**
 * Dense symmetric weight matrix over the datapoints.
 *
 * Also serves as a generic dense graph: anything exposing node_count(),
 * degrees(), apply() and dense() can be handed to the eigensolvers and to
 * assignment_energy().
 */
class BaseWeights {
public:
    BaseWeights() = default;
    explicit BaseWeights(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
        detail::require(weights_.rows() == weights_.cols(), ErrorCode::DimensionMismatch,
                        "weight matrix must be square");
        degree_ = weights_.rowwise().sum();
    }

    Index node_count() const { return weights_.rows(); }
    const Eigen::MatrixXd& weights() const { return weights_; }
    const Eigen::VectorXd& degrees() const { return degree_; }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const { return weights_ * x; }
    Eigen::MatrixXd laplacian_apply(const Eigen::MatrixXd& x) const {
        return degree_.asDiagonal() * x - weights_ * x;
    }
    const Eigen::MatrixXd& dense() const { return weights_; }

private:
    Eigen::MatrixXd weights_;
    Eigen::VectorXd degree_;
};

/// Fully connected Gaussian similarity exp(-||r_i - r_j||^2), diagonal included (= 1).
inline BaseWeights base_similarity(const MixedDataset& ds) {
    detail::require(ds.numeric_count() >= 1, ErrorCode::NumericRequired,
                    "numeric features required; use onlycat");
    const Index n = ds.size();
    const Index R = ds.numeric_count();
    // Row-major copy keeps the inner loop contiguous.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> pts = ds.numeric;
    Eigen::MatrixXd w(n, n);
    for (Index i = 0; i < n; ++i) {
        w(i, i) = 1.0;
        const double* a = pts.row(i).data();
        for (Index j = i + 1; j < n; ++j) {
            const double* b = pts.row(j).data();
            double d2 = 0.0;
            for (Index d = 0; d < R; ++d) {
                const double diff = a[d] - b[d];
                d2 += diff * diff;
            }
            const double v = std::exp(-d2);
            w(i, j) = v;
            w(j, i) = v;
        }
    }
    return BaseWeights(std::move(w));
}

/**
 * Base graph plus one extra node per category level.
 *
 * Node order is the n datapoints followed by the levels of variable 1, then
 * variable 2, and so on. The extra-node part is never materialized: products
 * with W_all cost one dense n x n product plus O(nQ) scatter/gather.
 */
class AugmentedGraph {
public:
    AugmentedGraph(BaseWeights base, std::vector<OneHotMatrix> encoders, std::vector<double> lambdas,
                   double self_loop = 1.0)
        : base_(std::move(base)), encoders_(std::move(encoders)), lambdas_(std::move(lambdas)),
          self_loop_(self_loop) {
        const Index n = base_.node_count();
        detail::require(encoders_.size() == lambdas_.size(), ErrorCode::DimensionMismatch,
                        "need one lambda per categorical variable");
        offsets_.reserve(encoders_.size());
        Index next = n;
        for (std::size_t l = 0; l < encoders_.size(); ++l) {
            detail::require(encoders_[l].rows() == n, ErrorCode::DimensionMismatch,
                            "encoder row count differs from base graph size");
            detail::require(lambdas_[l] > 0.0, ErrorCode::InvalidArgument, "lambda must be positive");
            offsets_.push_back(next);
            next += encoders_[l].cols();
        }
        node_count_ = next;

        degree_.resize(node_count_);
        double lambda_sum = 0.0;
        for (double lam : lambdas_) lambda_sum += lam;
        degree_.head(n) = base_.degrees().array() + lambda_sum;
        for (std::size_t l = 0; l < encoders_.size(); ++l) {
            const auto& sums = encoders_[l].column_sums();
            for (Index j = 0; j < encoders_[l].cols(); ++j) {
                degree_(offsets_[l] + j) = lambdas_[l] * static_cast<double>(sums[j]) + self_loop_;
            }
        }
    }

    Index data_count() const { return base_.node_count(); }
    Index extra_count() const { return node_count_ - data_count(); }
    Index node_count() const { return node_count_; }

    const BaseWeights& base() const { return base_; }
    const std::vector<OneHotMatrix>& encoders() const { return encoders_; }
    const std::vector<double>& lambdas() const { return lambdas_; }
    const Eigen::VectorXd& degrees() const { return degree_; }
    double self_loop() const { return self_loop_; }

    /// Node index of level j of categorical variable l.
    Index extra_node(std::size_t l, Index j) const { return offsets_[l] + j; }
    Index offset(std::size_t l) const { return offsets_[l]; }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
        detail::require(x.rows() == node_count_, ErrorCode::DimensionMismatch,
                        "operand row count differs from node count");
        const Index n = data_count();
        Eigen::MatrixXd y(node_count_, x.cols());
        y.topRows(n).noalias() = base_.weights() * x.topRows(n);
        y.bottomRows(extra_count()) = self_loop_ * x.bottomRows(extra_count());
        for (std::size_t l = 0; l < encoders_.size(); ++l) {
            const double lam = lambdas_[l];
            const Index off = offsets_[l];
            for (Index i = 0; i < n; ++i) {
                const Index e = off + encoders_[l].category(i);
                y.row(i) += lam * x.row(e);
                y.row(e) += lam * x.row(i);
            }
        }
        return y;
    }

    Eigen::MatrixXd laplacian_apply(const Eigen::MatrixXd& x) const {
        return degree_.asDiagonal() * x - apply(x);
    }

    /// Dense W_all in block layout; for tests and small debug dumps.
    Eigen::MatrixXd dense() const {
        const Index n = data_count();
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(node_count_, node_count_);
        w.topLeftCorner(n, n) = base_.weights();
        for (Index e = n; e < node_count_; ++e) w(e, e) = self_loop_;
        for (std::size_t l = 0; l < encoders_.size(); ++l) {
            for (Index i = 0; i < n; ++i) {
                const Index e = offsets_[l] + encoders_[l].category(i);
                w(i, e) = lambdas_[l];
                w(e, i) = lambdas_[l];
            }
        }
        return w;
    }

private:
    BaseWeights base_;
    std::vector<OneHotMatrix> encoders_;
    std::vector<double> lambdas_;
    std::vector<Index> offsets_;
    Index node_count_ = 0;
    double self_loop_ = 1.0;
    Eigen::VectorXd degree_;
};

inline AugmentedGraph assemble_augmented(BaseWeights base, std::vector<OneHotMatrix> encoders,
                                         std::vector<double> lambdas) {
    return AugmentedGraph(std::move(base), std::move(encoders), std::move(lambdas));
}

/// Volume-normalized indicator matrix: Z(i, k) = 1/sqrt(vol(A_k)) iff label(i) = k.
struct AssignmentMatrix {
    Eigen::MatrixXd entries;
    Labels partition;
    std::vector<double> volumes;
};

inline AssignmentMatrix assignment_matrix(const Labels& labels, const Eigen::VectorXd& degrees, int K) {
    detail::require(static_cast<Index>(labels.size()) == degrees.size(), ErrorCode::DimensionMismatch,
                    "labels and degrees differ in length");
    detail::require(K >= 1, ErrorCode::InvalidArgument, "K must be positive");
    AssignmentMatrix z;
    z.partition = labels;
    z.volumes.assign(static_cast<std::size_t>(K), 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        detail::require(labels[i] >= 0 && labels[i] < K, ErrorCode::InvalidArgument, "label out of range");
        z.volumes[labels[i]] += degrees(static_cast<Index>(i));
    }
    for (int k = 0; k < K; ++k) {
        detail::require(z.volumes[k] > 0.0, ErrorCode::DegenerateGraph,
                        "cluster " + std::to_string(k) + " has zero volume");
    }
    z.entries = Eigen::MatrixXd::Zero(degrees.size(), K);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        z.entries(static_cast<Index>(i), labels[i]) = 1.0 / std::sqrt(z.volumes[labels[i]]);
    }
    return z;
}

/// tr(Z^T L Z) through the graph's Laplacian operator.
template <class Graph>
double assignment_energy(const AssignmentMatrix& z, const Graph& graph) {
    detail::require(z.entries.rows() == graph.node_count(), ErrorCode::DimensionMismatch,
                    "assignment matrix rows differ from node count");
    const Eigen::MatrixXd lz = graph.laplacian_apply(z.entries);
    return (z.entries.transpose() * lz).trace();
}

/// K x K matrix with entry (k, l) = #{i : data label k, category node of i labelled l}.
inline Eigen::MatrixXi delta_counts(const Labels& data_labels, const Labels& extra_labels,
                                    const OneHotMatrix& encoder, int K) {
    detail::require(static_cast<Index>(data_labels.size()) == encoder.rows(), ErrorCode::DimensionMismatch,
                    "data labels differ in length from encoder rows");
    detail::require(static_cast<Index>(extra_labels.size()) == encoder.cols(), ErrorCode::DimensionMismatch,
                    "extra labels differ in length from encoder columns");
    Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(K, K);
    for (std::size_t i = 0; i < data_labels.size(); ++i) {
        const int k = data_labels[i];
        const int l = extra_labels[static_cast<std::size_t>(encoder.category(static_cast<Index>(i)))];
        detail::require(k >= 0 && k < K && l >= 0 && l < K, ErrorCode::InvalidArgument, "label out of range");
        ++counts(k, l);
    }
    return counts;
}

/// Writes the dense W_all and the degree vector; refuses graphs above 5000 nodes.
template <class Graph>
void write_dense_graph_csv(const Graph& graph, const std::string& path) {
    detail::require(graph.node_count() <= 5000, ErrorCode::InvalidArgument,
                    "graph too large for a dense dump (" + std::to_string(graph.node_count()) +
                        " nodes, limit 5000)");
    std::ofstream out(path);
    detail::require(out.good(), ErrorCode::Io, "cannot write " + path);
    const Eigen::MatrixXd w = graph.dense();
    const Eigen::VectorXd& d = graph.degrees();
    char buf[32];
    out << "node,degree";
    for (Index j = 0; j < w.cols(); ++j) out << ",w" << j;
    out << '\n';
    for (Index i = 0; i < w.rows(); ++i) {
        std::snprintf(buf, sizeof buf, "%.9g", d(i));
        out << i << ',' << buf;
        for (Index j = 0; j < w.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.9g", w(i, j));
            out << ',' << buf;
        }
        out << '\n';
    }
}

}  // namespace specmix
