#include <gtest/gtest.h>

#include "oracles.hpp"
#include "specmix/eigensolvers.hpp"

using namespace specmix;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_weights(Eigen::Index n, Rng& rng) {
    MatrixXd w(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) w(i, j) = w(j, i) = 0.05 + uniform01(rng);
    return w;
}

EigenOptions lanczos() {
    EigenOptions o;
    o.kind = SolverKind::Lanczos;
    return o;
}

}  // namespace

TEST(SymmetricEigs, IdentityAndDiagonal) {
    const auto id = symmetric_smallest_eigs(MatrixXd::Identity(4, 4), 2);
    EXPECT_TRUE(id.values.isApprox(VectorXd::Ones(2)));
    VectorXd d(3);
    d << 3, 1, 2;
    const auto p = symmetric_smallest_eigs(MatrixXd(d.asDiagonal()), 2);
    EXPECT_NEAR(p.values(0), 1.0, 1e-14);
    EXPECT_NEAR(p.values(1), 2.0, 1e-14);
    EXPECT_NEAR(p.vectors(1, 0), 1.0, 1e-14);  // positive sign convention
    EXPECT_NEAR(p.vectors(2, 1), 1.0, 1e-14);
}

TEST(SymmetricEigs, Errors) {
    MatrixXd a = MatrixXd::Identity(3, 3);
    a(0, 1) = 1.0;
    EXPECT_THROW(symmetric_smallest_eigs(a, 1), Error);
    EXPECT_THROW(symmetric_smallest_eigs(MatrixXd::Identity(3, 3), 4), Error);
    EXPECT_THROW(symmetric_smallest_eigs(MatrixXd::Identity(3, 3), 0), Error);
    EXPECT_THROW(symmetric_smallest_eigs(MatrixXd::Identity(3, 2), 1), Error);
}

TEST(GeneralizedEigs, CompleteGraphK3) {
    MatrixXd w = MatrixXd::Ones(3, 3) - MatrixXd::Identity(3, 3);
    const VectorXd d = w.rowwise().sum();
    for (auto opts : {EigenOptions{}, lanczos()}) {
        const auto p = generalized_smallest_eigs(w, d, 3, opts);
        EXPECT_NEAR(p.values(0), 0.0, 1e-10);
        EXPECT_NEAR(p.values(1), 1.5, 1e-10);
        EXPECT_NEAR(p.values(2), 1.5, 1e-10);
        EXPECT_LE(p.max_residual(), 1e-9);
    }
}

TEST(GeneralizedEigs, MatchesCholeskyOracleAndIsDOrthonormal) {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index n = 10 + static_cast<Eigen::Index>(uniform_index(rng, 60));
        const MatrixXd w = random_weights(n, rng);
        const VectorXd d = w.rowwise().sum();
        const int K = 1 + static_cast<int>(uniform_index(rng, 5));
        const auto ref = oracle::generalized(w, K + 1);
        for (auto opts : {EigenOptions{}, lanczos()}) {
            const auto p = generalized_smallest_eigs(w, d, K, opts);
            EXPECT_LE((p.values - ref.values.head(K)).cwiseAbs().maxCoeff(), 1e-9);
            const MatrixXd g = p.vectors.transpose() * d.asDiagonal() * p.vectors;
            EXPECT_LE((g - MatrixXd::Identity(K, K)).cwiseAbs().maxCoeff(), 1e-9);
            EXPECT_LE(p.max_residual(), 1e-8);
            if (ref.values(K) - ref.values(K - 1) > 1e-6) {
                EXPECT_LE(oracle::principal_angle(p.vectors, ref.vectors.leftCols(K), d.asDiagonal()), 1e-6);
            }
        }
    }
}

TEST(GeneralizedEigs, DenseAndLanczosAgree) {
    Rng rng(5);
    const MatrixXd w = random_weights(150, rng);
    const VectorXd d = w.rowwise().sum();
    EigenOptions dense;
    dense.kind = SolverKind::Dense;
    const auto a = generalized_smallest_eigs(w, d, 4, dense);
    const auto b = generalized_smallest_eigs(w, d, 4, lanczos());
    EXPECT_LE((a.values - b.values).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(oracle::principal_angle(a.vectors, b.vectors, d.asDiagonal()), 1e-6);
}

TEST(GeneralizedEigs, LanczosFindsRepeatedZeroEigenvalue) {
    // Three disconnected cliques: the null space has dimension 3.
    MatrixXd w = MatrixXd::Zero(30, 30);
    Rng rng(9);
    for (int b = 0; b < 3; ++b) w.block(10 * b, 10 * b, 10, 10) = random_weights(10, rng);
    const VectorXd d = w.rowwise().sum();
    const auto p = generalized_smallest_eigs(w, d, 3, lanczos());
    EXPECT_LE(p.values.cwiseAbs().maxCoeff(), 1e-9);
    // Eigenvectors are constant on each clique.
    for (int k = 0; k < 3; ++k)
        for (int b = 0; b < 3; ++b) {
            const auto seg = p.vectors.col(k).segment(10 * b, 10);
            EXPECT_LE(seg.maxCoeff() - seg.minCoeff(), 1e-7);
        }
}

TEST(GeneralizedEigs, DeterministicForFixedSeed) {
    Rng rng(13);
    const MatrixXd w = random_weights(80, rng);
    const VectorXd d = w.rowwise().sum();
    const auto a = generalized_smallest_eigs(w, d, 3, lanczos());
    const auto b = generalized_smallest_eigs(w, d, 3, lanczos());
    EXPECT_EQ(a.vectors, b.vectors);
}

TEST(GeneralizedEigs, ZeroDegreeIsDegenerate) {
    MatrixXd w = MatrixXd::Zero(3, 3);
    w(0, 1) = w(1, 0) = 1.0;
    try {
        generalized_smallest_eigs(w, w.rowwise().sum(), 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateGraph);
    }
}
