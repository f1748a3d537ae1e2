#include <gtest/gtest.h>

#include "oracles.hpp"
#include "specmix/kmeans.hpp"

using namespace specmix;
using Eigen::MatrixXd;

TEST(KMeans, SeparatedBlobs) {
    Rng rng(1);
    MatrixXd pts(90, 2);
    for (int i = 0; i < 90; ++i) {
        const int c = i / 30;
        pts(i, 0) = 10.0 * c + 0.1 * (uniform01(rng) - 0.5);
        pts(i, 1) = -5.0 * c + 0.1 * (uniform01(rng) - 0.5);
    }
    const auto r = kmeans(pts, 3);
    for (int i = 0; i < 90; ++i) EXPECT_EQ(r.labels[i], r.labels[(i / 30) * 30]);
    EXPECT_NE(r.labels[0], r.labels[30]);
    EXPECT_NE(r.labels[30], r.labels[60]);
    EXPECT_NE(r.labels[0], r.labels[60]);
}

TEST(KMeans, InertiaHistoryIsMonotone) {
    Rng rng(2);
    const MatrixXd pts = MatrixXd::Random(200, 3);
    const auto r = kmeans(pts, 5);
    for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1] + 1e-12);
    double direct = 0.0;
    for (int i = 0; i < 200; ++i) direct += (pts.row(i) - r.centers.row(r.labels[i])).squaredNorm();
    EXPECT_NEAR(direct, r.inertia, 1e-9);
}

TEST(KMeans, ReproducibleAndSeedDependent) {
    const MatrixXd pts = MatrixXd::Random(100, 2);
    KMeansConfig cfg;
    cfg.seed = 77;
    const auto a = kmeans(pts, 4, cfg);
    const auto b = kmeans(pts, 4, cfg);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(a.centers, b.centers);
}

TEST(KMeans, EmptyClusterRepair) {
    MatrixXd pts(4, 1);
    pts << 0.0, 1.0, 2.0, 10.0;
    MatrixXd init(2, 1);
    init << 1.0, 100.0;  // second center attracts nobody
    const auto r = lloyd(pts, init, 50, 1e-6);
    EXPECT_GE(r.repairs, 1);
    EXPECT_EQ(r.labels, Labels({0, 0, 0, 1}));
    EXPECT_NEAR(r.inertia, 2.0, 1e-12);
}

TEST(KMeans, EveryClusterNonEmpty) {
    MatrixXd pts = MatrixXd::Zero(10, 2);
    pts.row(9) << 1.0, 1.0;
    const auto r = kmeans(pts, 3);
    std::vector<int> counts(3, 0);
    for (int l : r.labels) ++counts[l];
    for (int c : counts) EXPECT_GT(c, 0);
}

TEST(KMeans, RowNormalization) {
    MatrixXd pts(4, 2);
    pts << 1, 0, 100, 0, 0, 1, 0, 50;
    KMeansConfig cfg;
    cfg.normalize_rows = true;
    const auto r = kmeans(pts, 2, cfg);
    EXPECT_EQ(r.labels[0], r.labels[1]);
    EXPECT_EQ(r.labels[2], r.labels[3]);
    EXPECT_NEAR(r.inertia, 0.0, 1e-12);
}

TEST(KMeans, Errors) {
    EXPECT_THROW(kmeans(MatrixXd::Zero(2, 1), 3), Error);
    KMeansConfig cfg;
    cfg.restarts = 0;
    EXPECT_THROW(kmeans(MatrixXd::Zero(5, 1), 2, cfg), Error);
}
