#include <gtest/gtest.h>

#include "oracles.hpp"
#include "specmix/specmix.hpp"

using namespace specmix;

namespace {

CategoryMatrix two_blocks() {
    CategoryMatrix c(6, 2);
    c << 0, 1, 0, 1, 0, 1, 2, 0, 2, 0, 2, 0;
    return c;
}

}  // namespace

TEST(KModes, TwoIdenticalBlocks) {
    const auto c = two_blocks();
    const auto run = detail::alternate(Eigen::MatrixXd(6, 0), c, {3, 2}, {0, 5}, 1.0, 100);
    EXPECT_EQ(run.labels, Labels({0, 0, 0, 1, 1, 1}));
    EXPECT_LE(run.iterations, 2);
    EXPECT_EQ(run.cost, 0.0);

    PartitionalConfig cfg;
    cfg.K = 2;
    const auto r = kmodes(c, {3, 2}, cfg);
    EXPECT_DOUBLE_EQ(purity(r.labels, {0, 0, 0, 1, 1, 1}), 1.0);
    EXPECT_EQ(r.cost, 0.0);
}

TEST(KModes, SingleClusterModeIsColumnMajority) {
    CategoryMatrix c(5, 2);
    c << 0, 2, 1, 2, 1, 0, 1, 1, 0, 2;
    PartitionalConfig cfg;
    cfg.K = 1;
    const auto r = kmodes(c, {2, 3}, cfg);
    EXPECT_EQ(r.prototypes.modes(0, 0), 1);
    EXPECT_EQ(r.prototypes.modes(0, 1), 2);
    EXPECT_EQ(r.labels, Labels(5, 0));
}

TEST(KModes, IdenticalRowsTriggerOneRepair) {
    const CategoryMatrix c = CategoryMatrix::Constant(7, 3, 1);
    PartitionalConfig cfg;
    cfg.K = 2;
    const auto r = kmodes(c, {2, 2, 2}, cfg);
    EXPECT_EQ(r.repairs, 1);
    EXPECT_EQ(r.labels.size(), 7u);
    EXPECT_EQ(std::count(r.labels.begin(), r.labels.end(), 1), 1);
}

TEST(KModes, ErrorsAndMonotoneCost) {
    PartitionalConfig cfg;
    cfg.K = 8;
    EXPECT_THROW(kmodes(two_blocks(), {3, 2}, cfg), Error);
    Rng rng(3);
    const auto ds = oracle::random_categorical(200, {4, 3, 5, 2}, rng);
    cfg.K = 4;
    const auto r = kmodes(ds, cfg);
    for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1]);
}

TEST(KPrototypes, ZeroGammaIsLloyd) {
    Rng rng(5);
    const auto ds = oracle::random_mixed(150, 2, {3}, rng);
    const std::vector<Index> init = {3, 50, 97};
    const auto proto = detail::alternate(ds.numeric, ds.categorical, ds.cardinalities, init, 0.0, 300);
    Eigen::MatrixXd centers(3, 2);
    for (int k = 0; k < 3; ++k) centers.row(k) = ds.numeric.row(init[k]);
    const auto km = lloyd(ds.numeric, centers, 300, 1e-300);
    EXPECT_EQ(proto.labels, km.labels);
}

TEST(KPrototypes, HugeGammaFollowsKModes) {
    SyntheticParams sp;
    sp.n = 200;
    sp.K = 3;
    sp.sigma = 3.0;
    sp.p = 0.0;
    sp.seed = 11;
    const auto d = generate_synthetic(sp);
    PartitionalConfig cfg;
    cfg.K = 3;
    cfg.gamma = 1e9;
    const auto a = kprototypes(d.data, cfg);
    const auto b = kmodes(d.data, cfg);
    EXPECT_DOUBLE_EQ(label_agreement(a.labels, b.labels), 1.0);
    for (std::size_t i = 1; i < a.history.size(); ++i) EXPECT_LE(a.history[i], a.history[i - 1] + 1e-9);
}

TEST(KPrototypes, DefaultGammaAndDeterminism) {
    MixedDataset ds;
    ds.numeric.resize(4, 2);
    ds.numeric << 0, 0, 2, 0, 0, 4, 2, 4;
    ds.categorical = CategoryMatrix::Zero(4, 1);
    ds.cardinalities = {1};
    // Column variances 1 and 4.
    EXPECT_DOUBLE_EQ(default_prototype_gamma(ds), 1.25);
    Rng rng(13);
    const auto big = oracle::random_mixed(100, 3, {3, 3}, rng);
    PartitionalConfig cfg;
    cfg.K = 3;
    cfg.seed = 4;
    EXPECT_EQ(kprototypes(big, cfg).labels, kprototypes(big, cfg).labels);
    MixedDataset cat_only;
    cat_only.categorical = big.categorical;
    cat_only.cardinalities = big.cardinalities;
    EXPECT_THROW(kprototypes(cat_only, cfg), Error);
}
