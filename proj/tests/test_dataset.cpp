#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "specmix/dataset.hpp"

using namespace specmix;

namespace {

LoadedDataset load(const std::string& csv, const std::string& schema, CsvOptions opts = {}) {
    std::istringstream in(csv);
    return load_mixed_csv(in, ColumnSchema::parse(schema), opts);
}

}  // namespace

TEST(LoadCsv, ShapesFromSchema) {
    const auto d = load("x,y,c\n1,2,a\n3,4,b\n5,6,a\n", "num,num,cat");
    EXPECT_EQ(d.data.size(), 3);
    EXPECT_EQ(d.data.numeric_count(), 2);
    EXPECT_EQ(d.data.categorical_count(), 1);
    EXPECT_EQ(d.data.cardinalities, std::vector<int>({2}));
    EXPECT_FALSE(d.labels.has_value());
    EXPECT_DOUBLE_EQ(d.data.numeric(2, 1), 6.0);
}

TEST(LoadCsv, DropsRowsWithMissingSentinel) {
    const auto d = load("x,y,c\n1,2,a\n?,4,b\n5,6,a\n", "num,num,cat");
    EXPECT_EQ(d.data.size(), 2);
    EXPECT_EQ(d.dropped_rows, 1u);
    // b only appeared in the dropped row, so it is not a level.
    EXPECT_EQ(d.data.cardinalities, std::vector<int>({1}));
}

TEST(LoadCsv, EmptyFieldIsMissing) {
    const auto d = load("x,c\n1,a\n,b\n2,\n", "num,cat");
    EXPECT_EQ(d.data.size(), 1);
}

TEST(LoadCsv, CustomMissingTokens) {
    CsvOptions opts;
    opts.missing = {"NA"};
    const auto d = load("x,c\n1,a\nNA,b\n2,?\n", "num,cat", opts);
    EXPECT_EQ(d.data.size(), 2);
    EXPECT_EQ(d.data.cardinalities, std::vector<int>({2}));  // '?' is an ordinary level here
}

TEST(LoadCsv, FirstAppearanceEncoding) {
    const auto d = load("c\nb\na\nb\n", "cat");
    ASSERT_EQ(d.data.size(), 3);
    EXPECT_EQ(d.data.categorical(0, 0), 0);
    EXPECT_EQ(d.data.categorical(1, 0), 1);
    EXPECT_EQ(d.data.categorical(2, 0), 0);
    EXPECT_EQ(d.data.cardinalities, std::vector<int>({2}));
}

TEST(LoadCsv, OrdinalIsCategoricalAndLabelSeparated) {
    const auto d = load("a,o,ign,lab\n1,low,z,yes\n2,high,z,no\n3,low,q,yes\n", "num,ord,ignore,label");
    EXPECT_EQ(d.data.categorical_count(), 1);
    EXPECT_EQ(d.data.numeric_count(), 1);
    ASSERT_TRUE(d.labels.has_value());
    EXPECT_EQ(*d.labels, Labels({0, 1, 0}));
    EXPECT_EQ(d.label_levels, std::vector<std::string>({"yes", "no"}));
}

TEST(LoadCsv, QuotedFieldsWithDelimiter) {
    const auto d = load("x,c\n1,\"a,b\"\n2,\"a,b\"\n3,c\n", "num,cat");
    EXPECT_EQ(d.data.cardinalities, std::vector<int>({2}));
}

TEST(LoadCsv, Errors) {
    auto code_of = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        ADD_FAILURE() << "no error thrown";
        return ErrorCode::InvalidArgument;
    };
    EXPECT_EQ(code_of([] { load("x,y\n1,2\n", "num"); }), ErrorCode::Parse);
    EXPECT_EQ(code_of([] { load("x,c\n1,a\nfoo,b\n", "num,cat"); }), ErrorCode::Parse);
    EXPECT_EQ(code_of([] { load("x,c\n?,a\n", "num,cat"); }), ErrorCode::EmptyDataset);
    EXPECT_EQ(code_of([] { load("x,c\n1,a,3\n", "num,cat"); }), ErrorCode::Parse);
    EXPECT_EQ(code_of([] { load_mixed_csv(std::string("/nonexistent/file.csv"), ColumnSchema::parse("num")); }),
              ErrorCode::Io);
    EXPECT_EQ(code_of([] { ColumnSchema::parse("num,label,label"); }), ErrorCode::Parse);
    EXPECT_EQ(code_of([] { ColumnSchema::parse("num,bogus"); }), ErrorCode::Parse);
}

TEST(Standardize, HandExample) {
    MixedDataset ds;
    ds.numeric.resize(2, 1);
    ds.numeric << 0.0, 2.0;
    const auto s = standardize_numeric(ds);
    EXPECT_DOUBLE_EQ(s.numeric(0, 0), -1.0);
    EXPECT_DOUBLE_EQ(s.numeric(1, 0), 1.0);
}

TEST(Standardize, ConstantColumnBecomesZero) {
    MixedDataset ds;
    ds.numeric = Eigen::MatrixXd::Constant(3, 1, 5.0);
    const auto s = standardize_numeric(ds);
    EXPECT_TRUE(s.numeric.isZero(0.0));
}

TEST(Standardize, MomentsAndIdempotence) {
    Rng rng(7);
    auto ds = oracle::random_mixed(57, 4, {3}, rng);
    ds.numeric.col(2) *= 1000.0;
    ds.numeric.col(3).array() += 42.0;
    const auto once = standardize_numeric(ds);
    for (Index j = 0; j < once.numeric_count(); ++j) {
        const auto c = once.numeric.col(j);
        const double mean = c.mean();
        const double sd = std::sqrt((c.array() - mean).square().mean());
        EXPECT_LE(std::abs(mean), 1e-10);
        EXPECT_LE(std::abs(sd - 1.0), 1e-10);
    }
    const auto twice = standardize_numeric(once);
    EXPECT_LE((twice.numeric - once.numeric).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(twice.categorical, ds.categorical);
}

TEST(OneHot, Definition) {
    MixedDataset ds;
    ds.categorical.resize(3, 1);
    ds.categorical << 0, 1, 0;
    ds.cardinalities = {2};
    const auto h = one_hot(ds, 0);
    Eigen::MatrixXd expect(3, 2);
    expect << 1, 0, 0, 1, 1, 0;
    EXPECT_EQ(h.dense(), expect);
    EXPECT_EQ(h.column_sums(), std::vector<Index>({2, 1}));
    EXPECT_THROW(one_hot(ds, 1), Error);
}

TEST(OneHot, RowsSumToOneAndColumnSumsTotalNQ) {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto ds = oracle::random_categorical(30 + trial, {2, 5, 3}, rng);
        Index total = 0;
        for (Index l = 0; l < ds.categorical_count(); ++l) {
            const auto h = one_hot(ds, l);
            EXPECT_TRUE(h.dense().rowwise().sum().isOnes());
            for (auto c : h.column_sums()) total += c;
        }
        EXPECT_EQ(total, ds.size() * ds.categorical_count());
    }
}

TEST(Synthetic, NoiseFreeCase) {
    SyntheticParams p;
    p.n = 4;
    p.K = 2;
    p.Q = 1;
    p.sigma = 0.0;
    p.p = 0.0;
    p.seed = 3;
    const auto s = generate_synthetic(p);
    Eigen::MatrixXd expect(4, 2);
    expect << 1, 0, 1, 0, 0, 1, 0, 1;
    EXPECT_EQ(s.data.numeric, expect);
    EXPECT_EQ(s.labels, Labels({0, 0, 1, 1}));
    for (Index i = 0; i < 4; ++i) EXPECT_EQ(s.data.categorical(i, 0), s.labels[i]);
}

TEST(Synthetic, RemainderGoesToFirstClusters) {
    SyntheticParams p;
    p.n = 5;
    p.K = 2;
    const auto s = generate_synthetic(p);
    EXPECT_EQ(std::count(s.labels.begin(), s.labels.end(), 0), 3);
    EXPECT_EQ(std::count(s.labels.begin(), s.labels.end(), 1), 2);
}

TEST(Synthetic, FullCorruptionFrequencies) {
    SyntheticParams p;
    p.n = 4000;
    p.K = 4;
    p.Q = 1;
    p.p = 1.0;
    p.seed = 99;
    const auto s = generate_synthetic(p);
    // Empirical frequency of each category within each cluster.
    Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(4, 4);
    for (Index i = 0; i < s.data.size(); ++i) freq(s.labels[i], s.data.categorical(i, 0)) += 1.0;
    for (int k = 0; k < 4; ++k) {
        freq.row(k) /= freq.row(k).sum();
        for (int c = 0; c < 4; ++c) {
            if (c == k) EXPECT_EQ(freq(k, c), 0.0);
            else EXPECT_NEAR(freq(k, c), 1.0 / 3.0, 0.05);
        }
    }
}

TEST(Synthetic, AnyCategoryCorruptionCanKeepAttached) {
    SyntheticParams p;
    p.n = 4000;
    p.K = 4;
    p.Q = 1;
    p.p = 1.0;
    p.corruption = Corruption::AnyCategory;
    const auto s = generate_synthetic(p);
    Index attached = 0;
    for (Index i = 0; i < s.data.size(); ++i) attached += s.data.categorical(i, 0) == s.labels[i];
    EXPECT_NEAR(static_cast<double>(attached) / 4000.0, 0.25, 0.02);
}

TEST(Synthetic, ReproducibleAndSurjective) {
    SyntheticParams p;
    p.n = 301;
    p.K = 5;
    p.Q = 2;
    p.sigma = 0.7;
    p.p = 0.3;
    p.seed = 1234;
    const auto a = generate_synthetic(p);
    const auto b = generate_synthetic(p);
    EXPECT_EQ(a.data.numeric, b.data.numeric);  // bitwise
    EXPECT_EQ(a.data.categorical, b.data.categorical);
    for (int k = 0; k < p.K; ++k) EXPECT_NE(std::find(a.labels.begin(), a.labels.end(), k), a.labels.end());
    p.seed = 1235;
    EXPECT_NE(generate_synthetic(p).data.numeric, a.data.numeric);
}

TEST(Synthetic, RejectsBadParams) {
    SyntheticParams p;
    p.K = 1;
    EXPECT_THROW(generate_synthetic(p), Error);
    p.K = 2;
    p.p = 1.5;
    EXPECT_THROW(generate_synthetic(p), Error);
    p.p = 0.5;
    p.sigma = -1.0;
    EXPECT_THROW(generate_synthetic(p), Error);
}

TEST(PruneCategories, DropsUnusedLevels) {
    MixedDataset ds;
    ds.categorical.resize(3, 1);
    ds.categorical << 3, 1, 3;
    ds.cardinalities = {5};
    const auto p = prune_categories(ds);
    EXPECT_EQ(p.cardinalities, std::vector<int>({2}));
    EXPECT_EQ(p.categorical(0, 0), 0);
    EXPECT_EQ(p.categorical(1, 0), 1);
    EXPECT_EQ(p.categorical(2, 0), 0);
}
