#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "random.hpp"

namespace specmix {

using Index = Eigen::Index;
using Labels = std::vector<int>;
using CategoryMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/**
 * n datapoints with R numeric and Q categorical features.
 *
 * Categorical entries are dense indices: column l takes values in
 * [0, cardinalities[l]). Loaders and the generator only produce datasets in
 * which every listed category level is used by at least one row.
 */
struct MixedDataset {
    Eigen::MatrixXd numeric;      // n x R
    CategoryMatrix categorical;   // n x Q
    std::vector<int> cardinalities;

    Index size() const { return std::max(numeric.rows(), categorical.rows()); }
    Index numeric_count() const { return numeric.cols(); }
    Index categorical_count() const { return categorical.cols(); }

    /// t = sum of category counts over all categorical variables.
    Index total_categories() const {
        Index t = 0;
        for (int c : cardinalities) t += c;
        return t;
    }

    void validate() const {
        using detail::require;
        require(size() >= 1, ErrorCode::EmptyDataset, "dataset has no rows");
        require(numeric_count() + categorical_count() >= 1, ErrorCode::InvalidArgument,
                "dataset has no features");
        require(numeric_count() == 0 || numeric.rows() == size(), ErrorCode::DimensionMismatch,
                "numeric block row count differs from dataset size");
        require(categorical_count() == 0 || categorical.rows() == size(),
                ErrorCode::DimensionMismatch, "categorical block row count differs from dataset size");
        require(static_cast<Index>(cardinalities.size()) == categorical_count(),
                ErrorCode::DimensionMismatch, "cardinalities length differs from Q");
        for (Index l = 0; l < categorical_count(); ++l) {
            require(cardinalities[l] >= 1, ErrorCode::InvalidArgument, "cardinality must be positive");
            for (Index i = 0; i < categorical.rows(); ++i) {
                const int c = categorical(i, l);
                require(c >= 0 && c < cardinalities[l], ErrorCode::InvalidArgument,
                        "categorical entry out of range in column " + std::to_string(l));
            }
        }
    }
};

/// Binary n x t_l indicator matrix of one categorical variable, stored by row index.
class OneHotMatrix {
public:
    OneHotMatrix() = default;
    OneHotMatrix(std::vector<int> categories, int cardinality)
        : categories_(std::move(categories)), cardinality_(cardinality), column_sums_(cardinality, 0) {
        for (int c : categories_) {
            detail::require(c >= 0 && c < cardinality_, ErrorCode::InvalidArgument,
                            "category index out of range");
            ++column_sums_[c];
        }
    }

    Index rows() const { return static_cast<Index>(categories_.size()); }
    Index cols() const { return cardinality_; }

    /// Category of row i (the column holding its single 1).
    int category(Index i) const { return categories_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& categories() const { return categories_; }

    /// Diagonal of D_l: number of rows in each category.
    const std::vector<Index>& column_sums() const { return column_sums_; }

    Eigen::MatrixXd dense() const {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows(), cols());
        for (Index i = 0; i < rows(); ++i) m(i, category(i)) = 1.0;
        return m;
    }

private:
    std::vector<int> categories_;
    int cardinality_ = 0;
    std::vector<Index> column_sums_;
};

/// l is zero-based here.
inline OneHotMatrix one_hot(const MixedDataset& ds, Index l) {
    detail::require(l >= 0 && l < ds.categorical_count(), ErrorCode::InvalidArgument,
                    "categorical feature index out of range");
    std::vector<int> cats(static_cast<std::size_t>(ds.size()));
    for (Index i = 0; i < ds.size(); ++i) cats[i] = ds.categorical(i, l);
    return OneHotMatrix(std::move(cats), ds.cardinalities[l]);
}

// ---------------------------------------------------------------------------
// Column schemas and CSV ingestion

enum class ColumnRole { Numeric, Categorical, Ordinal, Label, Ignore };

struct ColumnSchema {
    std::vector<ColumnRole> roles;

    /// Comma/whitespace separated role tags, e.g. "num,num,cat,label".
    static ColumnSchema parse(std::string_view text) {
        ColumnSchema schema;
        std::string token;
        auto flush = [&] {
            if (token.empty()) return;
            schema.roles.push_back(parse_role(token));
            token.clear();
        };
        for (char ch : text) {
            if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') {
                flush();
            } else {
                token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
            }
        }
        flush();
        schema.validate();
        return schema;
    }

    static ColumnSchema from_file(const std::string& path) {
        std::ifstream in(path);
        detail::require(in.good(), ErrorCode::Io, "cannot read schema file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    void validate() const {
        detail::require(!roles.empty(), ErrorCode::Parse, "empty schema");
        const auto labels = std::count(roles.begin(), roles.end(), ColumnRole::Label);
        detail::require(labels <= 1, ErrorCode::Parse, "schema has more than one label column");
    }

    std::size_t size() const { return roles.size(); }

private:
    static ColumnRole parse_role(const std::string& tag) {
        if (tag == "num" || tag == "numeric") return ColumnRole::Numeric;
        if (tag == "cat" || tag == "categorical") return ColumnRole::Categorical;
        if (tag == "ord" || tag == "ordinal") return ColumnRole::Ordinal;
        if (tag == "label") return ColumnRole::Label;
        if (tag == "ignore" || tag == "skip") return ColumnRole::Ignore;
        throw Error(ErrorCode::Parse, "unknown column role '" + tag + "'");
    }
};

struct CsvOptions {
    std::vector<std::string> missing = {"?", ""};
    char delimiter = ',';
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Splits one CSV record. Double-quoted fields may contain the delimiter.
inline std::vector<std::string> split_csv_line(std::string_view line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == delim) {
            fields.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.emplace_back(trim(cur));
    return fields;
}

inline std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

/// First-appearance dictionary encoder.
class Dictionary {
public:
    int encode(const std::string& token) {
        auto [it, inserted] = index_.try_emplace(token, static_cast<int>(levels_.size()));
        if (inserted) levels_.push_back(token);
        return it->second;
    }
    int size() const { return static_cast<int>(levels_.size()); }
    const std::vector<std::string>& levels() const { return levels_; }

private:
    std::unordered_map<std::string, int> index_;
    std::vector<std::string> levels_;
};

}  // namespace detail

struct LoadedDataset {
    MixedDataset data;
    std::optional<Labels> labels;
    std::vector<std::string> label_levels;
    std::size_t dropped_rows = 0;
};

/**
 * Reads a CSV with a header row. Rows with any missing field are dropped
 * before dictionary encoding, so category and label indices follow first
 * appearance among the kept rows and no unused level survives.
 */
inline LoadedDataset load_mixed_csv(std::istream& in, const ColumnSchema& schema,
                                    const CsvOptions& opts = {}) {
    schema.validate();
    std::string line;
    detail::require(static_cast<bool>(std::getline(in, line)), ErrorCode::Parse, "CSV has no header row");
    const auto header = detail::split_csv_line(line, opts.delimiter);
    detail::require(header.size() == schema.size(), ErrorCode::Parse,
                    "schema has " + std::to_string(schema.size()) + " columns but header has " +
                        std::to_string(header.size()));

    auto is_missing = [&](const std::string& f) {
        return std::find(opts.missing.begin(), opts.missing.end(), f) != opts.missing.end();
    };

    std::vector<std::vector<std::string>> rows;
    std::size_t dropped = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split_csv_line(line, opts.delimiter);
        detail::require(fields.size() == schema.size(), ErrorCode::Parse,
                        "line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(schema.size()));
        bool missing = false;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (schema.roles[c] != ColumnRole::Ignore && is_missing(fields[c])) missing = true;
        }
        if (missing) {
            ++dropped;
            continue;
        }
        rows.push_back(std::move(fields));
    }
    detail::require(!rows.empty(), ErrorCode::EmptyDataset, "dataset is empty after dropping missing rows");

    std::vector<std::size_t> num_cols, cat_cols;
    std::optional<std::size_t> label_col;
    for (std::size_t c = 0; c < schema.size(); ++c) {
        switch (schema.roles[c]) {
            case ColumnRole::Numeric: num_cols.push_back(c); break;
            case ColumnRole::Categorical:
            case ColumnRole::Ordinal: cat_cols.push_back(c); break;
            case ColumnRole::Label: label_col = c; break;
            case ColumnRole::Ignore: break;
        }
    }
    detail::require(!num_cols.empty() || !cat_cols.empty(), ErrorCode::Parse,
                    "schema selects no feature columns");

    const auto n = static_cast<Index>(rows.size());
    LoadedDataset out;
    out.dropped_rows = dropped;
    out.data.numeric.resize(n, static_cast<Index>(num_cols.size()));
    out.data.categorical.resize(n, static_cast<Index>(cat_cols.size()));
    std::vector<detail::Dictionary> dicts(cat_cols.size());
    detail::Dictionary label_dict;
    Labels labels;

    for (Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < num_cols.size(); ++j) {
            const auto v = detail::parse_double(r[num_cols[j]]);
            detail::require(v.has_value(), ErrorCode::Parse,
                            "non-numeric token '" + r[num_cols[j]] + "' in numeric column '" +
                                header[num_cols[j]] + "'");
            out.data.numeric(i, static_cast<Index>(j)) = *v;
        }
        for (std::size_t j = 0; j < cat_cols.size(); ++j) {
            out.data.categorical(i, static_cast<Index>(j)) = dicts[j].encode(r[cat_cols[j]]);
        }
        if (label_col) labels.push_back(label_dict.encode(r[*label_col]));
    }
    for (const auto& d : dicts) out.data.cardinalities.push_back(d.size());
    if (label_col) {
        out.labels = std::move(labels);
        out.label_levels = label_dict.levels();
    }
    out.data.validate();
    return out;
}

inline LoadedDataset load_mixed_csv(const std::string& path, const ColumnSchema& schema,
                                    const CsvOptions& opts = {}) {
    std::ifstream in(path);
    detail::require(in.good(), ErrorCode::Io, "cannot read CSV file: " + path);
    return load_mixed_csv(in, schema, opts);
}

/// Population (divide-by-n) z-scores per numeric column; constant columns become zeros.
inline MixedDataset standardize_numeric(MixedDataset ds) {
    const Index n = ds.numeric.rows();
    for (Index j = 0; j < ds.numeric.cols(); ++j) {
        auto col = ds.numeric.col(j);
        const double mean = col.mean();
        const double var = (col.array() - mean).square().sum() / static_cast<double>(n);
        const double sd = std::sqrt(var);
        if (!(sd > 1e-14 * std::max(1.0, std::abs(mean)))) {
            col.setZero();
        } else {
            col = (col.array() - mean) / sd;
        }
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Synthetic generator

enum class Corruption {
    OtherCategories,  ///< corrupted value drawn from the K-1 non-attached categories
    AnyCategory,      ///< corrupted value drawn from all K categories
};

struct SyntheticParams {
    Index n = 1000;
    int K = 2;
    Index Q = 3;
    double sigma = 1.0;
    double p = 0.1;
    std::uint64_t seed = 0;
    Corruption corruption = Corruption::OtherCategories;

    void validate() const {
        using detail::require;
        require(K >= 2, ErrorCode::InvalidArgument, "K must be at least 2");
        require(n >= K, ErrorCode::InvalidArgument, "n must be at least K");
        require(Q >= 0, ErrorCode::InvalidArgument, "Q must be nonnegative");
        require(p >= 0.0 && p <= 1.0, ErrorCode::InvalidArgument, "p must lie in [0, 1]");
        require(sigma >= 0.0, ErrorCode::InvalidArgument, "sigma must be nonnegative");
    }
};

struct SyntheticDataset {
    MixedDataset data;
    Labels labels;
};

namespace detail {
// Box-Muller on our own uniform stream so samples do not depend on the
// standard library's normal_distribution.
inline double standard_normal(Rng& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}
}  // namespace detail

/**
 * Gaussian blobs around the canonical basis vectors of R^K plus Q categorical
 * variables with K levels each. Cluster k owns floor(n/K) points, the first
 * n mod K clusters one more; rows are emitted cluster by cluster. Each
 * categorical value equals the cluster id with probability 1-p.
 */
inline SyntheticDataset generate_synthetic(const SyntheticParams& params) {
    params.validate();
    const int K = params.K;
    const Index n = params.n;
    Rng rng(params.seed);

    SyntheticDataset out;
    out.data.numeric.resize(n, K);
    out.data.categorical.resize(n, params.Q);
    out.data.cardinalities.assign(static_cast<std::size_t>(params.Q), K);
    out.labels.reserve(static_cast<std::size_t>(n));

    Index row = 0;
    for (int k = 0; k < K; ++k) {
        const Index count = n / K + (k < n % K ? 1 : 0);
        for (Index c = 0; c < count; ++c, ++row) {
            for (int d = 0; d < K; ++d) {
                const double mean = d == k ? 1.0 : 0.0;
                out.data.numeric(row, d) = mean + params.sigma * detail::standard_normal(rng);
            }
            for (Index l = 0; l < params.Q; ++l) {
                int cat = k;
                if (uniform01(rng) < params.p) {
                    if (params.corruption == Corruption::OtherCategories) {
                        cat = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(K - 1)));
                        if (cat >= k) ++cat;
                    } else {
                        cat = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(K)));
                    }
                }
                out.data.categorical(row, l) = cat;
            }
            out.labels.push_back(k);
        }
    }
    return out;
}

/// Re-encodes categorical columns so every level is used, in first-appearance order.
inline MixedDataset prune_categories(MixedDataset ds) {
    for (Index l = 0; l < ds.categorical_count(); ++l) {
        std::vector<int> remap(static_cast<std::size_t>(ds.cardinalities[l]), -1);
        int next = 0;
        for (Index i = 0; i < ds.size(); ++i) {
            int& c = ds.categorical(i, l);
            if (remap[c] < 0) remap[c] = next++;
            c = remap[c];
        }
        ds.cardinalities[l] = next;
    }
    return ds;
}

}  // namespace specmix
