#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "baselines.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "pipelines.hpp"
#include "random.hpp"

namespace specmix {

/// Fixed 9-significant-digit rendering used by every CSV writer.
inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

enum class Method { SpecMix, OnlyCat, KModes, KPrototypes, NumericSpectral };

inline std::string method_name(Method m) {
    switch (m) {
        case Method::SpecMix: return "specmix";
        case Method::OnlyCat: return "onlycat";
        case Method::KModes: return "kmodes";
        case Method::KPrototypes: return "kprototypes";
        case Method::NumericSpectral: return "numeric-spectral";
    }
    return "?";
}

inline Method parse_method(const std::string& s) {
    for (Method m : {Method::SpecMix, Method::OnlyCat, Method::KModes, Method::KPrototypes, Method::NumericSpectral}) {
        if (method_name(m) == s) return m;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown method '" + s + "'");
}

// ---------------------------------------------------------------------------
// Synthetic CSV

/// Header x1..xR, c1..cQ, label; categories and labels as integers.
inline void write_synthetic_csv(const SyntheticDataset& s, std::ostream& out) {
    const auto& d = s.data;
    std::string line;
    for (Index j = 0; j < d.numeric_count(); ++j) out << (j ? "," : "") << 'x' << j + 1;
    for (Index l = 0; l < d.categorical_count(); ++l) out << (d.numeric_count() + l ? "," : "") << 'c' << l + 1;
    out << ",label\n";
    for (Index i = 0; i < d.size(); ++i) {
        line.clear();
        for (Index j = 0; j < d.numeric_count(); ++j) {
            if (j) line += ',';
            line += format_real(d.numeric(i, j));
        }
        for (Index l = 0; l < d.categorical_count(); ++l) {
            if (d.numeric_count() + l) line += ',';
            line += std::to_string(d.categorical(i, l));
        }
        line += ',';
        line += std::to_string(s.labels[static_cast<std::size_t>(i)]);
        out << line << '\n';
    }
}

/// Role tags matching write_synthetic_csv's columns.
inline std::string synthetic_schema(Index R, Index Q) {
    std::string s;
    for (Index j = 0; j < R; ++j) s += "num,";
    for (Index l = 0; l < Q; ++l) s += "cat,";
    return s + "label";
}

// ---------------------------------------------------------------------------
// Experiment grid

struct ExperimentGrid {
    std::vector<Index> n = {1000};
    std::vector<int> K = {2};
    std::vector<Index> Q = {3};
    std::vector<double> sigma = {1.0};
    std::vector<double> p = {0.1};
    std::vector<double> lambda = {50.0};
    int repetitions = 1;
    std::uint64_t base_seed = 0;
    std::vector<Method> methods = {Method::SpecMix};
    Corruption corruption = Corruption::OtherCategories;
    int kmeans_restarts = 10;

    std::size_t run_count() const {
        return n.size() * K.size() * Q.size() * sigma.size() * p.size() * lambda.size() * methods.size() *
               static_cast<std::size_t>(repetitions);
    }

    void validate() const {
        auto nonempty = [](bool ok, const char* axis) {
            detail::require(ok, ErrorCode::Parse, std::string("grid axis '") + axis + "' is empty");
        };
        nonempty(!n.empty(), "n");
        nonempty(!K.empty(), "K");
        nonempty(!Q.empty(), "Q");
        nonempty(!sigma.empty(), "sigma");
        nonempty(!p.empty(), "p");
        nonempty(!lambda.empty(), "lambda");
        nonempty(!methods.empty(), "methods");
        detail::require(repetitions >= 1, ErrorCode::Parse, "repetitions must be >= 1");
        detail::require(kmeans_restarts >= 1, ErrorCode::Parse, "kmeans_restarts must be >= 1");
    }

    /**
     * Plain `key = v1, v2, ...` lines; '#' starts a comment. Keys: n, K, Q,
     * sigma, p, lambda, reps, seed, methods, corruption, kmeans_restarts.
     */
    static ExperimentGrid parse(std::istream& in) {
        ExperimentGrid g;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
            if (detail::trim(line).empty()) continue;
            auto sep = line.find('=');
            if (sep == std::string::npos) sep = line.find(':');
            detail::require(sep != std::string::npos, ErrorCode::Parse,
                            "grid line " + std::to_string(line_no) + ": expected key = values");
            std::string key(detail::trim(std::string_view(line).substr(0, sep)));
            std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
            std::vector<std::string> values;
            for (auto& v : detail::split_csv_line(std::string_view(line).substr(sep + 1), ',')) {
                if (!v.empty()) values.push_back(v);
            }
            detail::require(!values.empty(), ErrorCode::Parse, "grid key '" + key + "' has no values");

            auto reals = [&] {
                std::vector<double> out;
                for (const auto& v : values) {
                    auto d = detail::parse_double(v);
                    detail::require(d.has_value(), ErrorCode::Parse, "grid key '" + key + "': bad number '" + v + "'");
                    out.push_back(*d);
                }
                return out;
            };
            auto integers = [&] {
                std::vector<long long> out;
                for (double d : reals()) {
                    detail::require(d == static_cast<double>(static_cast<long long>(d)), ErrorCode::Parse,
                                    "grid key '" + key + "' needs integers");
                    out.push_back(static_cast<long long>(d));
                }
                return out;
            };

            if (key == "n") {
                g.n.clear();
                for (auto v : integers()) g.n.push_back(static_cast<Index>(v));
            } else if (key == "k") {
                g.K.clear();
                for (auto v : integers()) g.K.push_back(static_cast<int>(v));
            } else if (key == "q") {
                g.Q.clear();
                for (auto v : integers()) g.Q.push_back(static_cast<Index>(v));
            } else if (key == "sigma") {
                g.sigma = reals();
            } else if (key == "p") {
                g.p = reals();
            } else if (key == "lambda") {
                g.lambda = reals();
            } else if (key == "reps" || key == "repetitions") {
                g.repetitions = static_cast<int>(integers().front());
            } else if (key == "seed") {
                g.base_seed = std::stoull(values.front());
            } else if (key == "kmeans_restarts") {
                g.kmeans_restarts = static_cast<int>(integers().front());
            } else if (key == "methods" || key == "method") {
                g.methods.clear();
                for (const auto& v : values) g.methods.push_back(parse_method(v));
            } else if (key == "corruption") {
                detail::require(values.front() == "other" || values.front() == "any", ErrorCode::Parse,
                                "corruption must be 'other' or 'any'");
                g.corruption = values.front() == "any" ? Corruption::AnyCategory : Corruption::OtherCategories;
            } else {
                throw Error(ErrorCode::Parse, "unknown grid key '" + key + "'");
            }
        }
        g.validate();
        return g;
    }

    static ExperimentGrid from_file(const std::string& path) {
        std::ifstream in(path);
        detail::require(in.good(), ErrorCode::Io, "cannot read grid config: " + path);
        return parse(in);
    }
};

/// One planned run: a grid cell, a method, a repetition.
struct RunSpec {
    Index n = 0;
    int K = 0;
    Index Q = 0;
    double sigma = 0.0;
    double p = 0.0;
    double lambda = 0.0;
    Method method = Method::SpecMix;
    int rep = 0;
    std::uint64_t data_seed = 0;
    std::uint64_t method_seed = 0;

    /// The leading CSV fields identifying the run.
    std::string key() const {
        return std::to_string(n) + ',' + std::to_string(K) + ',' + std::to_string(Q) + ',' + format_real(sigma) +
               ',' + format_real(p) + ',' + format_real(lambda) + ',' + method_name(method) + ',' +
               std::to_string(rep);
    }
};

/// Cartesian expansion in canonical order (n, K, Q, sigma, p, lambda, method, rep).
inline std::vector<RunSpec> expand_grid(const ExperimentGrid& g) {
    std::vector<RunSpec> runs;
    runs.reserve(g.run_count());
    for (Index n : g.n)
        for (int K : g.K)
            for (Index Q : g.Q)
                for (double sigma : g.sigma)
                    for (double p : g.p)
                        for (double lambda : g.lambda)
                            for (Method m : g.methods)
                                for (int rep = 0; rep < g.repetitions; ++rep) {
                                    RunSpec r{n, K, Q, sigma, p, lambda, m, rep, 0, 0};
                                    // The dataset depends on the cell and repetition only, so every
                                    // method and lambda sees the same data.
                                    r.data_seed = derive_seed(
                                        g.base_seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(K),
                                                      static_cast<std::uint64_t>(Q), std::bit_cast<std::uint64_t>(sigma),
                                                      std::bit_cast<std::uint64_t>(p), static_cast<std::uint64_t>(rep)});
                                    r.method_seed = derive_seed(r.data_seed, {static_cast<std::uint64_t>(m),
                                                                              std::bit_cast<std::uint64_t>(lambda)});
                                    runs.push_back(r);
                                }
    return runs;
}

struct RunOutcome {
    double purity_weighted = 0.0;
    double purity_macro = 0.0;
    StageTimings timings;
    std::string error;
};

inline RunOutcome execute_run(const RunSpec& r, const ExperimentGrid& g) {
    RunOutcome out;
    try {
        SyntheticParams sp;
        sp.n = r.n;
        sp.K = r.K;
        sp.Q = r.Q;
        sp.sigma = r.sigma;
        sp.p = r.p;
        sp.seed = r.data_seed;
        sp.corruption = g.corruption;
        const SyntheticDataset s = generate_synthetic(sp);

        SpecMixConfig cfg;
        cfg.K = r.K;
        cfg.seed = r.method_seed;
        cfg.kmeans.restarts = g.kmeans_restarts;
        cfg.lambdas = {r.lambda};
        Labels labels;
        switch (r.method) {
            case Method::SpecMix: {
                auto res = specmix(s.data, cfg);
                labels = std::move(res.labels);
                out.timings = res.timings;
                break;
            }
            case Method::OnlyCat: {
                cfg.lambdas = {r.lambda > 0.0 ? r.lambda : 1.0};
                auto res = onlycat(s.data, cfg);
                labels = std::move(res.labels);
                out.timings = res.timings;
                break;
            }
            case Method::NumericSpectral: {
                auto res = numeric_spectral(s.data, cfg);
                labels = std::move(res.labels);
                out.timings = res.timings;
                break;
            }
            case Method::KModes:
            case Method::KPrototypes: {
                PartitionalConfig pc;
                pc.K = r.K;
                pc.seed = r.method_seed;
                detail::Stopwatch sw;
                auto res = r.method == Method::KModes ? kmodes(s.data, pc) : kprototypes(s.data, pc);
                out.timings.kmeans = sw.lap();
                labels = std::move(res.labels);
                break;
            }
        }
        out.purity_weighted = purity(labels, s.labels, PurityMode::Weighted);
        out.purity_macro = purity(labels, s.labels, PurityMode::Macro);
    } catch (const std::exception& e) {
        out.error = e.what();
        std::replace_if(out.error.begin(), out.error.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; },
                        ';');
    }
    return out;
}

inline const char* kLongHeader = "n,K,Q,sigma,p,lambda,method,rep,seed,purity_weighted,purity_macro,error";
inline const char* kTimingHeader = "n,K,Q,sigma,p,lambda,method,rep,t_graph,t_eigensolve,t_kmeans,t_total";
inline const char* kAggregateHeader =
    "n,K,Q,sigma,p,lambda,method,runs,errors,mean_purity_weighted,mean_purity_macro";
inline const char* kRuntimeHeader =
    "n,K,Q,sigma,p,lambda,method,runs,median_t_graph,median_t_eigensolve,median_t_kmeans,median_t_total";

inline std::string long_row(const RunSpec& r, const RunOutcome& o) {
    std::string s = r.key() + ',' + std::to_string(r.method_seed) + ',';
    if (o.error.empty()) {
        s += format_real(o.purity_weighted) + ',' + format_real(o.purity_macro) + ',';
    } else {
        s += ",," + o.error;
    }
    return s;
}

inline std::string timing_row(const RunSpec& r, const RunOutcome& o) {
    return r.key() + ',' + format_real(o.timings.graph) + ',' + format_real(o.timings.eigensolve) + ',' +
           format_real(o.timings.kmeans) + ',' + format_real(o.timings.total());
}

struct SweepPaths {
    std::string long_csv;
    std::string aggregate_csv;
    std::string timings_csv;
    std::string runtime_csv;

    /// results.csv -> results.agg.csv, results.timings.csv, results.runtime.csv
    static SweepPaths from_output(const std::string& out) {
        std::filesystem::path p(out);
        const auto stem = (p.parent_path() / p.stem()).string();
        return {out, stem + ".agg.csv", stem + ".timings.csv", stem + ".runtime.csv"};
    }
};

struct SweepSummary {
    std::size_t planned = 0;
    std::size_t skipped = 0;  // already present in the output
    std::size_t executed = 0;
    std::size_t failed = 0;
};

namespace detail {

inline std::size_t nth_comma(const std::string& s, int count) {
    std::size_t pos = 0;
    for (int i = 0; i < count; ++i) {
        pos = s.find(',', pos);
        if (pos == std::string::npos) return std::string::npos;
        ++pos;
    }
    return pos;
}

/// Maps the 8-field run key to the full row text for every data line of a CSV.
inline std::map<std::string, std::string> read_keyed_rows(const std::string& path) {
    std::map<std::string, std::string> rows;
    std::ifstream in(path);
    if (!in.good()) return rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (header) {
            header = false;
            continue;
        }
        const auto cut = nth_comma(line, 8);
        // Rows cut short by an interrupted write are re-run.
        if (cut == std::string::npos || std::count(line.begin(), line.end(), ',') != 11) continue;
        rows[line.substr(0, cut - 1)] = line;
    }
    return rows;
}

inline void write_lines(const std::string& path, const char* header, const std::vector<std::string>& lines) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        detail::require(out.good(), ErrorCode::Io, "cannot write " + path);
        out << header << '\n';
        for (const auto& l : lines) out << l << '\n';
    }
    std::filesystem::rename(tmp, path);
}

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> f;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            f.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    f.push_back(cur);
    return f;
}

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline int thread_count() {
    if (const char* env = std::getenv("SPECMIX_THREADS")) {
        const int t = std::atoi(env);
        if (t >= 1) return t;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace detail

/**
 * Groups long-format rows by cell (first 7 fields) in file order and writes
 * mean purities. Works from the CSV text so the result only depends on the
 * long file's contents.
 */
inline void aggregate_long_csv(const std::string& long_csv, const std::string& aggregate_csv) {
    std::ifstream in(long_csv);
    detail::require(in.good(), ErrorCode::Io, "cannot read " + long_csv);
    struct Acc {
        long runs = 0, errors = 0;
        double pw = 0.0, pm = 0.0;
    };
    std::vector<std::string> order;
    std::map<std::string, Acc> acc;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_fields(line);
        detail::require(f.size() >= 12, ErrorCode::Parse, "malformed sweep row: " + line);
        const std::string cell = line.substr(0, detail::nth_comma(line, 7) - 1);
        auto [it, inserted] = acc.try_emplace(cell);
        if (inserted) order.push_back(cell);
        ++it->second.runs;
        if (!f[11].empty()) {
            ++it->second.errors;
            continue;
        }
        it->second.pw += *detail::parse_double(f[9]);
        it->second.pm += *detail::parse_double(f[10]);
    }
    std::vector<std::string> out;
    for (const auto& cell : order) {
        const Acc& a = acc[cell];
        const long ok = a.runs - a.errors;
        std::string row = cell + ',' + std::to_string(a.runs) + ',' + std::to_string(a.errors) + ',';
        if (ok > 0) row += format_real(a.pw / ok) + ',' + format_real(a.pm / ok);
        else row += ',';
        out.push_back(row);
    }
    detail::write_lines(aggregate_csv, kAggregateHeader, out);
}

inline void aggregate_timings(const std::string& timings_csv, const std::string& runtime_csv) {
    std::ifstream in(timings_csv);
    if (!in.good()) return;
    std::vector<std::string> order;
    std::map<std::string, std::array<std::vector<double>, 4>> acc;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_fields(line);
        if (f.size() < 12) continue;
        const std::string cell = line.substr(0, detail::nth_comma(line, 7) - 1);
        auto [it, inserted] = acc.try_emplace(cell);
        if (inserted) order.push_back(cell);
        for (int s = 0; s < 4; ++s) it->second[s].push_back(detail::parse_double(f[8 + s]).value_or(0.0));
    }
    std::vector<std::string> out;
    for (const auto& cell : order) {
        const auto& a = acc[cell];
        std::string row = cell + ',' + std::to_string(a[0].size());
        for (int s = 0; s < 4; ++s) row += ',' + format_real(detail::median(a[s]));
        out.push_back(row);
    }
    detail::write_lines(runtime_csv, kRuntimeHeader, out);
}

/**
 * Runs every planned run missing from the long CSV, then rewrites the long
 * and timing CSVs in canonical order and re-aggregates. Finished rows are
 * appended as they complete so an interrupted sweep can resume.
 */
inline SweepSummary run_sweep(const ExperimentGrid& grid, const SweepPaths& paths, int threads = 0) {
    grid.validate();
    const auto runs = expand_grid(grid);
    auto existing = detail::read_keyed_rows(paths.long_csv);
    auto existing_timing = detail::read_keyed_rows(paths.timings_csv);

    SweepSummary summary;
    summary.planned = runs.size();
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (existing.count(runs[i].key())) ++summary.skipped;
        else todo.push_back(i);
    }

    std::vector<std::string> new_long(runs.size()), new_timing(runs.size());
    if (!todo.empty()) {
        const bool fresh = !std::filesystem::exists(paths.long_csv);
        std::ofstream progress(paths.long_csv, std::ios::app);
        detail::require(progress.good(), ErrorCode::Io, "cannot write " + paths.long_csv);
        if (fresh) progress << kLongHeader << '\n' << std::flush;

        std::mutex writer;
        std::atomic<std::size_t> next{0};
        std::atomic<std::size_t> failed{0};
        auto worker = [&] {
            for (std::size_t k = next++; k < todo.size(); k = next++) {
                const std::size_t i = todo[k];
                const RunOutcome o = execute_run(runs[i], grid);
                if (!o.error.empty()) ++failed;
                std::lock_guard lock(writer);
                new_long[i] = long_row(runs[i], o);
                new_timing[i] = timing_row(runs[i], o);
                progress << new_long[i] << '\n' << std::flush;
            }
        };
        const int nthreads = std::max(1, std::min<int>(threads > 0 ? threads : detail::thread_count(),
                                                       static_cast<int>(todo.size())));
        std::vector<std::thread> pool;
        for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
        summary.executed = todo.size();
        summary.failed = failed;
    }

    std::vector<std::string> long_lines, timing_lines;
    long_lines.reserve(runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto key = runs[i].key();
        if (!new_long[i].empty()) {
            long_lines.push_back(new_long[i]);
            timing_lines.push_back(new_timing[i]);
        } else {
            long_lines.push_back(existing.at(key));
            if (auto it = existing_timing.find(key); it != existing_timing.end()) timing_lines.push_back(it->second);
        }
    }
    detail::write_lines(paths.long_csv, kLongHeader, long_lines);
    detail::write_lines(paths.timings_csv, kTimingHeader, timing_lines);
    aggregate_long_csv(paths.long_csv, paths.aggregate_csv);
    aggregate_timings(paths.timings_csv, paths.runtime_csv);
    return summary;
}

}  // namespace specmix
