// Command-line front end: cluster, sweep, synth, eval.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "specmix/result_json.hpp"
#include "specmix/specmix.hpp"

namespace {

using namespace specmix;

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitNumeric = 4;

int exit_code_for(ErrorCode c) {
    switch (c) {
        case ErrorCode::DegenerateGraph:
        case ErrorCode::SpectralGap:
        case ErrorCode::NoConvergence: return kExitNumeric;
        default: return kExitInput;
    }
}

std::vector<double> parse_lambda_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& tok : detail::split_csv_line(s, ',')) {
        auto v = detail::parse_double(tok);
        detail::require(v.has_value(), ErrorCode::InvalidArgument, "bad lambda value '" + tok + "'");
        out.push_back(*v);
    }
    return out;
}

SolverKind parse_solver(const std::string& s) {
    if (s == "auto") return SolverKind::Auto;
    if (s == "dense") return SolverKind::Dense;
    if (s == "lanczos") return SolverKind::Lanczos;
    throw Error(ErrorCode::InvalidArgument, "unknown solver '" + s + "'");
}

/// One label per line (any tokens, first-appearance encoded) or a result JSON document.
Labels read_labels(const std::string& path) {
    std::ifstream in(path);
    detail::require(in.good(), ErrorCode::Io, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        try {
            return labels_from_json(nlohmann::json::parse(text));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Parse, std::string("bad JSON in ") + path + ": " + e.what());
        }
    }
    Labels labels;
    detail::Dictionary dict;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        const auto tok = detail::trim(line);
        if (!tok.empty()) labels.push_back(dict.encode(std::string(tok)));
    }
    return labels;
}

struct ClusterArgs {
    std::string data;
    std::string schema;
    std::string schema_file;
    std::string method = "specmix";
    int K = 0;
    std::string lambda = "1";
    std::uint64_t seed = 0;
    std::string output;
    std::string missing = "?,";
    bool no_standardize = false;
    int restarts = 10;
    double gamma = -1.0;
    std::string solver = "auto";
    std::string dump_graph;
};

int run_cluster(const ClusterArgs& a) {
    if (a.schema.empty() == a.schema_file.empty()) {
        std::cerr << "usage error: exactly one of --schema or --schema-file is required\n";
        return kExitUsage;
    }
    const ColumnSchema schema = a.schema.empty() ? ColumnSchema::from_file(a.schema_file) : ColumnSchema::parse(a.schema);
    CsvOptions csv;
    csv.missing.clear();
    for (auto& tok : detail::split_csv_line(a.missing, ',')) csv.missing.push_back(tok);
    LoadedDataset loaded = load_mixed_csv(a.data, schema, csv);
    MixedDataset ds = loaded.data;
    if (!a.no_standardize && ds.numeric_count() > 0) ds = standardize_numeric(std::move(ds));

    const Method method = parse_method(a.method);
    SpecMixConfig cfg;
    cfg.K = a.K;
    cfg.seed = a.seed;
    cfg.lambdas = parse_lambda_list(a.lambda);
    cfg.kmeans.restarts = a.restarts;
    cfg.eigen.kind = parse_solver(a.solver);

    if (!a.dump_graph.empty()) {
        detail::require(ds.numeric_count() >= 1, ErrorCode::NumericRequired, "graph dump needs numeric features");
        const MixedDataset pruned = prune_categories(ds);
        const auto lambdas = cfg.resolve_lambdas(pruned.categorical_count());
        std::vector<OneHotMatrix> enc;
        std::vector<double> active;
        for (Index l = 0; l < pruned.categorical_count(); ++l) {
            if (lambdas[l] <= 0.0) continue;
            enc.push_back(one_hot(pruned, l));
            active.push_back(lambdas[l]);
        }
        write_dense_graph_csv(assemble_augmented(base_similarity(pruned), std::move(enc), std::move(active)),
                              a.dump_graph);
    }

    ClusteringResult res;
    switch (method) {
        case Method::SpecMix: res = specmix::specmix(ds, cfg); break;
        case Method::OnlyCat: res = onlycat(ds, cfg); break;
        case Method::NumericSpectral: res = numeric_spectral(ds, cfg); break;
        case Method::KModes:
        case Method::KPrototypes: {
            PartitionalConfig pc;
            pc.K = a.K;
            pc.seed = a.seed;
            pc.restarts = a.restarts;
            pc.gamma = a.gamma;
            detail::Stopwatch sw;
            auto pr = method == Method::KModes ? kmodes(ds, pc) : kprototypes(ds, pc);
            res.timings.kmeans = sw.lap();
            res.method = method_name(method);
            res.labels = std::move(pr.labels);
            res.K = a.K;
            res.seed = a.seed;
            res.inertia = pr.cost;
            break;
        }
    }

    const nlohmann::json doc = to_json(res, loaded.labels);
    if (a.output.empty() || a.output == "-") {
        std::cout << doc.dump(2) << '\n';
    } else {
        std::ofstream out(a.output);
        detail::require(out.good(), ErrorCode::Io, "cannot write " + a.output);
        out << doc.dump(2) << '\n';
    }
    if (loaded.labels) {
        std::cerr << "purity weighted=" << format_real(doc["purity"]["weighted"].get<double>())
                  << " macro=" << format_real(doc["purity"]["macro"].get<double>()) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral clustering of mixed numeric/categorical data"};
    app.require_subcommand(1);

    ClusterArgs ca;
    auto* cluster = app.add_subcommand("cluster", "cluster a CSV dataset and write a result JSON");
    cluster->add_option("--data", ca.data, "input CSV with header row")->required();
    cluster->add_option("--schema", ca.schema, "column roles, e.g. num,num,cat,label");
    cluster->add_option("--schema-file", ca.schema_file, "file holding the column roles");
    cluster->add_option("--method", ca.method, "specmix | onlycat | kmodes | kprototypes | numeric-spectral");
    cluster->add_option("--k", ca.K, "number of clusters")->required();
    cluster->add_option("--lambda", ca.lambda, "one value or a comma list with one value per categorical column");
    cluster->add_option("--seed", ca.seed, "RNG seed");
    cluster->add_option("--output,-o", ca.output, "result JSON path (default stdout)");
    cluster->add_option("--missing", ca.missing, "comma list of missing-value tokens (empty item = empty field)");
    cluster->add_flag("--no-standardize", ca.no_standardize, "keep numeric columns unscaled");
    cluster->add_option("--restarts", ca.restarts, "k-means / k-modes restarts");
    cluster->add_option("--gamma", ca.gamma, "k-prototypes categorical weight (default 0.5 * mean variance)");
    cluster->add_option("--solver", ca.solver, "auto | dense | lanczos");
    cluster->add_option("--dump-graph", ca.dump_graph, "write dense W_all and degrees to CSV (<= 5000 nodes)");

    std::string grid_path, sweep_out;
    int threads = 0;
    auto* sweep = app.add_subcommand("sweep", "run a synthetic experiment grid");
    sweep->add_option("--grid", grid_path, "grid config file")->required();
    sweep->add_option("--output,-o", sweep_out, "long-format results CSV")->required();
    sweep->add_option("--threads", threads, "worker threads (default: SPECMIX_THREADS or all cores)");

    SyntheticParams sp;
    std::string synth_out, corruption = "other";
    auto* synth = app.add_subcommand("synth", "write a synthetic mixed dataset");
    synth->add_option("--n", sp.n, "number of datapoints");
    synth->add_option("--k", sp.K, "number of clusters");
    synth->add_option("--q", sp.Q, "number of categorical variables");
    synth->add_option("--sigma", sp.sigma, "numeric noise standard deviation");
    synth->add_option("--p", sp.p, "category corruption probability");
    synth->add_option("--seed", sp.seed, "RNG seed");
    synth->add_option("--corruption", corruption, "other | any");
    synth->add_option("--output,-o", synth_out, "output CSV")->required();

    std::string pred_path, truth_path;
    auto* eval = app.add_subcommand("eval", "compare predicted labels against ground truth");
    eval->add_option("--pred", pred_path, "result JSON or one label per line")->required();
    eval->add_option("--truth", truth_path, "result JSON or one label per line")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*cluster) return run_cluster(ca);
        if (*sweep) {
            const auto grid = ExperimentGrid::from_file(grid_path);
            const auto summary = run_sweep(grid, SweepPaths::from_output(sweep_out), threads);
            std::cout << "planned=" << summary.planned << " skipped=" << summary.skipped
                      << " executed=" << summary.executed << " failed=" << summary.failed << '\n';
            return 0;
        }
        if (*synth) {
            detail::require(corruption == "other" || corruption == "any", ErrorCode::InvalidArgument,
                            "corruption must be 'other' or 'any'");
            sp.corruption = corruption == "any" ? Corruption::AnyCategory : Corruption::OtherCategories;
            const auto s = generate_synthetic(sp);
            std::ofstream out(synth_out, std::ios::binary);
            detail::require(out.good(), ErrorCode::Io, "cannot write " + synth_out);
            write_synthetic_csv(s, out);
            return 0;
        }
        if (*eval) {
            const Labels pred = read_labels(pred_path);
            const Labels truth = read_labels(truth_path);
            std::cout << "purity_weighted=" << format_real(purity(pred, truth, PurityMode::Weighted)) << '\n'
                      << "purity_macro=" << format_real(purity(pred, truth, PurityMode::Macro)) << '\n'
                      << "label_agreement=" << format_real(label_agreement(pred, truth)) << '\n'
                      << "imbalance_ratio=" << format_real(imbalance_ratio(truth)) << '\n';
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error[" << error_code_name(e.code()) << "]: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << '\n';
        return 1;
    }
    return kExitUsage;
}
