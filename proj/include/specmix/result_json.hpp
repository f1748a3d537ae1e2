#pragma once

#include <json.hpp>

#include <optional>
#include <string>

#include "eval.hpp"
#include "pipelines.hpp"

namespace specmix {

inline constexpr int kResultFormatVersion = 1;

/// Versioned JSON document for one clustering run.
inline nlohmann::json to_json(const ClusteringResult& r, const std::optional<Labels>& truth = std::nullopt) {
    nlohmann::json j;
    j["format"] = "specmix-result";
    j["version"] = kResultFormatVersion;
    j["method"] = r.method;
    j["n"] = r.labels.size();
    j["labels"] = r.labels;
    j["eigenvalues"] = std::vector<double>(r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size());
    j["max_residual"] = r.max_residual;
    j["embedding_rows_used"] = r.embedding_rows_used;
    j["kmeans_inertia"] = r.inertia;
    j["timings"] = {{"graph", r.timings.graph},
                    {"eigensolve", r.timings.eigensolve},
                    {"kmeans", r.timings.kmeans},
                    {"total", r.timings.total()}};
    j["config"] = {{"K", r.K}, {"lambdas", r.lambdas}};
    j["seed"] = r.seed;
    if (truth) {
        j["purity"] = {{"weighted", purity(r.labels, *truth, PurityMode::Weighted)},
                       {"macro", purity(r.labels, *truth, PurityMode::Macro)}};
    }
    return j;
}

/// Labels from a result document written by to_json().
inline Labels labels_from_json(const nlohmann::json& j) {
    detail::require(j.contains("labels") && j["labels"].is_array(), ErrorCode::Parse,
                    "result document has no labels array");
    return j["labels"].get<Labels>();
}

}  // namespace specmix
