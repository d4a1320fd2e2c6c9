#pragma once
// Best-construction repository and run reports.

#include <optional>
#include <string>
#include <vector>

#include "evo/problem.hpp"

namespace evo {

struct Provenance {
    std::string run_id;
    std::uint64_t seed = 0;
    std::string timestamp;  // UTC, ISO 8601
    std::string version = kEvaluatorVersion;
};

struct BestRecord {
    std::string problem_id;
    json instance = json::object();
    json construction;  // stored as given
    double score = 0;   // canonical orientation
    double raw = 0;
    std::optional<json> certificate;
    Provenance provenance;
};

json best_record_to_json(const BestRecord& r);
BestRecord best_record_from_json(const json& j);

// $EVOCONSTRUCT_REPO, else "repo"
std::string repo_root();
std::string repo_path(const std::string& root, const std::string& problem_id, const json& instance);

// Scores the construction with the registered evaluator (and certifies it when bits > 0) and
// fills in score, raw, instance and certificate. Throws on unknown problems or infeasible input.
BestRecord make_best_record(const std::string& problem_id, const json& instance, const json& construction,
                            int bits, Provenance prov);

struct RepoAddResult {
    bool stored = false;
    std::string path;
    std::string archived;  // previous record moved here, if any
    std::optional<double> previous_score;
    std::string message;
};

// replaces only when strictly better in canonical orientation; writes by atomic rename
RepoAddResult repo_add(const std::string& root, const BestRecord& r);
std::optional<BestRecord> repo_show(const std::string& root, const std::string& problem_id, const json& instance);

struct VerifyIssue {
    std::string path;
    std::string message;
};
// re-evaluates every stored record (one problem, or all when empty)
std::vector<VerifyIssue> repo_verify(const std::string& root, const std::string& problem_id = "",
                                     std::size_t* checked = nullptr);

// ---- run reports ----

// eval_index,best_score,wall_ms,feasible_count; throws std::runtime_error on a missing or bad log
std::string report_csv(const std::string& run_dir);
// generation,count,feasible,min,q25,median,q75,max,best_so_far over feasible scores
std::string report_plotdata(const std::string& run_dir);

}  // namespace evo
