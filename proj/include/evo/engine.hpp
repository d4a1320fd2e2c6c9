#pragma once
// Evolutionary loop: archive with niches, incumbent chaining, generalizer scoring, run logs.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "evo/problem.hpp"
#include "evo/strategies.hpp"

namespace evo {

enum class RunMode { search, generalize };

struct ProposerSpec {
    bool builtin = true;
    std::optional<StrategyConfig> strategy;  // seed strategy; default_strategy otherwise
    std::string external;                     // command line or http://host:port, empty for none
    long external_timeout_ms = 60000;
    long strategy_evals = 200;  // evaluation cap per candidate; keeps runs reproducible
};

struct ExperimentConfig {
    std::string problem_id;
    json instance = json::object();
    RunMode mode = RunMode::search;
    std::vector<json> instance_list;
    int worker_count = 1;
    // candidates per generation; all of a generation see the same incumbent, so results do not
    // depend on worker_count
    int batch_size = 4;
    long eval_budget_ms = 1000;
    long total_evals = 100;
    std::uint64_t master_seed = 0;
    ProposerSpec proposer;
    int archive_capacity = 64;
    int niche_count = 4;
    // canonical instance json -> reference score
    std::map<std::string, double> normalization_table;
    std::string start = "random";  // random | baseline | none
    json baseline_params = json::object();
    std::string runs_dir;  // empty: nothing persisted
    std::string run_id;    // empty: derived from the config hash
};

ExperimentConfig config_from_json(const json& j);
json config_to_json(const ExperimentConfig& c);
// empty string when valid
std::string config_problem(const ExperimentConfig& c);

struct CandidateRecord {
    long id = 0;
    std::vector<long> parent_ids;
    std::variant<Construction, StrategyConfig> payload;
    std::optional<Construction> construction;  // what a strategy produced
    double score = -HUGE_VAL;                  // canonical, larger is better
    EvaluationReport report;
    long generation = 0;
    std::uint64_t seed_used = 0;
    long strategy_evals = 0;
    std::string source = "builtin";
};

json record_to_json(const CandidateRecord& r);
std::string payload_kind(const CandidateRecord& r);

struct Archive {
    std::vector<std::vector<CandidateRecord>> niches;
    std::size_t niche_capacity = 16;
    std::optional<CandidateRecord> incumbent;
    long admitted = 0, rejected = 0, evicted = 0;

    Archive(int niche_count = 4, int capacity = 64);
    std::size_t size() const;
    // best records across niches, best first
    std::vector<const CandidateRecord*> top(std::size_t k) const;
};

std::size_t niche_of(const std::string& kind, long generation, std::size_t niche_count);
// returns true when the incumbent changed
bool admit(Archive& a, const CandidateRecord& rec);

struct RunReport {
    std::optional<CandidateRecord> best;
    std::vector<std::pair<long, double>> history;  // (eval index, best-so-far score)
    long eval_count = 0;
    double wall_ms = 0;
    bool no_feasible = false;
    bool external_quarantined = false;
    std::string run_dir;
};

// everything except wall time, for determinism checks
json run_report_to_json(const RunReport& r, bool with_timing = true);

// instance -> construction; nullopt means the generator failed on that instance
using Generator = std::function<std::optional<Construction>(const json& inst, Rng& rng, long budget_ms)>;

// mean over instances of raw/ref (maximize) or ref/raw (minimize); failures and invalid results
// contribute the problem's infeasibility floor
double score_generalizer_candidate(const Problem& p, const Generator& g, const std::vector<json>& instances,
                                   const std::map<std::string, double>& table, long budget_ms, std::uint64_t seed,
                                   json* per_instance = nullptr);

// search-mode candidate: run the strategy from the incumbent and keep the incumbent unless beaten
StrategyOutcome score_search_candidate(const StrategyConfig& s, const Problem& p, const json& inst,
                                       const std::optional<Construction>& incumbent, long budget_ms,
                                       std::uint64_t seed, long max_evals = -1);

RunReport run_experiment(const ExperimentConfig& c);

}  // namespace evo
