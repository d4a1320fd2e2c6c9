#pragma once
// Mutation kernels, parameterized local search, and the external proposer protocol.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "evo/problem.hpp"

namespace evo {

// ---- kernels ----

inline const std::vector<std::string>& kernel_names() {
    static const std::vector<std::string> names{"gauss", "nudge", "flip", "swap", "insert", "delete", "block", "reweight"};
    return names;
}
// kernels that act on a payload kind
std::vector<std::string> kernels_for_kind(const std::string& kind);
// mutated copy; the source document is dropped
Construction apply_kernel(const std::string& name, const Construction& c, Rng& rng, double step);

// ---- strategies ----

enum class StrategyKind { anneal, coordinate_descent, random_restart, kernel_mix };
const char* strategy_kind_name(StrategyKind k);

struct StrategyConfig {
    StrategyKind kind = StrategyKind::anneal;
    std::map<std::string, double> move_weights;
    double t0 = 1e-3;
    double decay = 0.999;
    int restart_count = 0;
    double step_scale = 0.05;

    bool operator==(const StrategyConfig&) const = default;
};

json strategy_to_json(const StrategyConfig& s);
// validates against the problem's kernels when a problem is given
StrategyConfig strategy_from_json(const json& j, const Problem* p = nullptr);
// empty string when valid
std::string strategy_problem(const StrategyConfig& s, const Problem* p = nullptr);
// uniform weights over the problem's kernels
StrategyConfig default_strategy(const Problem& p);
StrategyConfig mutate_strategy(const StrategyConfig& parent, Rng& rng);

// larger is better; at t = 0 only strict improvements pass
bool metropolis_accept(double candidate, double current, double temperature, Rng& rng);

struct StrategyOutcome {
    Construction best;
    EvaluationReport report;
    long evals = 0;
    double wall_ms = 0;
    bool stopped_by_clock = false;
};

// Local search from `start` (or a random construction). Stops at budget_ms of wall time or after
// max_evals evaluations, whichever comes first; with the cap binding the result depends only on
// the arguments.
StrategyOutcome run_strategy(const StrategyConfig& s, const Problem& p, const json& inst,
                             const std::optional<Construction>& start, long budget_ms, std::uint64_t seed,
                             long max_evals = -1);

// canonical comparison key: infeasible below every feasible score
double rank_score(const EvaluationReport& r);

// ---- external proposer ----

struct Proposal {
    enum class Type { construction, strategy, skip } type = Type::skip;
    std::optional<Construction> construction;
    std::optional<StrategyConfig> strategy;
    std::string note;  // error text when the reply was bad
};

class ExternalProposer {
public:
    // "http://host:port" posts to /propose; anything else is a shell command speaking line JSON
    explicit ExternalProposer(std::string endpoint, long timeout_ms = 60000, int max_errors = 5);
    ~ExternalProposer();
    ExternalProposer(const ExternalProposer&) = delete;
    ExternalProposer& operator=(const ExternalProposer&) = delete;

    // serialized; a quarantined endpoint returns skip without sending anything
    Proposal propose(const json& request, const Problem* p);
    bool quarantined() const;
    long requests_sent() const;
    int consecutive_errors() const;

private:
    std::optional<std::string> exchange(const std::string& line);
    std::optional<std::string> exchange_http(const std::string& body);
    std::optional<std::string> exchange_process(const std::string& line);
    void start_process();
    void stop_process();

    std::string endpoint_;
    long timeout_ms_;
    int max_errors_;
    mutable std::mutex mu_;
    int errors_ = 0;
    long sent_ = 0;
    bool quarantined_ = false;
    int pid_ = -1, to_child_ = -1, from_child_ = -1;
    std::string pending_;
};

json propose_request(const Problem& p, const json& inst, const std::optional<Construction>& incumbent,
                     double incumbent_score, const std::vector<std::pair<json, double>>& top, long budget_ms,
                     std::uint64_t seed);

}  // namespace evo
