#pragma once
// Problem registry: every evaluator is reachable by id with a uniform shape.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evo/construction.hpp"
#include "evo/rng.hpp"

namespace evo {

inline constexpr const char* kEvaluatorVersion = "1.0.0";

struct EvaluationReport {
    bool feasible = false;
    bool valid = false;     // feasible and every penalty term is zero
    double raw = 0;         // problem's own orientation
    double score = 0;       // canonical: larger is better (-raw for minimization)
    double penalty = 0;
    json details = json::object();
    std::string message;
    double wall_ms = 0;
    std::string version = kEvaluatorVersion;
};

json report_to_json(const EvaluationReport& r);

enum class CertMethod { exact_rational, interval };

struct ScoreInterval {
    std::string lo, hi;     // decimal, lo rounded down and hi rounded up
    double lo_d = 0, hi_d = 0;
    int bits = 0;
    CertMethod method = CertMethod::interval;
    std::optional<Rational> exact;  // exact_rational only
};

struct Problem {
    std::string id;
    std::string doc;
    std::string kind;  // construction kind accepted
    bool minimize = false;
    // some problems pick orientation per instance (golay flat_max)
    std::function<bool(const json&)> minimize_for;
    std::function<EvaluationReport(const json& inst, const Construction&)> evaluate;
    std::function<Construction(const json& inst, Rng&)> random;
    std::function<std::optional<Construction>(const json& params)> baseline;
    std::function<ScoreInterval(const json& inst, const Construction&, int bits)> certify;
    std::function<json(const Construction&)> instance_of;
    // projection applied after every kernel move (mass balance, sortedness)
    std::function<void(const json& inst, Construction&)> repair;
    std::vector<std::string> kernels;
    json default_instance = json::object();
    double infeasibility_floor = 0;

    bool minimizes(const json& inst) const { return minimize_for ? minimize_for(inst) : minimize; }
};

class Registry {
public:
    static const Registry& get();
    const Problem* find(const std::string& id) const;
    const Problem& at(const std::string& id) const;
    std::vector<std::string> ids() const;

    void add(Problem p);

private:
    std::map<std::string, Problem> problems_;
};

// Runs the evaluator, fills score orientation and timing, and turns evaluator
// exceptions into infeasible reports.
EvaluationReport evaluate(const Problem& p, const json& inst, const Construction& c);

// instance for a construction: explicit one merged over the defaults
json resolve_instance(const Problem& p, const json& given, const Construction* c);

EvaluationReport infeasible(std::string why);
EvaluationReport scored(double raw, json details = json::object());

void register_analysis(Registry& r);
void register_geometry(Registry& r);
void register_combinatorics(Registry& r);
void register_numbertheory(Registry& r);

}  // namespace evo
