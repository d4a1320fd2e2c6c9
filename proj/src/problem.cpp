#include "evo/problem.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace evo {

json report_to_json(const EvaluationReport& r) {
    json j = {{"feasible", r.feasible}, {"valid", r.valid}, {"penalty", r.penalty}, {"details", r.details},
              {"wall_ms", r.wall_ms}, {"version", r.version}};
    if (r.feasible) {
        j["raw"] = r.raw;
        j["score"] = r.score;
    }
    if (!r.message.empty()) j["message"] = r.message;
    return j;
}

EvaluationReport infeasible(std::string why) {
    EvaluationReport r;
    r.feasible = false;
    r.message = std::move(why);
    return r;
}

EvaluationReport scored(double raw, json details) {
    EvaluationReport r;
    r.feasible = std::isfinite(raw);
    r.valid = r.feasible;
    r.raw = raw;
    r.details = std::move(details);
    if (!r.feasible) r.message = "non-finite score";
    return r;
}

const Registry& Registry::get() {
    static const Registry reg = [] {
        Registry r;
        register_analysis(r);
        register_geometry(r);
        register_combinatorics(r);
        register_numbertheory(r);
        return r;
    }();
    return reg;
}

void Registry::add(Problem p) {
    auto id = p.id;
    if (!problems_.emplace(id, std::move(p)).second) throw std::logic_error("duplicate problem id " + id);
}

const Problem* Registry::find(const std::string& id) const {
    auto it = problems_.find(id);
    return it == problems_.end() ? nullptr : &it->second;
}

const Problem& Registry::at(const std::string& id) const {
    if (auto* p = find(id)) return *p;
    throw std::invalid_argument("unknown problem '" + id + "'");
}

std::vector<std::string> Registry::ids() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : problems_) out.push_back(k);
    return out;
}

json resolve_instance(const Problem& p, const json& given, const Construction* c) {
    json inst = p.default_instance;
    if (c && p.instance_of) inst.merge_patch(p.instance_of(*c));
    if (given.is_object()) inst.merge_patch(given);
    return inst;
}

EvaluationReport evaluate(const Problem& p, const json& inst, const Construction& c) {
    auto t0 = std::chrono::steady_clock::now();
    EvaluationReport r;
    if (c.kind() != p.kind) {
        r = infeasible("problem " + p.id + " expects a '" + p.kind + "' construction, got '" + c.kind() + "'");
    } else {
        try {
            r = p.evaluate(inst, c);
        } catch (const std::exception& e) {
            r = infeasible(e.what());
        }
    }
    if (r.feasible && !std::isfinite(r.raw)) {
        r.feasible = r.valid = false;
        r.message = "non-finite score";
    }
    if (!r.feasible) r.valid = false;
    r.score = p.minimizes(inst) ? -r.raw : r.raw;
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace evo
