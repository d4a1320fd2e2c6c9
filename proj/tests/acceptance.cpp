// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "evo/canon.hpp"
#include "evo/certify.hpp"
#include "evo/combinatorics.hpp"
#include "evo/engine.hpp"
#include "evo/numbertheory.hpp"
#include "evo/problem.hpp"
#include "evo/strategies.hpp"

using namespace evo;

namespace {

const Problem& P(const std::string& id) { return Registry::get().at(id); }

EvaluationReport run(const std::string& id, const Construction& c, const json& inst = json::object()) {
    return evaluate(P(id), resolve_instance(P(id), inst, &c), c);
}

struct Outcome {
    bool ok = false;
    std::string detail;
};

int failures = 0;

void criterion(int k, const char* what, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char tail[64];
    std::snprintf(tail, sizeof tail, "%.2fs of %.0fs", s, limit_s);
    if (s >= limit_s) {
        o.ok = false;
        o.detail += "; over time";
    }
    if (!o.ok) ++failures;
    std::printf("criterion %2d: %s  %s: %s [%s]\n", k, o.ok ? "PASS" : "FAIL", what, o.detail.c_str(), tail);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// the baseline, each coordinate pushed by up to eps, renormalized by the evaluator's repair
Construction jitter(const std::string& id, const json& inst, double eps, Rng& rng) {
    Construction c = *P(id).baseline(inst);
    for (auto& x : c.as<SpherePoints>().coords) x += rng.uniform(-eps, eps);
    P(id).repair(inst, c);
    return c;
}

Outcome c1() {
    const auto& p = P("autocorr_c1");
    auto c = *p.baseline({{"n", 4000}});
    const double v = run("autocorr_c1", c).raw;
    return {std::fabs(v - 1.5708) <= 2e-3, fmt("c1 = %.9f, target 1.5708 +- 2e-3 (off by %.2e)", v, v - 1.5708)};
}

Outcome c2() {
    const auto& p = P("hl_maximal");
    auto c = *p.baseline({{"n", 100}});
    auto cert = certify("hl_maximal", resolve_instance(p, {}, &c), c, 128);
    const bool ok = cert.exact && *cert.exact == ratio(299, 200);
    return {ok, "exact value " + (cert.exact ? cert.exact->get_str() : std::string("none")) + ", want 299/200"};
}

Outcome c3() {
    const long counts[] = {2, 6, 12, 24};
    bool ok = true;
    std::string d;
    for (int dim = 1; dim <= 4; ++dim) {
        auto c = *P("kissing").baseline({{"d", dim}});
        const long n = static_cast<long>(c.as<SpherePoints>().count());
        auto cert = certify("kissing", {{"d", dim}, {"n", n}}, c, 256);
        ok = ok && n == counts[dim - 1] && cert.hi_d < 1e-20;
        d += fmt("d=%.0f n=%.0f ", dim, static_cast<double>(n)) + "hi=" + fmt("%.1e; ", cert.hi_d);
    }
    return {ok, d + "want hi < 1e-20"};
}

Outcome c4() {
    Rng rng(4);
    StrategyConfig s = default_strategy(P("thomson"));
    s.kind = StrategyKind::coordinate_descent;
    const json ti = {{"d", 3}, {"n", 5}};
    auto t = run_strategy(s, P("thomson"), ti, jitter("thomson", ti, 1e-3, rng), 20000, 1, 20000);
    const json ai = {{"d", 3}, {"n", 3}};
    StrategyConfig a = default_strategy(P("tammes"));
    a.kind = StrategyKind::coordinate_descent;
    auto m = run_strategy(a, P("tammes"), ai, jitter("tammes", ai, 1e-3, rng), 20000, 2, 20000);
    const double et = t.report.raw - 6.474691495, em = m.report.raw - 1.73205081;
    return {std::fabs(et) <= 1e-6 && std::fabs(em) <= 1e-6,
            fmt("thomson 5 off by %.2e, ", et) + fmt("tammes 3 off by %.2e, tolerance 1e-6", em)};
}

Outcome c5() {
    double worst = 0;
    auto oct = *P("spherical_design").baseline({{"d", 3}});
    worst = std::max(worst, certify("spherical_design", {{"d", 3}, {"n", 6}, {"t", 3}}, oct, 256).hi_d);
    for (int t = 1; t <= 10; ++t) {
        auto poly = *P("spherical_design").baseline({{"d", 2}, {"t", t}});
        worst = std::max(worst, certify("spherical_design", {{"d", 2}, {"n", t + 1}, {"t", t}}, poly, 256).hi_d);
    }
    return {worst < 1e-8, fmt("largest certified error %.2e, want < 1e-8", worst)};
}

Outcome c6() {
    bool ok = true;
    std::string d;
    for (long p : {5L, 13L, 17L, 29L}) {
        auto c = *P("ff_kakeya").baseline({{"p", p}, {"d", 3}});
        const auto& K = c.as<FFSet>();
        const double want = static_cast<double>(p * p * p) / 4 + 7.0 * static_cast<double>(p * p) / 8 - 1.0 / 8;
        const double got = static_cast<double>(K.points.size());
        const bool k = numbertheory::is_kakeya(K);
        ok = ok && got == want && k;
        d += fmt("p=%.0f size %.0f", static_cast<double>(p), got) + (k ? " kakeya; " : " NOT kakeya; ");
    }
    return {ok, d + "sizes p^3/4 + 7p^2/8 - 1/8"};
}

Outcome c7() {
    const double a = run("sumdiff", *P("sumdiff").baseline(json::object())).raw;
    const double b = run("gyarmati", Construction(IntSet{{0, 1, 3}})).raw;
    const double c = run("gyarmati", Construction(IntSet{{0, 1, 3, 6, 13, 17, 21}})).raw;
    const bool ok = std::fabs(a - 1.059793) <= 1e-6 && std::fabs(b - 1.07921778) <= 1e-8 && std::fabs(c - 1.1078) <= 5e-5;
    return {ok, fmt("17-set %.9f, ", a) + fmt("{0,1,3} %.9f, ", b) + fmt("7-set %.6f", c)};
}

// every k-subset of [0, n] holding both ends, through the evaluator
bool basis_of_size(long n, long k) {
    if (k < 2) return false;
    std::vector<long> pick{0};
    std::function<bool(long)> rec = [&](long next) {
        if (static_cast<long>(pick.size()) == k - 1) {
            auto b = pick;
            b.push_back(n);
            return run("difference_basis", Construction(DiffBasis{n, b})).feasible;
        }
        for (long x = next; x < n; ++x) {
            pick.push_back(x);
            if (rec(x + 1)) return true;
            pick.pop_back();
        }
        return false;
    };
    return rec(1);
}

Outcome c8() {
    bool ok = combinatorics::edp_longest(1) == 11;
    std::string d = fmt("edp(1) = %.0f; ", static_cast<double>(combinatorics::edp_longest(1)));
    for (int n = 2; n <= 4; ++n) {
        const long want = static_cast<long>(std::ceil(n + 2 * std::sqrt(static_cast<double>(n)) - 3));
        ok = ok && combinatorics::imo_min_tiles(n) == want;
    }
    long checked = 0;
    for (long n = 1; n <= 20; ++n) {
        auto b = numbertheory::min_difference_basis(n);
        const long k = static_cast<long>(b.size());
        const bool feasible = run("difference_basis", Construction(DiffBasis{n, b})).feasible;
        ok = ok && feasible && basis_of_size(n, k) && !basis_of_size(n, k - 1);
        ++checked;
    }
    return {ok, d + "imo n=2..4 match the formula; " + fmt("Delta(n) checked for %.0f values of n", static_cast<double>(checked))};
}

struct Property {
    std::string id;
    std::function<json(Rng&)> instance;
    std::function<bool(const json&, const EvaluationReport&)> holds;
};

Outcome c9() {
    constexpr int kPer = 10000;
    const double H = 1.5675209;
    auto harmonic_half = [](long n) {
        double h = 0;
        for (long k = 1; k <= n; ++k) h += 1.0 / static_cast<double>(k);
        return h / 2;
    };
    const std::vector<Property> props = {
        {"autoconv_ratio", [](Rng& r) { return json{{"n", r.range(1, 40)}}; },
         [](const json&, const EvaluationReport& e) { return !e.feasible || e.raw <= 1 + 1e-12; }},
        {"kakeya_s_score", [](Rng& r) { return json{{"n", r.range(1, 16)}, {"shape", r.below(2) ? "triangle" : "parallelogram"}}; },
         [](const json&, const EvaluationReport& e) { return !e.feasible || e.raw <= 1 + 1e-12; }},
        {"hl_maximal", [](Rng& r) { return json{{"n", r.range(1, 24)}}; },
         [H](const json&, const EvaluationReport& e) { return !e.feasible || e.raw <= H; }},
        {"ring_loading", [](Rng& r) { return json{{"n", r.range(1, 10)}}; },
         [](const json&, const EvaluationReport& e) { return !e.feasible || e.raw <= 19.0 / 14 + 1e-12; }},
        {"imo_tiling", [](Rng& r) { return json{{"n", r.range(2, 8)}}; },
         [](const json& inst, const EvaluationReport& e) {
             return !e.valid || e.raw >= static_cast<double>(combinatorics::imo_formula(inst.at("n").get<long>()));
         }},
        {"block_stacking", [](Rng& r) { return json{{"n", r.range(1, 12)}}; },
         [harmonic_half](const json& inst, const EvaluationReport& e) {
             return !e.feasible || e.raw <= harmonic_half(inst.at("n").get<long>()) + 1e-9;
         }},
        {"turan", [](Rng& r) { return json{{"n", r.range(2, 7)}}; },
         [](const json&, const EvaluationReport& e) { return !e.feasible || e.raw <= 0.561667; }},
        {"entropy_kakeya", [](Rng&) { return json::object(); },
         [](const json&, const EvaluationReport& e) { return !e.feasible || e.raw <= 11.0 / 6 + 1e-12; }},
    };
    Rng rng(9);
    bool ok = true;
    std::string d;
    for (const auto& pr : props) {
        const auto& p = P(pr.id);
        long bad = 0, feasible = 0;
        for (int t = 0; t < kPer; ++t) {
            json inst = resolve_instance(p, pr.instance(rng), nullptr);
            auto c = p.random(inst, rng);
            auto e = evaluate(p, inst, c);
            feasible += e.feasible;
            if (!pr.holds(inst, e)) ++bad;
        }
        ok = ok && bad == 0 && feasible > 0;
        if (bad || !feasible) d += pr.id + fmt(" %.0f violations of %.0f feasible; ", static_cast<double>(bad), static_cast<double>(feasible));
    }
    // certified intervals contain the floating score
    long certified = 0, missed = 0;
    std::vector<const Problem*> cert;
    for (const auto& id : Registry::get().ids())
        if (P(id).certify) cert.push_back(&P(id));
    for (int t = 0; t < kPer; ++t) {
        const Problem& p = *cert[static_cast<std::size_t>(t) % cert.size()];
        json inst = p.default_instance;
        for (const char* k : {"n", "m"})
            if (inst.contains(k) && inst[k].is_number_integer() && inst[k].get<long>() > 8 && p.id != "fs_residue") inst[k] = 8;
        if (p.id == "ff_kakeya" || p.id == "ff_nikodym") inst = {{"p", 3}, {"d", 2}};
        auto c = p.random(inst, rng);
        inst = resolve_instance(p, inst, &c);
        auto e = evaluate(p, inst, c);
        if (!e.feasible) continue;
        auto s = certify(p.id, inst, c, 128);
        const double slack = 1e-9 * std::max(1.0, std::fabs(e.raw));
        if (!(std::stod(s.lo) <= e.raw + slack && std::stod(s.hi) >= e.raw - slack)) {
            ++missed;
            if (missed <= 3) d += p.id + " enclosure missed; ";
        }
        ++certified;
    }
    ok = ok && missed == 0;
    return {ok, d + fmt("%.0f properties x 1e4 candidates, %.0f enclosures checked", static_cast<double>(props.size()),
                        static_cast<double>(certified))};
}

struct SearchTarget {
    std::string id;
    json instance;
    bool at_least;
    double threshold;
    long total;
    long cap;
};

Outcome c10() {
    const std::vector<SearchTarget> targets = {
        {"hl_maximal", json::object(), true, 1.45, 800, 1000},
        {"tammes", {{"n", 12}}, true, 1.02, 400, 1000},
        {"min_overlap", json::object(), false, 0.45, 400, 1000},
    };
    bool ok = true;
    std::string d;
    for (const auto& t : targets) {
        ExperimentConfig c;
        c.problem_id = t.id;
        c.instance = t.instance;
        c.worker_count = 4;
        c.master_seed = 0;
        c.start = "random";
        c.eval_budget_ms = 600000;
        c.total_evals = t.total;
        c.proposer.strategy_evals = t.cap;
        auto r4 = run_experiment(c);
        c.worker_count = 1;
        auto r1 = run_experiment(c);
        const bool same = run_report_to_json(r4, false).dump() == run_report_to_json(r1, false).dump();
        const double raw = r4.best ? r4.best->report.raw : NAN;
        const bool hit = t.at_least ? raw >= t.threshold : raw <= t.threshold;
        ok = ok && hit && same;
        d += t.id + fmt(" %.6f (%s", raw) + (t.at_least ? ">= " : "<= ") + fmt("%g)", t.threshold) +
             (same ? " reproducible; " : " NOT reproducible; ");
    }
    return {ok, d};
}

}  // namespace

int main() {
    criterion(1, "autoconvolution pi/2 baseline", 5, c1);
    criterion(2, "hardy-littlewood k=1, y=3i, n=100", 1, c2);
    criterion(3, "kissing baselines d=1..4", 10, c3);
    criterion(4, "thomson 5 and tammes 3 from near optima", 60, c4);
    criterion(5, "spherical designs", 5, c5);
    criterion(6, "finite-field kakeya d=3", 30, c6);
    criterion(7, "sumset anchors", 1, c7);
    criterion(8, "oracles", 120, c8);
    criterion(9, "property suites", 600, c9);
    criterion(10, "search end to end", 600, c10);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures ? 1 : 0;
}
