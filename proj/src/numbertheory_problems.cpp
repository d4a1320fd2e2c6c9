// Registry entries over residues, prime fields and projection entropies.

#include <algorithm>
#include <cmath>
#include <set>

#include "evo/certify.hpp"
#include "evo/numbertheory.hpp"
#include "problem_util.hpp"

namespace evo {

using namespace numbertheory;

namespace {

FFSet full_space(int p, int d) {
    FFSet f;
    f.p = p;
    f.d = d;
    FFIndex ix{p, d, 1};
    for (int i = 0; i < d; ++i) ix.size *= p;
    for (long c = 0; c < ix.size; ++c) f.points.push_back(ix.decode(c));
    return f;
}

std::string ff_mismatch(const json& inst, const FFSet& f) {
    if (auto m = detail::size_mismatch(inst, "p", static_cast<std::size_t>(f.p)); !m.empty()) return m;
    return detail::size_mismatch(inst, "d", static_cast<std::size_t>(f.d));
}

Rational ff_ratio(const FFSet& f) {
    std::set<std::vector<int>> u(f.points.begin(), f.points.end());
    Rational denom(1);
    for (int i = 0; i < f.d; ++i) denom *= f.p;
    Rational q(static_cast<long>(u.size()));
    return q / denom;
}

void repair_ff(const json&, Construction& c) {
    auto& f = c.as<FFSet>();
    for (auto& x : f.points)
        for (auto& v : x) v = static_cast<int>(mod(v, f.p));
    std::sort(f.points.begin(), f.points.end());
    f.points.erase(std::unique(f.points.begin(), f.points.end()), f.points.end());
}

Problem ff_problem(bool nikodym) {
    Problem p;
    p.id = nikodym ? "ff_nikodym" : "ff_kakeya";
    p.doc = nikodym ? "Minimize |N| / p^d over Nikodym sets N in F_p^d (p prime)."
                    : "Minimize |K| / p^d over Kakeya sets K in F_p^d (p prime).";
    p.kind = "ff_set";
    p.minimize = true;
    p.default_instance = {{"p", 5}, {"d", 3}};
    p.evaluate = [nikodym](const json& inst, const Construction& c) -> EvaluationReport {
        const auto& f = c.as<FFSet>();
        if (auto m = ff_mismatch(inst, f); !m.empty()) return infeasible(m);
        auto gap = nikodym ? nikodym_gap(f) : kakeya_gap(f);
        if (gap) {
            auto r = infeasible(nikodym ? "point without a line in the set" : "direction without a line in the set");
            r.details = {{nikodym ? "point" : "direction", *gap}};
            return r;
        }
        return scored(ff_ratio(f).get_d(), {{"size", f.points.size()}, {nikodym ? "is_nikodym" : "is_kakeya", true}});
    };
    p.certify = [nikodym](const json&, const Construction& c, int bits) {
        const auto& f = c.as<FFSet>();
        if (nikodym ? !is_nikodym(f) : !is_kakeya(f)) throw std::runtime_error("set fails the line check");
        return exact_result(ff_ratio(f), bits);
    };
    // the whole space; deletion kernels take it from there
    p.random = [](const json& inst, Rng&) {
        return Construction(full_space(static_cast<int>(detail::inst_long(inst, "p", 5)),
                                       static_cast<int>(detail::inst_long(inst, "d", 3))));
    };
    if (!nikodym)
        p.baseline = [](const json& params) -> std::optional<Construction> {
            const long d = detail::inst_long(params, "d", 3);
            const int q = static_cast<int>(detail::inst_long(params, "p", 5));
            if (d == 1) return Construction(full_space(q, 1));
            if (d != 3) throw std::invalid_argument("ff_kakeya baseline exists for d = 1 and d = 3");
            return Construction(ff_kakeya_d3(q));
        };
    p.instance_of = [](const Construction& c) {
        const auto& f = c.as<FFSet>();
        return json{{"p", f.p}, {"d", f.d}};
    };
    p.repair = repair_ff;
    p.kernels = {"delete", "insert", "flip"};
    return p;
}

std::vector<Slope> slopes_of(const json& inst) {
    std::vector<Slope> out;
    const json s = inst.contains("slopes") ? inst.at("slopes") : json::array({0, 1, "inf"});
    for (const auto& x : s) out.push_back(parse_slope(x));
    return out;
}

Slope target_of(const json& inst) { return parse_slope(inst.contains("target") ? inst.at("target") : json(-1)); }

}  // namespace

void register_numbertheory(Registry& reg) {
    {
        Problem p;
        p.id = "difference_basis";
        p.doc = "Minimize |B|^2 / n over sets B whose differences cover 1..n.";
        p.kind = "diff_basis";
        p.minimize = true;
        p.default_instance = {{"n", 100}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& b = c.as<DiffBasis>();
            if (auto m = detail::size_mismatch(inst, "n", static_cast<std::size_t>(b.n)); !m.empty()) return infeasible(m);
            if (long gap = first_uncovered(b.elems, b.n)) {
                auto r = infeasible("difference " + std::to_string(gap) + " not covered");
                r.details = {{"uncovered", gap}};
                return r;
            }
            const double k = static_cast<double>(b.elems.size());
            return scored(k * k / static_cast<double>(b.n), {{"size", b.elems.size()}});
        };
        p.certify = [](const json&, const Construction& c, int bits) {
            const auto& b = c.as<DiffBasis>();
            if (first_uncovered(b.elems, b.n)) throw std::runtime_error("coverage gap");
            const long k = static_cast<long>(b.elems.size());
            return exact_result(ratio(k * k, b.n), bits);
        };
        p.random = [](const json& inst, Rng& rng) {
            DiffBasis b;
            b.n = detail::inst_long(inst, "n", 100);
            std::set<long> s{0, b.n};
            const long want = 2 + static_cast<long>(std::ceil(2 * std::sqrt(static_cast<double>(b.n))));
            while (static_cast<long>(s.size()) < std::min(want, b.n + 1)) s.insert(rng.range(0, b.n));
            b.elems.assign(s.begin(), s.end());
            return Construction(b);
        };
        // {"n"}: 0..s-1 plus multiples of s; {"singer": p}: D and D + q for a Singer set mod q
        p.baseline = [](const json& params) -> std::optional<Construction> {
            DiffBasis b;
            if (params.contains("singer")) {
                const long sp = params.at("singer").get<long>(), q = sp * sp + sp + 1;
                auto d = singer_difference_set(sp);
                b.n = q - 1;
                for (long x : d) b.elems.push_back(x);
                for (long x : d) b.elems.push_back(x + q);
                return Construction(b);
            }
            b.n = detail::inst_long(params, "n", 100);
            const long s = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(b.n))));
            std::set<long> e;
            for (long i = 0; i < s; ++i) e.insert(i);
            for (long k = 1; (k - 1) * s < b.n; ++k) e.insert(k * s);
            b.elems.assign(e.begin(), e.end());
            return Construction(b);
        };
        p.instance_of = [](const Construction& c) { return json{{"n", c.as<DiffBasis>().n}}; };
        p.repair = [](const json&, Construction& c) {
            auto& e = c.as<DiffBasis>().elems;
            std::sort(e.begin(), e.end());
            e.erase(std::unique(e.begin(), e.end()), e.end());
        };
        p.kernels = {"insert", "delete", "nudge"};
        reg.add(p);
    }
    reg.add(ff_problem(false));
    reg.add(ff_problem(true));
    {
        Problem p;
        p.id = "fs_residue";
        p.doc = "Maximize 1 - 1/k + log|A| / (k log m) over A in Z/mZ (m square-free) with no difference a "
                "nonzero k-th power.";
        p.kind = "residue_set";
        p.minimize = false;
        p.default_instance = {{"m", 205}, {"k", 2}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& r = c.as<ResidueSet>();
            const long k = detail::inst_long(inst, "k", 2);
            if (auto m = detail::size_mismatch(inst, "m", static_cast<std::size_t>(r.m)); !m.empty()) return infeasible(m);
            if (k < 2) return infeasible("k must be >= 2");
            if (!is_squarefree(r.m)) return infeasible("modulus must be square-free");
            if (r.elems.empty()) return infeasible("empty set");
            if (auto bad = power_difference(r.elems, r.m, k)) {
                auto rep = infeasible("difference is a k-th power");
                rep.details = {{"pair", {bad->first, bad->second}}};
                return rep;
            }
            const double kk = static_cast<double>(k);
            return scored(1 - 1 / kk + std::log(static_cast<double>(r.elems.size())) / (kk * std::log(static_cast<double>(r.m))),
                          {{"size", r.elems.size()}});
        };
        p.certify = [](const json& inst, const Construction& c, int bits) {
            const auto& r = c.as<ResidueSet>();
            const long k = detail::inst_long(inst, "k", 2);
            if (k < 2 || !is_squarefree(r.m) || r.elems.empty() || power_difference(r.elems, r.m, k))
                throw std::runtime_error("infeasible residue set");
            Interval ik(k);
            return interval_result(Interval(1L) - Interval(1L) / ik +
                                       log(Interval(static_cast<long>(r.elems.size()))) / (ik * log(Interval(r.m))),
                                   bits);
        };
        // random order greedy, maximal but rarely maximum
        p.random = [](const json& inst, Rng& rng) {
            ResidueSet r;
            r.m = detail::inst_long(inst, "m", 205);
            const long k = detail::inst_long(inst, "k", 2);
            std::vector<long> order(static_cast<std::size_t>(r.m));
            for (long i = 0; i < r.m; ++i) order[static_cast<std::size_t>(i)] = i;
            for (long i = r.m - 1; i > 0; --i) std::swap(order[static_cast<std::size_t>(i)], order[rng.below(static_cast<std::uint64_t>(i) + 1)]);
            for (long x : order) {
                r.elems.push_back(x);
                if (power_difference(r.elems, r.m, k)) r.elems.pop_back();
            }
            std::sort(r.elems.begin(), r.elems.end());
            return Construction(r);
        };
        // bounded depth-first search; {"m", "k", "size"}
        p.baseline = [](const json& params) -> std::optional<Construction> {
            ResidueSet r;
            r.m = detail::inst_long(params, "m", 205);
            const long k = detail::inst_long(params, "k", 2);
            r.elems = fs_search(r.m, k, detail::inst_long(params, "size", r.m), detail::inst_long(params, "node_limit", 200000));
            std::sort(r.elems.begin(), r.elems.end());
            return Construction(r);
        };
        p.instance_of = [](const Construction& c) { return json{{"m", c.as<ResidueSet>().m}}; };
        p.repair = [](const json&, Construction& c) {
            auto& r = c.as<ResidueSet>();
            for (auto& x : r.elems) x = mod(x, r.m);
            std::sort(r.elems.begin(), r.elems.end());
            r.elems.erase(std::unique(r.elems.begin(), r.elems.end()), r.elems.end());
        };
        p.kernels = {"flip", "insert", "delete", "nudge"};
        reg.add(p);
    }
    {
        Problem p;
        p.id = "entropy_kakeya";
        p.doc = "Maximize H(X + rY) at the target slope over max_{r in slopes} H(X + rY), entropies in bits of "
                "exactly grouped projections.";
        p.kind = "joint_pmf";
        p.minimize = false;
        p.default_instance = {{"slopes", {0, 1, "inf"}}, {"target", -1}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& pmf = c.as<JointPMF>();
            double s = 0;
            for (double q : pmf.probs) s += q;
            if (std::fabs(s - 1) > 1e-12) return infeasible("probabilities must sum to 1");
            const auto slopes = slopes_of(inst);
            const auto target = target_of(inst);
            if (std::find(slopes.begin(), slopes.end(), target) != slopes.end()) return infeasible("target slope is among the slopes");
            double den = 0;
            for (const auto& r : slopes) den = std::max(den, projection_entropy(pmf, r));
            if (!(den > 0)) return infeasible("all reference projections are constant");
            const double num = projection_entropy(pmf, target);
            return scored(num / den, {{"target_entropy", num}, {"max_entropy", den}});
        };
        p.certify = [](const json& inst, const Construction& c, int bits) {
            const auto& pmf = c.as<JointPMF>();
            std::optional<Interval> den;
            for (const auto& r : slopes_of(inst)) {
                auto h = projection_entropy_interval(pmf, r);
                den = den ? max(*den, h) : h;
            }
            if (!den || !(den->lo_d() > 0)) throw std::runtime_error("degenerate denominator");
            return interval_result(projection_entropy_interval(pmf, target_of(inst)) / *den, bits);
        };
        p.random = [](const json&, Rng& rng) {
            JointPMF pmf;
            std::set<std::pair<long, long>> pts;
            const long k = rng.range(2, 8);
            while (static_cast<long>(pts.size()) < k) pts.insert({rng.range(0, 4), rng.range(0, 4)});
            double s = 0;
            for (const auto& [x, y] : pts) {
                pmf.support.push_back({Rational(x), Rational(y)});
                pmf.probs.push_back(rng.uniform(0.05, 1));
                s += pmf.probs.back();
            }
            for (auto& q : pmf.probs) q /= s;
            return Construction(pmf);
        };
        p.baseline = [](const json&) -> std::optional<Construction> {
            JointPMF pmf;
            for (long x : {0, 1})
                for (long y : {0, 1}) {
                    pmf.support.push_back({Rational(x), Rational(y)});
                    pmf.probs.push_back(0.25);
                }
            return Construction(pmf);
        };
        p.repair = [](const json&, Construction& c) {
            auto& q = c.as<JointPMF>().probs;
            double s = 0;
            for (auto& x : q) s += (x = std::max(x, 0.0));
            if (s > 0)
                for (auto& x : q) x /= s;
        };
        p.kernels = {"reweight", "gauss", "nudge"};
        reg.add(p);
    }
}

}  // namespace evo
