// Registry entries for the discrete evaluators.

#include <algorithm>
#include <cmath>
#include <set>

#include "evo/combinatorics.hpp"
#include "problem_util.hpp"

namespace evo {

using namespace combinatorics;

namespace {

std::vector<int> random_signs(long n, Rng& rng) {
    std::vector<int> a;
    for (long i = 0; i < n; ++i) a.push_back(rng.below(2) ? 1 : -1);
    return a;
}

std::vector<long> random_subset(long size, long lo, long hi, Rng& rng) {
    std::set<long> s;
    size = std::min(size, hi - lo);
    while (static_cast<long>(s.size()) < size) s.insert(rng.range(lo, hi - 1));
    return {s.begin(), s.end()};
}

// sum and difference set data, or an empty message
struct SumDiff {
    double a = 0, sum = 0, diff = 0;
};
SumDiff sumdiff_sizes(const std::vector<long>& e) {
    return {static_cast<double>(e.size()), static_cast<double>(sumset_size(e)), static_cast<double>(diffset_size(e))};
}

Interval ilog(long x) { return log(Interval(x)); }

void repair_ring(const json&, Construction& c) {
    auto& r = c.as<RingInstance>();
    for (std::size_t i = 0; i < r.u.size(); ++i) {
        r.u[i] = std::clamp(r.u[i], 0.0, 1.0);
        r.v[i] = std::clamp(r.v[i], 0.0, 1.0);
        double s = r.u[i] + r.v[i];
        if (s > 1) {
            r.u[i] /= s;
            r.v[i] /= s;
            // division can leave the sum one ulp above 1
            if (r.u[i] + r.v[i] > 1) r.v[i] = 1 - r.u[i];
        }
    }
}

void repair_intset(const json&, Construction& c) {
    auto& e = c.as<IntSet>().elems;
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
}

void repair_gyarmati(const json& inst, Construction& c) {
    repair_intset(inst, c);
    auto& e = c.as<IntSet>().elems;
    if (e.empty()) e.push_back(0);
    const long m = e.front();
    for (auto& x : e) x -= m;
}

void repair_simplex(const json&, Construction& c) {
    auto& w = c.as<WeightedHypergraph>().weights;
    double s = 0;
    for (auto& x : w) {
        x = std::max(x, 0.0);
        s += x;
    }
    if (!(s > 0)) {
        for (auto& x : w) x = 1.0 / static_cast<double>(w.size());
        return;
    }
    for (auto& x : w) x /= s;
}

// drop edges until the blowup is K4-free
void repair_turan(const json& inst, Construction& c) {
    repair_simplex(inst, c);
    auto& h = c.as<WeightedHypergraph>();
    for (auto& e : h.edges) std::sort(e.begin(), e.end());
    std::sort(h.edges.begin(), h.edges.end());
    h.edges.erase(std::unique(h.edges.begin(), h.edges.end()), h.edges.end());
    std::vector<bool> alive;
    for (double w : h.weights) alive.push_back(w > 0);
    while (auto k = blowup_k4(h.edges, alive)) {
        // remove one covered triple of the witness
        std::array<int, 3> t{(*k)[0], (*k)[1], (*k)[2]};
        std::sort(t.begin(), t.end());
        h.edges.erase(std::find(h.edges.begin(), h.edges.end(), t));
    }
}

Construction random_tiling(long n, Rng& rng) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = static_cast<int>(i);
    for (long i = n - 1; i > 0; --i) std::swap(perm[static_cast<std::size_t>(i)], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    std::vector<char> free(static_cast<std::size_t>(n * n), 1);
    for (long r = 0; r < n; ++r) free[static_cast<std::size_t>(r * n + perm[static_cast<std::size_t>(r)])] = 0;
    Tiling t;
    t.n = static_cast<int>(n);
    for (long r = 0; r < n; ++r)
        for (long c = 0; c < n; ++c) {
            if (!free[static_cast<std::size_t>(r * n + c)]) continue;
            // greedy maximal rectangle with a random height cap
            long w = 0;
            while (c + w < n && free[static_cast<std::size_t>(r * n + c + w)]) ++w;
            long h = 1;
            const long hmax = 1 + static_cast<long>(rng.below(static_cast<std::uint64_t>(n)));
            while (r + h < n && h < hmax) {
                bool ok = true;
                for (long k = c; k < c + w; ++k) ok = ok && free[static_cast<std::size_t>((r + h) * n + k)];
                if (!ok) break;
                ++h;
            }
            for (long i = r; i < r + h; ++i)
                for (long k = c; k < c + w; ++k) free[static_cast<std::size_t>(i * n + k)] = 0;
            t.tiles.push_back({static_cast<int>(r + 1), static_cast<int>(r + h), static_cast<int>(c + 1), static_cast<int>(c + w)});
        }
    return Construction(t);
}

GolayTarget golay_target(const json& inst) { return parse_golay_target(detail::inst_str(inst, "target", "merit")); }

// mesh enclosure of min or max |p(z)| / sqrt(n+1)
Interval golay_flat_certified(const std::vector<int>& a, bool want_min) {
    const long K = kGolayMesh;
    std::vector<Interval> cs, sn;
    Interval step = Interval(2L) * Interval::pi() / Interval(K);
    for (long m = 0; m < K; ++m) {
        Interval ang = step * Interval(m);
        cs.push_back(cos(ang));
        sn.push_back(sin(ang));
    }
    std::optional<Interval> best;
    for (long k = 0; k < K; ++k) {
        Interval re(0L), im(0L);
        for (std::size_t j = 0; j < a.size(); ++j) {
            const auto idx = static_cast<std::size_t>((static_cast<long>(j) * k) % K);
            if (a[j] > 0) {
                re += cs[idx];
                im += sn[idx];
            } else {
                re -= cs[idx];
                im -= sn[idx];
            }
        }
        Interval m = sqrt(max(sqr(re) + sqr(im), Interval(0L)));
        best = !best ? m : (want_min ? min(*best, m) : max(*best, m));
    }
    return *best / sqrt(Interval(static_cast<long>(a.size())));
}

}  // namespace

void register_combinatorics(Registry& reg) {
    {
        Problem p;
        p.id = "edp";
        p.doc = "Maximize L + F: L the longest prefix with all homogeneous progression sums bounded by D, F the "
                "fraction of progressions through position L+1 still within the bound.";
        p.kind = "signs";
        p.minimize = false;
        p.default_instance = {{"D", 2}, {"n", 200}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& a = c.as<SignSeq>().a;
            if (a.empty()) return infeasible("empty sequence");
            auto r = edp_prefix(a, detail::inst_long(inst, "D", 2));
            return scored(r.score().get_d(), {{"prefix", r.length}, {"ok", r.ok}, {"total", r.total}});
        };
        p.certify = [](const json& inst, const Construction& c, int bits) {
            return exact_result(edp_prefix(c.as<SignSeq>().a, detail::inst_long(inst, "D", 2)).score(), bits);
        };
        p.random = [](const json& inst, Rng& rng) {
            return Construction(SignSeq{random_signs(detail::inst_long(inst, "n", 200), rng)});
        };
        p.kernels = {"flip", "swap", "insert", "delete", "block"};
        reg.add(p);
    }
    {
        Problem p;
        p.id = "ring_loading";
        p.doc = "Maximize min_z max_k |sum_{i<=k} z_i - sum_{i>k} z_i| over z_i in {v_i, -u_i}, u_i + v_i <= 1.";
        p.kind = "ring";
        p.minimize = false;
        p.default_instance = {{"n", 8}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& r = c.as<RingInstance>();
            if (auto m = detail::size_mismatch(inst, "n", r.u.size()); !m.empty()) return infeasible(m);
            for (std::size_t i = 0; i < r.u.size(); ++i)
                if (!(r.u[i] >= 0 && r.v[i] >= 0 && r.u[i] + r.v[i] <= 1 + 1e-12)) return infeasible("need u, v >= 0 and u + v <= 1");
            return scored(ring_loading(r.u, r.v));
        };
        p.certify = [](const json&, const Construction& c, int bits) {
            json src = exact_source(c);
            auto u = rationals_from_json(src.at("u"));
            auto v = rationals_from_json(src.at("v"));
            for (std::size_t i = 0; i < u.size(); ++i)
                if (u[i] < 0 || v[i] < 0 || u[i] + v[i] > 1) throw std::runtime_error("need u, v >= 0 and u + v <= 1");
            return exact_result(ring_loading(u, v), bits);
        };
        p.random = [](const json& inst, Rng& rng) {
            RingInstance r;
            long n = detail::inst_long(inst, "n", 8);
            for (long i = 0; i < n; ++i) {
                r.u.push_back(rng.uniform());
                r.v.push_back(rng.uniform(0, 1 - r.u.back()));
            }
            return Construction(r);
        };
        p.instance_of = [](const Construction& c) { return json{{"n", c.as<RingInstance>().u.size()}}; };
        p.repair = repair_ring;
        p.kernels = {"gauss", "nudge"};
        reg.add(p);
    }
    for (bool variant43 : {false, true}) {
        Problem p;
        p.id = variant43 ? "sumdiff_43" : "sumdiff";
        p.doc = variant43 ? "Maximize log|A-A| / log|A+A| over finite integer sets."
                          : "Maximize log(|A+A|/|A|) / log(|A-A|/|A|) over finite integer sets.";
        p.kind = "intset";
        p.minimize = false;
        p.default_instance = {{"n", 17}};
        p.evaluate = [variant43](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& e = c.as<IntSet>().elems;
            if (auto m = detail::size_mismatch(inst, "n", e.size()); !m.empty()) return infeasible(m);
            if (e.size() < 2) return infeasible("need |A| >= 2");
            auto s = sumdiff_sizes(e);
            json det = {{"A", s.a}, {"A+A", s.sum}, {"A-A", s.diff}};
            if (variant43) return scored(std::log(s.diff) / std::log(s.sum), det);
            if (!(s.diff > s.a)) return infeasible("|A-A| = |A|");
            return scored(std::log(s.sum / s.a) / std::log(s.diff / s.a), det);
        };
        p.certify = [variant43](const json&, const Construction& c, int bits) {
            const auto& e = c.as<IntSet>().elems;
            const long a = static_cast<long>(e.size()), s = static_cast<long>(sumset_size(e)),
                       d = static_cast<long>(diffset_size(e));
            if (a < 2 || (!variant43 && d <= a)) throw std::runtime_error("degenerate set");
            if (variant43) return interval_result(ilog(d) / ilog(s), bits);
            return interval_result((ilog(s) - ilog(a)) / (ilog(d) - ilog(a)), bits);
        };
        p.random = [](const json& inst, Rng& rng) {
            long n = detail::inst_long(inst, "n", 17);
            return Construction(IntSet{random_subset(n, 0, 3 * n, rng)});
        };
        // the 17-element set with |A+A| = 59, |A-A| = 55
        p.baseline = [](const json&) -> std::optional<Construction> {
            return Construction(IntSet{{0, 1, 2, 4, 5, 9, 12, 13, 14, 16, 17, 21, 24, 25, 26, 28, 29}});
        };
        p.instance_of = [](const Construction& c) { return json{{"n", c.as<IntSet>().elems.size()}}; };
        p.repair = repair_intset;
        p.kernels = {"flip", "insert", "delete", "nudge"};
        reg.add(p);
    }
    {
        Problem p;
        p.id = "gyarmati";
        p.doc = "Maximize 1 + log(|U-U|/|U+U|) / log(2 max U + 1) over sets of non-negative integers containing 0.";
        p.kind = "intset";
        p.minimize = false;
        p.default_instance = {{"n", 7}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& e = c.as<IntSet>().elems;
            if (auto m = detail::size_mismatch(inst, "n", e.size()); !m.empty()) return infeasible(m);
            if (e.empty() || e.front() != 0) return infeasible("U must contain 0 and be non-negative");
            const long mx = e.back();
            if (mx < 1) return infeasible("max U must be >= 1");
            auto s = sumdiff_sizes(e);
            if (s.diff > 2.0 * static_cast<double>(mx) + 1) return infeasible("|U-U| > 2 max U + 1");
            return scored(1 + std::log(s.diff / s.sum) / std::log(2.0 * static_cast<double>(mx) + 1),
                          {{"U+U", s.sum}, {"U-U", s.diff}});
        };
        p.certify = [](const json&, const Construction& c, int bits) {
            const auto& e = c.as<IntSet>().elems;
            if (e.empty() || e.front() != 0 || e.back() < 1) throw std::runtime_error("invalid U");
            const long s = static_cast<long>(sumset_size(e)), d = static_cast<long>(diffset_size(e));
            return interval_result(Interval(1L) + (ilog(d) - ilog(s)) / ilog(2 * e.back() + 1), bits);
        };
        p.random = [](const json& inst, Rng& rng) {
            long n = detail::inst_long(inst, "n", 7);
            auto e = random_subset(n - 1, 1, 4 * n, rng);
            e.insert(e.begin(), 0);
            return Construction(IntSet{e});
        };
        p.baseline = [](const json&) -> std::optional<Construction> { return Construction(IntSet{{0, 1, 3}}); };
        p.instance_of = [](const Construction& c) { return json{{"n", c.as<IntSet>().elems.size()}}; };
        p.repair = repair_gyarmati;
        p.kernels = {"flip", "insert", "delete", "nudge"};
        reg.add(p);
    }
    {
        Problem p;
        p.id = "isosceles_free";
        p.doc = "Maximize |S| - 10 V for S in the n x n grid, V the number of (possibly flat) isosceles triangles.";
        p.kind = "grid_cells";
        p.minimize = false;
        p.default_instance = {{"n", 8}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& g = c.as<GridSubset>();
            if (auto m = detail::size_mismatch(inst, "n", static_cast<std::size_t>(g.n)); !m.empty()) return infeasible(m);
            long v = isosceles_count(g.cells);
            auto r = scored(static_cast<double>(static_cast<long>(g.cells.size()) - 10 * v),
                            {{"size", g.cells.size()}, {"violations", v}});
            r.penalty = static_cast<double>(10 * v);
            r.valid = v == 0;
            return r;
        };
        p.certify = [](const json&, const Construction& c, int bits) {
            const auto& g = c.as<GridSubset>();
            return exact_result(Rational(static_cast<long>(g.cells.size()) - 10 * isosceles_count(g.cells)), bits);
        };
        p.random = [](const json& inst, Rng& rng) {
            GridSubset g;
            g.n = static_cast<int>(detail::inst_long(inst, "n", 8));
            std::set<std::array<int, 2>> s;
            while (static_cast<int>(s.size()) < g.n)
                s.insert({static_cast<int>(rng.range(1, g.n)), static_cast<int>(rng.range(1, g.n))});
            g.cells.assign(s.begin(), s.end());
            return Construction(g);
        };
        p.repair = [](const json&, Construction& c) {
            auto& g = c.as<GridSubset>();
            for (auto& cell : g.cells)
                for (auto& x : cell) x = std::clamp(x, 1, g.n);
            std::sort(g.cells.begin(), g.cells.end());
            g.cells.erase(std::unique(g.cells.begin(), g.cells.end()), g.cells.end());
        };
        p.instance_of = [](const Construction& c) { return json{{"n", c.as<GridSubset>().n}}; };
        p.kernels = {"flip", "nudge", "insert", "delete"};
        reg.add(p);
    }
    {
        Problem p;
        p.id = "imo_tiling";
        p.doc = "Minimize tiles + sum |1 - uncovered| over rows and columns for rectangle tilings of the n x n grid.";
        p.kind = "tiling";
        p.minimize = true;
        p.default_instance = {{"n", 5}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& t = c.as<Tiling>();
            if (auto m = detail::size_mismatch(inst, "n", static_cast<std::size_t>(t.n)); !m.empty()) return infeasible(m);
            auto s = imo_tiling(t);
            if (!s.error.empty()) return infeasible(s.error);
            auto r = scored(static_cast<double>(s.tiles + s.penalty),
                            {{"tiles", s.tiles}, {"penalty", s.penalty}, {"formula", imo_formula(t.n)}});
            r.penalty = static_cast<double>(s.penalty);
            r.valid = s.penalty == 0;
            return r;
        };
        p.certify = [](const json&, const Construction& c, int bits) {
            auto s = imo_tiling(c.as<Tiling>());
            if (!s.error.empty()) throw std::runtime_error(s.error);
            return exact_result(Rational(s.tiles + s.penalty), bits);
        };
        p.random = [](const json& inst, Rng& rng) { return random_tiling(detail::inst_long(inst, "n", 5), rng); };
        p.instance_of = [](const Construction& c) { return json{{"n", c.as<Tiling>().n}}; };
        p.kernels = {"insert", "delete", "nudge", "block"};
        reg.add(p);
    }
    {
        Problem p;
        p.id = "block_stacking";
        p.doc = "Maximize positions[n-1] under the stacking score routine (-1 marks an unstable stack).";
        p.kind = "stack";
        p.minimize = false;
        p.default_instance = {{"n", 10}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& s = c.as<Stack>();
            if (auto m = detail::size_mismatch(inst, "n", s.positions.size()); !m.empty()) return infeasible(m);
            double v = block_stacking(s.positions);
            auto r = scored(v);
            // -1 is the routine's own invalid marker
            r.valid = !(v == -1.0 && !s.positions.empty());
            return r;
        };
        p.certify = [](const json&, const Construction& c, int bits) {
            return exact_result(block_stacking(rationals_from_json(exact_source(c).at("positions"))), bits);
        };
        p.random = [](const json& inst, Rng& rng) {
            Stack s;
            long n = detail::inst_long(inst, "n", 10);
            for (long i = 0; i < n; ++i) s.positions.push_back(rng.uniform(0, 0.1));
            return Construction(s);
        };
        p.baseline = [](const json& params) -> std::optional<Construction> {
            return Construction(Stack{harmonic_stack(static_cast<int>(detail::inst_long(params, "n", 10)))});
        };
        p.instance_of = [](const Construction& c) { return json{{"n", c.as<Stack>().positions.size()}}; };
        p.kernels = {"gauss", "nudge"};
        reg.add(p);
    }
    {
        Problem p;
        p.id = "turan";
        p.doc = "Maximize the edge density of the blowup of a weighted 3-graph with loops, subject to the blowup "
                "being K4(3)-free.";
        p.kind = "whyper";
        p.minimize = false;
        p.default_instance = {{"n", 5}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& h = c.as<WeightedHypergraph>();
            if (auto m = detail::size_mismatch(inst, "n", h.weights.size()); !m.empty()) return infeasible(m);
            double s = 0;
            for (double w : h.weights) {
                if (!(w >= 0)) return infeasible("negative weight");
                s += w;
            }
            if (std::fabs(s - 1) > 1e-12) return infeasible("weights must sum to 1");
            std::vector<bool> alive;
            for (double w : h.weights) alive.push_back(w > 0);
            if (auto k = blowup_k4(h.edges, alive)) {
                auto r = infeasible("blowup contains K4(3)");
                r.details = {{"witness", *k}};
                return r;
            }
            return scored(turan_density(h.weights, h.edges));
        };
        p.certify = [](const json&, const Construction& c, int bits) {
            const auto& h = c.as<WeightedHypergraph>();
            auto w = rationals_from_json(exact_source(c).at("weights"));
            Rational s(0);
            for (auto& x : w) s += x;
            if (abs(s - 1) > Rational(1, 1000000000000L)) throw std::runtime_error("weights must sum to 1");
            std::vector<bool> alive;
            for (auto& x : w) alive.push_back(x > 0);
            if (blowup_k4(h.edges, alive)) throw std::runtime_error("blowup contains K4(3)");
            return exact_result(turan_density(w, h.edges), bits);
        };
        p.random = [](const json& inst, Rng& rng) {
            WeightedHypergraph h;
            long n = detail::inst_long(inst, "n", 5);
            for (long i = 0; i < n; ++i) h.weights.push_back(rng.uniform(0.1, 1));
            for (int a = 0; a < n; ++a)
                for (int b = a; b < n; ++b)
                    for (int c = b; c < n; ++c)
                        if (!(a == b && b == c) && rng.uniform() < 0.3) h.edges.push_back({a, b, c});
            Construction con(h);
            repair_turan(inst, con);
            return con;
        };
        // three vertices, edges abc, aab, bbc, cca: density 5/9
        p.baseline = [](const json&) -> std::optional<Construction> {
            return construction_from_json({{"kind", "whyper"},
                                           {"weights", {"1/3", "1/3", "1/3"}},
                                           {"edges", {{0, 1, 2}, {0, 0, 1}, {1, 1, 2}, {0, 2, 2}}}});
        };
        p.instance_of = [](const Construction& c) { return json{{"n", c.as<WeightedHypergraph>().weights.size()}}; };
        p.repair = repair_turan;
        p.kernels = {"reweight", "flip", "gauss"};
        reg.add(p);
    }
    {
        Problem p;
        p.id = "golay";
        p.doc = "Polynomials with +-1 coefficients: maximize min |p|/sqrt(n+1) (flat_min), minimize max "
                "(flat_max) on the 2^13 mesh, or maximize the merit factor (merit).";
        p.kind = "signs";
        p.minimize = false;
        p.minimize_for = [](const json& inst) { return golay_target(inst) == GolayTarget::flat_max; };
        p.default_instance = {{"n", 12}, {"target", "merit"}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& a = c.as<SignSeq>().a;
            if (auto nn = detail::inst_long(inst, "n", -1); nn >= 0 && static_cast<long>(a.size()) != nn + 1)
                return infeasible("instance degree n needs n+1 coefficients");
            if (a.size() < 2) return infeasible("need at least 2 coefficients");
            auto t = golay_target(inst);
            if (t == GolayTarget::merit) return scored(golay_merit(a).get_d());
            auto [lo, hi] = golay_flatness(a);
            return scored(t == GolayTarget::flat_min ? lo : hi, {{"flat_min", lo}, {"flat_max", hi}});
        };
        p.certify = [](const json& inst, const Construction& c, int bits) {
            const auto& a = c.as<SignSeq>().a;
            auto t = golay_target(inst);
            if (t == GolayTarget::merit) return exact_result(golay_merit(a), bits);
            return interval_result(golay_flat_certified(a, t == GolayTarget::flat_min), bits);
        };
        p.random = [](const json& inst, Rng& rng) {
            return Construction(SignSeq{random_signs(detail::inst_long(inst, "n", 12) + 1, rng)});
        };
        // Barker 13
        p.baseline = [](const json&) -> std::optional<Construction> {
            return Construction(SignSeq{{1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1}});
        };
        p.instance_of = [](const Construction& c) {
            return json{{"n", static_cast<long>(c.as<SignSeq>().a.size()) - 1}};
        };
        p.kernels = {"flip", "swap", "block"};
        reg.add(p);
    }
}

}  // namespace evo
