#include <doctest.h>

#include <chrono>
#include <cmath>
#include <set>

#include "evo/certify.hpp"
#include "evo/combinatorics.hpp"
#include "evo/problem.hpp"

using namespace evo;
using namespace evo::combinatorics;

namespace {

const Problem& P(const std::string& id) { return Registry::get().at(id); }

EvaluationReport run(const std::string& id, const Construction& c, json inst = json::object()) {
    return evaluate(P(id), resolve_instance(P(id), inst, &c), c);
}

// discrepancy-bounded prefix length straight from the definition
long naive_prefix(const std::vector<int>& a, long D) {
    const long N = static_cast<long>(a.size());
    for (long m = 1; m <= N; ++m)
        for (long d = 1; d <= m; ++d) {
            long s = 0;
            for (long k = d; k <= m; k += d) s += a[static_cast<std::size_t>(k - 1)];
            if (std::labs(s) > D) return m - 1;
        }
    return N;
}

// ring objective with sides written out separately
double naive_ring(const std::vector<double>& u, const std::vector<double>& v) {
    const std::size_t n = u.size();
    double best = INFINITY;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        double worst = 0;
        for (std::size_t k = 0; k <= n; ++k) {
            double left = 0, right = 0;
            for (std::size_t i = 0; i < n; ++i) {
                double z = (mask >> i) & 1 ? -u[i] : v[i];
                (i < k ? left : right) += z;
            }
            worst = std::max(worst, std::fabs(left - right));
        }
        best = std::min(best, worst);
    }
    return best;
}

long naive_isosceles(const std::vector<std::array<int, 2>>& s) {
    long v = 0;
    auto d2 = [](auto p, auto q) { return (p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]); };
    for (std::size_t b = 0; b < s.size(); ++b)
        for (std::size_t a = 0; a < s.size(); ++a)
            for (std::size_t c = a + 1; c < s.size(); ++c)
                if (a != b && c != b && d2(s[a], s[b]) == d2(s[c], s[b])) ++v;
    return v;
}

std::vector<int> signs_of(const std::string& s) {
    std::vector<int> a;
    for (char ch : s) a.push_back(ch == '+' ? 1 : -1);
    return a;
}

}  // namespace

TEST_CASE("edp prefix agrees with the definition") {
    Rng rng(3);
    for (int t = 0; t < 300; ++t) {
        std::vector<int> a(static_cast<std::size_t>(1 + rng.below(60)));
        for (auto& x : a) x = rng.below(2) ? 1 : -1;
        for (long D : {1L, 2L, 3L}) CHECK(edp_prefix(a, D).length == naive_prefix(a, D));
    }
    // (+,+) at D = 1: position 2 has divisors 1 (sum 2) and 2 (sum 1)
    auto r = edp_prefix({1, 1}, 1);
    CHECK(r.length == 1);
    CHECK(r.score() == ratio(3, 2));
}

TEST_CASE("edp discrepancy-1 maximum is 11") {
    CHECK(edp_longest(0) == 0);
    CHECK(edp_longest(1) == 11);
    CHECK_THROWS(edp_longest(2));
    auto a = signs_of("+--+-++--+-");
    CHECK(edp_prefix(a, 1).length == 11);
    for (int s : {1, -1}) {
        auto b = a;
        b.push_back(s);
        CHECK(edp_prefix(b, 1).length == 11);
    }
}

TEST_CASE("edp at 1e5 terms is fast") {
    Rng rng(1);
    std::vector<int> a(100000);
    for (auto& x : a) x = rng.below(2) ? 1 : -1;
    auto t0 = std::chrono::steady_clock::now();
    auto r = edp_prefix(a, 1000000);
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(r.length == 100000);
    CHECK(sec < 1.0);
}

TEST_CASE("ring loading") {
    CHECK(ring_loading(std::vector<double>{0.3}, std::vector<double>{0.6}) == doctest::Approx(0.3));
    Rng rng(7);
    const auto& p = P("ring_loading");
    for (int t = 0; t < 1000; ++t) {
        json inst = {{"n", 1 + rng.below(12)}};
        auto c = p.random(inst, rng);
        auto r = evaluate(p, inst, c);
        REQUIRE(r.feasible);
        CHECK(r.raw <= 19.0 / 14 + 1e-12);
        if (t < 100) {
            const auto& ri = c.as<RingInstance>();
            CHECK(r.raw == doctest::Approx(naive_ring(ri.u, ri.v)).epsilon(1e-12));
        }
    }
    // exact path: ratios with small denominators
    std::vector<Rational> u{ratio(1, 3), ratio(1, 2), ratio(2, 7)}, v{ratio(2, 3), ratio(1, 4), ratio(1, 7)};
    std::vector<double> ud, vd;
    for (std::size_t i = 0; i < 3; ++i) {
        ud.push_back(u[i].get_d());
        vd.push_back(v[i].get_d());
    }
    CHECK(ring_loading(u, v).get_d() == doctest::Approx(naive_ring(ud, vd)).epsilon(1e-14));
    Construction bad(RingInstance{{0.7}, {0.7}});
    CHECK_FALSE(run("ring_loading", bad).feasible);
}

TEST_CASE("sum-difference ratios") {
    auto base = *P("sumdiff").baseline(json::object());
    const auto& e = base.as<IntSet>().elems;
    std::set<long> S, D;
    for (long x : e)
        for (long y : e) {
            S.insert(x + y);
            D.insert(x - y);
        }
    CHECK(S.size() == 59);
    CHECK(D.size() == 55);
    auto r = run("sumdiff", base);
    CHECK(r.raw == doctest::Approx(std::log(59.0 / 17) / std::log(55.0 / 17)).epsilon(1e-14));
    CHECK(r.raw == doctest::Approx(1.0597930945472454).epsilon(1e-12));
    auto cert = P("sumdiff").certify(resolve_instance(P("sumdiff"), {}, &base), base, 256);
    CHECK(std::stod(cert.lo) <= 1.0597930945472454 + 1e-15);
    CHECK(std::stod(cert.hi) >= 1.0597930945472454 - 1e-15);
    CHECK(interval_width(cert) < 1e-60);

    auto r43 = run("sumdiff_43", base);
    CHECK(r43.raw == doctest::Approx(std::log(55.0) / std::log(59.0)));

    // |A-A| = |A| only for singletons, which are rejected
    CHECK_FALSE(run("sumdiff", Construction(IntSet{{5}})).feasible);

    Rng rng(11);
    for (int t = 0; t < 500; ++t) {
        auto c = P("sumdiff").random({{"n", 2 + rng.below(15)}}, rng);
        auto x = run("sumdiff", c);
        if (x.feasible) CHECK(x.raw <= 2.0);
    }
}

TEST_CASE("gyarmati") {
    auto r = run("gyarmati", Construction(IntSet{{0, 1, 3}}));
    CHECK(r.raw == doctest::Approx(1 + std::log(7.0 / 6) / std::log(7.0)).epsilon(1e-14));
    CHECK(r.raw == doctest::Approx(1.07921778).epsilon(1e-8));
    CHECK_FALSE(run("gyarmati", Construction(IntSet{{1, 2, 4}})).feasible);
    CHECK_FALSE(run("gyarmati", Construction(IntSet{{0}})).feasible);
    Construction c(IntSet{{3, 4, 6}});
    P("gyarmati").repair({}, c);
    CHECK(c.as<IntSet>().elems == std::vector<long>{0, 1, 3});
    Rng rng(5);
    for (int t = 0; t < 500; ++t) {
        auto x = P("gyarmati").random({{"n", 2 + rng.below(10)}}, rng);
        auto s = run("gyarmati", x);
        REQUIRE(s.feasible);
        CHECK(s.raw <= 1.25);
    }
}

TEST_CASE("isosceles count and small grids") {
    Rng rng(2);
    for (int t = 0; t < 200; ++t) {
        auto c = P("isosceles_free").random({{"n", 2 + rng.below(6)}}, rng);
        const auto& g = c.as<GridSubset>();
        CHECK(isosceles_count(g.cells) == naive_isosceles(g.cells));
    }
    // a 2x2 grid holds 2 points without an isosceles triple, never 3
    long best = -1000;
    for (int mask = 0; mask < 16; ++mask) {
        GridSubset g;
        g.n = 2;
        for (int i = 0; i < 4; ++i)
            if (mask >> i & 1) g.cells.push_back({1 + i / 2, 1 + i % 2});
        auto r = run("isosceles_free", Construction(g));
        if (r.valid) best = std::max(best, static_cast<long>(r.raw));
    }
    CHECK(best == 2);
    GridSubset line;
    line.n = 3;
    line.cells = {{1, 1}, {1, 2}, {1, 3}};  // collinear, still counted
    auto r = run("isosceles_free", Construction(line));
    CHECK(r.raw == 3 - 10);
    CHECK_FALSE(r.valid);
}

TEST_CASE("imo tiling") {
    CHECK(imo_formula(1) == 0);
    CHECK(imo_formula(2) == 2);
    CHECK(imo_formula(3) == 4);
    CHECK(imo_formula(4) == 5);
    CHECK(imo_formula(2025) == 2112);
    for (int n = 2; n <= 4; ++n) CHECK(imo_min_tiles(n) == imo_formula(n));

    Tiling t{2, {{1, 1, 2, 2}, {2, 2, 1, 1}}};
    auto r = run("imo_tiling", Construction(t));
    CHECK(r.valid);
    CHECK(r.raw == 2);
    Tiling over{2, {{1, 2, 1, 1}, {1, 1, 1, 2}}};
    CHECK_FALSE(run("imo_tiling", Construction(over)).feasible);
    Tiling gap{2, {{1, 1, 1, 1}}};  // three uncovered cells
    auto g = run("imo_tiling", Construction(gap));
    CHECK(g.feasible);
    CHECK_FALSE(g.valid);
    CHECK(g.raw == 1 + 2);

    Rng rng(4);
    for (int i = 0; i < 100; ++i) {
        long n = 2 + static_cast<long>(rng.below(6));
        auto c = P("imo_tiling").random({{"n", n}}, rng);
        auto s = run("imo_tiling", c, {{"n", n}});
        REQUIRE(s.valid);
        CHECK(s.raw >= static_cast<double>(imo_formula(n)));
    }
}

TEST_CASE("block stacking") {
    for (int n : {1, 2, 5, 20}) {
        double H = 0;
        for (int k = 1; k <= n; ++k) H += 1.0 / k;
        auto c = *P("block_stacking").baseline({{"n", n}});
        auto r = run("block_stacking", c);
        CHECK(r.valid);
        CHECK(r.raw == doctest::Approx(H / 2).epsilon(1e-8));
        auto cert = P("block_stacking").certify({{"n", n}}, c, 128);
        REQUIRE(cert.exact);
        CHECK(cert.exact->get_d() == r.raw);
    }
    CHECK(block_stacking(std::vector<double>{0.6}) == -1);
    CHECK_FALSE(run("block_stacking", Construction(Stack{{0.6}})).valid);

    Rng rng(9);
    for (int t = 0; t < 2000; ++t) {
        int n = 1 + static_cast<int>(rng.below(8));
        auto p = harmonic_stack(n);
        for (auto& x : p) x += rng.uniform(-0.05, 0.05);
        double H = 0;
        for (int k = 1; k <= n; ++k) H += 1.0 / k;
        double v = block_stacking(p);
        if (v != -1) CHECK(v <= H / 2 + 1e-9);
    }
}

TEST_CASE("turan blowup") {
    auto c = *P("turan").baseline(json::object());
    auto r = run("turan", c);
    REQUIRE(r.feasible);
    CHECK(r.raw == doctest::Approx(5.0 / 9));
    auto cert = P("turan").certify({{"n", 3}}, c, 128);
    REQUIRE(cert.exact);
    CHECK(*cert.exact == ratio(5, 9));

    // aab and bba alone put K4 on {a,a,b,b}
    auto k4 = construction_from_json(
        {{"kind", "whyper"}, {"weights", {0.5, 0.5}}, {"edges", {{0, 0, 1}, {0, 1, 1}}}});
    CHECK_FALSE(run("turan", k4, {{"n", 2}}).feasible);
    CHECK(turan_density(std::vector<double>{0.5, 0.5}, {{0, 0, 1}, {0, 1, 1}}) == doctest::Approx(0.75));
    // a dead vertex does not count
    CHECK_FALSE(blowup_k4({{0, 0, 1}, {0, 1, 1}}, {true, false}));

    // random repaired hypergraphs stay below the flag-algebra bound
    Rng rng(12);
    const auto& p = P("turan");
    for (int t = 0; t < 300; ++t) {
        json inst = {{"n", 2 + rng.below(5)}};
        auto x = p.random(inst, rng);
        auto s = evaluate(p, inst, x);
        REQUIRE(s.feasible);
        CHECK(s.raw <= 0.561667);
    }
}

TEST_CASE("golay") {
    auto barker = signs_of("+++++--++-+-+");
    CHECK(golay_merit(barker) == ratio(169, 12));
    auto ac = autocorrelations(barker);
    for (long c : ac) CHECK(std::labs(c) <= 1);

    Rng rng(6);
    for (int t = 0; t < 50; ++t) {
        std::vector<int> a(static_cast<std::size_t>(2 + rng.below(63)));
        for (auto& x : a) x = rng.below(2) ? 1 : -1;
        const long n1 = static_cast<long>(a.size());
        // mesh quadrature of |p|^4 is exact once K > 4n
        const long K = 1024;
        double s4 = 0;
        for (long k = 0; k < K; ++k) {
            double re = 0, im = 0;
            for (long j = 0; j < n1; ++j) {
                re += a[static_cast<std::size_t>(j)] * std::cos(2 * M_PI * j * k / K);
                im += a[static_cast<std::size_t>(j)] * std::sin(2 * M_PI * j * k / K);
            }
            s4 += (re * re + im * im) * (re * re + im * im);
        }
        long cs = 0;
        for (long c : autocorrelations(a)) cs += c * c;
        CHECK(s4 / K == doctest::Approx(static_cast<double>(n1 * n1 + 2 * cs)).epsilon(1e-9));
        // mean of |p|^2 on the mesh is n+1
        auto [lo, hi] = golay_flatness(a);
        CHECK(lo <= 1 + 1e-12);
        CHECK(hi >= 1 - 1e-12);
    }

    const auto& p = P("golay");
    json flat = {{"n", 12}, {"target", "flat_max"}};
    CHECK(p.minimizes(flat));
    CHECK_FALSE(p.minimizes({{"n", 12}, {"target", "merit"}}));
    Construction c(SignSeq{barker});
    auto r = evaluate(p, flat, c);
    auto cert = p.certify(flat, c, 128);
    CHECK(std::stod(cert.lo) <= r.raw + 1e-12);
    CHECK(std::stod(cert.hi) >= r.raw - 1e-12);
    CHECK_FALSE(evaluate(p, {{"n", 11}, {"target", "merit"}}, c).feasible);
}
