#include "evo/analysis.hpp"

#include <cmath>

#include "evo/certify.hpp"
#include "evo/interval.hpp"
#include "problem_util.hpp"

namespace evo::analysis {

std::vector<double> hermite_values(double y, int maxdeg) {
    std::vector<double> h(static_cast<std::size_t>(maxdeg) + 1);
    h[0] = 1;
    if (maxdeg >= 1) h[1] = 2 * y;
    for (int n = 1; n < maxdeg; ++n) h[n + 1] = 2 * y * h[n] - 2 * n * h[n - 1];
    return h;
}

namespace {

// H_{2j}(0) = (-1)^j (2j)! / j!
Rational hermite_at_zero(int deg) {
    if (deg % 2) return Rational(0);
    int j = deg / 2;
    mpz_class num = 1;
    for (int i = j + 1; i <= deg; ++i) num *= i;
    if (j % 2) num = -num;
    return Rational(num);
}

template <class T>
std::vector<T> complete(const std::vector<T>& coeffs) {
    const int m = static_cast<int>(coeffs.size());
    T p0(0);
    for (int k = 0; k < m; ++k) p0 += coeffs[static_cast<std::size_t>(k)] * from_rational<T>(hermite_at_zero(4 * k));
    std::vector<T> out(coeffs);
    out.push_back(T(-p0 / from_rational<T>(hermite_at_zero(4 * m))));
    // the last term with a nonzero coefficient fixes the sign at infinity
    T lead(0);
    for (auto it = out.rbegin(); it != out.rend(); ++it)
        if (*it != 0) {
            lead = *it;
            break;
        }
    if (lead < 0)
        for (auto& c : out) c = -c;
    return out;
}

double p_at(const std::vector<double>& c, double x) {
    const double y = std::sqrt(2 * M_PI) * x;
    auto h = hermite_values(y, 4 * static_cast<int>(c.size() - 1));
    double s = 0;
    for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * h[4 * k];
    return s;
}

}  // namespace

std::vector<double> completed_coeffs(const std::vector<double>& coeffs) { return complete(coeffs); }
std::vector<Rational> completed_coeffs_exact(const std::vector<Rational>& coeffs) { return complete(coeffs); }

SignChange largest_sign_change(const std::vector<double>& coeffs, double scan_limit, long scan_points) {
    SignChange out;
    auto c = completed_coeffs(coeffs);
    bool any = false;
    for (double x : c) any = any || x != 0;
    if (!any) {
        out.why = "coefficients vanish";
        return out;
    }
    const double step = scan_limit / static_cast<double>(scan_points);
    double prev = p_at(c, step);
    if (!(prev < 0)) {
        out.why = "f is not negative just right of the origin";
        return out;
    }
    long last = -1;
    for (long i = 2; i <= scan_points; ++i) {
        double v = p_at(c, step * static_cast<double>(i));
        if ((v < 0) != (prev < 0) && v != 0) last = i;
        if (v != 0) prev = v;
    }
    if (last < 0) {
        out.why = "no sign change in (0, scan_limit]";
        return out;
    }
    double lo = step * static_cast<double>(last - 1), hi = step * static_cast<double>(last);
    const bool lo_neg = p_at(c, lo) < 0;
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if ((p_at(c, mid) < 0) == lo_neg) lo = mid; else hi = mid;
    }
    out.ok = true;
    out.r = 0.5 * (lo + hi);
    return out;
}

namespace {

using detail::inst_long;
using detail::size_mismatch;

// ---- exact polynomial tools for certifying the sign change ----

using Poly = std::vector<Rational>;  // ascending powers

void trim(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

Rational eval_poly(const Poly& p, const Rational& s) {
    Rational acc(0);
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * s + *it;
    return acc;
}

Poly derivative(const Poly& p) {
    Poly d;
    for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Rational(static_cast<long>(i)));
    trim(d);
    return d;
}

Poly remainder(Poly a, const Poly& b) {
    trim(a);
    while (a.size() >= b.size() && !a.empty()) {
        Rational f = a.back() / b.back();
        std::size_t shift = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
        a.pop_back();
        trim(a);
    }
    return a;
}

int sign_changes_at(const std::vector<Poly>& seq, const Rational* at) {
    int changes = 0, last = 0;
    for (const auto& p : seq) {
        int s;
        if (at) s = sgn(eval_poly(p, *at));
        else s = p.empty() ? 0 : sgn(p.back());
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

// number of distinct real roots of p in (a, +inf)
int roots_above(const Poly& p, const Rational& a) {
    std::vector<Poly> seq{p, derivative(p)};
    while (seq.back().size() > 0) {
        Poly r = remainder(seq[seq.size() - 2], seq.back());
        if (r.empty()) break;
        for (auto& c : r) c = -c;
        seq.push_back(r);
    }
    return sign_changes_at(seq, &a) - sign_changes_at(seq, nullptr);
}

// H_deg as integer coefficients in y
std::vector<mpz_class> hermite_poly(int deg) {
    std::vector<mpz_class> a{1}, b{0, 2};
    if (deg == 0) return a;
    for (int n = 1; n < deg; ++n) {
        std::vector<mpz_class> c(static_cast<std::size_t>(n) + 2, 0);
        for (std::size_t i = 0; i < b.size(); ++i) c[i + 1] += 2 * b[i];
        for (std::size_t i = 0; i < a.size(); ++i) c[i] -= 2 * n * a[i];
        a = std::move(b);
        b = std::move(c);
    }
    return b;
}

// p as a polynomial in s = y^2
Poly s_polynomial(const std::vector<Rational>& c) {
    Poly p(2 * c.size() + 1, Rational(0));
    for (std::size_t k = 0; k < c.size(); ++k) {
        auto h = hermite_poly(4 * static_cast<int>(k));
        for (std::size_t i = 0; i < h.size(); i += 2) p[i / 2] += c[k] * Rational(h[i]);
    }
    trim(p);
    return p;
}

ScoreInterval certify_uncertainty(const json&, const Construction& c, int bits) {
    json src = exact_source(c);
    auto coeffs = rationals_from_json(src.at("coeffs"));
    const auto& e = c.as<EigenCombo>();
    auto sc = largest_sign_change(e.coeffs, e.scan_limit, e.scan_points);
    if (!sc.ok) throw std::runtime_error("cannot certify an infeasible combination: " + sc.why);
    Poly p = s_polynomial(completed_coeffs_exact(coeffs));
    const double s0 = 2 * M_PI * sc.r * sc.r;
    Rational lo, hi;
    bool bracketed = false;
    for (double rel : {1e-9, 1e-7, 1e-5, 1e-3}) {
        lo = Rational(s0 * (1 - rel));
        hi = Rational(s0 * (1 + rel));
        int a = sgn(eval_poly(p, lo)), b = sgn(eval_poly(p, hi));
        if (a != 0 && b != 0 && a != b) {
            bracketed = true;
            break;
        }
    }
    if (!bracketed) throw std::runtime_error("could not bracket the sign change exactly");
    if (roots_above(p, hi) != 0) throw std::runtime_error("a later root exists; sign change not certified");
    const int lo_sign = sgn(eval_poly(p, lo));
    for (int it = 0; it < bits + 8; ++it) {
        Rational mid = (lo + hi) / 2;
        int s = sgn(eval_poly(p, mid));
        if (s == 0) {
            lo = hi = mid;
            break;
        }
        if (s == lo_sign) lo = mid; else hi = mid;
    }
    Interval two_pi = Interval(2L) * Interval::pi();
    Interval r2 = Interval::hull(Interval(lo), Interval(hi)) / two_pi;
    return interval_result(r2, bits);
}

// ---- step-function helpers ----

std::vector<Rational> exact_heights(const Construction& c, Rational& a, Rational& b) {
    json src = exact_source(c);
    auto h = rationals_from_json(src.at("heights"));
    a = Rational(-1, 4);
    b = Rational(1, 4);
    if (src.contains("domain")) {
        a = rational_from_json(src["domain"][0]);
        b = rational_from_json(src["domain"][1]);
    }
    return h;
}

Construction random_step(long n, Rational a, Rational b, bool nonneg, Rng& rng) {
    StepFunction s;
    s.a = std::move(a);
    s.b = std::move(b);
    s.nonneg = nonneg;
    for (long i = 0; i < n; ++i) s.heights.push_back(nonneg ? rng.uniform() : rng.normal());
    return s;
}

json step_instance(const Construction& c) { return {{"n", c.as<StepFunction>().heights.size()}}; }

void clamp_nonneg(const json&, Construction& c) {
    auto& s = c.as<StepFunction>();
    if (!s.nonneg) return;
    for (auto& h : s.heights)
        if (!(h >= 0)) h = 0;
}

bool on_domain(const StepFunction& s, const Rational& a, const Rational& b) { return s.a == a && s.b == b; }

// Euclidean projection of heights onto {0 <= h <= 1, sum h = n/2}
void project_min_overlap(const json&, Construction& c) {
    auto& h = c.as<StepFunction>().heights;
    const double target = static_cast<double>(h.size()) / 2.0;
    auto mass = [&](double lam) {
        double s = 0;
        for (double x : h) s += std::clamp(x - lam, 0.0, 1.0);
        return s;
    };
    double lo = -2, hi = 2;
    for (double x : h) {
        lo = std::min(lo, x - 1);
        hi = std::max(hi, x);
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mass(mid) > target) lo = mid; else hi = mid;
    }
    for (double& x : h) x = std::clamp(x - 0.5 * (lo + hi), 0.0, 1.0);
    // push the rounding residue into the entries with the most slack
    for (int pass = 0; pass < 4; ++pass) {
        double s = 0;
        for (double x : h) s += x;
        double diff = target - s;
        if (diff == 0) break;
        for (double& x : h) {
            double nx = std::clamp(x + diff, 0.0, 1.0);
            diff -= nx - x;
            x = nx;
            if (diff == 0) break;
        }
    }
}

void repair_hl(const json&, Construction& c) {
    auto& h = c.as<HLInstance>();
    std::vector<std::pair<double, double>> yk;
    for (std::size_t i = 0; i < h.y.size(); ++i) yk.emplace_back(h.y[i], h.k[i]);
    std::sort(yk.begin(), yk.end());
    for (std::size_t i = 0; i < yk.size(); ++i) {
        h.y[i] = yk[i].first;
        h.k[i] = std::max(std::fabs(yk[i].second), 1e-9);
        if (i > 0 && !(h.y[i] > h.y[i - 1])) h.y[i] = std::nextafter(h.y[i - 1], HUGE_VAL);
    }
}

EvaluationReport eval_step_variant(const json& inst, const Construction& c, Variant v) {
    const auto& s = c.as<StepFunction>();
    if (auto m = size_mismatch(inst, "n", s.heights.size()); !m.empty()) return infeasible(m);
    if (v == Variant::c1_max_nonneg || v == Variant::c3_max_signed) {
        if (!on_domain(s, Rational(-1, 4), Rational(1, 4))) return infeasible("domain must be (-1/4, 1/4)");
    }
    if ((v == Variant::c1_max_nonneg || v == Variant::c6_min_corr) && !s.nonneg)
        return infeasible("variant requires a non-negative step function");
    auto r = autocorrelation(s.heights, s.a, s.b, v);
    if (!r) return infeasible(v == Variant::c6_min_corr ? "||f||_1 = 0" : "integral of f is 0");
    return scored(*r);
}

ScoreInterval certify_step_variant(const json&, const Construction& c, int bits, Variant v) {
    Rational a, b;
    auto h = exact_heights(c, a, b);
    auto r = autocorrelation(h, a, b, v);
    if (!r) throw std::runtime_error("normalizer vanishes");
    return exact_result(*r, bits);
}

}  // namespace

}  // namespace evo::analysis

namespace evo {

using namespace analysis;

void register_analysis(Registry& reg) {
    const std::vector<std::string> real_kernels{"gauss", "nudge"};
    {
        Problem p;
        p.id = "autocorr_c1";
        p.doc = "Minimize max_t (f*f)(t) / (int f)^2 over non-negative step functions on (-1/4, 1/4).";
        p.kind = "step";
        p.minimize = true;
        p.default_instance = {{"n", 600}};
        p.evaluate = [](const json& inst, const Construction& c) {
            return eval_step_variant(inst, c, Variant::c1_max_nonneg);
        };
        p.certify = [](const json& inst, const Construction& c, int bits) {
            return certify_step_variant(inst, c, bits, Variant::c1_max_nonneg);
        };
        p.random = [](const json& inst, Rng& rng) {
            return random_step(detail::inst_long(inst, "n", 600), Rational(-1, 4), Rational(1, 4), true, rng);
        };
        // f(x) = 1/sqrt(2x + 1/2) sampled at part midpoints
        p.baseline = [](const json& params) -> std::optional<Construction> {
            long n = detail::inst_long(params, "n", 4000);
            StepFunction s;
            for (long i = 0; i < n; ++i) {
                double x = -0.25 + (static_cast<double>(i) + 0.5) * 0.5 / static_cast<double>(n);
                s.heights.push_back(1.0 / std::sqrt(2 * x + 0.5));
            }
            return Construction(s);
        };
        p.instance_of = step_instance;
        p.repair = clamp_nonneg;
        p.kernels = real_kernels;
        reg.add(p);
    }
    {
        Problem p;
        p.id = "autocorr_c3";
        p.doc = "Minimize max_t |f*f|(t) / (int f)^2 over signed step functions on (-1/4, 1/4).";
        p.kind = "step";
        p.minimize = true;
        p.default_instance = {{"n", 600}};
        p.evaluate = [](const json& inst, const Construction& c) {
            return eval_step_variant(inst, c, Variant::c3_max_signed);
        };
        p.certify = [](const json& inst, const Construction& c, int bits) {
            return certify_step_variant(inst, c, bits, Variant::c3_max_signed);
        };
        p.random = [](const json& inst, Rng& rng) {
            auto c = random_step(detail::inst_long(inst, "n", 600), Rational(-1, 4), Rational(1, 4), false, rng);
            for (auto& h : c.as<StepFunction>().heights) h = std::fabs(h) + 0.1 * h;
            return c;
        };
        p.instance_of = step_instance;
        p.kernels = real_kernels;
        reg.add(p);
    }
    {
        Problem p;
        p.id = "autocorr_c6";
        p.doc = "Maximize min_{0<=t<=1} int f(x) f(x+t) dx / ||f||_1^2 over non-negative step functions.";
        p.kind = "step";
        p.minimize = false;
        p.default_instance = {{"n", 60}};
        p.evaluate = [](const json& inst, const Construction& c) {
            return eval_step_variant(inst, c, Variant::c6_min_corr);
        };
        p.certify = [](const json& inst, const Construction& c, int bits) {
            return certify_step_variant(inst, c, bits, Variant::c6_min_corr);
        };
        p.random = [](const json& inst, Rng& rng) {
            return random_step(detail::inst_long(inst, "n", 60), Rational(-1), Rational(1), true, rng);
        };
        p.instance_of = step_instance;
        p.repair = clamp_nonneg;
        p.kernels = real_kernels;
        reg.add(p);
    }
    {
        Problem p;
        p.id = "autoconv_ratio";
        p.doc = "Maximize ||f*f||_2^2 / (||f*f||_1 ||f*f||_inf) over non-negative step functions.";
        p.kind = "step";
        p.minimize = false;
        p.default_instance = {{"n", 200}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& s = c.as<StepFunction>();
            if (auto m = size_mismatch(inst, "n", s.heights.size()); !m.empty()) return infeasible(m);
            if (!s.nonneg) return infeasible("requires a non-negative step function");
            auto r = autoconv_norm_ratio(s.heights, s.a, s.b);
            if (!r) return infeasible("f is identically zero");
            return scored(*r);
        };
        p.certify = [](const json&, const Construction& c, int bits) {
            Rational a, b;
            auto h = exact_heights(c, a, b);
            auto r = autoconv_norm_ratio(h, a, b);
            if (!r) throw std::runtime_error("f is identically zero");
            return exact_result(*r, bits);
        };
        p.random = [](const json& inst, Rng& rng) {
            return random_step(detail::inst_long(inst, "n", 200), Rational(-1, 4), Rational(1, 4), true, rng);
        };
        p.instance_of = step_instance;
        p.repair = clamp_nonneg;
        p.kernels = real_kernels;
        reg.add(p);
    }
    {
        Problem p;
        p.id = "min_overlap";
        p.doc = "Minimize max_x int f(t)(1 - f(x+t)) dt over step f on (-1,1) with 0 <= f <= 1 and int f = 1.";
        p.kind = "step";
        p.minimize = true;
        p.default_instance = {{"n", 40}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& s = c.as<StepFunction>();
            if (auto m = size_mismatch(inst, "n", s.heights.size()); !m.empty()) return infeasible(m);
            if (!on_domain(s, Rational(-1), Rational(1))) return infeasible("domain must be (-1, 1)");
            double sum = 0;
            for (double h : s.heights) {
                if (!(h >= 0 && h <= 1)) return infeasible("heights must lie in [0, 1]");
                sum += h;
            }
            double integral = sum * 2.0 / static_cast<double>(s.heights.size());
            if (std::fabs(integral - 1) > 1e-12) return infeasible("integral of f must be 1");
            return scored(min_overlap_value(s.heights), {{"integral", integral}});
        };
        p.certify = [](const json&, const Construction& c, int bits) {
            Rational a, b;
            auto h = exact_heights(c, a, b);
            Rational sum(0);
            for (const auto& x : h) {
                if (x < 0 || x > 1) throw std::runtime_error("heights must lie in [0, 1]");
                sum += x;
            }
            Rational integral = sum * 2 / Rational(static_cast<long>(h.size()));
            if (abs(integral - 1) > Rational(1, 1000000000000L)) throw std::runtime_error("integral of f must be 1");
            return exact_result(min_overlap_value(h), bits);
        };
        p.random = [](const json& inst, Rng& rng) {
            long n = detail::inst_long(inst, "n", 40);
            StepFunction s;
            s.a = -1;
            s.b = 1;
            for (long i = 0; i < n; ++i) s.heights.push_back(rng.uniform());
            Construction c(s);
            project_min_overlap(inst, c);
            return c;
        };
        p.instance_of = step_instance;
        p.repair = project_min_overlap;
        p.kernels = {"gauss", "nudge", "reweight"};
        reg.add(p);
    }
    {
        Problem p;
        p.id = "hl_maximal";
        p.doc = "Maximize |union of [y_j - K(i..j), y_i + K(i..j)]| / (2 sum k).";
        p.kind = "hl";
        p.minimize = false;
        p.default_instance = {{"n", 20}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& h = c.as<HLInstance>();
            if (auto m = size_mismatch(inst, "n", h.y.size()); !m.empty()) return infeasible(m);
            for (std::size_t i = 0; i < h.y.size(); ++i) {
                if (i > 0 && !(h.y[i] > h.y[i - 1])) return infeasible("y must be strictly increasing");
                if (!(h.k[i] > 0)) return infeasible("k must be positive");
            }
            return scored(hl_maximal(h.y, h.k));
        };
        p.certify = [](const json&, const Construction& c, int bits) {
            json src = exact_source(c);
            auto y = rationals_from_json(src.at("y"));
            auto k = rationals_from_json(src.at("k"));
            for (std::size_t i = 0; i < y.size(); ++i) {
                if (i > 0 && !(y[i] > y[i - 1])) throw std::runtime_error("y must be strictly increasing");
                if (!(k[i] > 0)) throw std::runtime_error("k must be positive");
            }
            return exact_result(hl_maximal(y, k), bits);
        };
        p.random = [](const json& inst, Rng& rng) {
            long n = detail::inst_long(inst, "n", 20);
            HLInstance h;
            for (long i = 0; i < n; ++i) {
                h.y.push_back(rng.uniform(0, 3.0 * static_cast<double>(n)));
                h.k.push_back(rng.uniform(0.2, 2.0));
            }
            Construction c(h);
            repair_hl(inst, c);
            return c;
        };
        // k = 1, y_i = 3i: scores 3/2 - 1/(2n)
        p.baseline = [](const json& params) -> std::optional<Construction> {
            long n = detail::inst_long(params, "n", 100);
            HLInstance h;
            for (long i = 1; i <= n; ++i) {
                h.y.push_back(3.0 * static_cast<double>(i));
                h.k.push_back(1.0);
            }
            return Construction(h);
        };
        p.instance_of = [](const Construction& c) { return json{{"n", c.as<HLInstance>().y.size()}}; };
        p.repair = repair_hl;
        p.kernels = real_kernels;
        reg.add(p);
    }
    {
        Problem p;
        p.id = "uncertainty";
        p.doc = "Minimize r^2, r the largest sign change of f(x) = p(2 pi x^2) exp(-pi x^2), p in the "
                "Hermite H_{4k} basis completed so that f(0) = 0.";
        p.kind = "eigen";
        p.minimize = true;
        p.default_instance = {{"m", 3}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& e = c.as<EigenCombo>();
            if (auto m = size_mismatch(inst, "m", e.coeffs.size()); !m.empty()) return infeasible(m);
            auto sc = largest_sign_change(e.coeffs, e.scan_limit, e.scan_points);
            if (!sc.ok) return infeasible(sc.why);
            return scored(sc.r * sc.r, {{"r", sc.r}});
        };
        p.certify = certify_uncertainty;
        p.random = [](const json& inst, Rng& rng) {
            long m = detail::inst_long(inst, "m", 3);
            EigenCombo e;
            double scale = 1;
            for (long i = 0; i < m; ++i) {
                e.coeffs.push_back(scale * rng.normal());
                scale *= 0.03;
            }
            e.scan_points = 20000;
            return Construction(e);
        };
        p.baseline = [](const json&) -> std::optional<Construction> {
            EigenCombo e;
            e.coeffs = {0.32925, -0.01159, -8.9216e-5};
            return Construction(e);
        };
        p.instance_of = [](const Construction& c) { return json{{"m", c.as<EigenCombo>().coeffs.size()}}; };
        p.kernels = real_kernels;
        reg.add(p);
    }
}

}  // namespace evo
