#pragma once
// One-dimensional evaluators: autocorrelation constants over step functions,
// minimum overlap, Hardy-Littlewood maximal intervals, uncertainty sign change.
// Templates run over double or Rational; Rational results are exact.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "evo/num.hpp"

namespace evo::analysis {

template <class T>
struct PiecewiseLinear {
    std::vector<Rational> x;
    std::vector<T> y;
};

template <class T>
T from_rational(const Rational& q) {
    if constexpr (std::is_same_v<T, double>) return q.get_d();
    else return T(q);
}

template <class T>
T abs_of(const T& v) {
    return v < 0 ? T(-v) : v;
}

// g(t_k) = delta * sum_{i+j=k-1} h_i h_j, k = 0..2n
template <class T>
std::vector<T> autoconv_values(const std::vector<T>& h, const T& delta) {
    const std::size_t n = h.size();
    std::vector<T> g(2 * n + 1, T(0));
    for (std::size_t i = 0; i < n; ++i) {
        if (h[i] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) g[i + j + 1] += h[i] * h[j];
    }
    for (auto& v : g) v *= delta;
    return g;
}

template <class T>
PiecewiseLinear<T> autoconv_nodes(const std::vector<T>& h, const Rational& a, const Rational& b) {
    const std::size_t n = h.size();
    Rational delta = (b - a) / Rational(static_cast<long>(n));
    PiecewiseLinear<T> out;
    out.y = autoconv_values(h, from_rational<T>(delta));
    for (std::size_t k = 0; k <= 2 * n; ++k) out.x.push_back(2 * a + Rational(static_cast<long>(k)) * delta);
    return out;
}

enum class Variant { c1_max_nonneg, c3_max_signed, c6_min_corr };

// nullopt when the normalizer vanishes
template <class T>
std::optional<T> autocorrelation(const std::vector<T>& h, const Rational& a, const Rational& b, Variant v) {
    const std::size_t n = h.size();
    if (n == 0) return std::nullopt;
    Rational dq = (b - a) / Rational(static_cast<long>(n));
    T delta = from_rational<T>(dq);
    if (v == Variant::c6_min_corr) {
        T l1(0);
        for (const auto& x : h) l1 += abs_of(x);
        l1 *= delta;
        if (l1 == 0) return std::nullopt;
        // corr(m delta) = delta * sum_i h_i h_{i+m}; linear between lattice points
        mpz_class floor_m;
        Rational inv = Rational(1) / dq;
        mpz_fdiv_q(floor_m.get_mpz_t(), inv.get_num_mpz_t(), inv.get_den_mpz_t());
        const long last = floor_m.fits_slong_p() ? floor_m.get_si() : static_cast<long>(n) + 1;
        auto corr = [&](long m) {
            T s(0);
            if (m < 0 || m >= static_cast<long>(n)) return s;
            for (std::size_t i = 0; i + static_cast<std::size_t>(m) < n; ++i) s += h[i] * h[i + static_cast<std::size_t>(m)];
            return T(s * delta);
        };
        T best = corr(0);
        const long stop = std::min<long>(last, static_cast<long>(n));
        for (long m = 1; m <= stop; ++m) best = std::min(best, corr(m));
        if (last >= static_cast<long>(n)) {
            best = std::min(best, T(0));
        } else {
            Rational frac = inv - Rational(floor_m);
            if (frac != 0) {
                T c0 = corr(last), c1 = corr(last + 1);
                T at_one = c0 + from_rational<T>(frac) * (c1 - c0);
                best = std::min(best, at_one);
            }
        }
        return best / (l1 * l1);
    }
    T integral(0);
    for (const auto& x : h) integral += x;
    integral *= delta;
    if (integral == 0) return std::nullopt;
    auto g = autoconv_values(h, delta);
    T m = v == Variant::c1_max_nonneg ? g[0] : abs_of(g[0]);
    for (const auto& y : g) m = std::max(m, v == Variant::c1_max_nonneg ? y : abs_of(y));
    return m / (integral * integral);
}

template <class T>
std::optional<T> autoconv_norm_ratio(const std::vector<T>& h, const Rational& a, const Rational& b) {
    const std::size_t n = h.size();
    Rational dq = (b - a) / Rational(static_cast<long>(n));
    T delta = from_rational<T>(dq);
    T integral(0);
    for (const auto& x : h) integral += x;
    integral *= delta;
    if (integral == 0) return std::nullopt;
    auto g = autoconv_values(h, delta);
    T l2(0), linf(0);
    for (std::size_t k = 0; k + 1 < g.size(); ++k) l2 += g[k] * g[k] + g[k] * g[k + 1] + g[k + 1] * g[k + 1];
    l2 = l2 * delta / T(3);
    for (const auto& y : g) linf = std::max(linf, y);
    T l1 = integral * integral;
    return l2 / (l1 * linf);
}

// max over lattice shifts of delta * sum_i f_i (1 - f_{i+m}), domain (-1, 1)
template <class T>
T min_overlap_value(const std::vector<T>& f) {
    const long n = static_cast<long>(f.size());
    T delta = T(2) / T(n);
    T best(0);
    for (long m = -n; m <= n; ++m) {
        T s(0);
        for (long i = 0; i < n; ++i) {
            long j = i + m;
            if (j < 0 || j >= n) continue;
            s += f[static_cast<std::size_t>(i)] * (T(1) - f[static_cast<std::size_t>(j)]);
        }
        best = std::max(best, T(s * delta));
    }
    return best;
}

template <class T>
T hl_maximal(const std::vector<T>& y, const std::vector<T>& k) {
    const std::size_t n = y.size();
    std::vector<T> prefix(n + 1, T(0));
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + k[i];
    std::vector<std::pair<T, T>> iv;
    iv.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            T s = prefix[j + 1] - prefix[i];
            T lo = y[j] - s, hi = y[i] + s;
            if (lo <= hi) iv.emplace_back(std::move(lo), std::move(hi));
        }
    std::sort(iv.begin(), iv.end());
    T total(0);
    std::size_t i = 0;
    while (i < iv.size()) {
        T lo = iv[i].first, hi = iv[i].second;
        ++i;
        while (i < iv.size() && iv[i].first <= hi) {
            if (iv[i].second > hi) hi = iv[i].second;
            ++i;
        }
        total += hi - lo;
    }
    return total / (T(2) * prefix[n]);
}

// physicist Hermite H_0..H_maxdeg at y
std::vector<double> hermite_values(double y, int maxdeg);

struct SignChange {
    bool ok = false;
    double r = 0;        // location in x units
    std::string why;
};

// Full coefficient list after appending the H_{4m} term that forces p(0) = 0,
// sign-normalized so p is positive at infinity. Coefficient i multiplies H_{4i}.
std::vector<double> completed_coeffs(const std::vector<double>& coeffs);
std::vector<Rational> completed_coeffs_exact(const std::vector<Rational>& coeffs);

SignChange largest_sign_change(const std::vector<double>& coeffs, double scan_limit, long scan_points);

}  // namespace evo::analysis
