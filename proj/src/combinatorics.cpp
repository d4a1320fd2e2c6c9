#include "evo/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>

namespace evo::combinatorics {

// ---------------------------------------------------------------- EDP

EdpPrefix edp_prefix(const std::vector<int>& a, long D) {
    const long N = static_cast<long>(a.size());
    long first_bad = N + 1;
    for (long d = 1; d <= N; ++d) {
        long s = 0;
        for (long m = d; m <= N && m < first_bad; m += d) {
            s += a[static_cast<std::size_t>(m - 1)];
            if (std::labs(s) > D) {
                first_bad = m;
                break;
            }
        }
    }
    EdpPrefix r;
    r.length = first_bad - 1;
    if (first_bad > N) return r;
    const long m = first_bad;
    for (long d = 1; d <= m; ++d) {
        if (m % d) continue;
        long s = 0;
        for (long k = d; k <= m; k += d) s += a[static_cast<std::size_t>(k - 1)];
        ++r.total;
        if (std::labs(s) <= D) ++r.ok;
    }
    return r;
}

long edp_longest(long D) {
    if (D < 0) throw std::invalid_argument("D must be non-negative");
    if (D == 0) return 0;
    if (D > 1) throw std::invalid_argument("unsupported: exhaustive EDP search only for D <= 1");
    const long cap = 4096;
    std::vector<long> sums(static_cast<std::size_t>(cap) + 1, 0);
    long best = 0;
    // a_1 = +1 by symmetry
    std::function<void(long)> go = [&](long m) {
        best = std::max(best, m - 1);
        if (m > cap) return;
        for (int sgn : {1, -1}) {
            if (m == 1 && sgn < 0) continue;
            bool ok = true;
            long d = 1;
            for (; d <= m; ++d) {
                if (m % d) continue;
                sums[static_cast<std::size_t>(d)] += sgn;
                if (std::labs(sums[static_cast<std::size_t>(d)]) > D) {
                    ok = false;
                    ++d;
                    break;
                }
            }
            if (ok) go(m + 1);
            for (long e = 1; e < d; ++e)
                if (m % e == 0) sums[static_cast<std::size_t>(e)] -= sgn;
        }
    };
    go(1);
    return best;
}

// ---------------------------------------------------------------- ring loading

double ring_loading(const std::vector<double>& u, const std::vector<double>& v) {
    const std::size_t n = u.size();
    if (n > 24) throw std::invalid_argument("unsupported: ring loading needs n <= 24");
    if (n == 0) return 0;
    double best = INFINITY;
    std::vector<double> z(n);
    for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = (mask >> i) & 1 ? -u[i] : v[i];
            total += z[i];
        }
        double pre = 0, worst = 0;
        for (std::size_t k = 0; k < n && worst < best; ++k) {
            pre += z[k];
            worst = std::max(worst, std::fabs(2 * pre - total));
        }
        best = std::min(best, worst);
    }
    return best;
}

Rational ring_loading(const std::vector<Rational>& u, const std::vector<Rational>& v) {
    const std::size_t n = u.size();
    if (n > 24) throw std::invalid_argument("unsupported: ring loading needs n <= 24");
    if (n == 0) return 0;
    mpz_class L = 1;
    for (const auto* vec : {&u, &v})
        for (const auto& q : *vec) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), q.get_den_mpz_t());
    std::vector<mpz_class> U, V;
    mpz_class bound = 0;
    for (std::size_t i = 0; i < n; ++i) {
        U.push_back(mpz_class(u[i] * L));
        V.push_back(mpz_class(v[i] * L));
        bound += abs(U.back()) + abs(V.back());
    }
    if (bound < (mpz_class(1) << 60)) {
        std::vector<long> Ul, Vl, z(n);
        for (std::size_t i = 0; i < n; ++i) {
            Ul.push_back(U[i].get_si());
            Vl.push_back(V[i].get_si());
        }
        long best = -1;
        for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
            long total = 0;
            for (std::size_t i = 0; i < n; ++i) {
                z[i] = (mask >> i) & 1 ? -Ul[i] : Vl[i];
                total += z[i];
            }
            long pre = 0, worst = 0;
            for (std::size_t k = 0; k < n && (best < 0 || worst < best); ++k) {
                pre += z[k];
                worst = std::max(worst, std::labs(2 * pre - total));
            }
            if (best < 0 || worst < best) best = worst;
        }
        Rational q(mpz_class(best), L);
        q.canonicalize();
        return q;
    }
    std::optional<Rational> best;
    for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
        std::vector<Rational> z(n);
        Rational total(0);
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = (mask >> i) & 1 ? Rational(-u[i]) : v[i];
            total += z[i];
        }
        Rational pre(0), worst(0);
        for (std::size_t k = 0; k < n; ++k) {
            pre += z[k];
            worst = std::max(worst, Rational(abs(2 * pre - total)));
        }
        if (!best || worst < *best) best = worst;
    }
    return *best;
}

// ---------------------------------------------------------------- sums

std::size_t sumset_size(const std::vector<long>& a) {
    std::vector<long> s;
    s.reserve(a.size() * (a.size() + 1) / 2);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i; j < a.size(); ++j) s.push_back(a[i] + a[j]);
    std::sort(s.begin(), s.end());
    return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
}

std::size_t diffset_size(const std::vector<long>& a) {
    std::vector<long> s;
    s.reserve(a.size() * a.size());
    for (long x : a)
        for (long y : a) s.push_back(x - y);
    std::sort(s.begin(), s.end());
    return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
}

// ---------------------------------------------------------------- isosceles

long isosceles_count(const std::vector<std::array<int, 2>>& cells) {
    long v = 0;
    std::vector<long> d;
    for (std::size_t b = 0; b < cells.size(); ++b) {
        d.clear();
        for (std::size_t a = 0; a < cells.size(); ++a) {
            if (a == b) continue;
            long dx = cells[a][0] - cells[b][0], dy = cells[a][1] - cells[b][1];
            d.push_back(dx * dx + dy * dy);
        }
        std::sort(d.begin(), d.end());
        for (std::size_t i = 0; i < d.size();) {
            std::size_t j = i;
            while (j < d.size() && d[j] == d[i]) ++j;
            long c = static_cast<long>(j - i);
            v += c * (c - 1) / 2;
            i = j;
        }
    }
    return v;
}

// ---------------------------------------------------------------- IMO tiling

TilingScore imo_tiling(const Tiling& t) {
    TilingScore s;
    const long n = t.n;
    std::vector<char> occ(static_cast<std::size_t>(n * n), 0);
    std::vector<long> row(static_cast<std::size_t>(n), n), col(static_cast<std::size_t>(n), n);
    for (const auto& tile : t.tiles) {
        const long r1 = tile[0], r2 = tile[1], c1 = tile[2], c2 = tile[3];
        if (r1 < 1 || c1 < 1 || r2 > n || c2 > n || r1 > r2 || c1 > c2) {
            s.error = "tile out of bounds";
            return s;
        }
        for (long r = r1; r <= r2; ++r)
            for (long c = c1; c <= c2; ++c) {
                auto& o = occ[static_cast<std::size_t>((r - 1) * n + (c - 1))];
                if (o) {
                    s.error = "tiles overlap";
                    return s;
                }
                o = 1;
                --row[static_cast<std::size_t>(r - 1)];
                --col[static_cast<std::size_t>(c - 1)];
            }
    }
    s.tiles = static_cast<long>(t.tiles.size());
    for (long i = 0; i < n; ++i) s.penalty += std::labs(1 - row[static_cast<std::size_t>(i)]) + std::labs(1 - col[static_cast<std::size_t>(i)]);
    return s;
}

long imo_formula(long n) {
    long x = 0;
    while (x * x < 4 * n) ++x;
    return n - 3 + x;
}

long imo_min_tiles(int n) {
    if (n < 1 || n > 4) throw std::invalid_argument("unsupported: exhaustive tiling oracle needs 1 <= n <= 4");
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    long best = n * n;
    do {
        std::vector<char> free(static_cast<std::size_t>(n * n), 1);
        for (int r = 0; r < n; ++r) free[static_cast<std::size_t>(r * n + perm[static_cast<std::size_t>(r)])] = 0;
        std::function<void(long)> go = [&](long used) {
            if (used >= best) return;
            int first = -1;
            for (int i = 0; i < n * n; ++i)
                if (free[static_cast<std::size_t>(i)]) {
                    first = i;
                    break;
                }
            if (first < 0) {
                best = used;
                return;
            }
            const int r0 = first / n, c0 = first % n;
            int wmax = 0;
            while (c0 + wmax < n && free[static_cast<std::size_t>(r0 * n + c0 + wmax)]) ++wmax;
            for (int w = 1; w <= wmax; ++w) {
                for (int h = 1; r0 + h <= n; ++h) {
                    bool ok = true;
                    for (int c = c0; c < c0 + w; ++c) ok = ok && free[static_cast<std::size_t>((r0 + h - 1) * n + c)];
                    if (!ok) break;
                    for (int r = r0; r < r0 + h; ++r)
                        for (int c = c0; c < c0 + w; ++c) free[static_cast<std::size_t>(r * n + c)] = 0;
                    go(used + 1);
                    for (int r = r0; r < r0 + h; ++r)
                        for (int c = c0; c < c0 + w; ++c) free[static_cast<std::size_t>(r * n + c)] = 1;
                }
            }
        };
        go(0);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// ---------------------------------------------------------------- block stacking

namespace {

template <class T>
T stacking_impl(const std::vector<T>& positions, const T& tol) {
    const std::size_t n = positions.size();
    if (n == 0) return T(0);
    if (n == 1) {
        if (positions[0] - T(0.5) >= T(0) - tol) return T(-1);
        return positions[0];
    }
    T sum_all(0), sum_all_avg(0);
    for (std::size_t k = 0; k < n; ++k) {
        sum_all += positions[k] - T(0.5);
        sum_all_avg = sum_all / T(static_cast<long>(n));
    }
    if (sum_all_avg >= T(0) - tol) return T(-1);
    T upper_sum = positions[n - 1] - T(0.5);
    T upper_count(1);
    for (std::size_t i = n - 1; i-- > 0;) {
        T upper_sum_avg = upper_sum / upper_count;
        T lb = positions[i] - T(1);
        T ub = positions[i];
        if (!(lb - tol <= upper_sum_avg && upper_sum_avg <= ub + tol)) return T(-1);
        upper_sum += positions[i] - T(0.5);
        upper_count += T(1);
    }
    return positions[n - 1];
}

}  // namespace

double block_stacking(const std::vector<double>& positions) { return stacking_impl(positions, 1e-9); }
Rational block_stacking(const std::vector<Rational>& positions) {
    return stacking_impl(positions, Rational(1, 1000000000));
}

std::vector<double> harmonic_stack(int n) {
    std::vector<double> H(static_cast<std::size_t>(n) + 1, 0.0);
    for (int k = 1; k <= n; ++k) H[static_cast<std::size_t>(k)] = H[static_cast<std::size_t>(k) - 1] + 1.0 / k;
    std::vector<double> p;
    for (int k = 0; k < n; ++k) p.push_back(0.5 * (H[static_cast<std::size_t>(n)] - H[static_cast<std::size_t>(n - k - 1)]) - 2e-9);
    return p;
}

// ---------------------------------------------------------------- Turan

std::optional<std::array<int, 4>> blowup_k4(const std::vector<std::array<int, 3>>& edges, const std::vector<bool>& alive) {
    std::set<std::array<int, 3>> E(edges.begin(), edges.end());
    auto has = [&](int a, int b, int c) {
        std::array<int, 3> t{a, b, c};
        std::sort(t.begin(), t.end());
        return E.count(t) > 0;
    };
    auto all4 = [&](const std::array<int, 4>& q) {
        for (int drop = 0; drop < 4; ++drop) {
            int t[3], k = 0;
            for (int i = 0; i < 4; ++i)
                if (i != drop) t[k++] = q[static_cast<std::size_t>(i)];
            if (!has(t[0], t[1], t[2])) return false;
        }
        return true;
    };
    std::vector<int> v;
    for (std::size_t i = 0; i < alive.size(); ++i)
        if (alive[i]) v.push_back(static_cast<int>(i));
    const std::size_t m = v.size();
    // multiplicities (1,1,1,1), (2,1,1), (2,2)
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            if (b == a) continue;
            if (b > a && all4({v[a], v[a], v[b], v[b]})) return std::array<int, 4>{v[a], v[a], v[b], v[b]};
            for (std::size_t c = b + 1; c < m; ++c) {
                if (c == a) continue;
                if (all4({v[a], v[a], v[b], v[c]})) return std::array<int, 4>{v[a], v[a], v[b], v[c]};
            }
        }
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
            for (std::size_t c = b + 1; c < m; ++c)
                for (std::size_t d = c + 1; d < m; ++d)
                    if (all4({v[a], v[b], v[c], v[d]})) return std::array<int, 4>{v[a], v[b], v[c], v[d]};
    return std::nullopt;
}

// ---------------------------------------------------------------- Golay

GolayTarget parse_golay_target(const std::string& s) {
    if (s == "flat_min") return GolayTarget::flat_min;
    if (s == "flat_max") return GolayTarget::flat_max;
    if (s == "merit") return GolayTarget::merit;
    throw std::invalid_argument("golay target must be flat_min, flat_max or merit");
}

namespace {

void fft(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2 * M_PI / static_cast<double>(len);
        for (std::size_t i = 0; i < n; i += len)
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> w = std::polar(1.0, ang * static_cast<double>(k));
                auto u = a[i + k], v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
    }
}

}  // namespace

std::pair<double, double> golay_flatness(const std::vector<int>& a, long K) {
    if (K < 2 || (K & (K - 1))) throw std::invalid_argument("mesh size must be a power of two");
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(K));
    for (std::size_t j = 0; j < a.size(); ++j) buf[j % static_cast<std::size_t>(K)] += a[j];
    fft(buf);
    double lo = INFINITY, hi = 0;
    for (auto& z : buf) {
        double m = std::abs(z);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    const double s = std::sqrt(static_cast<double>(a.size()));
    return {lo / s, hi / s};
}

std::vector<long> autocorrelations(const std::vector<int>& a) {
    std::vector<long> c;
    for (std::size_t k = 1; k < a.size(); ++k) {
        long s = 0;
        for (std::size_t j = 0; j + k < a.size(); ++j) s += a[j] * a[j + k];
        c.push_back(s);
    }
    return c;
}

Rational golay_merit(const std::vector<int>& a) {
    long e = 0;
    for (long c : autocorrelations(a)) e += c * c;
    if (e == 0) throw std::invalid_argument("merit needs at least two coefficients");
    const long n1 = static_cast<long>(a.size());
    return ratio(n1 * n1, 2 * e);
}

}  // namespace evo::combinatorics
