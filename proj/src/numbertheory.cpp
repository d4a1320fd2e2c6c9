#include "evo/numbertheory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace evo::numbertheory {

bool is_prime(long n) {
    if (n < 2) return false;
    for (long q = 2; q * q <= n; ++q)
        if (n % q == 0) return false;
    return true;
}

bool is_squarefree(long m) {
    if (m < 1) return false;
    for (long q = 2; q * q <= m; ++q)
        if (m % (q * q) == 0) return false;
    return true;
}

long mod(long a, long m) {
    long r = a % m;
    return r < 0 ? r + m : r;
}

long inv_mod(long a, long p) {
    long g = p, x = 0, x1 = 1, r = mod(a, p);
    while (r) {
        long q = g / r;
        std::tie(g, r) = std::make_pair(r, g - q * r);
        std::tie(x, x1) = std::make_pair(x1, x - q * x1);
    }
    if (g != 1) throw std::invalid_argument("not invertible");
    return mod(x, p);
}

// ---------------------------------------------------------------- difference bases

long first_uncovered(const std::vector<long>& b, long n) {
    std::vector<char> hit(static_cast<std::size_t>(n) + 1, 0);
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            long d = b[j] - b[i];
            if (d >= 1 && d <= n) hit[static_cast<std::size_t>(d)] = 1;
        }
    for (long d = 1; d <= n; ++d)
        if (!hit[static_cast<std::size_t>(d)]) return d;
    return 0;
}

std::vector<long> min_difference_basis(long n) {
    if (n < 1 || n > 40) throw std::invalid_argument("unsupported: exhaustive difference-basis oracle needs 1 <= n <= 40");
    const std::uint64_t full = (1ULL << (n + 1)) - 2;  // bits 1..n
    std::vector<long> marks;
    // marks within [0, n] with 0 and n present; a shortest basis can be translated to start at 0
    // and any element past n contributes nothing to [1, n] that n itself does not
    std::function<bool(long, long, std::uint64_t)> go = [&](long next, long left, std::uint64_t cov) -> bool {
        if (left == 0) return cov == full;
        for (long x = next; x < n; ++x) {
            if (n - x < left) break;
            std::uint64_t c = cov;
            for (long y : marks) c |= 1ULL << std::labs(x - y);
            marks.push_back(x);
            if (go(x + 1, left - 1, c)) return true;
            marks.pop_back();
        }
        return false;
    };
    for (long k = 2;; ++k) {
        marks = {0, n};
        if (go(1, k - 2, 1ULL << n)) {
            std::sort(marks.begin(), marks.end());
            return marks;
        }
    }
}

// ---------------------------------------------------------------- Singer

namespace {

using Cubic = std::array<long, 3>;  // c0 + c1 x + c2 x^2

struct GF3 {
    long p;
    long a, b, c;  // modulus x^3 + a x^2 + b x + c

    Cubic mul(const Cubic& u, const Cubic& v) const {
        long t[5] = {0, 0, 0, 0, 0};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) t[i + j] = (t[i + j] + u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)]) % p;
        for (int k = 4; k >= 3; --k) {
            long h = t[k];
            t[k] = 0;
            t[k - 1] = mod(t[k - 1] - h * a, p);
            t[k - 2] = mod(t[k - 2] - h * b, p);
            t[k - 3] = mod(t[k - 3] - h * c, p);
        }
        return {t[0], t[1], t[2]};
    }
    Cubic pow(Cubic u, long e) const {
        Cubic r{1, 0, 0};
        for (; e; e >>= 1) {
            if (e & 1) r = mul(r, u);
            u = mul(u, u);
        }
        return r;
    }
};

std::vector<long> prime_factors(long n) {
    std::vector<long> f;
    for (long q = 2; q * q <= n; ++q)
        if (n % q == 0) {
            f.push_back(q);
            while (n % q == 0) n /= q;
        }
    if (n > 1) f.push_back(n);
    return f;
}

}  // namespace

std::vector<long> singer_difference_set(long p) {
    if (!is_prime(p) || p > 101) throw std::invalid_argument("singer_difference_set needs a prime p <= 101");
    GF3 F{p, 0, 0, 0};
    bool found = false;
    for (long a = 0; a < p && !found; ++a)
        for (long b = 0; b < p && !found; ++b)
            for (long c = 1; c < p && !found; ++c) {
                bool root = false;
                for (long x = 0; x < p && !root; ++x) root = ((x * x % p * x + a * x % p * x + b * x + c) % p) == 0;
                if (!root) {
                    F = {p, a, b, c};
                    found = true;
                }
            }
    if (!found) throw std::logic_error("no irreducible cubic");
    const long order = p * p * p - 1;
    const auto fac = prime_factors(order);
    Cubic g{};
    found = false;
    for (long s = 0; s < p * p * p && !found; ++s) {
        Cubic cand{s % p, (s / p) % p, s / (p * p)};
        if (cand == Cubic{0, 0, 0}) continue;
        bool prim = true;
        for (long r : fac) prim = prim && F.pow(cand, order / r) != Cubic{1, 0, 0};
        if (prim) {
            g = cand;
            found = true;
        }
    }
    if (!found) throw std::logic_error("no primitive element");
    const long q = p * p + p + 1;
    std::vector<long> d;
    Cubic cur{1, 0, 0};
    for (long i = 0; i < q; ++i) {
        if (cur[2] == 0) d.push_back(i);
        cur = F.mul(cur, g);
    }
    return d;
}

bool is_perfect_difference_set(const std::vector<long>& d, long m) {
    std::vector<int> hits(static_cast<std::size_t>(m), 0);
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j)
            if (i != j) ++hits[static_cast<std::size_t>(mod(d[i] - d[j], m))];
    for (long r = 1; r < m; ++r)
        if (hits[static_cast<std::size_t>(r)] != 1) return false;
    return hits[0] == 0;
}

// ---------------------------------------------------------------- finite fields

long FFIndex::encode(const std::vector<int>& x) const {
    long c = 0;
    for (int i = d - 1; i >= 0; --i) c = c * p + x[static_cast<std::size_t>(i)];
    return c;
}

std::vector<int> FFIndex::decode(long code) const {
    std::vector<int> x(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        x[static_cast<std::size_t>(i)] = static_cast<int>(code % p);
        code /= p;
    }
    return x;
}

namespace {

constexpr long kMaxField = 1000000;

FFIndex index_for(const FFSet& s) {
    long size = 1;
    for (int i = 0; i < s.d; ++i) {
        size *= s.p;
        if (size > kMaxField) throw std::invalid_argument("unsupported: p^d above 10^6");
    }
    return {s.p, s.d, size};
}

std::vector<char> membership(const FFSet& s, const FFIndex& ix) {
    std::vector<char> in(static_cast<std::size_t>(ix.size), 0);
    for (const auto& x : s.points) in[static_cast<std::size_t>(ix.encode(x))] = 1;
    return in;
}

// code of x + t*dir, one step at a time
struct LineWalker {
    const FFIndex& ix;
    std::vector<int> cur;
    const std::vector<int>& dir;
    long step() {
        for (int i = 0; i < ix.d; ++i) cur[static_cast<std::size_t>(i)] = (cur[static_cast<std::size_t>(i)] + dir[static_cast<std::size_t>(i)]) % ix.p;
        return ix.encode(cur);
    }
};

}  // namespace

std::vector<std::vector<int>> directions(int p, int d) {
    std::vector<std::vector<int>> out;
    for (int lead = 0; lead < d; ++lead) {
        // coordinates after the leading 1 range freely
        long count = 1;
        for (int i = lead + 1; i < d; ++i) count *= p;
        for (long c = 0; c < count; ++c) {
            std::vector<int> v(static_cast<std::size_t>(d), 0);
            v[static_cast<std::size_t>(lead)] = 1;
            long r = c;
            for (int i = lead + 1; i < d; ++i) {
                v[static_cast<std::size_t>(i)] = static_cast<int>(r % p);
                r /= p;
            }
            out.push_back(std::move(v));
        }
    }
    return out;
}

std::optional<std::vector<int>> kakeya_gap(const FFSet& K) {
    const auto ix = index_for(K);
    const auto in = membership(K, ix);
    std::vector<long> codes;
    for (long c = 0; c < ix.size; ++c)
        if (in[static_cast<std::size_t>(c)]) codes.push_back(c);
    std::vector<std::uint32_t> stamp(static_cast<std::size_t>(ix.size), 0);
    std::uint32_t round = 0;
    for (const auto& dir : directions(K.p, K.d)) {
        ++round;
        bool ok = false;
        for (long c : codes) {
            if (stamp[static_cast<std::size_t>(c)] == round) continue;
            LineWalker w{ix, ix.decode(c), dir};
            bool full = true;
            long cur = c;
            for (int t = 0; t < K.p; ++t) {
                stamp[static_cast<std::size_t>(cur)] = round;
                full = full && in[static_cast<std::size_t>(cur)];
                cur = w.step();
            }
            if (full) {
                ok = true;
                break;
            }
        }
        if (!ok) return dir;
    }
    return std::nullopt;
}

bool is_kakeya(const FFSet& K) { return !kakeya_gap(K); }

std::optional<std::vector<int>> nikodym_gap(const FFSet& N) {
    const auto ix = index_for(N);
    const auto in = membership(N, ix);
    const auto dirs = directions(N.p, N.d);
    for (long c = 0; c < ix.size; ++c) {
        const auto x = ix.decode(c);
        bool ok = false;
        for (const auto& dir : dirs) {
            LineWalker w{ix, x, dir};
            bool rest = true;
            for (int t = 1; t < N.p && rest; ++t) rest = in[static_cast<std::size_t>(w.step())];
            if (rest) {
                ok = true;
                break;
            }
        }
        if (!ok) return x;
    }
    return std::nullopt;
}

bool is_nikodym(const FFSet& N) { return !nikodym_gap(N); }

FFSet ff_kakeya_d3(int p) {
    if (!is_prime(p) || p % 4 != 1) throw std::invalid_argument("the d=3 construction needs a prime p = 1 mod 4");
    std::set<long> S;
    for (long x = 0; x < p; ++x) S.insert(x * x % p);
    const long g = (p - 1) / 4, half = inv_mod(2, p);
    FFIndex ix{p, 3, static_cast<long>(p) * p * p};
    std::set<long> pts;
    auto add = [&](long a, long b, long c) {
        pts.insert(ix.encode({static_cast<int>(mod(a, p)), static_cast<int>(mod(b, p)), static_cast<int>(mod(c, p))}));
    };
    for (long x = 0; x < p; ++x)
        for (long q1 : S)
            for (long q2 : S) add(x, (q1 + q2) * half - x * x - g, (q1 - q2) * half);
    for (long y = 0; y < p; ++y)
        for (long z = 0; z < p; ++z)
            if (S.count(mod(y + z * z, p))) add(0, y, z);
    for (long y = 0; y < p; ++y) add(0, y, 0);
    FFSet out;
    out.p = p;
    out.d = 3;
    for (long c : pts) out.points.push_back(ix.decode(c));
    return out;
}

Rational ff_kakeya_d3_size(long p) {
    Rational q(p);
    return q * q * q / 4 + Rational(7) * q * q / 8 - Rational(1, 8);
}

// ---------------------------------------------------------------- Furstenberg-Sarkozy

namespace {

std::vector<char> power_table(long m, long k) {
    std::vector<char> is_pow(static_cast<std::size_t>(m), 0);
    for (long x = 0; x < m; ++x) {
        long r = 1;
        for (long i = 0; i < k; ++i) r = r * x % m;
        is_pow[static_cast<std::size_t>(r)] = 1;
    }
    is_pow[0] = 0;  // distinct residues never differ by 0
    return is_pow;
}

}  // namespace

std::optional<std::pair<long, long>> power_difference(const std::vector<long>& a, long m, long k) {
    const auto P = power_table(m, k);
    for (long x : a)
        for (long y : a)
            if (x != y && P[static_cast<std::size_t>(mod(x - y, m))]) return std::make_pair(x, y);
    return std::nullopt;
}

std::vector<long> fs_search(long m, long k, long target, long node_limit) {
    const auto P = power_table(m, k);
    auto clash = [&](long x, long y) { return P[static_cast<std::size_t>(mod(x - y, m))] || P[static_cast<std::size_t>(mod(y - x, m))]; };
    std::vector<long> best{0}, cur{0};
    long nodes = 0;
    std::function<bool(const std::vector<long>&)> go = [&](const std::vector<long>& cands) -> bool {
        if (cur.size() > best.size()) best = cur;
        if (static_cast<long>(best.size()) >= target) return true;
        if (cur.size() + cands.size() <= best.size() || ++nodes > node_limit) return false;
        for (std::size_t i = 0; i < cands.size(); ++i) {
            std::vector<long> next;
            for (std::size_t j = i + 1; j < cands.size(); ++j)
                if (!clash(cands[i], cands[j])) next.push_back(cands[j]);
            cur.push_back(cands[i]);
            bool done = go(next);
            cur.pop_back();
            if (done) return true;
            if (nodes > node_limit) return false;
        }
        return false;
    };
    std::vector<long> start;
    for (long x = 1; x < m; ++x)
        if (!clash(0, x)) start.push_back(x);
    go(start);
    return best;
}

// ---------------------------------------------------------------- entropy

Slope parse_slope(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "infinity" || s == "∞") return std::nullopt;
    }
    return rational_from_json(j);
}

namespace {

template <class T>
std::map<Rational, T> grouped(const JointPMF& pmf, const Slope& r) {
    std::map<Rational, T> g;
    for (std::size_t i = 0; i < pmf.support.size(); ++i) {
        if (pmf.probs[i] == 0) continue;
        const auto& [x, y] = pmf.support[i];
        Rational v = r ? Rational(x + *r * y) : y;
        auto it = g.find(v);
        if (it == g.end()) g.emplace(v, T(pmf.probs[i]));
        else it->second += T(pmf.probs[i]);
    }
    return g;
}

}  // namespace

double projection_entropy(const JointPMF& pmf, const Slope& r) {
    double h = 0;
    for (const auto& [v, q] : grouped<double>(pmf, r))
        if (q > 0) h -= q * std::log2(q);
    return h;
}

Interval projection_entropy_interval(const JointPMF& pmf, const Slope& r) {
    Interval h(0L);
    for (const auto& [v, q] : grouped<Interval>(pmf, r)) h -= q * log2(q);
    return h;
}

}  // namespace evo::numbertheory
