#include "evo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evo::geometry {

// ---------------------------------------------------------------- sphere sets

std::vector<double> normalized(const std::vector<double>& coords, int dim) {
    std::vector<double> out(coords);
    const auto d = static_cast<std::size_t>(dim);
    for (std::size_t i = 0; i + d <= out.size(); i += d) {
        double s = 0;
        for (std::size_t c = 0; c < d; ++c) s += out[i + c] * out[i + c];
        s = std::sqrt(s);
        // already unit: leave the bits alone so projecting twice equals once
        if (s == 0 || std::fabs(s - 1) <= 1e-13) continue;
        for (std::size_t c = 0; c < d; ++c) out[i + c] /= s;
    }
    return out;
}

namespace {

double dist(const double* a, const double* b, int dim) {
    double s = 0;
    for (int c = 0; c < dim; ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
    return std::sqrt(s);
}

double dot(const double* a, const double* b, int dim) {
    double s = 0;
    for (int c = 0; c < dim; ++c) s += a[c] * b[c];
    return s;
}

long binom(long n, long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    long r = 1;
    for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// normalised zonal values P_1..P_t at x for sphere dimension d in {1, 2}
template <class T>
std::vector<T> zonal(const T& x, int d, int t) {
    std::vector<T> p;
    p.reserve(static_cast<std::size_t>(t) + 1);
    p.push_back(T(1));
    p.push_back(x);
    for (int k = 1; k < t; ++k) {
        if (d == 1) {
            p.push_back(T(2) * x * p[static_cast<std::size_t>(k)] - p[static_cast<std::size_t>(k) - 1]);
        } else {
            // Legendre: (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}
            p.push_back((T(2 * k + 1) * x * p[static_cast<std::size_t>(k)] - T(k) * p[static_cast<std::size_t>(k) - 1]) /
                        T(k + 1));
        }
    }
    return p;
}

void check_design_dim(int dim) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("spherical designs support sphere dimensions 1 and 2 only");
}

// exact dot products and squared norms
struct ExactGram {
    std::vector<Rational> sq;
    std::vector<Interval> norm;
    std::size_t n = 0;
    const std::vector<Rational>* c = nullptr;
    int dim = 0;

    ExactGram(const std::vector<Rational>& coords, int d) : n(coords.size() / static_cast<std::size_t>(d)), c(&coords), dim(d) {
        for (std::size_t i = 0; i < n; ++i) {
            Rational s(0);
            for (int k = 0; k < d; ++k) s += coords[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)] *
                                             coords[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)];
            if (s == 0) throw std::runtime_error("zero vector cannot be normalised");
            sq.push_back(s);
            norm.push_back(sqrt(Interval(s)));
        }
    }
    Rational dot(std::size_t i, std::size_t j) const {
        Rational s(0);
        for (int k = 0; k < dim; ++k)
            s += (*c)[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)] *
                 (*c)[j * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)];
        return s;
    }
    // cosine of the angle between points i and j
    Interval cosine(std::size_t i, std::size_t j) const {
        if (i == j) return Interval(1L);
        Rational d = dot(i, j);
        // when the norm product is a rational square divide exactly
        Rational prod = sq[i] * sq[j];
        if (mpz_perfect_square_p(prod.get_num_mpz_t()) && mpz_perfect_square_p(prod.get_den_mpz_t())) {
            mpz_class a, b;
            mpz_sqrt(a.get_mpz_t(), prod.get_num_mpz_t());
            mpz_sqrt(b.get_mpz_t(), prod.get_den_mpz_t());
            return Interval(Rational(d * b / a));
        }
        return Interval(d) / (norm[i] * norm[j]);
    }
    // |u_i - u_j|^2 = 2 - 2 cos, clipped at 0
    Interval unit_dist2(std::size_t i, std::size_t j) const {
        Interval r = Interval(2L) - Interval(2L) * cosine(i, j);
        return max(r, Interval(0L));
    }
};

}  // namespace

long design_multiplicity(int d, int k) {
    if (d == 1) return 2;
    return binom(d + k, k) - binom(d + k - 2, k - 2);
}

double kissing_penalty(const std::vector<double>& coords, int dim) {
    auto u = normalized(coords, dim);
    const std::size_t n = u.size() / static_cast<std::size_t>(dim);
    double pen = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = 2 * dist(&u[i * static_cast<std::size_t>(dim)], &u[j * static_cast<std::size_t>(dim)], dim);
            pen += std::max(0.0, 2 - d);
        }
    return pen;
}

std::optional<double> thomson_energy(const std::vector<double>& coords, int dim) {
    auto u = normalized(coords, dim);
    const std::size_t n = u.size() / static_cast<std::size_t>(dim);
    double e = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = dist(&u[i * static_cast<std::size_t>(dim)], &u[j * static_cast<std::size_t>(dim)], dim);
            if (!(d > 1e-12)) return std::nullopt;
            e += 1 / d;
        }
    return e;
}

double tammes_min_distance(const std::vector<double>& coords, int dim) {
    auto u = normalized(coords, dim);
    const std::size_t n = u.size() / static_cast<std::size_t>(dim);
    double m = INFINITY;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            m = std::min(m, dist(&u[i * static_cast<std::size_t>(dim)], &u[j * static_cast<std::size_t>(dim)], dim));
    return m;
}

double spherical_design_error(const std::vector<double>& coords, int dim, int t) {
    check_design_dim(dim);
    const int d = dim - 1;
    auto u = normalized(coords, dim);
    const std::size_t n = u.size() / static_cast<std::size_t>(dim);
    std::vector<double> mult;
    for (int k = 0; k <= t; ++k) mult.push_back(static_cast<double>(design_multiplicity(d, k)));
    double err = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double x = std::clamp(dot(&u[i * static_cast<std::size_t>(dim)], &u[j * static_cast<std::size_t>(dim)], dim), -1.0, 1.0);
            auto p = zonal(x, d, t);
            for (int k = 1; k <= t; ++k) err += mult[static_cast<std::size_t>(k)] * p[static_cast<std::size_t>(k)];
        }
    return err;
}

Interval kissing_penalty(const std::vector<Rational>& coords, int dim) {
    ExactGram g(coords, dim);
    Interval pen(0L);
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = i + 1; j < g.n; ++j) {
            Interval d = Interval(2L) * sqrt(g.unit_dist2(i, j));
            pen += max(Interval(0L), Interval(2L) - d);
        }
    return pen;
}

Interval thomson_energy(const std::vector<Rational>& coords, int dim) {
    ExactGram g(coords, dim);
    Interval e(0L);
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = i + 1; j < g.n; ++j) {
            Interval d2 = g.unit_dist2(i, j);
            if (!d2.certainly_pos()) throw std::runtime_error("coincident points");
            e += Interval(1L) / sqrt(d2);
        }
    return e;
}

Interval tammes_min_distance(const std::vector<Rational>& coords, int dim) {
    ExactGram g(coords, dim);
    if (g.n < 2) throw std::runtime_error("need at least two points");
    std::optional<Interval> m;
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = i + 1; j < g.n; ++j) {
            Interval d = sqrt(g.unit_dist2(i, j));
            m = m ? min(*m, d) : d;
        }
    return *m;
}

Interval spherical_design_error(const std::vector<Rational>& coords, int dim, int t) {
    check_design_dim(dim);
    const int d = dim - 1;
    ExactGram g(coords, dim);
    Interval err(0L);
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j) {
            Interval x = g.cosine(i, j);
            x = max(min(x, Interval(1L)), Interval(-1L));
            auto p = zonal(x, d, t);
            for (int k = 1; k <= t; ++k) err += Interval(design_multiplicity(d, k)) * p[static_cast<std::size_t>(k)];
        }
    return err;
}

// ---------------------------------------------------------------- kakeya

namespace {

template <class T>
struct Line {
    T a, b;  // a + b y
    T at(const T& y) const { return a + b * y; }
};

template <class T>
void endpoint_lines(const std::vector<T>& x, KakeyaShape shape, std::vector<Line<T>>& L, std::vector<Line<T>>& R) {
    const long n = static_cast<long>(x.size());
    const T inv = T(1) / T(n);
    for (long j = 1; j <= n; ++j) {
        const T& xj = x[static_cast<std::size_t>(j - 1)];
        L.push_back({xj, T(j) * inv});
        R.push_back({xj + inv, shape == KakeyaShape::triangle ? T(j - 1) * inv : T(j) * inv});
    }
}

template <class T>
void add_crossing(const Line<T>& p, const Line<T>& q, std::vector<T>& ev) {
    if (p.b == q.b) return;
    T y = (q.a - p.a) / (p.b - q.b);
    if (y > 0 && y < 1) ev.push_back(y);
}

template <class T>
void finish_events(std::vector<T>& ev) {
    ev.push_back(T(0));
    ev.push_back(T(1));
    std::sort(ev.begin(), ev.end());
    std::vector<T> out;
    for (auto& y : ev) {
        if constexpr (std::is_same_v<T, double>) {
            if (!out.empty() && y - out.back() <= 1e-14) continue;
        } else {
            if (!out.empty() && y == out.back()) continue;
        }
        out.push_back(y);
    }
    if constexpr (std::is_same_v<T, double>) out.back() = 1.0;
    ev = std::move(out);
}

template <class T>
T union_length(const std::vector<Line<T>>& L, const std::vector<Line<T>>& R, const T& y,
               std::vector<std::pair<T, T>>& buf) {
    buf.clear();
    for (std::size_t j = 0; j < L.size(); ++j) {
        T lo = L[j].at(y), hi = R[j].at(y);
        if (hi > lo) buf.emplace_back(std::move(lo), std::move(hi));
    }
    std::sort(buf.begin(), buf.end());
    T total(0);
    std::size_t i = 0;
    while (i < buf.size()) {
        T lo = buf[i].first, hi = buf[i].second;
        ++i;
        while (i < buf.size() && buf[i].first <= hi) {
            if (buf[i].second > hi) hi = buf[i].second;
            ++i;
        }
        total += hi - lo;
    }
    return total;
}

template <class T>
T union_area_impl(const std::vector<T>& x, KakeyaShape shape) {
    std::vector<Line<T>> L, R;
    endpoint_lines(x, shape, L, R);
    std::vector<Line<T>> all(L);
    all.insert(all.end(), R.begin(), R.end());
    std::vector<T> ev;
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) add_crossing(all[i], all[j], ev);
    finish_events(ev);
    std::vector<std::pair<T, T>> buf;
    T area(0);
    for (std::size_t s = 0; s + 1 < ev.size(); ++s) {
        T mid = (ev[s] + ev[s + 1]) / T(2);
        area += union_length(L, R, mid, buf) * (ev[s + 1] - ev[s]);
    }
    return area;
}

template <class T>
T pair_intersection(const Line<T>& li, const Line<T>& ri, const Line<T>& lj, const Line<T>& rj) {
    std::vector<T> ev;
    const Line<T>* ls[4] = {&li, &ri, &lj, &rj};
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) add_crossing(*ls[a], *ls[b], ev);
    finish_events(ev);
    T total(0);
    for (std::size_t s = 0; s + 1 < ev.size(); ++s) {
        T mid = (ev[s] + ev[s + 1]) / T(2);
        T lo = std::max(li.at(mid), lj.at(mid));
        T hi = std::min(ri.at(mid), rj.at(mid));
        if (hi > lo) total += (hi - lo) * (ev[s + 1] - ev[s]);
    }
    return total;
}

template <class T>
KakeyaMeasures<T> measures_impl(const std::vector<T>& x, KakeyaShape shape) {
    std::vector<Line<T>> L, R;
    endpoint_lines(x, shape, L, R);
    const std::size_t n = x.size();
    KakeyaMeasures<T> m{union_area_impl(x, shape), T(0), T(0)};
    std::vector<T> single(n);
    for (std::size_t i = 0; i < n; ++i) {
        // widths are linear in y, exact by the trapezoid rule
        single[i] = ((R[i].at(T(0)) - L[i].at(T(0))) + (R[i].at(T(1)) - L[i].at(T(1)))) / T(2);
        m.sum_areas += single[i];
    }
    T cross(0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) cross += pair_intersection(L[i], R[i], L[j], R[j]);
    m.sum_pair_intersections = m.sum_areas + T(2) * cross;
    return m;
}

template <class T>
std::vector<T> keich_impl(int k) {
    if (k < 1 || k > 24) throw std::invalid_argument("keich needs 1 <= k <= 24");
    const long n = 1L << k;
    std::vector<T> x(static_cast<std::size_t>(n), T(0));
    for (long i = 0; i < n; ++i) {
        // i/n = sum_j eps_j 2^-j: eps_j is bit (k - j) of i
        T s(0);
        for (int j = 1; j <= k; ++j) {
            if ((i >> (k - j)) & 1) s += T(1 - j) / T(k) / T(1L << j);
        }
        x[static_cast<std::size_t>(i)] = s;
    }
    return x;
}

}  // namespace

double kakeya_union_area(const std::vector<double>& x, KakeyaShape shape) { return union_area_impl(x, shape); }
Rational kakeya_union_area(const std::vector<Rational>& x, KakeyaShape shape) { return union_area_impl(x, shape); }
KakeyaMeasures<double> kakeya_measures(const std::vector<double>& x, KakeyaShape shape) { return measures_impl(x, shape); }
KakeyaMeasures<Rational> kakeya_measures(const std::vector<Rational>& x, KakeyaShape shape) {
    return measures_impl(x, shape);
}

std::optional<double> kakeya_s_score(const std::vector<double>& x, KakeyaShape shape) {
    auto m = kakeya_measures(x, shape);
    if (!(m.union_area > 0) || !(m.sum_pair_intersections > 0)) return std::nullopt;
    return m.sum_areas / (std::sqrt(m.sum_pair_intersections) * std::sqrt(m.union_area));
}

std::vector<double> keich_offsets(int k) { return keich_impl<double>(k); }
std::vector<Rational> keich_offsets_exact(int k) { return keich_impl<Rational>(k); }

// ---------------------------------------------------------------- plane points

double triangle_frame_side() { return 2.0 / std::pow(3.0, 0.25); }

namespace {

using P2 = std::array<double, 2>;

P2 sub(P2 a, P2 b) { return {a[0] - b[0], a[1] - b[1]}; }
double dot2(P2 a, P2 b) { return a[0] * b[0] + a[1] * b[1]; }
P2 lerp(P2 a, P2 d, double t) { return {a[0] + t * d[0], a[1] + t * d[1]}; }

// closest point on triangle abc to p (Ericson, Real-Time Collision Detection 5.1.5)
P2 closest_on_triangle(P2 p, P2 a, P2 b, P2 c) {
    P2 ab = sub(b, a), ac = sub(c, a), ap = sub(p, a);
    double d1 = dot2(ab, ap), d2 = dot2(ac, ap);
    if (d1 <= 0 && d2 <= 0) return a;
    P2 bp = sub(p, b);
    double d3 = dot2(ab, bp), d4 = dot2(ac, bp);
    if (d3 >= 0 && d4 <= d3) return b;
    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return lerp(a, ab, d1 / (d1 - d3));
    P2 cp = sub(p, c);
    double d5 = dot2(ab, cp), d6 = dot2(ac, cp);
    if (d6 >= 0 && d5 <= d6) return c;
    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return lerp(a, ac, d2 / (d2 - d6));
    double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
        double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return lerp(b, sub(c, b), w);
    }
    return p;  // inside
}

double tri_area2(P2 a, P2 b, P2 c) { return std::fabs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])); }

}  // namespace

std::array<double, 2> project_to_frame(std::array<double, 2> p, Frame f) {
    if (f == Frame::unit_square) return {std::clamp(p[0], 0.0, 1.0), std::clamp(p[1], 0.0, 1.0)};
    if (f == Frame::unit_area_equilateral_triangle) {
        const double s = triangle_frame_side();
        return closest_on_triangle(p, {0, 0}, {s, 0}, {s / 2, s * std::sqrt(3.0) / 2});
    }
    return p;
}

double hull_area(std::vector<P2> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return 0;
    auto cross = [](P2 o, P2 a, P2 b) { return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]); };
    std::vector<P2> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
        h[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    double a = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const auto& p = h[i];
        const auto& q = h[(i + 1) % h.size()];
        a += p[0] * q[1] - p[1] * q[0];
    }
    return std::fabs(a) / 2;
}

std::optional<double> heilbronn(const PlanePoints& pp, bool hull_variant, std::string* why) {
    if (pp.dim != 2) {
        if (why) *why = "heilbronn points are planar";
        return std::nullopt;
    }
    const std::size_t n = pp.count();
    if (n < 3) {
        if (why) *why = "need at least 3 points";
        return std::nullopt;
    }
    if (!hull_variant && pp.frame == Frame::free) {
        if (why) *why = "box variant needs a unit_square or unit-area triangle frame";
        return std::nullopt;
    }
    std::vector<P2> pts;
    for (std::size_t i = 0; i < n; ++i) pts.push_back(project_to_frame({pp.coords[2 * i], pp.coords[2 * i + 1]}, pp.frame));
    double m = INFINITY;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) m = std::min(m, tri_area2(pts[i], pts[j], pts[k]) / 2);
    if (!hull_variant) return m;  // both frames have unit area
    double h = hull_area(pts);
    if (!(h > 0)) {
        if (why) *why = "degenerate convex hull";
        return std::nullopt;
    }
    return m / h;
}

std::optional<double> maxmin_ratio(const std::vector<double>& coords, int dim) {
    const std::size_t n = coords.size() / static_cast<std::size_t>(dim);
    if (n < 2) return std::nullopt;
    double lo = INFINITY, hi = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = dist(&coords[i * static_cast<std::size_t>(dim)], &coords[j * static_cast<std::size_t>(dim)], dim);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
    if (!(lo > 1e-12)) return std::nullopt;
    return hi / lo;
}

// ---------------------------------------------------------------- disks

namespace {

template <class T>
std::optional<DiskViolation> disk_violation_impl(const std::vector<T>& v, const T& tol) {
    const std::size_t n = v.size() / 3;
    for (std::size_t i = 0; i < n; ++i) {
        const T &x = v[3 * i], &y = v[3 * i + 1], &r = v[3 * i + 2];
        if (!(r > 0)) return DiskViolation{static_cast<int>(i), -1, "non-positive radius"};
        if (x - r < -tol || x + r > T(1) + tol || y - r < -tol || y + r > T(1) + tol)
            return DiskViolation{static_cast<int>(i), -1, "disk leaves the unit square"};
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            T dx = v[3 * i] - v[3 * j], dy = v[3 * i + 1] - v[3 * j + 1];
            T need = v[3 * i + 2] + v[3 * j + 2] - tol;
            if (need > 0 && dx * dx + dy * dy < need * need)
                return DiskViolation{static_cast<int>(i), static_cast<int>(j), "disks overlap"};
        }
    return std::nullopt;
}

}  // namespace

std::optional<DiskViolation> disk_violation(const std::vector<double>& vals, double tol) {
    return disk_violation_impl(vals, tol);
}
std::optional<DiskViolation> disk_violation(const std::vector<Rational>& vals, const Rational& tol) {
    return disk_violation_impl(vals, tol);
}

}  // namespace evo::geometry
