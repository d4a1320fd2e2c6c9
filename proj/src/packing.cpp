// Packing in a dilate: container scale by bisection, overlap by clipping.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "evo/geometry.hpp"

namespace evo::geometry {

namespace {

using V2 = std::array<double, 2>;
using V3 = std::array<double, 3>;

constexpr double kPi = 3.14159265358979323846;

V3 sub3(V3 a, V3 b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dot3(V3 a, V3 b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
V3 cross3(V3 a, V3 b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// local vertices of the unit shape
std::vector<V2> local2(PoseShape s) {
    if (s == PoseShape::square) return {{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}};
    std::vector<V2> v;
    for (int k = 0; k < 6; ++k) v.push_back({std::cos(kPi * k / 3), std::sin(kPi * k / 3)});
    return v;
}

// rotation Rz(a) Ry(b) Rx(g), row-major
template <class T, class Sin, class Cos>
std::array<T, 9> rotation(const T& a, const T& b, const T& g, Sin sn, Cos cs) {
    T ca = cs(a), sa = sn(a), cb = cs(b), sb = sn(b), cg = cs(g), sg = sn(g);
    return {ca * cb, ca * sb * sg - sa * cg, ca * sb * cg + sa * sg,
            sa * cb, sa * sb * sg + ca * cg, sa * sb * cg - ca * sg,
            -sb,     cb * sg,                cb * cg};
}

std::array<double, 9> rot3(const double* pose) {
    return rotation<double>(pose[3], pose[4], pose[5], [](double x) { return std::sin(x); },
                            [](double x) { return std::cos(x); });
}

std::vector<V3> cube_vertices(const double* pose) {
    auto r = rot3(pose);
    std::vector<V3> out;
    for (int m = 0; m < 8; ++m) {
        V3 l{(m & 1) ? 0.5 : -0.5, (m & 2) ? 0.5 : -0.5, (m & 4) ? 0.5 : -0.5};
        V3 p{pose[0], pose[1], pose[2]};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) p[static_cast<std::size_t>(i)] += r[static_cast<std::size_t>(3 * i + j)] * l[static_cast<std::size_t>(j)];
        out.push_back(p);
    }
    return out;
}

// support extents of the container: unit normals and half-width per unit scale
struct Slabs {
    std::vector<V3> normals;
    double h = 0.5;
};

Slabs container_slabs(PoseShape s) {
    if (s == PoseShape::hexagon) {
        const double c = std::sqrt(3.0) / 2;
        return {{{c, 0.5, 0}, {0, 1, 0}, {-c, 0.5, 0}}, c};
    }
    if (s == PoseShape::square) return {{{1, 0, 0}, {0, 1, 0}}, 0.5};
    return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, 0.5};
}

std::vector<V3> all_vertices(const PoseSet& ps) {
    std::vector<V3> pts;
    const auto st = static_cast<std::size_t>(ps.stride());
    for (std::size_t i = 0; i < ps.count(); ++i) {
        const double* q = &ps.vals[i * st];
        if (ps.shape == PoseShape::cube) {
            auto v = cube_vertices(q);
            pts.insert(pts.end(), v.begin(), v.end());
        } else {
            for (auto& p : pose_polygon(ps.shape, q[0], q[1], q[2])) pts.push_back({p[0], p[1], 0});
        }
    }
    return pts;
}

// does some translate of the scale-s container hold all points
bool contains_at(const std::vector<double>& M, const std::vector<double>& m, PoseShape shape, double h, double s) {
    const double w = s * h;
    for (std::size_t i = 0; i < M.size(); ++i)
        if (M[i] - m[i] > 2 * w) return false;
    if (shape != PoseShape::hexagon) return true;
    // hexagon: n1 + n3 = n2, so the middle slab couples the other two
    return M[0] + M[2] - 2 * w <= m[1] + w && M[1] - w <= m[0] + m[2] + 2 * w;
}

// ---- convex polyhedron clipping (3-D) ----

using Face = std::vector<V3>;

// keep n.x <= d
std::vector<Face> clip_polyhedron(const std::vector<Face>& faces, V3 n, double d) {
    constexpr double eps = 1e-12;
    std::vector<Face> out;
    std::vector<V3> cap;
    bool on_plane_face = false;
    for (const auto& f : faces) {
        Face nf;
        bool all_on = true;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const V3& a = f[i];
            const V3& b = f[(i + 1) % f.size()];
            double da = dot3(n, a) - d, db = dot3(n, b) - d;
            if (std::fabs(da) <= eps) da = 0;
            if (std::fabs(db) <= eps) db = 0;
            all_on = all_on && da == 0;
            if (da <= 0) nf.push_back(a);
            if (da == 0) cap.push_back(a);
            if ((da < 0 && db > 0) || (da > 0 && db < 0)) {
                double t = da / (da - db);
                V3 p{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])};
                nf.push_back(p);
                cap.push_back(p);
            }
        }
        on_plane_face = on_plane_face || all_on;
        if (nf.size() >= 3) out.push_back(std::move(nf));
    }
    // a face already lying in the plane closes the solid
    if (cap.size() >= 3 && !on_plane_face) {
        V3 g{0, 0, 0};
        for (auto& p : cap)
            for (int k = 0; k < 3; ++k) g[static_cast<std::size_t>(k)] += p[static_cast<std::size_t>(k)] / static_cast<double>(cap.size());
        // in-plane basis
        V3 e1 = std::fabs(n[0]) < 0.9 ? cross3(n, {1, 0, 0}) : cross3(n, {0, 1, 0});
        double l = std::sqrt(dot3(e1, e1));
        for (auto& x : e1) x /= l;
        V3 e2 = cross3(n, e1);
        std::sort(cap.begin(), cap.end(), [&](const V3& a, const V3& b) {
            V3 da = sub3(a, g), db = sub3(b, g);
            return std::atan2(dot3(da, e2), dot3(da, e1)) < std::atan2(dot3(db, e2), dot3(db, e1));
        });
        out.push_back(cap);
    }
    return out;
}

double polyhedron_volume(const std::vector<Face>& faces) {
    V3 g{0, 0, 0};
    std::size_t cnt = 0;
    for (auto& f : faces)
        for (auto& p : f) {
            for (int k = 0; k < 3; ++k) g[static_cast<std::size_t>(k)] += p[static_cast<std::size_t>(k)];
            ++cnt;
        }
    if (cnt == 0) return 0;
    for (auto& x : g) x /= static_cast<double>(cnt);
    double v = 0;
    for (auto& f : faces)
        for (std::size_t i = 1; i + 1 < f.size(); ++i)
            v += std::fabs(dot3(sub3(f[0], g), cross3(sub3(f[i], g), sub3(f[i + 1], g)))) / 6;
    return v;
}

std::vector<Face> cube_faces(const double* pose) {
    auto v = cube_vertices(pose);
    // vertex m has bits (x, y, z); faces listed by the bit held fixed
    static const int idx[6][4] = {{0, 2, 6, 4}, {1, 3, 7, 5}, {0, 1, 5, 4}, {2, 3, 7, 6}, {0, 1, 3, 2}, {4, 5, 7, 6}};
    std::vector<Face> f;
    for (auto& q : idx) f.push_back({v[static_cast<std::size_t>(q[0])], v[static_cast<std::size_t>(q[1])],
                                     v[static_cast<std::size_t>(q[2])], v[static_cast<std::size_t>(q[3])]});
    return f;
}

}  // namespace

double polygon_area(const Poly2& p) {
    double a = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& u = p[i];
        const auto& v = p[(i + 1) % p.size()];
        a += u[0] * v[1] - u[1] * v[0];
    }
    return std::fabs(a) / 2;
}

Poly2 convex_intersection(const Poly2& a, const Poly2& b) {
    // Sutherland-Hodgman, clip a by each edge of b (both counter-clockwise)
    Poly2 out = a;
    for (std::size_t e = 0; e < b.size() && !out.empty(); ++e) {
        V2 p = b[e], q = b[(e + 1) % b.size()];
        auto side = [&](const V2& x) { return (q[0] - p[0]) * (x[1] - p[1]) - (q[1] - p[1]) * (x[0] - p[0]); };
        Poly2 in = std::move(out);
        out.clear();
        for (std::size_t i = 0; i < in.size(); ++i) {
            const V2& s = in[i];
            const V2& t = in[(i + 1) % in.size()];
            double ss = side(s), st = side(t);
            if (ss >= 0) out.push_back(s);
            if ((ss > 0 && st < 0) || (ss < 0 && st > 0)) {
                double k = ss / (ss - st);
                out.push_back({s[0] + k * (t[0] - s[0]), s[1] + k * (t[1] - s[1])});
            }
        }
    }
    return out;
}

Poly2 pose_polygon(PoseShape shape, double cx, double cy, double theta) {
    if (shape == PoseShape::cube) throw std::invalid_argument("cube has no polygon");
    const double c = std::cos(theta), s = std::sin(theta);
    Poly2 out;
    for (auto& v : local2(shape)) out.push_back({cx + c * v[0] - s * v[1], cy + s * v[0] + c * v[1]});
    return out;
}

double cube_overlap_volume(const double* a, const double* b) {
    // quick reject: centres further apart than two circumradii
    V3 ca{a[0], a[1], a[2]}, cb{b[0], b[1], b[2]};
    V3 d = sub3(ca, cb);
    if (dot3(d, d) >= 3.0) return 0;
    auto faces = cube_faces(a);
    auto r = rot3(b);
    for (int k = 0; k < 3; ++k) {
        V3 n{r[static_cast<std::size_t>(k)], r[static_cast<std::size_t>(3 + k)], r[static_cast<std::size_t>(6 + k)]};
        double c = dot3(n, cb);
        faces = clip_polyhedron(faces, n, c + 0.5);
        if (faces.empty()) return 0;
        faces = clip_polyhedron(faces, {-n[0], -n[1], -n[2]}, -c + 0.5);
        if (faces.empty()) return 0;
    }
    return polyhedron_volume(faces);
}

double pack_scale_closed_form(const PoseSet& ps) {
    auto pts = all_vertices(ps);
    auto sl = container_slabs(ps.shape);
    std::vector<double> M, m;
    for (auto& n : sl.normals) {
        double hi = -INFINITY, lo = INFINITY;
        for (auto& p : pts) {
            hi = std::max(hi, dot3(n, p));
            lo = std::min(lo, dot3(n, p));
        }
        M.push_back(hi);
        m.push_back(lo);
    }
    double s = 0;
    for (std::size_t i = 0; i < M.size(); ++i) s = std::max(s, (M[i] - m[i]) / (2 * sl.h));
    if (ps.shape == PoseShape::hexagon) {
        s = std::max(s, (M[1] - m[0] - m[2]) / (3 * sl.h));
        s = std::max(s, (M[0] + M[2] - m[1]) / (3 * sl.h));
    }
    return s;
}

PackResult pack_dilate(const PoseSet& ps) {
    for (double v : ps.vals)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite pose");
    auto pts = all_vertices(ps);
    auto sl = container_slabs(ps.shape);
    std::vector<double> M, m;
    for (auto& n : sl.normals) {
        double hi = -INFINITY, lo = INFINITY;
        for (auto& p : pts) {
            hi = std::max(hi, dot3(n, p));
            lo = std::min(lo, dot3(n, p));
        }
        M.push_back(hi);
        m.push_back(lo);
    }
    double lo = 0, hi = 1;
    while (!contains_at(M, m, ps.shape, sl.h, hi)) hi *= 2;
    for (int it = 0; it < 60; ++it) {
        double mid = (lo + hi) / 2;
        (contains_at(M, m, ps.shape, sl.h, mid) ? hi : lo) = mid;
    }
    PackResult r;
    r.scale = hi;
    const auto st = static_cast<std::size_t>(ps.stride());
    const std::size_t n = ps.count();
    if (ps.shape == PoseShape::cube) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) r.penalty += cube_overlap_volume(&ps.vals[i * st], &ps.vals[j * st]);
    } else {
        std::vector<Poly2> polys;
        for (std::size_t i = 0; i < n; ++i) polys.push_back(pose_polygon(ps.shape, ps.vals[i * st], ps.vals[i * st + 1], ps.vals[i * st + 2]));
        const double reach = ps.shape == PoseShape::hexagon ? 2.0 : std::sqrt(2.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                double dx = ps.vals[i * st] - ps.vals[j * st], dy = ps.vals[i * st + 1] - ps.vals[j * st + 1];
                if (dx * dx + dy * dy >= reach * reach) continue;
                auto q = convex_intersection(polys[i], polys[j]);
                if (q.size() >= 3) r.penalty += polygon_area(q);
            }
    }
    return r;
}

// ---- certification ----

namespace {

struct IV3 {
    Interval x{0L}, y{0L}, z{0L};
};

Interval idot(const IV3& a, const IV3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

struct IShape {
    std::vector<IV3> verts;
    std::vector<IV3> axes;  // unit face normals
};

IShape interval_shape(PoseShape shape, const std::vector<Interval>& q) {
    IShape s;
    if (shape == PoseShape::cube) {
        auto r = rotation<Interval>(q[3], q[4], q[5], [](const Interval& x) { return sin(x); },
                                    [](const Interval& x) { return cos(x); });
        for (int m = 0; m < 8; ++m) {
            Interval l[3] = {Interval((m & 1) ? 0.5 : -0.5), Interval((m & 2) ? 0.5 : -0.5), Interval((m & 4) ? 0.5 : -0.5)};
            IV3 p{q[0], q[1], q[2]};
            for (int j = 0; j < 3; ++j) {
                p.x += r[static_cast<std::size_t>(j)] * l[j];
                p.y += r[static_cast<std::size_t>(3 + j)] * l[j];
                p.z += r[static_cast<std::size_t>(6 + j)] * l[j];
            }
            s.verts.push_back(p);
        }
        for (int k = 0; k < 3; ++k) s.axes.push_back({r[static_cast<std::size_t>(k)], r[static_cast<std::size_t>(3 + k)], r[static_cast<std::size_t>(6 + k)]});
        return s;
    }
    Interval c = cos(q[2]), sn = sin(q[2]);
    const Interval half(0.5);
    const Interval r3 = sqrt(Interval(3L)) / Interval(2L);
    std::vector<std::array<Interval, 2>> loc;
    std::vector<std::array<Interval, 2>> nrm;
    if (shape == PoseShape::square) {
        loc = {{-half, -half}, {half, -half}, {half, half}, {-half, half}};
        nrm = {{Interval(1L), Interval(0L)}, {Interval(0L), Interval(1L)}};
    } else {
        loc = {{Interval(1L), Interval(0L)}, {half, r3}, {-half, r3}, {Interval(-1L), Interval(0L)}, {-half, -r3}, {half, -r3}};
        nrm = {{r3, half}, {Interval(0L), Interval(1L)}, {-r3, half}};
    }
    for (auto& v : loc) s.verts.push_back({q[0] + c * v[0] - sn * v[1], q[1] + sn * v[0] + c * v[1], Interval(0L)});
    for (auto& v : nrm) s.axes.push_back({c * v[0] - sn * v[1], sn * v[0] + c * v[1], Interval(0L)});
    return s;
}

std::pair<Interval, Interval> extent(const IShape& s, const IV3& u) {
    Interval lo = idot(s.verts[0], u), hi = lo;
    for (std::size_t i = 1; i < s.verts.size(); ++i) {
        Interval d = idot(s.verts[i], u);
        lo = min(lo, d);
        hi = max(hi, d);
    }
    return {lo, hi};
}

}  // namespace

Interval pack_dilate_certified(const PoseSet& ps, const std::vector<Rational>* exact) {
    if (exact && exact->size() != ps.vals.size()) throw std::invalid_argument("exact pose values do not match");
    std::vector<std::vector<Interval>> poses;
    const auto st = static_cast<std::size_t>(ps.stride());
    for (std::size_t i = 0; i < ps.count(); ++i) {
        std::vector<Interval> q;
        for (std::size_t k = 0; k < st; ++k) {
            if (exact)
                q.emplace_back((*exact)[i * st + k]);
            else
                q.emplace_back(ps.vals[i * st + k]);
        }
        poses.push_back(std::move(q));
    }
    std::vector<IShape> shapes;
    for (auto& q : poses) shapes.push_back(interval_shape(ps.shape, q));

    // scale
    const Interval half(0.5);
    const Interval r3 = sqrt(Interval(3L)) / Interval(2L);
    std::vector<IV3> normals;
    Interval h = half;
    if (ps.shape == PoseShape::hexagon) {
        normals = {{r3, half, Interval(0L)}, {Interval(0L), Interval(1L), Interval(0L)}, {-r3, half, Interval(0L)}};
        h = r3;
    } else if (ps.shape == PoseShape::square) {
        normals = {{Interval(1L), Interval(0L), Interval(0L)}, {Interval(0L), Interval(1L), Interval(0L)}};
    } else {
        normals = {{Interval(1L), Interval(0L), Interval(0L)}, {Interval(0L), Interval(1L), Interval(0L)}, {Interval(0L), Interval(0L), Interval(1L)}};
    }
    std::vector<Interval> M, m;
    for (auto& n : normals) {
        std::optional<Interval> lo, hi;
        for (auto& s : shapes) {
            auto [a, b] = extent(s, n);
            lo = lo ? min(*lo, a) : a;
            hi = hi ? max(*hi, b) : b;
        }
        M.push_back(*hi);
        m.push_back(*lo);
    }
    Interval scale(0L);
    for (std::size_t i = 0; i < M.size(); ++i) scale = max(scale, (M[i] - m[i]) / (Interval(2L) * h));
    if (ps.shape == PoseShape::hexagon) {
        scale = max(scale, (M[1] - m[0] - m[2]) / (Interval(3L) * h));
        scale = max(scale, (M[0] + M[2] - m[1]) / (Interval(3L) * h));
    }

    // penalty: zero where an axis separates, else bounded by slab width times diameter powers
    const bool cube = ps.shape == PoseShape::cube;
    const Interval diam = cube ? sqrt(Interval(3L)) : (ps.shape == PoseShape::hexagon ? Interval(2L) : sqrt(Interval(2L)));
    Interval ub(0L);
    for (std::size_t i = 0; i < shapes.size(); ++i)
        for (std::size_t j = i + 1; j < shapes.size(); ++j) {
            std::optional<Interval> w;
            std::vector<IV3> axes(shapes[i].axes);
            axes.insert(axes.end(), shapes[j].axes.begin(), shapes[j].axes.end());
            bool separated = false;
            for (auto& u : axes) {
                auto [a0, a1] = extent(shapes[i], u);
                auto [b0, b1] = extent(shapes[j], u);
                Interval ov = min(a1, b1) - max(a0, b0);
                if (ov.hi_d() <= 0) {
                    separated = true;
                    break;
                }
                w = w ? min(*w, ov) : ov;
            }
            if (separated) continue;
            Interval bound = max(*w, Interval(0L)) * (cube ? diam * diam : diam);
            ub += bound;
        }
    // the penalty lies in [0, ub]
    Interval pen = Interval::hull(Interval(0L), ub);
    return scale + pen;
}

}  // namespace evo::geometry
