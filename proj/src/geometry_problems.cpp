// Registry entries for the geometry evaluators.

#include <algorithm>
#include <cmath>

#include "evo/geometry.hpp"
#include "problem_util.hpp"

namespace evo {

using namespace geometry;

namespace {

// ---- shared helpers ----

std::vector<Rational> flat_exact(const json& rows) {
    std::vector<Rational> out;
    for (const auto& r : rows) {
        if (r.is_array())
            for (const auto& x : r) out.push_back(rational_from_json(x));
        else
            out.push_back(rational_from_json(r));
    }
    return out;
}

// decimal string of an irrational constant, 60+ correct digits
std::string dec(const Interval& x) { return x.lo_str(); }

Interval sqrt3_half() {
    Precision prec(256);
    return sqrt(Interval(3L)) / Interval(2L);
}

json sphere_json(int d, json pts) { return {{"kind", "sphere_points"}, {"d", d}, {"points", std::move(pts)}}; }

json regular_polygon(int n) {
    Precision prec(256);
    json pts = json::array();
    for (int k = 0; k < n; ++k) {
        Interval a = Interval(2L) * Interval::pi() * Interval(static_cast<long>(k)) / Interval(static_cast<long>(n));
        pts.push_back({dec(cos(a)), dec(sin(a))});
    }
    return pts;
}

json perms_pm(int d, int ones) {
    // all vectors with `ones` entries +-1 and zeros elsewhere
    json pts = json::array();
    for (int mask = 0; mask < (1 << d); ++mask) {
        if (__builtin_popcount(static_cast<unsigned>(mask)) != ones) continue;
        for (int sg = 0; sg < (1 << ones); ++sg) {
            json p = json::array();
            int b = 0;
            for (int c = 0; c < d; ++c) {
                if (mask & (1 << c)) {
                    p.push_back((sg >> b) & 1 ? -1 : 1);
                    ++b;
                } else {
                    p.push_back(0);
                }
            }
            pts.push_back(p);
        }
    }
    return pts;
}

std::optional<json> known_sphere3(long n) {
    const std::string h = dec(sqrt3_half());
    const std::string mh = "-" + h;
    if (n == 2) return json::array({{0, 0, 1}, {0, 0, -1}});
    if (n == 3) return json::array({{1, 0, 0}, {"-1/2", h, 0}, {"-1/2", mh, 0}});
    if (n == 4) return json::array({{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}});
    if (n == 5) return json::array({{0, 0, 1}, {0, 0, -1}, {1, 0, 0}, {"-1/2", h, 0}, {"-1/2", mh, 0}});
    if (n == 6) return perms_pm(3, 1);
    if (n == 12) {
        Precision prec(256);
        Interval phi = (Interval(1L) + sqrt(Interval(5L))) / Interval(2L);
        std::string p = dec(phi), mp = "-" + p;
        json pts = json::array();
        for (int s1 : {1, -1})
            for (int s2 : {0, 1}) {
                json a = s1;
                json b = s2 ? json(mp) : json(p);
                pts.push_back({0, a, b});
                pts.push_back({a, b, 0});
                pts.push_back({b, 0, a});
            }
        return pts;
    }
    return std::nullopt;
}

Construction random_sphere(int d, long n, Rng& rng) {
    SpherePoints s;
    s.dim = d;
    for (long i = 0; i < n * d; ++i) s.coords.push_back(rng.normal());
    s.coords = normalized(s.coords, d);
    return Construction(s);
}

json sphere_instance(const Construction& c) {
    const auto& s = c.as<SpherePoints>();
    return {{"d", s.dim}, {"n", s.count()}};
}

void normalize_sphere(const json&, Construction& c) {
    auto& s = c.as<SpherePoints>();
    s.coords = normalized(s.coords, s.dim);
}

// dimension, count and nonzero checks; empty when fine
std::string sphere_problem(const json& inst, const SpherePoints& s) {
    if (auto m = detail::size_mismatch(inst, "d", static_cast<std::size_t>(s.dim)); !m.empty()) return m;
    if (auto m = detail::size_mismatch(inst, "n", s.count()); !m.empty()) return m;
    if (!detail::all_finite(s.coords)) return "non-finite coordinate";
    const auto d = static_cast<std::size_t>(s.dim);
    for (std::size_t i = 0; i < s.count(); ++i) {
        bool zero = true;
        for (std::size_t k = 0; k < d; ++k) zero = zero && s.coords[i * d + k] == 0;
        if (zero) return "zero vector cannot be projected to the sphere";
    }
    return {};
}

std::vector<Rational> exact_points(const Construction& c, const char* key = "points") {
    return flat_exact(exact_source(c).at(key));
}

KakeyaShape inst_shape(const json& inst, KakeyaShape fallback) {
    auto s = detail::inst_str(inst, "shape", kakeya_shape_name(fallback));
    return s == "parallelogram" ? KakeyaShape::parallelogram : KakeyaShape::triangle;
}

std::string kakeya_problem(const json& inst, const KakeyaOffsets& k) {
    if (auto m = detail::size_mismatch(inst, "n", k.x.size()); !m.empty()) return m;
    if (inst_shape(inst, k.shape) != k.shape) return "instance shape differs from the construction";
    if (!detail::all_finite(k.x)) return "non-finite offset";
    return {};
}

json kakeya_instance(const Construction& c) {
    const auto& k = c.as<KakeyaOffsets>();
    return {{"n", k.x.size()}, {"shape", kakeya_shape_name(k.shape)}};
}

Construction random_kakeya(const json& inst, Rng& rng) {
    KakeyaOffsets k;
    k.shape = inst_shape(inst, KakeyaShape::triangle);
    long n = detail::inst_long(inst, "n", 16);
    for (long i = 0; i < n; ++i) k.x.push_back(rng.uniform(-0.5, 0.0));
    return Construction(k);
}

std::optional<Construction> keich_baseline(const json& params) {
    long k = detail::inst_long(params, "k", 4);
    auto x = keich_offsets_exact(static_cast<int>(k));
    json xs = json::array();
    for (auto& q : x) xs.push_back(rational_to_json(q));
    return construction_from_json({{"kind", "kakeya_offsets"}, {"shape", "triangle"}, {"x", xs}});
}

PoseShape inst_pose_shape(const json& inst, PoseShape fallback) {
    auto s = detail::inst_str(inst, "shape", pose_shape_name(fallback));
    if (s == "square") return PoseShape::square;
    if (s == "cube") return PoseShape::cube;
    return PoseShape::hexagon;
}

// points uniform in the frame
std::array<double, 2> frame_sample(Frame f, Rng& rng) {
    if (f == Frame::unit_area_equilateral_triangle) {
        double u = rng.uniform(), v = rng.uniform();
        if (u + v > 1) {
            u = 1 - u;
            v = 1 - v;
        }
        const double s = triangle_frame_side();
        return {u * s + v * s / 2, v * s * std::sqrt(3.0) / 2};
    }
    return {rng.uniform(), rng.uniform()};
}

Frame parse_frame_name(const std::string& s) {
    if (s == "unit_square") return Frame::unit_square;
    if (s == "unit_area_equilateral_triangle") return Frame::unit_area_equilateral_triangle;
    return Frame::free;
}

// ---- exact planar helpers for certification ----

using Q2 = std::array<Rational, 2>;

Rational tri_area2_exact(const Q2& a, const Q2& b, const Q2& c) {
    return abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

Rational hull_area_exact(std::vector<Q2> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return 0;
    auto cross = [](const Q2& o, const Q2& a, const Q2& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<Q2> h(2 * pts.size());
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
    Rational a(0);
    for (std::size_t i = 0; i < h.size(); ++i) {
        const auto& p = h[i];
        const auto& q = h[(i + 1) % h.size()];
        a += p[0] * q[1] - p[1] * q[0];
    }
    return abs(a) / 2;
}

}  // namespace

void register_geometry(Registry& reg) {
    const std::vector<std::string> real_kernels{"gauss", "nudge"};
    const std::vector<std::string> point_kernels{"gauss", "nudge", "block"};
    {
        Problem p;
        p.id = "kissing";
        p.doc = "Minimize sum_{i<j} max(0, 2 - |c_i - c_j|) for n points projected to the radius-2 sphere in R^d.";
        p.kind = "sphere_points";
        p.minimize = true;
        p.default_instance = {{"d", 3}, {"n", 12}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& s = c.as<SpherePoints>();
            if (auto m = sphere_problem(inst, s); !m.empty()) return infeasible(m);
            if (s.count() < 2) return scored(0);
            double pen = kissing_penalty(s.coords, s.dim);
            auto r = scored(pen, {{"penalty", pen}});
            return r;
        };
        p.certify = [](const json&, const Construction& c, int bits) {
            const auto& s = c.as<SpherePoints>();
            if (s.count() < 2) return exact_result(Rational(0), bits);
            return interval_result(kissing_penalty(exact_points(c), s.dim), bits);
        };
        p.random = [](const json& inst, Rng& rng) {
            return random_sphere(static_cast<int>(detail::inst_long(inst, "d", 3)), detail::inst_long(inst, "n", 12), rng);
        };
        // d = 1..4: antipodes, hexagon, FCC (cuboctahedron), D4 roots
        p.baseline = [](const json& params) -> std::optional<Construction> {
            long d = detail::inst_long(params, "d", 3);
            json pts;
            if (d == 1) pts = json::array({{1}, {-1}});
            else if (d == 2) pts = regular_polygon(6);
            else if (d == 3) pts = perms_pm(3, 2);
            else if (d == 4) pts = perms_pm(4, 2);
            else return std::nullopt;
            return construction_from_json(sphere_json(static_cast<int>(d), pts));
        };
        p.instance_of = sphere_instance;
        p.repair = normalize_sphere;
        p.kernels = point_kernels;
        reg.add(p);
    }
    {
        Problem p;
        p.id = "kakeya_area";
        p.doc = "Minimize the area of a union of n unit-height triangles (or parallelograms) with offsets x_j.";
        p.kind = "kakeya_offsets";
        p.minimize = true;
        p.default_instance = {{"n", 16}, {"shape", "triangle"}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& k = c.as<KakeyaOffsets>();
            if (auto m = kakeya_problem(inst, k); !m.empty()) return infeasible(m);
            return scored(kakeya_union_area(k.x, k.shape));
        };
        p.certify = [](const json&, const Construction& c, int bits) {
            const auto& k = c.as<KakeyaOffsets>();
            return exact_result(kakeya_union_area(rationals_from_json(exact_source(c).at("x")), k.shape), bits);
        };
        p.random = random_kakeya;
        p.baseline = keich_baseline;
        p.instance_of = kakeya_instance;
        p.kernels = real_kernels;
        reg.add(p);
    }
    {
        Problem p;
        p.id = "kakeya_s_score";
        p.doc = "Maximize sum|T_i| / (sqrt(sum_ij |T_i cap T_j|) sqrt|union T_i|) over offset vectors.";
        p.kind = "kakeya_offsets";
        p.minimize = false;
        p.default_instance = {{"n", 16}, {"shape", "triangle"}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& k = c.as<KakeyaOffsets>();
            if (auto m = kakeya_problem(inst, k); !m.empty()) return infeasible(m);
            auto s = kakeya_s_score(k.x, k.shape);
            if (!s) return infeasible("degenerate union");
            return scored(*s);
        };
        p.certify = [](const json&, const Construction& c, int bits) {
            const auto& k = c.as<KakeyaOffsets>();
            auto m = kakeya_measures(rationals_from_json(exact_source(c).at("x")), k.shape);
            if (m.union_area <= 0) throw std::runtime_error("degenerate union");
            Interval s = Interval(m.sum_areas) / (sqrt(Interval(m.sum_pair_intersections)) * sqrt(Interval(m.union_area)));
            return interval_result(s, bits);
        };
        p.random = random_kakeya;
        p.baseline = keich_baseline;
        p.instance_of = kakeya_instance;
        p.kernels = real_kernels;
        reg.add(p);
    }
    {
        Problem p;
        p.id = "spherical_design";
        p.doc = "Minimize the addition-theorem design error sum_ij sum_{k<=t} mult(d,k) P_k(p_i.p_j); "
                "instance d is the ambient dimension (2 or 3).";
        p.kind = "sphere_points";
        p.minimize = true;
        p.default_instance = {{"d", 3}, {"n", 6}, {"t", 3}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& s = c.as<SpherePoints>();
            if (auto m = sphere_problem(inst, s); !m.empty()) return infeasible(m);
            if (s.dim != 2 && s.dim != 3) return infeasible("unsupported: sphere dimension must be 1 or 2");
            long t = detail::inst_long(inst, "t", 3);
            if (t < 1) return infeasible("t must be >= 1");
            return scored(spherical_design_error(s.coords, s.dim, static_cast<int>(t)));
        };
        p.certify = [](const json& inst, const Construction& c, int bits) {
            const auto& s = c.as<SpherePoints>();
            long t = detail::inst_long(inst, "t", 3);
            return interval_result(spherical_design_error(exact_points(c), s.dim, static_cast<int>(t)), bits);
        };
        p.random = [](const json& inst, Rng& rng) {
            return random_sphere(static_cast<int>(detail::inst_long(inst, "d", 3)), detail::inst_long(inst, "n", 6), rng);
        };
        // octahedron for d = 3, (t+1)-gon for d = 2
        p.baseline = [](const json& params) -> std::optional<Construction> {
            long d = detail::inst_long(params, "d", 3);
            if (d == 3) return construction_from_json(sphere_json(3, perms_pm(3, 1)));
            if (d == 2) return construction_from_json(sphere_json(2, regular_polygon(static_cast<int>(detail::inst_long(params, "t", 3)) + 1)));
            return std::nullopt;
        };
        p.instance_of = sphere_instance;
        p.repair = normalize_sphere;
        p.kernels = point_kernels;
        reg.add(p);
    }
    {
        Problem p;
        p.id = "thomson";
        p.doc = "Minimize the Coulomb energy sum_{i<j} 1/|z_i - z_j| of n points on the unit sphere in R^3.";
        p.kind = "sphere_points";
        p.minimize = true;
        p.default_instance = {{"d", 3}, {"n", 5}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& s = c.as<SpherePoints>();
            if (auto m = sphere_problem(inst, s); !m.empty()) return infeasible(m);
            if (s.dim != 3) return infeasible("thomson points live in R^3");
            if (s.count() < 2) return infeasible("need n >= 2");
            auto e = thomson_energy(s.coords, s.dim);
            if (!e) return infeasible("coincident points");
            return scored(*e);
        };
        p.certify = [](const json&, const Construction& c, int bits) {
            return interval_result(thomson_energy(exact_points(c), c.as<SpherePoints>().dim), bits);
        };
        p.random = [](const json& inst, Rng& rng) { return random_sphere(3, detail::inst_long(inst, "n", 5), rng); };
        p.baseline = [](const json& params) -> std::optional<Construction> {
            auto pts = known_sphere3(detail::inst_long(params, "n", 5));
            if (!pts) return std::nullopt;
            return construction_from_json(sphere_json(3, *pts));
        };
        p.instance_of = sphere_instance;
        p.repair = normalize_sphere;
        p.kernels = point_kernels;
        reg.add(p);
    }
    {
        Problem p;
        p.id = "tammes";
        p.doc = "Maximize the minimum pairwise distance of n points on the unit sphere in R^3.";
        p.kind = "sphere_points";
        p.minimize = false;
        p.default_instance = {{"d", 3}, {"n", 12}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& s = c.as<SpherePoints>();
            if (auto m = sphere_problem(inst, s); !m.empty()) return infeasible(m);
            if (s.dim != 3) return infeasible("tammes points live in R^3");
            if (s.count() < 2) return infeasible("need n >= 2");
            return scored(tammes_min_distance(s.coords, s.dim));
        };
        p.certify = [](const json&, const Construction& c, int bits) {
            return interval_result(tammes_min_distance(exact_points(c), c.as<SpherePoints>().dim), bits);
        };
        p.random = [](const json& inst, Rng& rng) { return random_sphere(3, detail::inst_long(inst, "n", 12), rng); };
        p.baseline = [](const json& params) -> std::optional<Construction> {
            auto pts = known_sphere3(detail::inst_long(params, "n", 12));
            if (!pts) return std::nullopt;
            return construction_from_json(sphere_json(3, *pts));
        };
        p.instance_of = sphere_instance;
        p.repair = normalize_sphere;
        p.kernels = point_kernels;
        reg.add(p);
    }
    {
        Problem p;
        p.id = "pack_dilate";
        p.doc = "Minimize scale + overlap for n unit hexagons, squares or cubes inside a dilated copy (fixed "
                "orientation, free translation).";
        p.kind = "poses";
        p.minimize = true;
        p.default_instance = {{"shape", "hexagon"}, {"n", 11}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& ps = c.as<PoseSet>();
            if (auto m = detail::size_mismatch(inst, "n", ps.count()); !m.empty()) return infeasible(m);
            if (inst_pose_shape(inst, ps.shape) != ps.shape) return infeasible("instance shape differs from the construction");
            if (!detail::all_finite(ps.vals)) return infeasible("non-finite pose");
            auto pr = pack_dilate(ps);
            auto r = scored(pr.scale + pr.penalty, {{"scale", pr.scale}, {"penalty", pr.penalty}});
            r.penalty = pr.penalty;
            r.valid = pr.penalty == 0;
            return r;
        };
        p.certify = [](const json&, const Construction& c, int bits) {
            auto q = flat_exact(exact_source(c).at("poses"));
            return interval_result(pack_dilate_certified(c.as<PoseSet>(), &q), bits);
        };
        p.random = [](const json& inst, Rng& rng) {
            PoseSet ps;
            ps.shape = inst_pose_shape(inst, PoseShape::hexagon);
            long n = detail::inst_long(inst, "n", 11);
            const double box = 2.0 * std::ceil(std::sqrt(static_cast<double>(n)));
            for (long i = 0; i < n; ++i) {
                for (int k = 0; k < (ps.shape == PoseShape::cube ? 3 : 2); ++k) ps.vals.push_back(rng.uniform(0, box));
                for (int k = 0; k < (ps.shape == PoseShape::cube ? 3 : 1); ++k) ps.vals.push_back(rng.uniform(0, 2 * M_PI));
            }
            return Construction(ps);
        };
        // non-overlapping grid
        p.baseline = [](const json& params) -> std::optional<Construction> {
            PoseSet ps;
            ps.shape = inst_pose_shape(params, PoseShape::hexagon);
            long n = detail::inst_long(params, "n", 11);
            const bool cube = ps.shape == PoseShape::cube;
            long k = 1;
            while ((cube ? k * k * k : k * k) < n) ++k;
            const double step = ps.shape == PoseShape::hexagon ? 2.0 : 1.0;
            for (long i = 0; i < n; ++i) {
                ps.vals.push_back(step * static_cast<double>(i % k));
                ps.vals.push_back(step * static_cast<double>((i / k) % k));
                if (cube) ps.vals.push_back(step * static_cast<double>(i / (k * k)));
                for (int a = 0; a < (cube ? 3 : 1); ++a) ps.vals.push_back(0);
            }
            return Construction(ps);
        };
        p.instance_of = [](const Construction& c) {
            const auto& ps = c.as<PoseSet>();
            return json{{"shape", pose_shape_name(ps.shape)}, {"n", ps.count()}};
        };
        p.kernels = {"gauss", "nudge", "block"};
        reg.add(p);
    }
    {
        Problem p;
        p.id = "pack_circles";
        p.doc = "Maximize the sum of radii of n disjoint disks inside the unit square (tolerance 1e-12).";
        p.kind = "disks";
        p.minimize = false;
        p.default_instance = {{"n", 26}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& d = c.as<DiskSet>();
            if (auto m = detail::size_mismatch(inst, "n", d.count()); !m.empty()) return infeasible(m);
            if (!detail::all_finite(d.vals)) return infeasible("non-finite disk");
            if (auto v = disk_violation(d.vals, 1e-12)) {
                auto r = infeasible(v->what);
                r.details = {{"i", v->i}, {"j", v->j}};
                return r;
            }
            double sum = 0;
            for (std::size_t i = 0; i < d.count(); ++i) sum += d.vals[3 * i + 2];
            return scored(sum);
        };
        p.certify = [](const json&, const Construction& c, int bits) {
            auto v = flat_exact(exact_source(c).at("disks"));
            if (auto bad = disk_violation(v, Rational(1, 1000000000000L))) throw std::runtime_error(bad->what);
            Rational sum(0);
            for (std::size_t i = 2; i < v.size(); i += 3) sum += v[i];
            return exact_result(sum, bits);
        };
        // feasible grid with random radii
        p.random = [](const json& inst, Rng& rng) {
            long n = detail::inst_long(inst, "n", 26);
            long k = 1;
            while (k * k < n) ++k;
            DiskSet d;
            const double cell = 1.0 / static_cast<double>(k);
            for (long i = 0; i < n; ++i) {
                d.vals.push_back((static_cast<double>(i % k) + 0.5) * cell);
                d.vals.push_back((static_cast<double>(i / k) + 0.5) * cell);
                d.vals.push_back(0.5 * cell * rng.uniform(0.2, 0.95));
            }
            return Construction(d);
        };
        // shrink radii until the set is feasible
        p.repair = [](const json&, Construction& c) {
            auto& v = c.as<DiskSet>().vals;
            const std::size_t n = v.size() / 3;
            for (std::size_t i = 0; i < n; ++i) {
                v[3 * i] = std::clamp(v[3 * i], 0.0, 1.0);
                v[3 * i + 1] = std::clamp(v[3 * i + 1], 0.0, 1.0);
                double wall = std::min({v[3 * i], 1 - v[3 * i], v[3 * i + 1], 1 - v[3 * i + 1]});
                v[3 * i + 2] = std::clamp(std::fabs(v[3 * i + 2]), 1e-9, std::max(wall, 1e-9));
            }
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    double d = std::hypot(v[3 * i] - v[3 * j], v[3 * i + 1] - v[3 * j + 1]);
                    double s = v[3 * i + 2] + v[3 * j + 2];
                    if (s > d) {
                        double f = std::max(d, 0.0) / s * (1 - 1e-12);
                        v[3 * i + 2] = std::max(v[3 * i + 2] * f, 1e-12);
                        v[3 * j + 2] = std::max(v[3 * j + 2] * f, 1e-12);
                    }
                }
        };
        p.instance_of = [](const Construction& c) { return json{{"n", c.as<DiskSet>().count()}}; };
        p.kernels = real_kernels;
        reg.add(p);
    }
    {
        Problem p;
        p.id = "heilbronn";
        p.doc = "Maximize the smallest triangle area of n points in the frame (box) or relative to their hull.";
        p.kind = "plane_points";
        p.minimize = false;
        p.default_instance = {{"n", 11}, {"variant", "box"}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& pp = c.as<PlanePoints>();
            if (auto m = detail::size_mismatch(inst, "n", pp.count()); !m.empty()) return infeasible(m);
            if (!detail::all_finite(pp.coords)) return infeasible("non-finite point");
            std::string why;
            bool hull = detail::inst_str(inst, "variant", "box") == "hull";
            auto v = heilbronn(pp, hull, &why);
            if (!v) return infeasible(why);
            return scored(*v);
        };
        // exact on the ingested points; a triangle frame projects in floating point first
        p.certify = [](const json& inst, const Construction& c, int bits) {
            const auto& pp = c.as<PlanePoints>();
            bool hull = detail::inst_str(inst, "variant", "box") == "hull";
            if (pp.dim != 2 || pp.count() < 3) throw std::runtime_error("need at least 3 planar points");
            if (!hull && pp.frame == Frame::free) throw std::runtime_error("box variant needs a frame");
            std::vector<Q2> q;
            if (pp.frame == Frame::unit_area_equilateral_triangle) {
                for (std::size_t i = 0; i < pp.count(); ++i) {
                    auto a = project_to_frame({pp.coords[2 * i], pp.coords[2 * i + 1]}, pp.frame);
                    q.push_back({Rational(a[0]), Rational(a[1])});
                }
            } else {
                auto e = exact_points(c);
                for (std::size_t i = 0; i < pp.count(); ++i) {
                    Q2 a{e[2 * i], e[2 * i + 1]};
                    if (pp.frame == Frame::unit_square)
                        for (auto& x : a) x = std::clamp(x, Rational(0), Rational(1));
                    q.push_back(a);
                }
            }
            std::optional<Rational> m;
            for (std::size_t i = 0; i < q.size(); ++i)
                for (std::size_t j = i + 1; j < q.size(); ++j)
                    for (std::size_t k = j + 1; k < q.size(); ++k) {
                        Rational a = tri_area2_exact(q[i], q[j], q[k]) / 2;
                        if (!m || a < *m) m = a;
                    }
            if (!hull) return exact_result(*m, bits);
            Rational h = hull_area_exact(q);
            if (h == 0) throw std::runtime_error("degenerate convex hull");
            return exact_result(*m / h, bits);
        };
        p.random = [](const json& inst, Rng& rng) {
            PlanePoints pp;
            bool hull = detail::inst_str(inst, "variant", "box") == "hull";
            pp.frame = parse_frame_name(detail::inst_str(inst, "frame", hull ? "free" : "unit_square"));
            long n = detail::inst_long(inst, "n", 11);
            for (long i = 0; i < n; ++i) {
                auto a = frame_sample(pp.frame, rng);
                pp.coords.push_back(a[0]);
                pp.coords.push_back(a[1]);
            }
            return Construction(pp);
        };
        p.repair = [](const json&, Construction& c) {
            auto& pp = c.as<PlanePoints>();
            if (pp.dim != 2) return;
            for (std::size_t i = 0; i < pp.count(); ++i) {
                auto a = project_to_frame({pp.coords[2 * i], pp.coords[2 * i + 1]}, pp.frame);
                pp.coords[2 * i] = a[0];
                pp.coords[2 * i + 1] = a[1];
            }
        };
        p.instance_of = [](const Construction& c) {
            const auto& pp = c.as<PlanePoints>();
            return json{{"n", pp.count()}, {"frame", frame_name(pp.frame)}};
        };
        p.kernels = point_kernels;
        reg.add(p);
    }
    {
        Problem p;
        p.id = "maxmin_ratio";
        p.doc = "Minimize (max pairwise distance) / (min pairwise distance) of n distinct points in R^d.";
        p.kind = "plane_points";
        p.minimize = true;
        p.default_instance = {{"d", 2}, {"n", 16}};
        p.evaluate = [](const json& inst, const Construction& c) -> EvaluationReport {
            const auto& pp = c.as<PlanePoints>();
            if (auto m = detail::size_mismatch(inst, "n", pp.count()); !m.empty()) return infeasible(m);
            if (auto m = detail::size_mismatch(inst, "d", static_cast<std::size_t>(pp.dim)); !m.empty()) return infeasible(m);
            if (!detail::all_finite(pp.coords)) return infeasible("non-finite point");
            if (pp.count() < 2) return infeasible("need n >= 2");
            auto r = maxmin_ratio(pp.coords, pp.dim);
            if (!r) return infeasible("coincident points");
            return scored(*r);
        };
        p.certify = [](const json&, const Construction& c, int bits) {
            const auto& pp = c.as<PlanePoints>();
            auto e = exact_points(c);
            const auto d = static_cast<std::size_t>(pp.dim);
            const std::size_t n = e.size() / d;
            std::optional<Rational> lo, hi;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    Rational s(0);
                    for (std::size_t k = 0; k < d; ++k) s += (e[i * d + k] - e[j * d + k]) * (e[i * d + k] - e[j * d + k]);
                    if (!lo || s < *lo) lo = s;
                    if (!hi || s > *hi) hi = s;
                }
            if (!lo || *lo == 0) throw std::runtime_error("coincident points");
            return interval_result(sqrt(Interval(Rational(*hi / *lo))), bits);
        };
        p.random = [](const json& inst, Rng& rng) {
            PlanePoints pp;
            pp.dim = static_cast<int>(detail::inst_long(inst, "d", 2));
            long n = detail::inst_long(inst, "n", 16);
            for (long i = 0; i < n * pp.dim; ++i) pp.coords.push_back(rng.uniform());
            return Construction(pp);
        };
        p.instance_of = [](const Construction& c) {
            const auto& pp = c.as<PlanePoints>();
            return json{{"d", pp.dim}, {"n", pp.count()}};
        };
        p.kernels = point_kernels;
        reg.add(p);
    }
}

}  // namespace evo
