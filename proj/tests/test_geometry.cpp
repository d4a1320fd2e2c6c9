#include <doctest.h>

#include <cmath>

#include "evo/certify.hpp"
#include "evo/geometry.hpp"
#include "evo/problem.hpp"

using namespace evo;
using namespace evo::geometry;

namespace {

EvaluationReport run(const std::string& id, const json& c, json inst = json::object()) {
    const auto& p = Registry::get().at(id);
    auto con = construction_from_json(c);
    return evaluate(p, resolve_instance(p, inst, &con), con);
}

Construction baseline(const std::string& id, const json& params) { return *Registry::get().at(id).baseline(params); }

json sphere(int d, json pts) { return {{"kind", "sphere_points"}, {"d", d}, {"points", pts}}; }

// random rotation in R^3 from three Euler angles
std::vector<double> rotate3(const std::vector<double>& v, double a, double b, double g) {
    double R[3][3] = {{std::cos(a) * std::cos(b), std::cos(a) * std::sin(b) * std::sin(g) - std::sin(a) * std::cos(g),
                       std::cos(a) * std::sin(b) * std::cos(g) + std::sin(a) * std::sin(g)},
                      {std::sin(a) * std::cos(b), std::sin(a) * std::sin(b) * std::sin(g) + std::cos(a) * std::cos(g),
                       std::sin(a) * std::sin(b) * std::cos(g) - std::cos(a) * std::sin(g)},
                      {-std::sin(b), std::cos(b) * std::sin(g), std::cos(b) * std::cos(g)}};
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); i += 3)
        for (int r = 0; r < 3; ++r) out[i + r] = R[r][0] * v[i] + R[r][1] * v[i + 1] + R[r][2] * v[i + 2];
    return out;
}

// Monte Carlo estimates of the union area and of int (cover count)^2 over the bounding box
std::pair<double, double> kakeya_mc(const std::vector<double>& x, KakeyaShape shape, int samples, Rng& rng,
                                    double& se_union) {
    const double n = static_cast<double>(x.size());
    double lo = 1e9, hi = -1e9;
    for (double v : x) {
        lo = std::min(lo, v);
        hi = std::max(hi, v + 2);
    }
    const double box = hi - lo;
    double hits = 0, sq = 0;
    for (int s = 0; s < samples; ++s) {
        double px = rng.uniform(lo, hi), py = rng.uniform();
        int cnt = 0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            double J = static_cast<double>(j + 1);
            double l = x[j] + py * J / n;
            double r = x[j] + 1 / n + py * (shape == KakeyaShape::triangle ? J - 1 : J) / n;
            if (px >= l && px <= r) ++cnt;
        }
        if (cnt) hits += 1;
        sq += cnt * cnt;
    }
    double p = hits / samples;
    se_union = box * std::sqrt(p * (1 - p) / samples);
    return {p * box, sq / samples * box};
}

// mean of x^a y^b z^c over the unit sphere
double sphere_moment(int a, int b, int c) {
    if (a % 2 || b % 2 || c % 2) return 0;
    auto df = [](int k) {
        double r = 1;
        for (int i = k; i > 1; i -= 2) r *= i;
        return r;
    };
    return df(a - 1) * df(b - 1) * df(c - 1) / df(a + b + c + 1);
}

}  // namespace

TEST_CASE("kissing anchors") {
    auto hex = baseline("kissing", {{"d", 2}});
    auto r = evaluate(Registry::get().at("kissing"), {{"d", 2}, {"n", 6}}, hex);
    REQUIRE(r.feasible);
    CHECK(r.raw <= 1e-12);
    CHECK(run("kissing", sphere(2, {{1, 0}, {1, 0}}), {{"n", 2}, {"d", 2}}).raw == doctest::Approx(2.0));
    CHECK(run("kissing", sphere(2, {{1, 0}}), {{"n", 1}, {"d", 2}}).raw == 0);

    auto ico = baseline("tammes", {{"n", 12}});
    CHECK(evaluate(Registry::get().at("kissing"), {{"d", 3}, {"n", 12}}, ico).raw == 0);
    CHECK(2 * tammes_min_distance(ico.as<SpherePoints>().coords, 3) == doctest::Approx(2.1029).epsilon(1e-4));
}

TEST_CASE("kissing baselines certify below 1e-20") {
    const long counts[] = {2, 6, 12, 24};
    for (int d = 1; d <= 4; ++d) {
        auto c = baseline("kissing", {{"d", d}});
        CHECK(c.as<SpherePoints>().count() == static_cast<std::size_t>(counts[d - 1]));
        auto cert = certify("kissing", {{"d", d}}, c, 256);
        CHECK(cert.hi_d < 1e-20);
        CHECK(cert.lo_d <= cert.hi_d);
    }
}

TEST_CASE("sphere normalisation is idempotent") {
    Rng rng(5);
    std::vector<double> v;
    for (int i = 0; i < 300; ++i) v.push_back(rng.normal() * 7);
    auto once = normalized(v, 3);
    CHECK(normalized(once, 3) == once);
    for (std::size_t i = 0; i < once.size(); i += 3)
        CHECK(std::fabs(std::sqrt(once[i] * once[i] + once[i + 1] * once[i + 1] + once[i + 2] * once[i + 2]) - 1) < 1e-12);
}

TEST_CASE("rigid motion invariance") {
    Rng rng(8);
    for (int t = 0; t < 10; ++t) {
        std::vector<double> v;
        for (int i = 0; i < 24; ++i) v.push_back(rng.normal());
        v = normalized(v, 3);
        auto w = rotate3(v, rng.uniform(0, 6), rng.uniform(0, 6), rng.uniform(0, 6));
        CHECK(std::fabs(*thomson_energy(v, 3) - *thomson_energy(w, 3)) < 1e-12 * *thomson_energy(v, 3));
        CHECK(std::fabs(tammes_min_distance(v, 3) - tammes_min_distance(w, 3)) < 1e-12);
        CHECK(std::fabs(kissing_penalty(v, 3) - kissing_penalty(w, 3)) < 1e-12);
    }
}

TEST_CASE("thomson and tammes tables") {
    CHECK(run("thomson", sphere(3, {{0, 0, 1}, {0, 0, -3}}), {{"n", 2}}).raw == doctest::Approx(0.5).epsilon(1e-15));
    auto t5 = baseline("thomson", {{"n", 5}});
    auto e5 = evaluate(Registry::get().at("thomson"), {{"n", 5}}, t5);
    CHECK(std::fabs(e5.raw - 6.474691495) < 1e-8);
    CHECK_FALSE(run("thomson", sphere(3, {{0, 0, 1}, {0, 0, 2}}), {{"n", 2}}).feasible);

    auto cert = certify("thomson", {{"n", 5}}, t5, 128);
    CHECK(interval_width(cert) < 1e-20);
    // the table value is rounded to 9 places; the enclosure sits within that rounding
    CHECK(std::fabs(cert.lo_d - 6.474691495) < 5e-10);

    Rng rng(13);
    const auto& th = Registry::get().at("thomson");
    const auto& ta = Registry::get().at("tammes");
    for (int t = 0; t < 30; ++t) {
        auto c5 = th.random({{"n", 5}}, rng);
        CHECK(evaluate(th, {{"n", 5}}, c5).raw >= 6.474691495 - 1e-9);
        auto c3 = ta.random({{"n", 3}}, rng);
        CHECK(evaluate(ta, {{"n", 3}}, c3).raw <= 1.73205081 + 1e-9);
    }

    CHECK(run("tammes", sphere(3, {{0, 0, 1}, {0, 0, -1}}), {{"n", 2}}).raw == doctest::Approx(2.0));
    auto t3 = baseline("tammes", {{"n", 3}});
    CHECK(evaluate(ta, {{"n", 3}}, t3).raw == doctest::Approx(1.73205081).epsilon(1e-9));
    auto t4 = baseline("tammes", {{"n", 4}});
    CHECK(evaluate(ta, {{"n", 4}}, t4).raw == doctest::Approx(std::sqrt(8.0 / 3)).epsilon(1e-12));
    auto t12 = baseline("tammes", {{"n", 12}});
    CHECK(evaluate(ta, {{"n", 12}}, t12).raw == doctest::Approx(1.05146222).epsilon(1e-8));
    auto c12 = certify("tammes", {{"n", 12}}, t12, 256);
    CHECK(c12.lo_d <= 1.0514622243);
    CHECK(c12.hi_d >= 1.0514622241);
}

TEST_CASE("spherical design anchors") {
    CHECK(spherical_design_error(std::vector<double>{0, 0, 1}, 3, 1) == doctest::Approx(3.0));
    auto oct = baseline("spherical_design", {{"d", 3}});
    const auto& o = oct.as<SpherePoints>();
    CHECK(std::fabs(spherical_design_error(o.coords, 3, 3)) < 1e-10);
    CHECK(spherical_design_error(o.coords, 3, 4) > 1e-3);
    // moment oracle: averages of monomials of degree <= 3 match the sphere
    for (int a = 0; a <= 3; ++a)
        for (int b = 0; a + b <= 3; ++b)
            for (int c = 0; a + b + c <= 3; ++c) {
                double s = 0;
                for (std::size_t i = 0; i < o.count(); ++i)
                    s += std::pow(o.coords[3 * i], a) * std::pow(o.coords[3 * i + 1], b) * std::pow(o.coords[3 * i + 2], c);
                CHECK(s / static_cast<double>(o.count()) == doctest::Approx(sphere_moment(a, b, c)));
            }
    auto cert = certify("spherical_design", {{"d", 3}, {"n", 6}, {"t", 3}}, oct, 256);
    CHECK(cert.hi_d < 1e-8);

    for (int t = 1; t <= 10; ++t) {
        auto poly = baseline("spherical_design", {{"d", 2}, {"t", t}});
        CHECK(std::fabs(spherical_design_error(poly.as<SpherePoints>().coords, 2, t)) < 1e-10);
    }
    // circle oracle: error = 2 sum_k |sum_i e^{i k theta_i}|^2
    Rng rng(21);
    std::vector<double> th, pts;
    for (int i = 0; i < 7; ++i) {
        th.push_back(rng.uniform(0, 2 * M_PI));
        pts.push_back(std::cos(th.back()));
        pts.push_back(std::sin(th.back()));
    }
    double want = 0;
    for (int k = 1; k <= 4; ++k) {
        double re = 0, im = 0;
        for (double a : th) {
            re += std::cos(k * a);
            im += std::sin(k * a);
        }
        want += 2 * (re * re + im * im);
    }
    CHECK(spherical_design_error(pts, 2, 4) == doctest::Approx(want).epsilon(1e-10));
    CHECK_FALSE(run("spherical_design", sphere(4, {{1, 0, 0, 0}}), {{"n", 1}, {"d", 4}, {"t", 1}}).feasible);
}

TEST_CASE("kakeya slice areas") {
    CHECK(kakeya_union_area(std::vector<Rational>{0}, KakeyaShape::triangle) == Rational(1, 2));
    CHECK(kakeya_union_area(std::vector<Rational>{0}, KakeyaShape::parallelogram) == 1);
    CHECK(*kakeya_s_score({0.3}, KakeyaShape::triangle) == doctest::Approx(1.0));

    auto k1 = keich_offsets_exact(1);
    CHECK(k1 == std::vector<Rational>{0, 0});
    auto k2 = keich_offsets_exact(2);
    CHECK(k2 == std::vector<Rational>{0, Rational(-1, 8), 0, Rational(-1, 8)});

    auto keich = baseline("kakeya_area", {{"k", 4}});
    double a16 = kakeya_union_area(keich.as<KakeyaOffsets>().x, KakeyaShape::triangle);
    CHECK(a16 < kakeya_union_area(std::vector<double>(16, 0.0), KakeyaShape::triangle));
    auto cert = certify("kakeya_area", {}, keich, 256);
    CHECK(cert.exact->get_d() == doctest::Approx(a16).epsilon(1e-12));

    double prev = 1;
    for (int k = 2; k <= 7; ++k) {
        double a = kakeya_union_area(keich_offsets(k), KakeyaShape::triangle);
        CHECK(a < prev);
        prev = a;
    }
}

TEST_CASE("kakeya measures against Monte Carlo") {
    Rng rng(17);
    for (auto shape : {KakeyaShape::triangle, KakeyaShape::parallelogram}) {
        std::vector<double> x;
        for (int i = 0; i < 6; ++i) x.push_back(rng.uniform(-0.4, 0.2));
        double se = 0;
        auto [u, q] = kakeya_mc(x, shape, 1000000, rng, se);
        auto m = kakeya_measures(x, shape);
        CHECK(std::fabs(m.union_area - u) <= 3 * se);
        CHECK(m.sum_pair_intersections == doctest::Approx(q).epsilon(0.02));
        CHECK(m.union_area <= m.sum_areas + 1e-12);
        CHECK(m.union_area >= (shape == KakeyaShape::triangle ? 0.5 : 1.0) / 6 - 1e-12);
    }
}

TEST_CASE("kakeya exact invariants") {
    Rng rng(19);
    for (int t = 0; t < 10; ++t) {
        std::vector<Rational> x;
        std::vector<double> xd;
        for (int i = 0; i < 5; ++i) {
            x.push_back(ratio(static_cast<long>(rng.below(40)) - 20, 37));
            xd.push_back(x.back().get_d());
        }
        auto m = kakeya_measures(x, KakeyaShape::triangle);
        CHECK(m.sum_areas == Rational(1, 2));
        double s = *kakeya_s_score(xd, KakeyaShape::triangle);
        CHECK(s <= 1 + 1e-12);
        CHECK(m.union_area.get_d() == doctest::Approx(kakeya_union_area(xd, KakeyaShape::triangle)).epsilon(1e-12));
    }
}

TEST_CASE("packing in a dilate") {
    auto one = run("pack_dilate", {{"kind", "poses"}, {"shape", "hexagon"}, {"poses", {{0.3, -2, 0}}}}, {{"n", 1}});
    CHECK(one.raw == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(one.valid);
    auto two = run("pack_dilate", {{"kind", "poses"}, {"shape", "square"}, {"poses", {{0, 0, 0}, {0, 0, 0}}}},
                   {{"shape", "square"}, {"n", 2}});
    CHECK(two.penalty == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(two.valid);

    double a[6] = {0, 0, 0, 0, 0, 0}, b[6] = {0.5, 0, 0, 0, 0, 0};
    CHECK(cube_overlap_volume(a, a) == doctest::Approx(1.0));
    CHECK(cube_overlap_volume(a, b) == doctest::Approx(0.5));

    Rng rng(23);
    // polygon overlap against Monte Carlo
    for (int t = 0; t < 3; ++t) {
        auto p = pose_polygon(PoseShape::hexagon, 0, 0, rng.uniform(0, 1));
        auto q = pose_polygon(PoseShape::hexagon, rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1));
        auto in = [](const Poly2& poly, double x, double y) {
            for (std::size_t i = 0; i < poly.size(); ++i) {
                auto u = poly[i], v = poly[(i + 1) % poly.size()];
                if ((v[0] - u[0]) * (y - u[1]) - (v[1] - u[1]) * (x - u[0]) < 0) return false;
            }
            return true;
        };
        int hits = 0;
        const int N = 400000;
        for (int s = 0; s < N; ++s) {
            double x = rng.uniform(-1, 1), y = rng.uniform(-1, 1);
            hits += in(p, x, y) && in(q, x, y);
        }
        CHECK(polygon_area(convex_intersection(p, q)) == doctest::Approx(4.0 * hits / N).epsilon(0.02));
    }
    // rotated cube overlap against Monte Carlo
    double c[6] = {0.3, 0.2, -0.1, 0.4, 0.7, 0.2};
    auto inside = [](const double* pose, double x, double y, double z) {
        double ca = std::cos(pose[3]), sa = std::sin(pose[3]), cb = std::cos(pose[4]), sb = std::sin(pose[4]),
               cg = std::cos(pose[5]), sg = std::sin(pose[5]);
        double R[3][3] = {{ca * cb, ca * sb * sg - sa * cg, ca * sb * cg + sa * sg},
                          {sa * cb, sa * sb * sg + ca * cg, sa * sb * cg - ca * sg},
                          {-sb, cb * sg, cb * cg}};
        double d[3] = {x - pose[0], y - pose[1], z - pose[2]};
        for (int k = 0; k < 3; ++k) {
            double l = R[0][k] * d[0] + R[1][k] * d[1] + R[2][k] * d[2];
            if (std::fabs(l) > 0.5) return false;
        }
        return true;
    };
    int hits = 0;
    const int N = 400000;
    for (int s = 0; s < N; ++s) {
        double x = rng.uniform(-0.5, 0.5), y = rng.uniform(-0.5, 0.5), z = rng.uniform(-0.5, 0.5);
        hits += inside(c, x, y, z);
    }
    CHECK(cube_overlap_volume(a, c) == doctest::Approx(static_cast<double>(hits) / N).epsilon(0.02));
    CHECK(cube_overlap_volume(c, a) == doctest::Approx(cube_overlap_volume(a, c)).epsilon(1e-9));

    // bisection agrees with the closed form; certification encloses separated configurations
    for (auto shape : {PoseShape::hexagon, PoseShape::square, PoseShape::cube}) {
        PoseSet ps;
        ps.shape = shape;
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < ps.stride(); ++k) ps.vals.push_back(k < (shape == PoseShape::cube ? 3 : 2) ? 3.0 * i + rng.uniform() : rng.uniform(0, 6));
        auto pr = pack_dilate(ps);
        CHECK(pr.scale == doctest::Approx(pack_scale_closed_form(ps)).epsilon(1e-9));
        CHECK(pr.penalty == 0);
        Precision prec(128);
        auto enc = pack_dilate_certified(ps);
        CHECK(enc.lo_d() <= pr.scale + 1e-9);
        CHECK(enc.hi_d() >= pr.scale - 1e-9);
        CHECK(enc.width().hi_d() < 1e-20);
    }
    for (auto shape : {"hexagon", "square", "cube"}) {
        auto g = baseline("pack_dilate", {{"shape", shape}, {"n", 5}});
        auto r = evaluate(Registry::get().at("pack_dilate"), {{"shape", shape}, {"n", 5}}, g);
        CHECK(r.valid);
    }
}

TEST_CASE("circle packing by radius sum") {
    json one = {{"kind", "disks"}, {"disks", {{0.5, 0.5, 0.5}}}};
    CHECK(run("pack_circles", one, {{"n", 1}}).raw == doctest::Approx(0.5));
    json two = {{"kind", "disks"}, {"disks", {{0.25, 0.25, 0.25}, {0.75, 0.75, 0.25}}}};
    CHECK(run("pack_circles", two, {{"n", 2}}).raw == doctest::Approx(0.5));
    json bad = {{"kind", "disks"}, {"disks", {{0.25, 0.5, 0.25}, {0.7499, 0.5, 0.25}}}};
    auto r = run("pack_circles", bad, {{"n", 2}});
    CHECK_FALSE(r.feasible);
    CHECK(r.details["j"] == 1);
    auto cert = certify("pack_circles", {}, construction_from_json(two), 128);
    CHECK(*cert.exact == Rational(1, 2));

    const auto& p = Registry::get().at("pack_circles");
    Rng rng(2);
    auto c = p.random({{"n", 10}}, rng);
    CHECK(evaluate(p, {{"n", 10}}, c).feasible);
    auto& v = c.as<DiskSet>().vals;
    for (double& x : v) x += rng.normal() * 0.05;
    p.repair({}, c);
    CHECK(evaluate(p, {{"n", 10}}, c).feasible);
}

TEST_CASE("heilbronn and max/min ratio") {
    json tri = {{"kind", "plane_points"}, {"frame", "unit_square"}, {"points", {{0, 0}, {1, 0}, {0, 1}}}};
    CHECK(run("heilbronn", tri, {{"n", 3}}).raw == doctest::Approx(0.5));
    CHECK(*certify("heilbronn", {{"n", 3}}, construction_from_json(tri), 128).exact == Rational(1, 2));
    json col = {{"kind", "plane_points"}, {"frame", "unit_square"}, {"points", {{0, 0}, {0.5, 0.5}, {1, 1}, {0, 1}}}};
    CHECK(run("heilbronn", col, {{"n", 4}}).raw == 0);
    json sq = {{"kind", "plane_points"}, {"frame", "free"}, {"points", {{0, 0}, {2, 0}, {2, 2}, {0, 2}}}};
    CHECK(run("heilbronn", sq, {{"n", 4}, {"variant", "hull"}}).raw == doctest::Approx(0.5));
    CHECK_FALSE(run("heilbronn", sq, {{"n", 4}, {"variant", "box"}}).feasible);
    json line = {{"kind", "plane_points"}, {"points", {{0, 0}, {1, 1}, {2, 2}}}};
    CHECK_FALSE(run("heilbronn", line, {{"n", 3}, {"variant", "hull"}}).feasible);
    // triangle frame: outside points are projected, frame vertices give area 1
    const double s = triangle_frame_side();
    json frame = {{"kind", "plane_points"},
                  {"frame", "unit_area_equilateral_triangle"},
                  {"points", {{-1, -1}, {s + 1, -0.5}, {s / 2, 5}}}};
    CHECK(run("heilbronn", frame, {{"n", 3}}).raw == doctest::Approx(1.0).epsilon(1e-12));

    json two = {{"kind", "plane_points"}, {"points", {{0, 0}, {3, 4}}}};
    CHECK(run("maxmin_ratio", two, {{"n", 2}}).raw == doctest::Approx(1.0));
    json corners = {{"kind", "plane_points"}, {"points", {{0, 0}, {1, 0}, {1, 1}, {0, 1}}}};
    CHECK(run("maxmin_ratio", corners, {{"n", 4}}).raw == doctest::Approx(std::sqrt(2.0)));
    json hex = {{"kind", "plane_points"}, {"points", json::array()}};
    hex["points"].push_back({0, 0});
    for (int k = 0; k < 6; ++k) hex["points"].push_back({std::cos(k * M_PI / 3), std::sin(k * M_PI / 3)});
    CHECK(run("maxmin_ratio", hex, {{"n", 7}}).raw == doctest::Approx(2.0).epsilon(1e-12));
    auto cert = certify("maxmin_ratio", {{"n", 4}}, construction_from_json(corners), 128);
    CHECK(cert.lo_d <= std::sqrt(2.0));
    CHECK(cert.hi_d >= std::sqrt(2.0));
    json dup = {{"kind", "plane_points"}, {"points", {{0, 0}, {0, 0}}}};
    CHECK_FALSE(run("maxmin_ratio", dup, {{"n", 2}}).feasible);
}
