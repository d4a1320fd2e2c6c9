#pragma once
// Point-set and pose evaluators. Sphere problems normalise on ingestion;
// packings reject or penalise instead of projecting.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "evo/construction.hpp"
#include "evo/interval.hpp"

namespace evo::geometry {

// ---- sphere point sets ----

// unit vectors; a zero vector stays zero (callers reject it)
std::vector<double> normalized(const std::vector<double>& coords, int dim);

double kissing_penalty(const std::vector<double>& coords, int dim);
// nullopt when two points coincide (distance <= 1e-12)
std::optional<double> thomson_energy(const std::vector<double>& coords, int dim);
double tammes_min_distance(const std::vector<double>& coords, int dim);
// sphere dimension = dim - 1, supported for dim in {2, 3}
double spherical_design_error(const std::vector<double>& coords, int dim, int t);

// Interval versions; inputs are the exact coordinates (not yet normalized).
Interval kissing_penalty(const std::vector<Rational>& coords, int dim);
Interval thomson_energy(const std::vector<Rational>& coords, int dim);
Interval tammes_min_distance(const std::vector<Rational>& coords, int dim);
Interval spherical_design_error(const std::vector<Rational>& coords, int dim, int t);

long design_multiplicity(int d, int k);

// ---- 2-D Kakeya needle sets ----

template <class T>
struct KakeyaMeasures {
    T union_area;
    T sum_areas;
    T sum_pair_intersections;  // over ordered pairs, diagonal included
};

double kakeya_union_area(const std::vector<double>& x, KakeyaShape shape);
Rational kakeya_union_area(const std::vector<Rational>& x, KakeyaShape shape);
KakeyaMeasures<double> kakeya_measures(const std::vector<double>& x, KakeyaShape shape);
KakeyaMeasures<Rational> kakeya_measures(const std::vector<Rational>& x, KakeyaShape shape);
// nullopt when the union is degenerate
std::optional<double> kakeya_s_score(const std::vector<double>& x, KakeyaShape shape);
std::vector<double> keich_offsets(int k);
std::vector<Rational> keich_offsets_exact(int k);

// ---- planar point sets ----

// projection into the frame (identity for free frames)
std::array<double, 2> project_to_frame(std::array<double, 2> p, Frame f);
double triangle_frame_side();
std::optional<double> heilbronn(const PlanePoints& pp, bool hull_variant, std::string* why);
std::optional<double> maxmin_ratio(const std::vector<double>& coords, int dim);

// ---- packings ----

struct PackResult {
    double scale = 0;
    double penalty = 0;
};
PackResult pack_dilate(const PoseSet& ps);
// closed form for the container scale, used as oracle and by certification
double pack_scale_closed_form(const PoseSet& ps);
// enclosure of scale + penalty; exact pose values override the doubles when given
Interval pack_dilate_certified(const PoseSet& ps, const std::vector<Rational>* exact = nullptr);

// 2-D convex polygon helpers (counter-clockwise vertex lists)
using Poly2 = std::vector<std::array<double, 2>>;
double polygon_area(const Poly2& p);
Poly2 convex_intersection(const Poly2& a, const Poly2& b);
Poly2 pose_polygon(PoseShape shape, double cx, double cy, double theta);
double cube_overlap_volume(const double* pose_a, const double* pose_b);

struct DiskViolation {
    int i = -1, j = -1;  // j < 0: container violation of disk i
    std::string what;
};
std::optional<DiskViolation> disk_violation(const std::vector<double>& vals, double tol);
std::optional<DiskViolation> disk_violation(const std::vector<Rational>& vals, const Rational& tol);

}  // namespace evo::geometry
