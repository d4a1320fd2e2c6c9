#pragma once
// Construction: tagged union of every per-problem payload plus its JSON codec.
// Payloads carry doubles for search; when a construction was read from JSON
// the original document is kept so certification can re-read exact values
// ([num, den] pairs, decimal strings) that a double would round.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "evo/num.hpp"

namespace evo {

struct StepFunction {
    std::vector<double> heights;
    Rational a{-1, 4}, b{1, 4};
    bool nonneg = true;
};

struct HLInstance {
    std::vector<double> y, k;
};

struct EigenCombo {
    std::vector<double> coeffs;
    double scan_limit = 20.0;
    long scan_points = 200000;
};

// flat row-major, dim coordinates per point
struct SpherePoints {
    int dim = 3;
    std::vector<double> coords;
    std::size_t count() const { return dim > 0 ? coords.size() / static_cast<std::size_t>(dim) : 0; }
};

enum class KakeyaShape { triangle, parallelogram };
struct KakeyaOffsets {
    KakeyaShape shape = KakeyaShape::triangle;
    std::vector<double> x;
};

enum class PoseShape { hexagon, square, cube };
// 2-D: x y theta; 3-D: x y z alpha beta gamma (z-y-x Euler angles)
struct PoseSet {
    PoseShape shape = PoseShape::hexagon;
    std::vector<double> vals;
    int stride() const { return shape == PoseShape::cube ? 6 : 3; }
    std::size_t count() const { return vals.size() / static_cast<std::size_t>(stride()); }
};

struct DiskSet {
    std::vector<double> vals;  // x y r triples
    std::size_t count() const { return vals.size() / 3; }
};

enum class Frame { unit_square, unit_area_equilateral_triangle, free };
struct PlanePoints {
    int dim = 2;
    Frame frame = Frame::free;
    std::vector<double> coords;
    std::size_t count() const { return coords.size() / static_cast<std::size_t>(dim); }
};

struct SignSeq {
    std::vector<int> a;
};

struct RingInstance {
    std::vector<double> u, v;
};

struct IntSet {
    std::vector<long> elems;
};

struct GridSubset {
    int n = 1;
    std::vector<std::array<int, 2>> cells;
};

struct Tiling {
    int n = 1;
    std::vector<std::array<int, 4>> tiles;  // r1 r2 c1 c2, 1-based inclusive
};

struct Stack {
    std::vector<double> positions;
};

struct WeightedHypergraph {
    std::vector<double> weights;
    std::vector<std::array<int, 3>> edges;  // sorted triples
};

struct ResidueSet {
    long m = 2;
    std::vector<long> elems;
};

struct FFSet {
    int p = 2, d = 1;
    std::vector<std::vector<int>> points;
};

struct JointPMF {
    std::vector<std::array<Rational, 2>> support;
    std::vector<double> probs;
};

struct DiffBasis {
    long n = 1;
    std::vector<long> elems;
};

using Payload = std::variant<StepFunction, HLInstance, EigenCombo, SpherePoints, KakeyaOffsets, PoseSet, DiskSet,
                             PlanePoints, SignSeq, RingInstance, IntSet, GridSubset, Tiling, Stack,
                             WeightedHypergraph, ResidueSet, FFSet, JointPMF, DiffBasis>;

struct Construction {
    Payload payload;
    std::optional<json> source;

    Construction() = default;
    template <class P>
    Construction(P p) : payload(std::move(p)) {}  // NOLINT

    template <class P>
    P& as() { return std::get<P>(payload); }
    template <class P>
    const P& as() const { return std::get<P>(payload); }
    template <class P>
    bool is() const { return std::holds_alternative<P>(payload); }

    std::string kind() const;
    // drop the exact source after any in-place edit
    void touch() { source.reset(); }
};

json to_json(const Construction& c);
Construction construction_from_json(const json& j);
// json with the same numbers as the payload, ignoring any source document
json payload_to_json(const Payload& p);

const char* kakeya_shape_name(KakeyaShape s);
const char* pose_shape_name(PoseShape s);
const char* frame_name(Frame f);

}  // namespace evo
