#include "evo/construction.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace evo {

namespace {

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument(what); }

void require(bool ok, const std::string& what) {
    if (!ok) bad(what);
}

const json& field(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) bad(std::string("missing field '") + name + "'");
    return *it;
}

std::vector<double> finite_doubles(const json& arr, const char* name) {
    auto v = doubles_from_json(arr);
    for (double x : v) require(std::isfinite(x), std::string("non-finite value in '") + name + "'");
    return v;
}

std::vector<long> longs(const json& arr) {
    require(arr.is_array(), "expected an integer array");
    std::vector<long> out;
    for (const auto& x : arr) {
        require(x.is_number_integer(), "expected integers, got " + x.dump());
        out.push_back(x.get<long>());
    }
    return out;
}

std::vector<long> sorted_distinct(std::vector<long> v, const char* what) {
    std::sort(v.begin(), v.end());
    require(std::adjacent_find(v.begin(), v.end()) == v.end(), std::string("duplicate element in ") + what);
    return v;
}

// points given as [[c0, c1, ...], ...]; returns flat coords and the common dimension
std::vector<double> flat_points(const json& arr, int& dim) {
    require(arr.is_array(), "points must be an array");
    std::vector<double> out;
    dim = -1;
    for (const auto& p : arr) {
        require(p.is_array(), "each point must be an array");
        if (dim < 0) dim = static_cast<int>(p.size());
        require(static_cast<int>(p.size()) == dim && dim > 0, "points must share one dimension");
        for (const auto& c : p) {
            double v = double_from_json(c);
            require(std::isfinite(v), "non-finite coordinate");
            out.push_back(v);
        }
    }
    return out;
}

json points_json(const std::vector<double>& flat, int dim) {
    json arr = json::array();
    for (std::size_t i = 0; i + static_cast<std::size_t>(dim) <= flat.size(); i += static_cast<std::size_t>(dim)) {
        json p = json::array();
        for (int c = 0; c < dim; ++c) p.push_back(flat[i + static_cast<std::size_t>(c)]);
        arr.push_back(p);
    }
    return arr;
}

template <class T>
std::vector<T> chunked(const json& arr, std::size_t width, const char* what) {
    require(arr.is_array(), std::string(what) + " must be an array");
    std::vector<T> out;
    for (const auto& row : arr) {
        require(row.is_array() && row.size() == width, std::string("bad entry in ") + what);
        T t{};
        for (std::size_t i = 0; i < width; ++i) {
            require(row[i].is_number_integer(), std::string("integer expected in ") + what);
            t[i] = row[i].get<int>();
        }
        out.push_back(t);
    }
    return out;
}

KakeyaShape parse_kakeya_shape(const std::string& s) {
    if (s == "triangle") return KakeyaShape::triangle;
    if (s == "parallelogram") return KakeyaShape::parallelogram;
    bad("unknown kakeya shape '" + s + "'");
}

PoseShape parse_pose_shape(const std::string& s) {
    if (s == "hexagon") return PoseShape::hexagon;
    if (s == "square") return PoseShape::square;
    if (s == "cube") return PoseShape::cube;
    bad("unknown pose shape '" + s + "'");
}

Frame parse_frame(const std::string& s) {
    if (s == "unit_square") return Frame::unit_square;
    if (s == "unit_area_equilateral_triangle") return Frame::unit_area_equilateral_triangle;
    if (s == "free") return Frame::free;
    bad("unknown frame '" + s + "'");
}

bool is_prime_small(long p) {
    if (p < 2) return false;
    for (long q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

struct Encoder {
    json operator()(const StepFunction& s) const {
        return {{"kind", "step"}, {"n", s.heights.size()}, {"heights", s.heights},
                {"domain", json::array({rational_to_json(s.a), rational_to_json(s.b)})}, {"nonneg", s.nonneg}};
    }
    json operator()(const HLInstance& h) const { return {{"kind", "hl"}, {"y", h.y}, {"k", h.k}}; }
    json operator()(const EigenCombo& e) const {
        return {{"kind", "eigen"}, {"coeffs", e.coeffs}, {"scan_limit", e.scan_limit}, {"scan_points", e.scan_points}};
    }
    json operator()(const SpherePoints& s) const {
        return {{"kind", "sphere_points"}, {"d", s.dim}, {"points", points_json(s.coords, s.dim)}};
    }
    json operator()(const KakeyaOffsets& k) const {
        return {{"kind", "kakeya_offsets"}, {"shape", kakeya_shape_name(k.shape)}, {"n", k.x.size()}, {"x", k.x}};
    }
    json operator()(const PoseSet& p) const {
        return {{"kind", "poses"}, {"shape", pose_shape_name(p.shape)}, {"poses", points_json(p.vals, p.stride())}};
    }
    json operator()(const DiskSet& d) const { return {{"kind", "disks"}, {"disks", points_json(d.vals, 3)}}; }
    json operator()(const PlanePoints& p) const {
        return {{"kind", "plane_points"}, {"frame", frame_name(p.frame)}, {"points", points_json(p.coords, p.dim)}};
    }
    json operator()(const SignSeq& s) const { return {{"kind", "signs"}, {"a", s.a}}; }
    json operator()(const RingInstance& r) const { return {{"kind", "ring"}, {"u", r.u}, {"v", r.v}}; }
    json operator()(const IntSet& s) const { return {{"kind", "intset"}, {"elems", s.elems}}; }
    json operator()(const GridSubset& g) const { return {{"kind", "grid_cells"}, {"n", g.n}, {"cells", g.cells}}; }
    json operator()(const Tiling& t) const { return {{"kind", "tiling"}, {"n", t.n}, {"tiles", t.tiles}}; }
    json operator()(const Stack& s) const { return {{"kind", "stack"}, {"positions", s.positions}}; }
    json operator()(const WeightedHypergraph& h) const {
        return {{"kind", "whyper"}, {"weights", h.weights}, {"edges", h.edges}};
    }
    json operator()(const ResidueSet& r) const { return {{"kind", "residue_set"}, {"m", r.m}, {"elems", r.elems}}; }
    json operator()(const FFSet& f) const {
        return {{"kind", "ff_set"}, {"p", f.p}, {"d", f.d}, {"points", f.points}};
    }
    json operator()(const JointPMF& p) const {
        json sup = json::array();
        for (const auto& s : p.support) sup.push_back(json::array({rational_to_json(s[0]), rational_to_json(s[1])}));
        return {{"kind", "joint_pmf"}, {"support", sup}, {"probs", p.probs}};
    }
    json operator()(const DiffBasis& b) const { return {{"kind", "diff_basis"}, {"n", b.n}, {"elems", b.elems}}; }
};

}  // namespace

const char* kakeya_shape_name(KakeyaShape s) { return s == KakeyaShape::triangle ? "triangle" : "parallelogram"; }

const char* pose_shape_name(PoseShape s) {
    switch (s) {
        case PoseShape::hexagon: return "hexagon";
        case PoseShape::square: return "square";
        default: return "cube";
    }
}

const char* frame_name(Frame f) {
    switch (f) {
        case Frame::unit_square: return "unit_square";
        case Frame::unit_area_equilateral_triangle: return "unit_area_equilateral_triangle";
        default: return "free";
    }
}

std::string Construction::kind() const {
    static const char* const names[] = {"step",  "hl",    "eigen",     "sphere_points", "kakeya_offsets", "poses",
                                        "disks", "plane_points", "signs", "ring",  "intset", "grid_cells",
                                        "tiling", "stack", "whyper", "residue_set", "ff_set", "joint_pmf",
                                        "diff_basis"};
    static_assert(std::size(names) == std::variant_size_v<Payload>);
    return names[payload.index()];
}

json payload_to_json(const Payload& p) { return std::visit(Encoder{}, p); }

json to_json(const Construction& c) { return c.source ? *c.source : payload_to_json(c.payload); }

Construction construction_from_json(const json& j) {
    require(j.is_object(), "construction must be a JSON object");
    const std::string kind = field(j, "kind").get<std::string>();
    Construction c;
    if (kind == "step") {
        StepFunction s;
        s.heights = finite_doubles(field(j, "heights"), "heights");
        if (j.contains("n")) require(j["n"].get<std::size_t>() == s.heights.size(), "n must equal |heights|");
        require(!s.heights.empty(), "step function needs n >= 1");
        if (j.contains("domain")) {
            const auto& d = j["domain"];
            require(d.is_array() && d.size() == 2, "domain must be [a, b]");
            s.a = rational_from_json(d[0]);
            s.b = rational_from_json(d[1]);
        }
        require(s.b > s.a, "domain needs b > a");
        s.nonneg = j.value("nonneg", true);
        if (s.nonneg)
            for (double h : s.heights) require(h >= 0, "nonneg step function with a negative height");
        c.payload = std::move(s);
    } else if (kind == "hl") {
        HLInstance h;
        h.y = finite_doubles(field(j, "y"), "y");
        h.k = finite_doubles(field(j, "k"), "k");
        require(h.y.size() == h.k.size() && !h.y.empty(), "y and k must be nonempty and equal length");
        for (std::size_t i = 1; i < h.y.size(); ++i) require(h.y[i - 1] < h.y[i], "y must be strictly increasing");
        for (double k : h.k) require(k > 0, "k must be positive");
        c.payload = std::move(h);
    } else if (kind == "eigen") {
        EigenCombo e;
        e.coeffs = finite_doubles(field(j, "coeffs"), "coeffs");
        require(std::any_of(e.coeffs.begin(), e.coeffs.end(), [](double x) { return x != 0; }),
                "coeffs must not all be zero");
        e.scan_limit = j.value("scan_limit", 20.0);
        e.scan_points = j.value("scan_points", 200000L);
        require(e.scan_limit > 0 && e.scan_points > 0, "scan_limit and scan_points must be positive");
        c.payload = std::move(e);
    } else if (kind == "sphere_points") {
        SpherePoints s;
        int dim = 0;
        s.coords = flat_points(field(j, "points"), dim);
        s.dim = j.value("d", dim);
        require(dim < 0 || dim == s.dim, "point dimension differs from d");
        require(s.dim >= 1, "d must be >= 1");
        require(!s.coords.empty(), "sphere_points needs at least one point");
        c.payload = std::move(s);
    } else if (kind == "kakeya_offsets") {
        KakeyaOffsets k;
        k.shape = parse_kakeya_shape(j.value("shape", std::string("triangle")));
        k.x = finite_doubles(field(j, "x"), "x");
        if (j.contains("n")) require(j["n"].get<std::size_t>() == k.x.size(), "n must equal |x|");
        require(!k.x.empty(), "kakeya needs n >= 1");
        c.payload = std::move(k);
    } else if (kind == "poses") {
        PoseSet p;
        p.shape = parse_pose_shape(field(j, "shape").get<std::string>());
        const auto& arr = field(j, "poses");
        require(arr.is_array(), "poses must be an array");
        for (const auto& row : arr) {
            require(row.is_array() && static_cast<int>(row.size()) == p.stride(),
                    "each pose needs " + std::to_string(p.stride()) + " numbers");
            for (const auto& x : row) p.vals.push_back(double_from_json(x));
        }
        require(p.count() >= 1, "poses needs at least one pose");
        c.payload = std::move(p);
    } else if (kind == "disks") {
        DiskSet d;
        const auto& arr = field(j, "disks");
        require(arr.is_array(), "disks must be an array");
        for (const auto& row : arr) {
            require(row.is_array() && row.size() == 3, "each disk is [x, y, r]");
            for (const auto& x : row) d.vals.push_back(double_from_json(x));
            require(d.vals.back() > 0, "disk radius must be positive");
        }
        c.payload = std::move(d);
    } else if (kind == "plane_points") {
        PlanePoints p;
        p.frame = parse_frame(j.value("frame", std::string("free")));
        p.coords = flat_points(field(j, "points"), p.dim);
        if (p.dim < 0) p.dim = 2;
        require(p.frame == Frame::free || p.dim == 2, "framed point sets are planar");
        c.payload = std::move(p);
    } else if (kind == "signs") {
        SignSeq s;
        for (long x : longs(field(j, "a"))) {
            require(x == 1 || x == -1, "sign entries must be +1 or -1");
            s.a.push_back(static_cast<int>(x));
        }
        c.payload = std::move(s);
    } else if (kind == "ring") {
        RingInstance r;
        r.u = finite_doubles(field(j, "u"), "u");
        r.v = finite_doubles(field(j, "v"), "v");
        require(r.u.size() == r.v.size(), "u and v must have equal length");
        for (std::size_t i = 0; i < r.u.size(); ++i)
            require(r.u[i] >= 0 && r.v[i] >= 0 && r.u[i] + r.v[i] <= 1 + 1e-12, "need u_i, v_i >= 0, u_i + v_i <= 1");
        c.payload = std::move(r);
    } else if (kind == "intset") {
        IntSet s;
        s.elems = sorted_distinct(longs(field(j, "elems")), "intset");
        c.payload = std::move(s);
    } else if (kind == "grid_cells") {
        GridSubset g;
        g.n = field(j, "n").get<int>();
        require(g.n >= 1, "grid side must be >= 1");
        g.cells = chunked<std::array<int, 2>>(field(j, "cells"), 2, "cells");
        std::set<std::array<int, 2>> seen;
        for (const auto& cell : g.cells) {
            require(cell[0] >= 1 && cell[0] <= g.n && cell[1] >= 1 && cell[1] <= g.n, "cell out of bounds");
            require(seen.insert(cell).second, "duplicate cell");
        }
        c.payload = std::move(g);
    } else if (kind == "tiling") {
        Tiling t;
        t.n = field(j, "n").get<int>();
        require(t.n >= 1, "grid side must be >= 1");
        t.tiles = chunked<std::array<int, 4>>(field(j, "tiles"), 4, "tiles");
        c.payload = std::move(t);
    } else if (kind == "stack") {
        Stack s;
        s.positions = finite_doubles(field(j, "positions"), "positions");
        c.payload = std::move(s);
    } else if (kind == "whyper") {
        WeightedHypergraph h;
        h.weights = finite_doubles(field(j, "weights"), "weights");
        for (double w : h.weights) require(w >= 0, "weights must be non-negative");
        h.edges = chunked<std::array<int, 3>>(field(j, "edges"), 3, "edges");
        std::set<std::array<int, 3>> seen;
        for (auto& e : h.edges) {
            std::sort(e.begin(), e.end());
            for (int v : e) require(v >= 0 && v < static_cast<int>(h.weights.size()), "edge vertex out of range");
            require(!(e[0] == e[1] && e[1] == e[2]), "edge {a,a,a} is not allowed");
            require(seen.insert(e).second, "duplicate edge");
        }
        c.payload = std::move(h);
    } else if (kind == "residue_set") {
        ResidueSet r;
        r.m = field(j, "m").get<long>();
        require(r.m >= 2, "modulus must be >= 2");
        r.elems = sorted_distinct(longs(field(j, "elems")), "residue_set");
        for (long x : r.elems) require(x >= 0 && x < r.m, "residue out of range");
        c.payload = std::move(r);
    } else if (kind == "ff_set") {
        FFSet f;
        f.p = field(j, "p").get<int>();
        f.d = field(j, "d").get<int>();
        require(is_prime_small(f.p), "p must be prime");
        require(f.d >= 1, "d must be >= 1");
        const auto& arr = field(j, "points");
        require(arr.is_array(), "points must be an array");
        for (const auto& row : arr) {
            require(row.is_array() && static_cast<int>(row.size()) == f.d, "each point needs d coordinates");
            std::vector<int> pt;
            for (const auto& x : row) {
                require(x.is_number_integer(), "coordinates must be integers");
                long v = x.get<long>();
                require(v >= 0 && v < f.p, "coordinate out of [0, p)");
                pt.push_back(static_cast<int>(v));
            }
            f.points.push_back(std::move(pt));
        }
        c.payload = std::move(f);
    } else if (kind == "joint_pmf") {
        JointPMF p;
        const auto& sup = field(j, "support");
        require(sup.is_array(), "support must be an array");
        for (const auto& row : sup) {
            require(row.is_array() && row.size() == 2, "support points are [x, y]");
            p.support.push_back({rational_from_json(row[0]), rational_from_json(row[1])});
        }
        p.probs = finite_doubles(field(j, "probs"), "probs");
        require(p.probs.size() == p.support.size(), "probs must match support");
        for (double q : p.probs) require(q >= 0, "probabilities must be non-negative");
        auto s = p.support;
        std::sort(s.begin(), s.end());
        require(std::adjacent_find(s.begin(), s.end()) == s.end(), "support points must be distinct");
        c.payload = std::move(p);
    } else if (kind == "diff_basis") {
        DiffBasis b;
        b.n = field(j, "n").get<long>();
        require(b.n >= 1, "n must be >= 1");
        b.elems = sorted_distinct(longs(field(j, "elems")), "diff_basis");
        c.payload = std::move(b);
    } else {
        bad("unknown construction kind '" + kind + "'");
    }
    c.source = j;
    return c;
}

}  // namespace evo
