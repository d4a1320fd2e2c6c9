#pragma once
// Discrete evaluators and the small exhaustive oracles that check them.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "evo/construction.hpp"

namespace evo::combinatorics {

// ---- Erdos discrepancy ----

struct EdpPrefix {
    long length = 0;        // L
    long ok = 0, total = 0;  // progressions ending at L+1 that keep the bound, out of tau(L+1)
    Rational score() const { return total ? Rational(length) + ratio(ok, total) : Rational(length); }
};
EdpPrefix edp_prefix(const std::vector<int>& a, long D);
// longest sequence of discrepancy <= D; D in {0, 1} only
long edp_longest(long D);

// ---- ring loading ----

// min over z of max_k |sum_{i<=k} z_i - sum_{i>k} z_i|, n <= 24
double ring_loading(const std::vector<double>& u, const std::vector<double>& v);
Rational ring_loading(const std::vector<Rational>& u, const std::vector<Rational>& v);

// ---- sums and differences ----

std::size_t sumset_size(const std::vector<long>& a);
std::size_t diffset_size(const std::vector<long>& a);

// ---- isosceles-free grids ----

// unordered {a, c} pairs with |a - b| = |b - c|, summed over apexes b
long isosceles_count(const std::vector<std::array<int, 2>>& cells);

// ---- IMO 2025/6 tiling ----

struct TilingScore {
    long tiles = 0;
    long penalty = 0;  // sum |1 - uncovered| over rows and columns
    std::string error;  // nonempty: overlap or out of bounds
};
TilingScore imo_tiling(const Tiling& t);
long imo_formula(long n);  // ceil(n + 2 sqrt(n) - 3)
// exhaustive minimum valid tile count, n <= 4
long imo_min_tiles(int n);

// ---- block stacking (the paper's scoring routine, verbatim) ----

double block_stacking(const std::vector<double>& positions);
Rational block_stacking(const std::vector<Rational>& positions);
std::vector<double> harmonic_stack(int n);

// ---- Turan blowup ----

// any 4-vertex multiset (multiplicity <= 2, positive weight) with all four sub-triples edges
std::optional<std::array<int, 4>> blowup_k4(const std::vector<std::array<int, 3>>& edges, const std::vector<bool>& alive);
template <class T>
T turan_density(const std::vector<T>& w, const std::vector<std::array<int, 3>>& edges) {
    T s(0);
    for (const auto& e : edges) {
        const T& a = w[static_cast<std::size_t>(e[0])];
        const T& b = w[static_cast<std::size_t>(e[1])];
        const T& c = w[static_cast<std::size_t>(e[2])];
        if (e[0] != e[1] && e[1] != e[2]) s += T(6) * a * b * c;
        else if (e[0] == e[1]) s += T(3) * a * a * c;  // {a, a, c}
        else s += T(3) * c * c * a;                      // {a, c, c}
    }
    return s;
}

// ---- Golay polynomials ----

enum class GolayTarget { flat_min, flat_max, merit };
GolayTarget parse_golay_target(const std::string& s);
constexpr long kGolayMesh = 1L << 13;
// min and max of |p(z)| / sqrt(n+1) over the K-point mesh
std::pair<double, double> golay_flatness(const std::vector<int>& a, long K = kGolayMesh);
Rational golay_merit(const std::vector<int>& a);
// aperiodic autocorrelations c_1..c_n
std::vector<long> autocorrelations(const std::vector<int>& a);

}  // namespace evo::combinatorics
