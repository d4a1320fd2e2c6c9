#pragma once
// Residue systems, prime fields, difference bases, projection entropies.

#include <optional>
#include <string>
#include <vector>

#include "evo/construction.hpp"
#include "evo/interval.hpp"

namespace evo::numbertheory {

bool is_prime(long n);
bool is_squarefree(long m);
long mod(long a, long m);
long inv_mod(long a, long p);

// ---- difference bases ----

// first integer in [1, n] not a difference of two elements, or 0 if all covered
long first_uncovered(const std::vector<long>& b, long n);
// smallest B within [0, n] covering [1, n], by exhaustive search (n <= 40)
std::vector<long> min_difference_basis(long n);

// ---- Singer perfect difference sets ----

// p+1 residues mod p^2+p+1, p prime <= 101
std::vector<long> singer_difference_set(long p);
bool is_perfect_difference_set(const std::vector<long>& d, long m);

// ---- finite-field Kakeya and Nikodym, prime order ----

struct FFIndex {
    int p, d;
    long size;  // p^d
    long encode(const std::vector<int>& x) const;
    std::vector<int> decode(long code) const;
};
// one representative per projective direction: first nonzero coordinate 1
std::vector<std::vector<int>> directions(int p, int d);
// direction with no full line in K, if any
std::optional<std::vector<int>> kakeya_gap(const FFSet& K);
bool is_kakeya(const FFSet& K);
// point with no line through it lying in N apart from itself, if any
std::optional<std::vector<int>> nikodym_gap(const FFSet& N);
bool is_nikodym(const FFSet& N);
// the d=3 construction built from quadratic residues, p = 1 mod 4
FFSet ff_kakeya_d3(int p);
Rational ff_kakeya_d3_size(long p);  // p^3/4 + 7p^2/8 - 1/8

// ---- Furstenberg-Sarkozy residue sets ----

// first pair (a, b) with a - b a nonzero k-th power mod m
std::optional<std::pair<long, long>> power_difference(const std::vector<long>& a, long m, long k);
// largest set found by depth-first search with 0 fixed, stopping at `target` or after `node_limit` nodes
std::vector<long> fs_search(long m, long k, long target, long node_limit = 5000000);

// ---- entropy of projections ----

// slope r; nullopt is infinity (projection to y)
using Slope = std::optional<Rational>;
Slope parse_slope(const json& j);
// Shannon entropy in bits of x + r y, grouping equal values exactly
double projection_entropy(const JointPMF& pmf, const Slope& r);
// the same with interval logarithms
Interval projection_entropy_interval(const JointPMF& pmf, const Slope& r);

}  // namespace evo::numbertheory
