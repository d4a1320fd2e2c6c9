#pragma once
// Exact rationals (GMP) and the number-ingestion rules shared by every payload.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace evo {

using json = nlohmann::json;
using Rational = mpq_class;

// A JSON number becomes the exact value of its binary64 representation;
// "1/3" or "-1.25e-3" strings and [num, den] pairs are read exactly.
Rational rational_from_json(const json& j);
double double_from_json(const json& j);
std::vector<Rational> rationals_from_json(const json& arr);
std::vector<double> doubles_from_json(const json& arr);

Rational parse_rational(const std::string& s);
bool is_number_like(const json& j);

// num/den pair, or a plain integer when den == 1
json rational_to_json(const Rational& q);

// Decimal rendering rounded toward -inf (down=true) or +inf.
std::string rational_to_decimal(const Rational& q, int digits, bool down);

inline double to_double(const Rational& q) { return q.get_d(); }

// num/den in lowest terms (the two-argument mpq constructor does not reduce)
inline Rational ratio(long num, long den) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}
inline double to_double(double x) { return x; }

Rational harmonic(int n);

}  // namespace evo
