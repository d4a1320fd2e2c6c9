#pragma once

#include <string>

#include "evo/interval.hpp"
#include "evo/problem.hpp"

namespace evo {

inline constexpr int kDefaultBits = 256;

ScoreInterval exact_result(const Rational& q, int bits);
ScoreInterval interval_result(const Interval& x, int bits);

// Throws std::invalid_argument for unknown problems, unsupported problems or
// precision outside [64, 4096]. Enclosure is of the raw score.
ScoreInterval certify(const std::string& problem_id, const json& instance, const Construction& c,
                      int bits = kDefaultBits);

json certificate_json(const std::string& problem_id, const Construction& c, const ScoreInterval& s);
const char* method_name(CertMethod m);

// hi - lo from the decimal strings (the double fields are rounded outward)
double interval_width(const ScoreInterval& s);

// the document certification reads: the ingested JSON if any, else the payload
json exact_source(const Construction& c);

}  // namespace evo
