#include "evo/certify.hpp"

#include <cmath>
#include <stdexcept>

#include "evo/canon.hpp"

namespace evo {

const char* method_name(CertMethod m) { return m == CertMethod::exact_rational ? "exact_rational" : "interval"; }

json exact_source(const Construction& c) { return c.source ? *c.source : payload_to_json(c.payload); }

ScoreInterval exact_result(const Rational& q, int bits) {
    ScoreInterval s;
    s.method = CertMethod::exact_rational;
    s.bits = bits;
    s.exact = q;
    int digits = static_cast<int>(std::ceil(bits * 0.30103)) + 2;
    s.lo = rational_to_decimal(q, digits, true);
    s.hi = rational_to_decimal(q, digits, false);
    Precision prec(bits);
    Interval x(q);
    s.lo_d = x.lo_d();
    s.hi_d = x.hi_d();
    return s;
}

ScoreInterval interval_result(const Interval& x, int bits) {
    if (x.has_nan()) throw std::runtime_error("certification produced NaN");
    ScoreInterval s;
    s.method = CertMethod::interval;
    s.bits = bits;
    s.lo = x.lo_str();
    s.hi = x.hi_str();
    s.lo_d = x.lo_d();
    s.hi_d = x.hi_d();
    return s;
}

ScoreInterval certify(const std::string& problem_id, const json& instance, const Construction& c, int bits) {
    if (bits < 64 || bits > 4096) throw std::invalid_argument("precision_bits must lie in [64, 4096]");
    const Problem& p = Registry::get().at(problem_id);
    if (!p.certify) throw std::invalid_argument("problem " + problem_id + " has no certification path");
    if (c.kind() != p.kind) throw std::invalid_argument("construction kind does not match problem");
    Precision prec(bits);
    json inst = resolve_instance(p, instance, &c);
    return p.certify(inst, c, bits);
}

double interval_width(const ScoreInterval& s) {
    if (s.exact) return 0.0;
    Rational w = parse_rational(s.hi) - parse_rational(s.lo);
    return w.get_d();
}

json certificate_json(const std::string& problem_id, const Construction& c, const ScoreInterval& s) {
    json j = {{"problem", problem_id},
              {"score_lo", s.lo},
              {"score_hi", s.hi},
              {"bits", s.bits},
              {"method", method_name(s.method)},
              {"construction_hash", json_hash16(to_json(c))}};
    if (s.exact) j["exact"] = s.exact->get_str();
    return j;
}

}  // namespace evo
