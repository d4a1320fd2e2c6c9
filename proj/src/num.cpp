#include "evo/num.hpp"

#include <mpfr.h>

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace evo {

namespace {

Rational pow10q(long e) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
    if (e >= 0) return Rational(p);
    Rational q(1, 1);
    q /= Rational(p);
    return q;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw std::invalid_argument("empty number");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rational n = parse_rational(s.substr(0, slash));
        Rational d = parse_rational(s.substr(slash + 1));
        if (d == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
        Rational q = n / d;
        q.canonicalize();
        return q;
    }
    size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
    std::string digits;
    long frac = 0;
    bool seen_dot = false, any = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            any = true;
            if (seen_dot) ++frac;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    if (!any) throw std::invalid_argument("not a number: '" + text + "'");
    long exp10 = 0;
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E') throw std::invalid_argument("not a number: '" + text + "'");
        std::size_t used = 0;
        exp10 = std::stol(s.substr(i + 1), &used);
        if (i + 1 + used != s.size()) throw std::invalid_argument("not a number: '" + text + "'");
    }
    Rational q{mpz_class(digits, 10)};
    q *= pow10q(exp10 - frac);
    q.canonicalize();
    return neg ? Rational(-q) : q;
}

bool is_number_like(const json& j) {
    if (j.is_number()) return true;
    if (j.is_string()) return true;
    return j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer();
}

Rational rational_from_json(const json& j) {
    if (j.is_number_integer()) {
        if (j.is_number_unsigned()) return Rational(mpz_class(std::to_string(j.get<std::uint64_t>())));
        return Rational(mpz_class(std::to_string(j.get<std::int64_t>())));
    }
    if (j.is_number_float()) {
        double d = j.get<double>();
        if (!std::isfinite(d)) throw std::invalid_argument("non-finite number");
        return Rational(d);
    }
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_array() && j.size() == 2) {
        Rational n = rational_from_json(j[0]);
        Rational d = rational_from_json(j[1]);
        if (d == 0) throw std::invalid_argument("zero denominator");
        Rational q = n / d;
        q.canonicalize();
        return q;
    }
    throw std::invalid_argument("expected a number, got " + j.dump());
}

double double_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    return rational_from_json(j).get_d();
}

std::vector<Rational> rationals_from_json(const json& arr) {
    if (!arr.is_array()) throw std::invalid_argument("expected an array");
    std::vector<Rational> out;
    out.reserve(arr.size());
    for (const auto& x : arr) out.push_back(rational_from_json(x));
    return out;
}

std::vector<double> doubles_from_json(const json& arr) {
    if (!arr.is_array()) throw std::invalid_argument("expected an array");
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& x : arr) out.push_back(double_from_json(x));
    return out;
}

json rational_to_json(const Rational& q) {
    if (q.get_num().fits_slong_p() && q.get_den().fits_slong_p()) {
        if (q.get_den() == 1) return q.get_num().get_si();
        return json::array({q.get_num().get_si(), q.get_den().get_si()});
    }
    return json::array({q.get_num().get_str(), q.get_den().get_str()});
}

std::string rational_to_decimal(const Rational& q, int digits, bool down) {
    mpfr_t x;
    mpfr_init2(x, static_cast<mpfr_prec_t>(digits * 3.33) + 16);
    mpfr_set_q(x, q.get_mpq_t(), down ? MPFR_RNDD : MPFR_RNDU);
    if (mpfr_zero_p(x)) {
        mpfr_clear(x);
        return "0";
    }
    mpfr_exp_t e = 0;
    char* raw = mpfr_get_str(nullptr, &e, 10, static_cast<size_t>(digits), x, down ? MPFR_RNDD : MPFR_RNDU);
    std::string m(raw);
    mpfr_free_str(raw);
    mpfr_clear(x);
    std::string sign;
    if (!m.empty() && m[0] == '-') {
        sign = "-";
        m.erase(0, 1);
    }
    std::string out = sign + m.substr(0, 1);
    if (m.size() > 1) out += "." + m.substr(1);
    out += "e" + std::to_string(static_cast<long>(e) - 1);
    return out;
}

Rational harmonic(int n) {
    Rational h(0);
    for (int k = 1; k <= n; ++k) h += Rational(1, k);
    return h;
}

}  // namespace evo
