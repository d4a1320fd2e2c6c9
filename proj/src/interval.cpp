#include "evo/interval.hpp"

#include <cmath>
#include <stdexcept>

namespace evo {

namespace {

thread_local int g_bits = 256;

using Op2 = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);

void min_into(mpfr_ptr dst, mpfr_srcptr a) {
    if (mpfr_less_p(a, dst)) mpfr_set(dst, a, MPFR_RNDD);
}
void max_into(mpfr_ptr dst, mpfr_srcptr a) {
    if (mpfr_greater_p(a, dst)) mpfr_set(dst, a, MPFR_RNDU);
}

// Product or quotient over the four endpoint combinations, rounded outward.
void four_way(Op2 op, mpfr_srcptr a0, mpfr_srcptr a1, mpfr_srcptr b0, mpfr_srcptr b1, mpfr_ptr lo,
              mpfr_ptr hi) {
    mpfr_t t;
    mpfr_init2(t, mpfr_get_prec(lo));
    mpfr_srcptr as[2] = {a0, a1};
    mpfr_srcptr bs[2] = {b0, b1};
    bool first = true;
    for (auto a : as)
        for (auto b : bs) {
            op(t, a, b, MPFR_RNDD);
            if (mpfr_nan_p(t)) mpfr_set_inf(t, -1);
            if (first) mpfr_set(lo, t, MPFR_RNDD); else min_into(lo, t);
            op(t, a, b, MPFR_RNDU);
            if (mpfr_nan_p(t)) mpfr_set_inf(t, 1);
            if (first) mpfr_set(hi, t, MPFR_RNDU); else max_into(hi, t);
            first = false;
        }
    mpfr_clear(t);
}

}  // namespace

Precision::Precision(int bits) : saved_(g_bits) {
    if (bits < MPFR_PREC_MIN) throw std::invalid_argument("precision too small");
    g_bits = bits;
}
Precision::~Precision() { g_bits = saved_; }
int Precision::current() { return g_bits; }

Interval::Interval() {
    mpfr_init2(lo_, g_bits);
    mpfr_init2(hi_, g_bits);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
}

Interval::Interval(long v) {
    mpfr_init2(lo_, g_bits);
    mpfr_init2(hi_, g_bits);
    mpfr_set_si(lo_, v, MPFR_RNDD);
    mpfr_set_si(hi_, v, MPFR_RNDU);
}

Interval::Interval(double v) {
    mpfr_init2(lo_, g_bits);
    mpfr_init2(hi_, g_bits);
    mpfr_set_d(lo_, v, MPFR_RNDD);
    mpfr_set_d(hi_, v, MPFR_RNDU);
}

Interval::Interval(const Rational& q) {
    mpfr_init2(lo_, g_bits);
    mpfr_init2(hi_, g_bits);
    mpfr_set_q(lo_, q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi_, q.get_mpq_t(), MPFR_RNDU);
}

Interval::Interval(const Interval& o) {
    mpfr_init2(lo_, mpfr_get_prec(o.lo_));
    mpfr_init2(hi_, mpfr_get_prec(o.hi_));
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& o) noexcept {
    mpfr_init2(lo_, MPFR_PREC_MIN);
    mpfr_init2(hi_, MPFR_PREC_MIN);
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
}

Interval& Interval::operator=(const Interval& o) {
    if (this != &o) {
        mpfr_set_prec(lo_, mpfr_get_prec(o.lo_));
        mpfr_set_prec(hi_, mpfr_get_prec(o.hi_));
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    return *this;
}

Interval& Interval::operator=(Interval&& o) noexcept {
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
    return *this;
}

Interval::~Interval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
}

Interval Interval::hull(const Interval& a, const Interval& b) {
    Interval r(a);
    min_into(r.lo_, b.lo_);
    max_into(r.hi_, b.hi_);
    return r;
}

Interval Interval::from_string(const std::string& decimal) {
    return Interval(parse_rational(decimal));
}

Interval Interval::pi() {
    Interval r;
    mpfr_const_pi(r.lo_, MPFR_RNDD);
    mpfr_const_pi(r.hi_, MPFR_RNDU);
    return r;
}

Interval Interval::entire() {
    Interval r;
    mpfr_set_inf(r.lo_, -1);
    mpfr_set_inf(r.hi_, 1);
    return r;
}

Interval& Interval::operator+=(const Interval& o) {
    mpfr_add(lo_, lo_, o.lo_, MPFR_RNDD);
    mpfr_add(hi_, hi_, o.hi_, MPFR_RNDU);
    return *this;
}

Interval& Interval::operator-=(const Interval& o) {
    // hi first would clobber nothing: lo uses o.hi, hi uses o.lo
    mpfr_sub(lo_, lo_, o.hi_, MPFR_RNDD);
    mpfr_sub(hi_, hi_, o.lo_, MPFR_RNDU);
    return *this;
}

Interval& Interval::operator*=(const Interval& o) {
    Interval r;
    four_way(mpfr_mul, lo_, hi_, o.lo_, o.hi_, r.lo_, r.hi_);
    return *this = std::move(r);
}

Interval& Interval::operator/=(const Interval& o) {
    if (o.contains_zero()) return *this = entire();
    Interval r;
    four_way(mpfr_div, lo_, hi_, o.lo_, o.hi_, r.lo_, r.hi_);
    return *this = std::move(r);
}

Interval Interval::operator-() const {
    Interval r;
    mpfr_neg(r.lo_, hi_, MPFR_RNDD);
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
    return r;
}

double Interval::lo_d() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double Interval::hi_d() const { return mpfr_get_d(hi_, MPFR_RNDU); }
double Interval::mid_d() const { return 0.5 * (mpfr_get_d(lo_, MPFR_RNDN) + mpfr_get_d(hi_, MPFR_RNDN)); }

Interval Interval::width() const {
    Interval r;
    mpfr_sub(r.lo_, hi_, lo_, MPFR_RNDD);
    mpfr_sub(r.hi_, hi_, lo_, MPFR_RNDU);
    return r;
}

bool Interval::is_point() const { return mpfr_equal_p(lo_, hi_) != 0; }
bool Interval::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
bool Interval::contains(double x) const {
    return mpfr_cmp_d(lo_, x) <= 0 && mpfr_cmp_d(hi_, x) >= 0;
}
bool Interval::certainly_pos() const { return mpfr_sgn(lo_) > 0; }
bool Interval::certainly_neg() const { return mpfr_sgn(hi_) < 0; }
bool Interval::certainly_nonneg() const { return mpfr_sgn(lo_) >= 0; }
bool Interval::has_nan() const { return mpfr_nan_p(lo_) || mpfr_nan_p(hi_); }

std::string mpfr_to_decimal(mpfr_srcptr x, bool down) {
    if (mpfr_inf_p(x)) return mpfr_sgn(x) > 0 ? "inf" : "-inf";
    if (mpfr_nan_p(x)) return "nan";
    if (mpfr_zero_p(x)) return "0";
    auto digits = static_cast<size_t>(std::ceil(mpfr_get_prec(x) * 0.30103)) + 2;
    mpfr_exp_t e = 0;
    char* raw = mpfr_get_str(nullptr, &e, 10, digits, x, down ? MPFR_RNDD : MPFR_RNDU);
    std::string m(raw);
    mpfr_free_str(raw);
    std::string sign;
    if (m[0] == '-') {
        sign = "-";
        m.erase(0, 1);
    }
    while (m.size() > 1 && m.back() == '0') m.pop_back();
    std::string out = sign + m.substr(0, 1);
    if (m.size() > 1) out += "." + m.substr(1);
    if (e - 1 != 0) out += "e" + std::to_string(static_cast<long>(e) - 1);
    return out;
}

std::string Interval::lo_str() const { return mpfr_to_decimal(lo_, true); }
std::string Interval::hi_str() const { return mpfr_to_decimal(hi_, false); }

Interval sqrt(const Interval& x) {
    if (mpfr_sgn(x.hi_) < 0) throw std::domain_error("sqrt of a negative interval");
    Interval r(x);
    if (mpfr_sgn(x.lo_) < 0) mpfr_set_zero(r.lo_, 1);
    else mpfr_sqrt(r.lo_, x.lo_, MPFR_RNDD);
    mpfr_sqrt(r.hi_, x.hi_, MPFR_RNDU);
    return r;
}

Interval log(const Interval& x) {
    Interval r(x);
    if (mpfr_sgn(x.lo_) <= 0) mpfr_set_inf(r.lo_, -1);
    else mpfr_log(r.lo_, x.lo_, MPFR_RNDD);
    if (mpfr_sgn(x.hi_) <= 0) throw std::domain_error("log of a non-positive interval");
    mpfr_log(r.hi_, x.hi_, MPFR_RNDU);
    return r;
}

Interval log2(const Interval& x) {
    Interval r(x);
    if (mpfr_sgn(x.lo_) <= 0) mpfr_set_inf(r.lo_, -1);
    else mpfr_log2(r.lo_, x.lo_, MPFR_RNDD);
    if (mpfr_sgn(x.hi_) <= 0) throw std::domain_error("log2 of a non-positive interval");
    mpfr_log2(r.hi_, x.hi_, MPFR_RNDU);
    return r;
}

Interval exp(const Interval& x) {
    Interval r(x);
    mpfr_exp(r.lo_, x.lo_, MPFR_RNDD);
    mpfr_exp(r.hi_, x.hi_, MPFR_RNDU);
    return r;
}

namespace {

// Does [lo, hi] contain shift + k*pi for some integer k, and which parities?
void critical_parities(const Interval& x, double shift, bool& even, bool& odd) {
    Interval t = (x - Interval::pi() * Interval(shift)) / Interval::pi();
    double a = std::ceil(t.lo_d()), b = std::floor(t.hi_d());
    even = odd = false;
    for (double k = a; k <= b && k <= a + 2; k += 1) {
        if (std::fmod(std::fabs(k), 2.0) == 0) even = true; else odd = true;
    }
}

Interval periodic(const Interval& x, int (*f)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t), double max_shift) {
    Interval r(x);
    mpfr_t a, b;
    mpfr_init2(a, mpfr_get_prec(x.lo()));
    mpfr_init2(b, mpfr_get_prec(x.lo()));
    f(a, x.lo(), MPFR_RNDD);
    f(b, x.hi(), MPFR_RNDD);
    Interval lo_end, hi_end;
    mpfr_ptr lo = const_cast<mpfr_ptr>(r.lo());
    mpfr_ptr hi = const_cast<mpfr_ptr>(r.hi());
    mpfr_min(lo, a, b, MPFR_RNDD);
    f(a, x.lo(), MPFR_RNDU);
    f(b, x.hi(), MPFR_RNDU);
    mpfr_max(hi, a, b, MPFR_RNDU);
    mpfr_clears(a, b, static_cast<mpfr_ptr>(nullptr));
    if (!x.is_point()) {
        bool even, odd;
        // extremes at max_shift + k*pi: even k gives +1, odd k gives -1
        critical_parities(x, max_shift, even, odd);
        if (even) mpfr_set_si(hi, 1, MPFR_RNDU);
        if (odd) mpfr_set_si(lo, -1, MPFR_RNDD);
    }
    return r;
}

}  // namespace

Interval sin(const Interval& x) { return periodic(x, mpfr_sin, 0.5); }
Interval cos(const Interval& x) { return periodic(x, mpfr_cos, 0.0); }

Interval abs(const Interval& x) {
    if (mpfr_sgn(x.lo_) >= 0) return x;
    if (mpfr_sgn(x.hi_) <= 0) return -x;
    Interval r(x);
    mpfr_neg(r.lo_, x.lo_, MPFR_RNDU);
    if (mpfr_less_p(r.lo_, x.hi_)) mpfr_set(r.hi_, x.hi_, MPFR_RNDU);
    else mpfr_set(r.hi_, r.lo_, MPFR_RNDU);
    mpfr_set_zero(r.lo_, 1);
    return r;
}

Interval min(const Interval& a, const Interval& b) {
    Interval r(a);
    min_into(r.lo_, b.lo_);
    if (mpfr_less_p(b.hi_, r.hi_)) mpfr_set(r.hi_, b.hi_, MPFR_RNDU);
    return r;
}

Interval max(const Interval& a, const Interval& b) {
    Interval r(a);
    if (mpfr_greater_p(b.lo_, r.lo_)) mpfr_set(r.lo_, b.lo_, MPFR_RNDD);
    max_into(r.hi_, b.hi_);
    return r;
}

Interval sqr(const Interval& x) {
    Interval a = abs(x);
    Interval r(a);
    mpfr_sqr(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_sqr(r.hi_, a.hi_, MPFR_RNDU);
    return r;
}

}  // namespace evo
