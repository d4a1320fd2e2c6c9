#pragma once
// Closed intervals [lo, hi] over MPFR with outward rounding.
// Precision comes from the innermost live Precision guard on this thread.

#include <mpfr.h>

#include <string>

#include "evo/num.hpp"

namespace evo {

class Precision {
public:
    explicit Precision(int bits);
    ~Precision();
    Precision(const Precision&) = delete;
    Precision& operator=(const Precision&) = delete;
    static int current();

private:
    int saved_;
};

class Interval {
public:
    Interval();
    Interval(long v);  // NOLINT: implicit on purpose, integer constants appear everywhere
    Interval(int v) : Interval(static_cast<long>(v)) {}
    Interval(double v);
    explicit Interval(const Rational& q);
    Interval(const Interval& o);
    Interval(Interval&& o) noexcept;
    Interval& operator=(const Interval& o);
    Interval& operator=(Interval&& o) noexcept;
    ~Interval();

    static Interval hull(const Interval& a, const Interval& b);
    static Interval from_string(const std::string& decimal);
    static Interval pi();
    static Interval entire();

    Interval& operator+=(const Interval& o);
    Interval& operator-=(const Interval& o);
    Interval& operator*=(const Interval& o);
    Interval& operator/=(const Interval& o);
    Interval operator-() const;

    friend Interval operator+(Interval a, const Interval& b) { return a += b; }
    friend Interval operator-(Interval a, const Interval& b) { return a -= b; }
    friend Interval operator*(Interval a, const Interval& b) { return a *= b; }
    friend Interval operator/(Interval a, const Interval& b) { return a /= b; }

    mpfr_srcptr lo() const { return lo_; }
    mpfr_srcptr hi() const { return hi_; }
    double lo_d() const;  // rounded down
    double hi_d() const;  // rounded up
    double mid_d() const;
    Interval width() const;
    bool is_point() const;
    bool contains_zero() const;
    bool contains(double x) const;
    bool certainly_pos() const;      // lo > 0
    bool certainly_neg() const;      // hi < 0
    bool certainly_nonneg() const;   // lo >= 0
    bool has_nan() const;

    std::string lo_str() const;
    std::string hi_str() const;
    int bits() const { return static_cast<int>(mpfr_get_prec(lo_)); }

    friend Interval sqrt(const Interval& x);
    friend Interval log(const Interval& x);
    friend Interval log2(const Interval& x);
    friend Interval exp(const Interval& x);
    friend Interval sin(const Interval& x);
    friend Interval cos(const Interval& x);
    friend Interval abs(const Interval& x);
    friend Interval min(const Interval& a, const Interval& b);
    friend Interval max(const Interval& a, const Interval& b);
    friend Interval sqr(const Interval& x);

private:
    mpfr_t lo_, hi_;
};

std::string mpfr_to_decimal(mpfr_srcptr x, bool down);

}  // namespace evo
