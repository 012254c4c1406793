#ifndef AERANGE_ROUNDING_HPP
#define AERANGE_ROUNDING_HPP

// Directed rounding for IEEE doubles computed under the default
// round-to-nearest mode. Every result is exact when the floating-point
// operation was exact; otherwise it is moved one representable step in the
// requested direction. The exactness test relies on error-free transforms
// (TwoSum, FMA residuals), which are exact except near underflow, where we
// widen unconditionally.
//
// This is the only place where rounding direction is decided; everything in
// interval.hpp and affine.hpp goes through these functions.

#include <cmath>
#include <limits>

namespace aerange::rounding
{

inline constexpr double infinity = std::numeric_limits<double>::infinity();
inline constexpr double max_finite = std::numeric_limits<double>::max();

// Products and quotients smaller than this in magnitude may have inexact
// FMA residuals (subnormal range).
inline constexpr double tiny = 0x1p-960;

inline double next_up(double x) { return std::nextafter(x, infinity); }
inline double next_down(double x) { return std::nextafter(x, -infinity); }

namespace detail
{

// Exact error of a + b when no overflow happened (Knuth's TwoSum).
inline double two_sum_error(double a, double b, double s)
{
    const double bb = s - a;
    return (a - (s - bb)) + (b - bb);
}

inline bool finite(double x) { return std::isfinite(x); }

} // namespace detail

inline double add_up(double a, double b)
{
    const double s = a + b;
    if (!detail::finite(s)) {
        if (s == -infinity && detail::finite(a) && detail::finite(b)) {
            return -max_finite;
        }
        return s;
    }
    return detail::two_sum_error(a, b, s) > 0 ? next_up(s) : s;
}

inline double add_down(double a, double b)
{
    const double s = a + b;
    if (!detail::finite(s)) {
        if (s == infinity && detail::finite(a) && detail::finite(b)) {
            return max_finite;
        }
        return s;
    }
    return detail::two_sum_error(a, b, s) < 0 ? next_down(s) : s;
}

inline double sub_up(double a, double b) { return add_up(a, -b); }
inline double sub_down(double a, double b) { return add_down(a, -b); }

inline double mul_up(double a, double b)
{
    const double p = a * b;
    if (!detail::finite(p)) {
        if (p == -infinity && detail::finite(a) && detail::finite(b)) {
            return -max_finite;
        }
        return p;
    }
    if (a == 0 || b == 0) {
        return 0.0;
    }
    if (std::fabs(p) < tiny) {
        return next_up(p);
    }
    return std::fma(a, b, -p) > 0 ? next_up(p) : p;
}

inline double mul_down(double a, double b)
{
    const double p = a * b;
    if (!detail::finite(p)) {
        if (p == infinity && detail::finite(a) && detail::finite(b)) {
            return max_finite;
        }
        return p;
    }
    if (a == 0 || b == 0) {
        return 0.0;
    }
    if (std::fabs(p) < tiny) {
        return next_down(p);
    }
    return std::fma(a, b, -p) < 0 ? next_down(p) : p;
}

// Sign of (a / b - q) for q = fl(a / b): the residual r = q * b - a is exact,
// and a / b - q = -r / b.
inline double div_up(double a, double b)
{
    const double q = a / b;
    if (!detail::finite(q)) {
        if (q == -infinity && detail::finite(a) && detail::finite(b)) {
            return -max_finite;
        }
        return q;
    }
    if (a == 0) {
        return 0.0;
    }
    if (std::fabs(q) < tiny || std::fabs(a) < tiny) {
        return next_up(q);
    }
    const double r = std::fma(q, b, -a);
    const bool true_larger = (r < 0) == (b > 0) && r != 0;
    return true_larger ? next_up(q) : q;
}

inline double div_down(double a, double b)
{
    const double q = a / b;
    if (!detail::finite(q)) {
        if (q == infinity && detail::finite(a) && detail::finite(b)) {
            return max_finite;
        }
        return q;
    }
    if (a == 0) {
        return 0.0;
    }
    if (std::fabs(q) < tiny || std::fabs(a) < tiny) {
        return next_down(q);
    }
    const double r = std::fma(q, b, -a);
    const bool true_smaller = (r > 0) == (b > 0) && r != 0;
    return true_smaller ? next_down(q) : q;
}

inline double sqrt_up(double a)
{
    const double s = std::sqrt(a);
    if (!detail::finite(s) || s == 0) {
        return s;
    }
    return std::fma(s, s, -a) < 0 ? next_up(s) : s;
}

inline double sqrt_down(double a)
{
    const double s = std::sqrt(a);
    if (!detail::finite(s) || s == 0) {
        return s;
    }
    return std::fma(s, s, -a) > 0 ? next_down(s) : s;
}

// Library transcendental functions are not correctly rounded; glibc documents
// errors below one ulp for exp, log, sin and cos, so two steps outward is a
// safe enclosure.
inline double widen_up(double x) { return next_up(next_up(x)); }
inline double widen_down(double x) { return next_down(next_down(x)); }

} // namespace aerange::rounding

#endif
