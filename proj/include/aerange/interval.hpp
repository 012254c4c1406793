#ifndef AERANGE_INTERVAL_HPP
#define AERANGE_INTERVAL_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rounding.hpp"

namespace aerange
{

// Raised when an operation leaves the domain of the real function it
// extends (division by an interval containing zero, log of a non-positive
// interval, ...).
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// Closed interval [lo, hi] with double endpoints. Every operation returns an
// enclosure of the exact real result. The empty set has the single
// representation lo = +inf, hi = -inf.
class Interval
{
public:
    constexpr Interval() : lo_(0.0), hi_(0.0) {}
    constexpr Interval(double x) : lo_(x), hi_(x) {} // NOLINT(google-explicit-constructor)
    // NOLINTNEXTLINE(bugprone-easily-swappable-parameters)
    constexpr Interval(double lo, double hi) : lo_(lo), hi_(hi)
    {
        if (!(lo <= hi)) {
            lo_ = rounding::infinity;
            hi_ = -rounding::infinity;
        }
    }

    static constexpr Interval empty() { return {rounding::infinity, -rounding::infinity}; }
    static constexpr Interval entire() { return {-rounding::infinity, rounding::infinity}; }

    constexpr double lo() const { return lo_; }
    constexpr double hi() const { return hi_; }
    constexpr bool is_empty() const { return lo_ > hi_; }
    constexpr bool is_point() const { return lo_ == hi_; }

    // Midpoint rounded to nearest; always lies inside the interval.
    double mid() const
    {
        if (is_empty()) {
            return std::nan("");
        }
        if (lo_ == -hi_) {
            return 0.0;
        }
        if (std::fabs(lo_) > 1e300 || std::fabs(hi_) > 1e300) {
            return lo_ / 2 + hi_ / 2;
        }
        return (lo_ + hi_) / 2;
    }

    // Upper bound on the largest distance from mid() to an endpoint.
    double outer_radius() const
    {
        const double m = mid();
        return std::max(rounding::sub_up(hi_, m), rounding::sub_up(m, lo_));
    }

    // Lower bound on the smallest distance from mid() to an endpoint: the
    // symmetric interval mid() +- inner_radius() lies inside *this.
    double inner_radius() const
    {
        const double m = mid();
        return std::min(rounding::sub_down(hi_, m), rounding::sub_down(m, lo_));
    }

    // Upper bound on hi - lo.
    double width() const { return is_empty() ? 0.0 : rounding::sub_up(hi_, lo_); }

    // max |x| and min |x| over the interval.
    double mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }
    double mig() const
    {
        if (lo_ <= 0 && hi_ >= 0) {
            return 0.0;
        }
        return std::min(std::fabs(lo_), std::fabs(hi_));
    }

    constexpr bool contains(double x) const { return lo_ <= x && x <= hi_; }
    constexpr bool contains_zero() const { return contains(0.0); }

    // Set inclusion; the empty set is a subset of everything.
    constexpr bool subset_of(const Interval& other) const
    {
        return is_empty() || (other.lo_ <= lo_ && hi_ <= other.hi_);
    }

    friend constexpr bool operator==(const Interval& a, const Interval& b)
    {
        return (a.is_empty() && b.is_empty()) || (a.lo_ == b.lo_ && a.hi_ == b.hi_);
    }

    Interval& operator+=(const Interval& o) { return *this = *this + o; }
    Interval& operator-=(const Interval& o) { return *this = *this - o; }
    Interval& operator*=(const Interval& o) { return *this = *this * o; }
    Interval& operator/=(const Interval& o) { return *this = *this / o; }

    friend Interval operator-(const Interval& a)
    {
        if (a.is_empty()) {
            return empty();
        }
        return {-a.hi_, -a.lo_};
    }

    friend Interval operator+(const Interval& a, const Interval& b)
    {
        if (a.is_empty() || b.is_empty()) {
            return empty();
        }
        return {rounding::add_down(a.lo_, b.lo_), rounding::add_up(a.hi_, b.hi_)};
    }

    friend Interval operator-(const Interval& a, const Interval& b)
    {
        if (a.is_empty() || b.is_empty()) {
            return empty();
        }
        return {rounding::sub_down(a.lo_, b.hi_), rounding::sub_up(a.hi_, b.lo_)};
    }

    friend Interval operator*(const Interval& a, const Interval& b)
    {
        if (a.is_empty() || b.is_empty()) {
            return empty();
        }
        const std::array<double, 4> lows{
            rounding::mul_down(a.lo_, b.lo_), rounding::mul_down(a.lo_, b.hi_),
            rounding::mul_down(a.hi_, b.lo_), rounding::mul_down(a.hi_, b.hi_)};
        const std::array<double, 4> highs{
            rounding::mul_up(a.lo_, b.lo_), rounding::mul_up(a.lo_, b.hi_),
            rounding::mul_up(a.hi_, b.lo_), rounding::mul_up(a.hi_, b.hi_)};
        return {*std::min_element(lows.begin(), lows.end()),
                *std::max_element(highs.begin(), highs.end())};
    }

    friend Interval operator/(const Interval& a, const Interval& b)
    {
        if (a.is_empty() || b.is_empty()) {
            return empty();
        }
        if (b.contains_zero()) {
            throw DomainError("division by an interval containing zero");
        }
        const std::array<double, 4> lows{
            rounding::div_down(a.lo_, b.lo_), rounding::div_down(a.lo_, b.hi_),
            rounding::div_down(a.hi_, b.lo_), rounding::div_down(a.hi_, b.hi_)};
        const std::array<double, 4> highs{
            rounding::div_up(a.lo_, b.lo_), rounding::div_up(a.lo_, b.hi_),
            rounding::div_up(a.hi_, b.lo_), rounding::div_up(a.hi_, b.hi_)};
        return {*std::min_element(lows.begin(), lows.end()),
                *std::max_element(highs.begin(), highs.end())};
    }

private:
    double lo_;
    double hi_;
};

inline Interval hull(const Interval& a, const Interval& b)
{
    if (a.is_empty()) {
        return b;
    }
    if (b.is_empty()) {
        return a;
    }
    return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

inline Interval intersect(const Interval& a, const Interval& b)
{
    return {std::max(a.lo(), b.lo()), std::min(a.hi(), b.hi())};
}

inline Interval abs(const Interval& a)
{
    if (a.is_empty()) {
        return a;
    }
    return {a.mig(), a.mag()};
}

inline Interval sqr(const Interval& a)
{
    if (a.is_empty()) {
        return a;
    }
    const double m = a.mig();
    const double big = a.mag();
    return {rounding::mul_down(m, m), rounding::mul_up(big, big)};
}

namespace detail
{

// x^n for a thin argument, n >= 1, by binary powering in interval
// arithmetic.
inline Interval pow_point(double x, int n)
{
    Interval base(x);
    Interval result(1.0);
    while (n > 0) {
        if (n & 1) {
            result = result * base;
        }
        n >>= 1;
        if (n > 0) {
            base = base * base;
        }
    }
    return result;
}

} // namespace detail

inline Interval pow_int(const Interval& a, int n)
{
    if (a.is_empty()) {
        return a;
    }
    if (n == 0) {
        return Interval(1.0);
    }
    if (n < 0) {
        return Interval(1.0) / pow_int(a, -n);
    }
    if (n % 2 == 0) {
        return {detail::pow_point(a.mig(), n).lo(), detail::pow_point(a.mag(), n).hi()};
    }
    return {detail::pow_point(a.lo(), n).lo(), detail::pow_point(a.hi(), n).hi()};
}

inline Interval reciprocal(const Interval& x) { return Interval(1.0) / x; }

// Plain double counterparts so generic code can use one spelling.
inline double sqr(double x) { return x * x; }
inline double reciprocal(double x) { return 1.0 / x; }
inline double pow_int(double x, int n) { return std::pow(x, n); }

inline Interval sqrt(const Interval& a)
{
    if (a.is_empty()) {
        return a;
    }
    if (a.lo() < 0) {
        throw DomainError("sqrt of an interval containing negative values");
    }
    return {rounding::sqrt_down(a.lo()), rounding::sqrt_up(a.hi())};
}

inline Interval exp(const Interval& a)
{
    if (a.is_empty()) {
        return a;
    }
    auto exp_down = [](double x) {
        return x == 0 ? 1.0 : std::max(0.0, rounding::widen_down(std::exp(x)));
    };
    auto exp_up = [](double x) { return x == 0 ? 1.0 : rounding::widen_up(std::exp(x)); };
    return {exp_down(a.lo()), exp_up(a.hi())};
}

inline Interval log(const Interval& a)
{
    if (a.is_empty()) {
        return a;
    }
    if (a.lo() <= 0) {
        throw DomainError("log of an interval containing non-positive values");
    }
    auto log_down = [](double x) { return x == 1 ? 0.0 : rounding::widen_down(std::log(x)); };
    auto log_up = [](double x) { return x == 1 ? 0.0 : rounding::widen_up(std::log(x)); };
    return {log_down(a.lo()), log_up(a.hi())};
}

namespace detail
{

// fl(pi) is below pi; the next double is above.
inline constexpr double pi_lo = 0x1.921fb54442d18p+1;
inline const Interval pi_enclosure{pi_lo, rounding::next_up(pi_lo)};

// Does some point offset + 2*pi*k (integer k) possibly lie in a? The check
// is conservative: it may answer yes for points just outside a.
inline bool hits_periodic_point(const Interval& a, const Interval& offset)
{
    const Interval two_pi = Interval(2.0) * pi_enclosure;
    const double k_first = std::floor((a.lo() - offset.hi()) / two_pi.lo()) - 1;
    const double k_last = std::ceil((a.hi() - offset.lo()) / two_pi.lo()) + 1;
    for (double k = k_first; k <= k_last; k += 1) {
        const Interval point = offset + Interval(k) * two_pi;
        if (point.hi() >= a.lo() && point.lo() <= a.hi()) {
            return true;
        }
    }
    return false;
}

// Shared quadrant logic for sin and cos: `fn` is the point function,
// `max_at` / `min_at` the offsets of its maxima and minima within a period.
template <class Fn>
Interval periodic_range(const Interval& a, Fn fn, const Interval& max_at, const Interval& min_at,
                        double exact_zero_value)
{
    if (a.is_empty()) {
        return a;
    }
    if (!std::isfinite(a.lo()) || !std::isfinite(a.hi()) || a.width() >= 6.0) {
        return {-1.0, 1.0};
    }
    auto down = [&](double x) {
        return x == 0 ? exact_zero_value : rounding::widen_down(fn(x));
    };
    auto up = [&](double x) { return x == 0 ? exact_zero_value : rounding::widen_up(fn(x)); };
    double lo = std::min(down(a.lo()), down(a.hi()));
    double hi = std::max(up(a.lo()), up(a.hi()));
    if (hits_periodic_point(a, max_at)) {
        hi = 1.0;
    }
    if (hits_periodic_point(a, min_at)) {
        lo = -1.0;
    }
    return {std::max(lo, -1.0), std::min(hi, 1.0)};
}

} // namespace detail

inline Interval sin(const Interval& a)
{
    const Interval half_pi = detail::pi_enclosure / Interval(2.0);
    return detail::periodic_range(
        a, [](double x) { return std::sin(x); }, half_pi, -half_pi, 0.0);
}

inline Interval cos(const Interval& a)
{
    return detail::periodic_range(
        a, [](double x) { return std::cos(x); }, Interval(0.0), detail::pi_enclosure, 1.0);
}

// Shortest decimal string that reads back to exactly x.
inline std::string format_double(double x)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return {buf.data(), res.ptr};
}

inline std::string to_string(const Interval& a)
{
    if (a.is_empty()) {
        return "[empty]";
    }
    return "[" + format_double(a.lo()) + "," + format_double(a.hi()) + "]";
}

inline std::ostream& operator<<(std::ostream& os, const Interval& a) { return os << to_string(a); }

// Interval vector; empty as soon as one component is empty.
using Box = std::vector<Interval>;

inline bool is_empty(std::span<const Interval> b)
{
    return std::any_of(b.begin(), b.end(), [](const Interval& x) { return x.is_empty(); });
}

inline std::vector<double> center(std::span<const Interval> b)
{
    std::vector<double> c;
    c.reserve(b.size());
    for (const auto& x : b) {
        c.push_back(x.mid());
    }
    return c;
}

inline std::vector<double> radius(std::span<const Interval> b)
{
    std::vector<double> r;
    r.reserve(b.size());
    for (const auto& x : b) {
        r.push_back(x.outer_radius());
    }
    return r;
}

inline Box hull(std::span<const Interval> a, std::span<const Interval> b)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument("hull: dimension mismatch");
    }
    Box out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = hull(a[i], b[i]);
    }
    return out;
}

inline Box intersect(std::span<const Interval> a, std::span<const Interval> b)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument("intersect: dimension mismatch");
    }
    Box out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = intersect(a[i], b[i]);
    }
    return out;
}

inline bool contains(std::span<const Interval> b, std::span<const double> x)
{
    if (b.size() != x.size()) {
        return false;
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!b[i].contains(x[i])) {
            return false;
        }
    }
    return true;
}

inline bool subset_of(std::span<const Interval> a, std::span<const Interval> b)
{
    if (is_empty(a)) {
        return true;
    }
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].subset_of(b[i])) {
            return false;
        }
    }
    return true;
}

} // namespace aerange

#endif
