#ifndef AERANGE_DUAL_HPP
#define AERANGE_DUAL_HPP

// Forward-mode dual numbers over an arbitrary scalar S (double, Interval,
// AffineForm, or another Dual1). Nesting Dual1<Dual1<S>> yields second
// derivatives.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "affine.hpp"
#include "interval.hpp"

namespace aerange
{

template <class S>
struct Dual1
{
    S value{};
    // Partial derivatives; an empty vector means all zero.
    std::vector<S> grad;

    Dual1() = default;
    Dual1(double c) // NOLINT(google-explicit-constructor)
        requires(!std::is_same_v<S, double>)
        : value(c)
    {
    }
    explicit Dual1(S v) : value(std::move(v)) {}
    Dual1(S v, std::vector<S> g) : value(std::move(v)), grad(std::move(g)) {}

    // Independent variable j out of n.
    static Dual1 variable(S v, std::size_t j, std::size_t n)
    {
        std::vector<S> g(n, S(0.0));
        g[j] = S(1.0);
        return {std::move(v), std::move(g)};
    }

    S d(std::size_t j) const { return grad.empty() ? S(0.0) : grad[j]; }

    Dual1& operator+=(const Dual1& o) { return *this = *this + o; }
    Dual1& operator-=(const Dual1& o) { return *this = *this - o; }
    Dual1& operator*=(const Dual1& o) { return *this = *this * o; }
    Dual1& operator/=(const Dual1& o) { return *this = *this / o; }
};

namespace detail
{

template <class S, class F>
std::vector<S> combine(const std::vector<S>& a, const std::vector<S>& b, F f)
{
    if (a.empty() && b.empty()) {
        return {};
    }
    if (!a.empty() && !b.empty() && a.size() != b.size()) {
        throw std::invalid_argument("dual: gradient length mismatch");
    }
    const std::size_t n = a.empty() ? b.size() : a.size();
    std::vector<S> out;
    out.reserve(n);
    const S zero(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(f(a.empty() ? zero : a[i], b.empty() ? zero : b[i]));
    }
    return out;
}

template <class S>
std::vector<S> scaled(const S& s, const std::vector<S>& g)
{
    std::vector<S> out;
    out.reserve(g.size());
    for (const auto& x : g) {
        out.push_back(s * x);
    }
    return out;
}

// Chain rule for a unary function with value fv and derivative df at a.value.
template <class S>
Dual1<S> chain(const Dual1<S>& a, S fv, const S& df)
{
    return {std::move(fv), scaled(df, a.grad)};
}

} // namespace detail

template <class S>
Dual1<S> operator+(const Dual1<S>& a, const Dual1<S>& b)
{
    return {a.value + b.value,
            detail::combine(a.grad, b.grad, [](const S& x, const S& y) { return x + y; })};
}

template <class S>
Dual1<S> operator-(const Dual1<S>& a)
{
    std::vector<S> g;
    g.reserve(a.grad.size());
    for (const auto& x : a.grad) {
        g.push_back(-x);
    }
    return {-a.value, std::move(g)};
}

template <class S>
Dual1<S> operator-(const Dual1<S>& a, const Dual1<S>& b)
{
    return {a.value - b.value,
            detail::combine(a.grad, b.grad, [](const S& x, const S& y) { return x - y; })};
}

template <class S>
Dual1<S> operator*(const Dual1<S>& a, const Dual1<S>& b)
{
    if (a.grad.empty()) {
        return {a.value * b.value, detail::scaled(a.value, b.grad)};
    }
    if (b.grad.empty()) {
        return {a.value * b.value, detail::scaled(b.value, a.grad)};
    }
    return {a.value * b.value, detail::combine(a.grad, b.grad, [&](const S& x, const S& y) {
                return b.value * x + a.value * y;
            })};
}

template <class S>
Dual1<S> reciprocal(const Dual1<S>& a)
{
    S r = reciprocal(a.value);
    const S df = -(r * r);
    return detail::chain(a, std::move(r), df);
}

template <class S>
Dual1<S> operator/(const Dual1<S>& a, const Dual1<S>& b)
{
    if (b.grad.empty()) {
        const S inv = reciprocal(b.value);
        return {a.value * inv, detail::scaled(inv, a.grad)};
    }
    return a * reciprocal(b);
}

template <class S>
Dual1<S> sqr(const Dual1<S>& a)
{
    return detail::chain(a, sqr(a.value), S(2.0) * a.value);
}

template <class S>
Dual1<S> pow_int(const Dual1<S>& a, int n)
{
    if (n == 0) {
        return Dual1<S>(1.0);
    }
    if (n == 1) {
        return a;
    }
    return detail::chain(a, pow_int(a.value, n), S(static_cast<double>(n)) * pow_int(a.value, n - 1));
}

template <class S>
Dual1<S> exp(const Dual1<S>& a)
{
    using std::exp;
    S v = exp(a.value);
    return detail::chain(a, v, v);
}

template <class S>
Dual1<S> log(const Dual1<S>& a)
{
    using std::log;
    return detail::chain(a, log(a.value), reciprocal(a.value));
}

template <class S>
Dual1<S> sqrt(const Dual1<S>& a)
{
    using std::sqrt;
    S v = sqrt(a.value);
    return detail::chain(a, v, reciprocal(S(2.0) * v));
}

template <class S>
Dual1<S> sin(const Dual1<S>& a)
{
    using std::cos;
    using std::sin;
    return detail::chain(a, sin(a.value), cos(a.value));
}

template <class S>
Dual1<S> cos(const Dual1<S>& a)
{
    using std::cos;
    using std::sin;
    return detail::chain(a, cos(a.value), -sin(a.value));
}

template <class S>
using Dual2 = Dual1<Dual1<S>>;

// Seeds variable j of n for second-order evaluation.
template <class S>
Dual2<S> dual2_variable(const S& v, std::size_t j, std::size_t n)
{
    using D = Dual1<S>;
    std::vector<D> g(n, D(0.0));
    g[j] = D(1.0);
    return {D::variable(v, j, n), std::move(g)};
}

} // namespace aerange

#endif
