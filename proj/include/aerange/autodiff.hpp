#ifndef AERANGE_AUTODIFF_HPP
#define AERANGE_AUTODIFF_HPP

#include <span>
#include <stdexcept>
#include <vector>

#include "dual.hpp"
#include "expr.hpp"
#include "matrix.hpp"

namespace aerange
{

// Entry (i, j) is d f_i / d x_j evaluated in scalar type S at env.
template <class S>
Matrix<S> jacobian_eval(std::span<const Expr> exprs, std::span<const S> env,
                        std::span<const double> params = {})
{
    const std::size_t m = env.size();
    std::vector<Dual1<S>> denv;
    denv.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        denv.push_back(Dual1<S>::variable(env[j], j, m));
    }
    Matrix<S> jac(exprs.size(), m, S(0.0));
    for (std::size_t i = 0; i < exprs.size(); ++i) {
        if (variable_extent(exprs[i].root()) > m) {
            throw std::out_of_range("jacobian_eval: expression uses an unbound variable");
        }
        const Dual1<S> r = eval<Dual1<S>>(exprs[i], std::span<const Dual1<S>>(denv), params);
        for (std::size_t j = 0; j < m; ++j) {
            jac(i, j) = r.d(j);
        }
    }
    return jac;
}

// Hessian of a second-order evaluation result, made symmetric. For interval
// entries both mixed partials enclose the same quantity, so their
// intersection is used; otherwise the upper triangle is mirrored.
template <class S>
Matrix<S> hessian_of(const Dual2<S>& r, std::size_t m)
{
    Matrix<S> h(m, m, S(0.0));
    for (std::size_t i = 0; i < m; ++i) {
        const Dual1<S> gi = r.d(i);
        for (std::size_t j = 0; j < m; ++j) {
            h(i, j) = gi.d(j);
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            if constexpr (std::is_same_v<S, Interval>) {
                Interval both = intersect(h(i, j), h(j, i));
                if (both.is_empty()) {
                    both = hull(h(i, j), h(j, i));
                }
                h(i, j) = both;
            }
            h(j, i) = h(i, j);
        }
    }
    return h;
}

template <class S>
std::vector<Dual2<S>> dual2_environment(std::span<const S> env)
{
    std::vector<Dual2<S>> out;
    out.reserve(env.size());
    for (std::size_t j = 0; j < env.size(); ++j) {
        out.push_back(dual2_variable(env[j], j, env.size()));
    }
    return out;
}

// Entry (i, j) encloses d^2 f / dx_i dx_j over all of b.
inline IntervalMatrix hessian_bound(const Expr& expr, std::span<const Interval> b,
                                    std::span<const double> params = {})
{
    if (variable_extent(expr.root()) > b.size()) {
        throw std::out_of_range("hessian_bound: expression uses an unbound variable");
    }
    const auto env = dual2_environment<Interval>(b);
    const Dual2<Interval> r = eval<Dual2<Interval>>(expr, std::span<const Dual2<Interval>>(env), params);
    return hessian_of(r, b.size());
}

} // namespace aerange

#endif
