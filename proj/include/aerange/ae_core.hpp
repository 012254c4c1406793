#ifndef AERANGE_AE_CORE_HPP
#define AERANGE_AE_CORE_HPP

// Under- and over-approximations of the (robust) range of a scalar function.
//
// Every method works on a normalized function g(e) = f(x(e)) where
// x(e) = center + T e is an affine parameterization by the unit box
// e in [-1, 1]^p. A Linearization bundles what the formulas need about g:
// its value at 0, an affine-arithmetic enclosure of its Jacobian that can be
// instantiated on sub-boxes of the unit box, and optionally the center
// gradient and Hessian bounds.
//
// With E the existential and A the universal indices, the formulas combine a
// guaranteed effect and a worst-case effect of each part:
//
//   e = [T_E, U_E]  effect of moving the E coordinates (A free)
//   a = [T_A, U_A]  effect of moving the A coordinates (E at the center)
//
//   under = [sup f0 - T_E + U_A, inf f0 + T_E - U_A]
//   over  = [inf f0 - U_E + T_A, sup f0 + U_E - T_A]

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "affine.hpp"
#include "autodiff.hpp"
#include "dual.hpp"
#include "expr.hpp"
#include "interval.hpp"
#include "matrix.hpp"

namespace aerange
{

class QuantifierSplit
{
public:
    QuantifierSplit() = default;

    // All m indices existential.
    static QuantifierSplit existential_only(std::size_t m)
    {
        QuantifierSplit s;
        s.universal_.assign(m, false);
        return s;
    }

    static QuantifierSplit with_universal(std::size_t m, std::span<const std::size_t> universal)
    {
        QuantifierSplit s = existential_only(m);
        for (std::size_t j : universal) {
            if (j >= m) {
                throw std::out_of_range("QuantifierSplit: index out of range");
            }
            s.universal_[j] = true;
        }
        return s;
    }

    static QuantifierSplit from_mask(std::vector<bool> universal)
    {
        QuantifierSplit s;
        s.universal_ = std::move(universal);
        return s;
    }

    std::size_t size() const { return universal_.size(); }
    bool is_universal(std::size_t j) const { return universal_[j]; }
    bool is_existential(std::size_t j) const { return !universal_[j]; }
    bool has_universal() const { return std::find(universal_.begin(), universal_.end(), true) != universal_.end(); }
    const std::vector<bool>& mask() const { return universal_; }

    std::vector<std::size_t> universal() const { return indices(true); }
    std::vector<std::size_t> existential() const { return indices(false); }

private:
    std::vector<std::size_t> indices(bool flag) const
    {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < universal_.size(); ++j) {
            if (universal_[j] == flag) {
                out.push_back(j);
            }
        }
        return out;
    }

    std::vector<bool> universal_;
};

struct RangePair
{
    Interval under = Interval::empty();
    Interval over = Interval::empty();
};

// Per-index bounds on |d g / d e_j| for one part of the split: `lower` is a
// guaranteed directional gain (>= 0), `upper` bounds the magnitude.
struct GradientBounds
{
    std::vector<std::size_t> indices;
    std::vector<Interval> bounds; // [lower, upper] per listed index
};

enum class Scheme
{
    mean_value,
    taylor2,
    quadrature
};

struct Method
{
    Scheme scheme = Scheme::mean_value;
    int k = 10;

    static Method mv() { return {Scheme::mean_value, 1}; }
    static Method taylor2() { return {Scheme::taylor2, 1}; }
    static Method quad(int k = 10) { return {Scheme::quadrature, k}; }
};

// Uniform square-ring partition of a box: per dimension 2k+1 breakpoints
// c - r, ..., c, ..., c + r (breakpoint i of index k + i is c + i r / k) and
// per ring i the deviation r / k.
struct RingPartition
{
    int k = 1;
    std::vector<std::vector<double>> breakpoints;
    std::vector<std::vector<double>> dx; // dx[i - 1][j]
};

inline RingPartition make_ring_partition(std::span<const Interval> b, int k)
{
    if (k < 1) {
        throw std::invalid_argument("ring partition needs k >= 1");
    }
    RingPartition p;
    p.k = k;
    p.breakpoints.resize(b.size());
    p.dx.assign(static_cast<std::size_t>(k), std::vector<double>(b.size()));
    for (std::size_t j = 0; j < b.size(); ++j) {
        const double c = b[j].mid();
        auto& bp = p.breakpoints[j];
        bp.resize(2 * static_cast<std::size_t>(k) + 1);
        for (int i = -k; i <= k; ++i) {
            double v = c;
            if (i == -k) {
                v = b[j].lo();
            } else if (i == k) {
                v = b[j].hi();
            } else if (i < 0) {
                v = c - (c - b[j].lo()) * (static_cast<double>(-i) / k);
            } else if (i > 0) {
                v = c + (b[j].hi() - c) * (static_cast<double>(i) / k);
            }
            bp[static_cast<std::size_t>(i + k)] = v;
        }
        for (int i = 1; i <= k; ++i) {
            p.dx[static_cast<std::size_t>(i - 1)][j] = b[j].outer_radius() / k;
        }
    }
    return p;
}

// Affine parameterization x = center + gen * e, e in [-1, 1]^p. `gen` holds
// exact doubles, so the parameterization itself carries no rounding.
// x(e) = center + gen * diag(scale) * e. The product gen * diag(scale) is
// never rounded: evaluation uses its interval enclosure. An empty scale
// means all ones.
struct AffineParam
{
    std::vector<double> center;
    RealMatrix gen;
    std::vector<double> scale;

    std::size_t dim() const { return center.size(); }
    std::size_t params() const { return gen.cols(); }

    Interval coefficient(std::size_t l, std::size_t j) const
    {
        return scale.empty() ? Interval(gen(l, j)) : Interval(gen(l, j)) * Interval(scale[j]);
    }

    static AffineParam axis_aligned(std::span<const double> c, std::span<const double> r)
    {
        AffineParam p;
        p.center.assign(c.begin(), c.end());
        p.gen = RealMatrix(c.size(), c.size(), 0.0);
        for (std::size_t j = 0; j < c.size(); ++j) {
            p.gen(j, j) = r[j];
        }
        return p;
    }

    // Interval enclosure of the parameterized set.
    Box enclosure() const
    {
        Box out;
        out.reserve(dim());
        for (std::size_t l = 0; l < dim(); ++l) {
            Interval x(center[l]);
            for (std::size_t j = 0; j < params(); ++j) {
                x += coefficient(l, j) * Interval(-1.0, 1.0);
            }
            out.push_back(x);
        }
        return out;
    }
};

struct Linearization
{
    std::unique_ptr<NoiseContext> ctx = std::make_unique<NoiseContext>();
    std::vector<Interval> f0;
    Matrix<AffineForm> jac; // outputs x params, input symbol j <-> e_j
    std::optional<IntervalMatrix> center_grad;
    std::vector<IntervalMatrix> hess; // per output, empty unless requested
    // Noise symbol of each parameter; empty means parameter j is symbol j.
    std::vector<SymbolId> symbols;

    std::size_t outputs() const { return f0.size(); }
    std::size_t params() const { return jac.cols(); }
    SymbolId symbol(std::size_t j) const { return symbols.empty() ? static_cast<SymbolId>(j) : symbols[j]; }
};

struct LinearizeOptions
{
    bool center_gradient = false;
    bool hessian = false;
    std::size_t max_terms = 0;
};

namespace detail
{

// Output transform: either identity or a dense float matrix applied to f.
template <class S>
std::vector<S> apply_output(const RealMatrix* out, std::vector<S> y)
{
    if (out == nullptr) {
        return y;
    }
    std::vector<S> z;
    z.reserve(out->rows());
    for (std::size_t i = 0; i < out->rows(); ++i) {
        S acc(0.0);
        bool first = true;
        for (std::size_t l = 0; l < out->cols(); ++l) {
            const double c = (*out)(i, l);
            if (c == 0) {
                continue;
            }
            S term = S(c) * y[l];
            acc = first ? std::move(term) : acc + term;
            first = false;
        }
        z.push_back(std::move(acc));
    }
    return z;
}

} // namespace detail

// Linearization of g(e) = out * f(x(e)) (out may be null for identity).
inline Linearization linearize(std::span<const Expr> f, const AffineParam& x, const RealMatrix* out,
                               std::span<const double> params, const LinearizeOptions& opts = {})
{
    const std::size_t p = x.params();
    const std::size_t d = x.dim();
    for (const auto& e : f) {
        if (variable_extent(e.root()) > d) {
            throw std::out_of_range("linearize: expression uses an unbound variable");
        }
    }
    Linearization lin;
    lin.ctx->set_max_terms(opts.max_terms);
    NoiseContext& ctx = *lin.ctx;
    for (std::size_t j = 0; j < p; ++j) {
        if (ctx.input_symbol() != j) {
            throw std::logic_error("linearize: unexpected symbol numbering");
        }
    }

    // Value at the center.
    std::vector<Interval> xc;
    xc.reserve(d);
    for (double c : x.center) {
        xc.emplace_back(c);
    }
    lin.f0 = detail::apply_output(out, eval<Interval>(f, xc, params));

    // Affine Jacobian over the whole unit box.
    std::vector<Dual1<AffineForm>> env;
    env.reserve(d);
    for (std::size_t l = 0; l < d; ++l) {
        std::vector<AffineForm> grad;
        grad.reserve(p);
        if (x.scale.empty()) {
            std::vector<AffineForm::Term> terms;
            for (std::size_t j = 0; j < p; ++j) {
                terms.push_back({static_cast<SymbolId>(j), x.gen(l, j)});
                grad.emplace_back(x.gen(l, j));
            }
            env.emplace_back(AffineForm(x.center[l], std::move(terms), &ctx), std::move(grad));
            continue;
        }
        AffineBuilder xl(&ctx);
        xl.set_center(Interval(x.center[l]));
        for (std::size_t j = 0; j < p; ++j) {
            const Interval a = x.coefficient(l, j);
            xl.push(static_cast<SymbolId>(j), a);
            grad.push_back(a.is_point() ? AffineForm(a.lo()) : detail::from_interval(a, &ctx));
        }
        env.emplace_back(xl.finish(), std::move(grad));
    }
    const auto y = detail::apply_output(out, eval<Dual1<AffineForm>>(f, env, params));
    lin.jac = Matrix<AffineForm>(y.size(), p, AffineForm(0.0));
    for (std::size_t i = 0; i < y.size(); ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            lin.jac(i, j) = y[i].d(j);
        }
    }

    if (opts.center_gradient) {
        std::vector<Dual1<Interval>> cenv;
        cenv.reserve(d);
        for (std::size_t l = 0; l < d; ++l) {
            std::vector<Interval> g;
            for (std::size_t j = 0; j < p; ++j) {
                g.push_back(x.coefficient(l, j));
            }
            cenv.emplace_back(Interval(x.center[l]), std::move(g));
        }
        const auto cy = detail::apply_output(out, eval<Dual1<Interval>>(f, cenv, params));
        IntervalMatrix cg(cy.size(), p, Interval(0.0));
        for (std::size_t i = 0; i < cy.size(); ++i) {
            for (std::size_t j = 0; j < p; ++j) {
                cg(i, j) = cy[i].d(j);
            }
        }
        lin.center_grad = std::move(cg);
    }

    if (opts.hessian) {
        const Box xb = x.enclosure();
        std::vector<Dual2<Interval>> henv;
        henv.reserve(d);
        for (std::size_t l = 0; l < d; ++l) {
            std::vector<Interval> g1;
            std::vector<Dual1<Interval>> g2;
            for (std::size_t j = 0; j < p; ++j) {
                g1.push_back(x.coefficient(l, j));
                g2.emplace_back(x.coefficient(l, j));
            }
            henv.emplace_back(Dual1<Interval>(xb[l], std::move(g1)), std::move(g2));
        }
        const auto hy = detail::apply_output(out, eval<Dual2<Interval>>(f, henv, params));
        for (const auto& h : hy) {
            lin.hess.push_back(hessian_of(h, p));
        }
    }
    return lin;
}

namespace detail
{

inline Interval sum_abs_bounds(const std::vector<Interval>& bounds)
{
    Interval s(0.0);
    for (const auto& b : bounds) {
        s += b;
    }
    return s;
}

// Combines the E and A effects into the under/over pair.
inline RangePair combine_terms(const Interval& f0u, const Interval& eu, const Interval& au,
                               const Interval& f0o, const Interval& eo, const Interval& ao)
{
    RangePair r;
    const double under_lo = (Interval(f0u.hi()) - Interval(eu.lo()) + Interval(au.hi())).hi();
    const double under_hi = (Interval(f0u.lo()) + Interval(eu.lo()) - Interval(au.hi())).lo();
    r.under = Interval(under_lo, under_hi);
    const double over_lo = (Interval(f0o.lo()) - Interval(eo.hi()) + Interval(ao.lo())).lo();
    const double over_hi = (Interval(f0o.hi()) + Interval(eo.hi()) - Interval(ao.lo())).hi();
    r.over = Interval(over_lo, over_hi);
    return r;
}

// |J| as [mig, mag] for an instantiated derivative bound.
inline Interval magnitude_bounds(const Interval& d) { return {d.mig(), d.mag()}; }

} // namespace detail

// Successive-centering gradient bounds for one part of the split. For the
// existential part the universal coordinates are free; for the universal
// part the existential coordinates are held at the center. Within the part,
// coordinates before j (natural order) are at the center.
inline GradientBounds successive_gradient_bounds(const Linearization& lin, std::size_t i,
                                                 const QuantifierSplit& split, bool universal_part)
{
    GradientBounds gb;
    SymbolRestriction restr;
    if (universal_part) {
        for (std::size_t j = 0; j < lin.params(); ++j) {
            if (split.is_existential(j)) {
                restr.set(lin.symbol(j), Interval(0.0));
            }
        }
    }
    for (std::size_t j = 0; j < lin.params(); ++j) {
        if (split.is_universal(j) != universal_part) {
            continue;
        }
        gb.indices.push_back(j);
        gb.bounds.push_back(detail::magnitude_bounds(lin.jac(i, j).instantiate(restr)));
        restr.set(lin.symbol(j), Interval(0.0));
    }
    return gb;
}

// Ring bounds for one part: for each ring the derivative is bounded on the
// 2|part| faces of the ring's shell inside the part's subspace. The lower
// bound is the gain along the best fixed-sign diagonal ray (zero when no
// ray gains), the upper bound the sum of ring magnitudes, both scaled by 1/k.
inline GradientBounds ring_gradient_bounds(const Linearization& lin, std::size_t i,
                                           const QuantifierSplit& split, bool universal_part, int k)
{
    GradientBounds gb;
    std::vector<std::size_t> part;
    for (std::size_t j = 0; j < lin.params(); ++j) {
        if (split.is_universal(j) == universal_part) {
            part.push_back(j);
        }
    }
    gb.indices = part;
    if (part.empty()) {
        return gb;
    }
    const Interval kk(static_cast<double>(k));
    // sums[j]: (sum of lower, sum of -upper, sum of magnitude) over rings.
    std::vector<Interval> sum_lo(part.size(), Interval(0.0));
    std::vector<Interval> sum_neg_hi(part.size(), Interval(0.0));
    std::vector<Interval> sum_mag(part.size(), Interval(0.0));
    for (int ring = 1; ring <= k; ++ring) {
        const Interval outer_r = Interval(static_cast<double>(ring)) / kk;
        const Interval inner_r = Interval(static_cast<double>(ring - 1)) / kk;
        const double o = std::min(outer_r.hi(), 1.0);
        const double in = inner_r.lo();
        SymbolRestriction base;
        if (universal_part) {
            for (std::size_t j = 0; j < lin.params(); ++j) {
                if (split.is_existential(j)) {
                    base.set(lin.symbol(j), Interval(0.0));
                }
            }
        }
        for (std::size_t q : part) {
            base.set(lin.symbol(q), Interval(-o, o));
        }
        std::vector<Interval> ring_bound(part.size(), Interval::empty());
        if (ring == 1) {
            for (std::size_t t = 0; t < part.size(); ++t) {
                ring_bound[t] = lin.jac(i, part[t]).instantiate(base);
            }
        } else {
            for (std::size_t face = 0; face < part.size(); ++face) {
                for (int sign = -1; sign <= 1; sign += 2) {
                    SymbolRestriction r = base;
                    r.set(lin.symbol(part[face]), sign < 0 ? Interval(-o, -in) : Interval(in, o));
                    for (std::size_t t = 0; t < part.size(); ++t) {
                        ring_bound[t] = hull(ring_bound[t], lin.jac(i, part[t]).instantiate(r));
                    }
                }
            }
        }
        for (std::size_t t = 0; t < part.size(); ++t) {
            sum_lo[t] += Interval(ring_bound[t].lo());
            sum_neg_hi[t] += Interval(-ring_bound[t].hi());
            sum_mag[t] += Interval(ring_bound[t].mag());
        }
    }
    for (std::size_t t = 0; t < part.size(); ++t) {
        const double gain = std::max({0.0, (sum_lo[t] / kk).lo(), (sum_neg_hi[t] / kk).lo()});
        gb.bounds.emplace_back(gain, (sum_mag[t] / kk).hi());
    }
    return gb;
}

// First-order range pair of component i. `ul` is the linearization for the
// under role, `ol` for the over role (they may be the same object).
inline RangePair first_order_range(const Linearization& ul, const Linearization& ol, std::size_t i,
                                   const QuantifierSplit& split, const Method& method)
{
    const bool quad = method.scheme == Scheme::quadrature;
    const auto bounds = [&](const Linearization& lin, bool universal_part) {
        return quad ? ring_gradient_bounds(lin, i, split, universal_part, method.k)
                    : successive_gradient_bounds(lin, i, split, universal_part);
    };
    const Interval eu = detail::sum_abs_bounds(bounds(ul, false).bounds);
    const Interval au = detail::sum_abs_bounds(bounds(ul, true).bounds);
    const Interval eo = detail::sum_abs_bounds(bounds(ol, false).bounds);
    const Interval ao = detail::sum_abs_bounds(bounds(ol, true).bounds);
    return detail::combine_terms(ul.f0[i], eu, au, ol.f0[i], eo, ao);
}

// Order-2 Taylor pair of component i: linear part at the center, remainder
// 1/2 e^T H e over the unit box. Both linearizations need center gradients
// and Hessians.
inline RangePair taylor2_from(const Linearization& ul, const Linearization& ol, std::size_t i,
                              const QuantifierSplit& split)
{
    const auto alpha_terms = [&](const Linearization& lin, bool universal_part) {
        Interval s(0.0);
        for (std::size_t j = 0; j < lin.params(); ++j) {
            if (split.is_universal(j) == universal_part) {
                s += detail::magnitude_bounds((*lin.center_grad)(i, j));
            }
        }
        return s;
    };
    const auto remainder = [&](const Linearization& lin) {
        const IntervalMatrix& h = lin.hess[i];
        Interval diag(0.0);
        Interval off(0.0);
        for (std::size_t j = 0; j < h.rows(); ++j) {
            diag += h(j, j) * Interval(0.0, 1.0);
            for (std::size_t l = j + 1; l < h.cols(); ++l) {
                off += h(j, l) * Interval(-1.0, 1.0);
            }
        }
        return Interval(0.5) * diag + off;
    };
    if (!ul.center_grad || !ol.center_grad || ul.hess.size() <= i || ol.hess.size() <= i) {
        throw std::invalid_argument("taylor2 needs center gradients and Hessians");
    }
    const RangePair alpha = detail::combine_terms(ul.f0[i], alpha_terms(ul, false), alpha_terms(ul, true),
                                                  ol.f0[i], alpha_terms(ol, false), alpha_terms(ol, true));
    const Interval beta_u = remainder(ul);
    const Interval beta_o = remainder(ol);
    RangePair r;
    if (!alpha.under.is_empty()) {
        r.under = Interval((Interval(alpha.under.lo()) + Interval(beta_u.hi())).hi(),
                           (Interval(alpha.under.hi()) + Interval(beta_u.lo())).lo());
    }
    r.over = alpha.over + beta_o;
    return r;
}

// Pair for component i with the chosen method. Quadrature results are
// refined with the mean-value pair: both unders lie in the (interval)
// robust range, so their hull does too, and both overs contain it.
inline RangePair ae_range(const Linearization& ul, const Linearization& ol, std::size_t i,
                          const QuantifierSplit& split, const Method& method)
{
    switch (method.scheme) {
    case Scheme::taylor2: return taylor2_from(ul, ol, i, split);
    case Scheme::quadrature: {
        const RangePair q = first_order_range(ul, ol, i, split, method);
        const RangePair mv = first_order_range(ul, ol, i, split, Method::mv());
        return {hull(q.under, mv.under), intersect(q.over, mv.over)};
    }
    default: return first_order_range(ul, ol, i, split, Method::mv());
    }
}

// Unit-box parameterizations of a box for the two roles. In the under role
// existential coordinates may only range over points of the box (inner
// radius) while universal ones must cover it (outer radius); the over role
// is the reverse.
struct RolePair
{
    AffineParam under;
    AffineParam over;
    bool same = false;
};

inline RolePair role_params(std::span<const Interval> b, const std::vector<bool>& universal)
{
    if (is_empty(b)) {
        throw std::invalid_argument("range of an empty box");
    }
    const std::vector<double> c = center(b);
    std::vector<double> ru(b.size());
    std::vector<double> ro(b.size());
    bool same = true;
    for (std::size_t j = 0; j < b.size(); ++j) {
        const double in = b[j].is_point() ? 0.0 : b[j].inner_radius();
        const double out = b[j].is_point() ? 0.0 : b[j].outer_radius();
        ru[j] = universal[j] ? out : in;
        ro[j] = universal[j] ? in : out;
        same = same && in == out;
    }
    return {AffineParam::axis_aligned(c, ru), AffineParam::axis_aligned(c, ro), same};
}

// Linearizations of `f` (optionally premultiplied by `out`) for both roles.
struct RoleLinearizations
{
    Linearization under;
    Linearization over_storage;
    bool shared = false;
    const Linearization& over() const { return shared ? under : over_storage; }
};

inline RoleLinearizations linearize_roles(std::span<const Expr> f, const RolePair& roles,
                                          const RealMatrix* out, std::span<const double> params,
                                          const LinearizeOptions& opts)
{
    RoleLinearizations r;
    r.under = linearize(f, roles.under, out, params, opts);
    r.shared = roles.same;
    if (!roles.same) {
        r.over_storage = linearize(f, roles.over, out, params, opts);
    }
    return r;
}

inline LinearizeOptions options_for(const Method& m)
{
    LinearizeOptions o;
    o.center_gradient = m.scheme == Scheme::taylor2;
    o.hessian = m.scheme == Scheme::taylor2;
    return o;
}

// Range pair of a scalar expression over a box with the given split. The
// split's universal indices are the disturbances.
inline RangePair ae_range(const Expr& f, std::span<const Interval> b, const QuantifierSplit& split,
                          const Method& method, std::span<const double> params = {})
{
    if (split.size() != b.size()) {
        throw std::invalid_argument("split size does not match the box");
    }
    if (method.k < 1) {
        throw std::invalid_argument("quadrature needs k >= 1");
    }
    const RolePair roles = role_params(b, split.mask());
    const RoleLinearizations lins =
        linearize_roles(std::span<const Expr>(&f, 1), roles, nullptr, params, options_for(method));
    RangePair r = ae_range(lins.under, lins.over(), 0, split, method);
    if (split.has_universal()) {
        // The robust range lies inside the plain range, so the plain
        // mean-value over-approximation also bounds it.
        const auto plain = QuantifierSplit::existential_only(b.size());
        const AffineParam all_outer = role_params(b, plain.mask()).over;
        const Linearization lin = linearize(std::span<const Expr>(&f, 1), all_outer, nullptr, params);
        r.over = intersect(r.over, first_order_range(lin, lin, 0, plain, Method::mv()).over);
    }
    return r;
}

inline RangePair robust_mean_value_range(const Expr& f, std::span<const Interval> b,
                                         const QuantifierSplit& split, std::span<const double> params = {})
{
    return ae_range(f, b, split, Method::mv(), params);
}

inline RangePair mean_value_range(const Expr& f, std::span<const Interval> b, std::span<const double> params = {})
{
    return robust_mean_value_range(f, b, QuantifierSplit::existential_only(b.size()), params);
}

inline RangePair taylor2_range(const Expr& f, std::span<const Interval> b, const QuantifierSplit& split,
                               std::span<const double> params = {})
{
    return ae_range(f, b, split, Method::taylor2(), params);
}

inline RangePair taylor2_range(const Expr& f, std::span<const Interval> b, std::span<const double> params = {})
{
    return taylor2_range(f, b, QuantifierSplit::existential_only(b.size()), params);
}

inline RangePair quadrature_range(const Expr& f, std::span<const Interval> b, int k, const QuantifierSplit& split,
                                  std::span<const double> params = {})
{
    return ae_range(f, b, split, Method::quad(k), params);
}

inline RangePair quadrature_range(const Expr& f, std::span<const Interval> b, int k = 10,
                                  std::span<const double> params = {})
{
    return quadrature_range(f, b, k, QuantifierSplit::existential_only(b.size()), params);
}

// Unrefined quadrature pair, exposing the ring formulas alone.
inline RangePair quadrature_range_unrefined(const Expr& f, std::span<const Interval> b, int k,
                                            const QuantifierSplit& split, std::span<const double> params = {})
{
    const RolePair roles = role_params(b, split.mask());
    const RoleLinearizations lins =
        linearize_roles(std::span<const Expr>(&f, 1), roles, nullptr, params, {});
    return first_order_range(lins.under, lins.over(), 0, split, Method::quad(k));
}

} // namespace aerange

#endif
