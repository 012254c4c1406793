#ifndef AERANGE_JOINT_RANGE_HPP
#define AERANGE_JOINT_RANGE_HPP

// Joint under- and over-approximations of the image of a vector function.
//
// A componentwise under-approximation is not a joint one: the existential
// variables of component i must be disjoint from those of every other
// component. A PiMap assigns each input to at most one output; component i
// then treats every input not assigned to it as universal.
//
// Sets between steps are skewed boxes {y : C y in z}. Their generator forms
// c + A diag(r) e feed the next evaluation and are certified against the
// constraint form with a rigorous bound on ||I - C A||.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ae_core.hpp"
#include "autodiff.hpp"
#include "expr.hpp"
#include "interval.hpp"
#include "matrix.hpp"

namespace aerange
{

class PiMap
{
public:
    PiMap() = default;
    PiMap(std::size_t outputs, std::vector<std::optional<std::size_t>> assignment)
        : outputs_(outputs), assignment_(std::move(assignment))
    {
        for (const auto& a : assignment_) {
            if (a && *a >= outputs_) {
                throw std::invalid_argument("PiMap: output index out of range");
            }
        }
    }

    // Input j < n goes to output j; inputs n..m-1 stay unassigned.
    static PiMap identity(std::size_t n, std::size_t m)
    {
        std::vector<std::optional<std::size_t>> a(m);
        for (std::size_t j = 0; j < std::min(n, m); ++j) {
            a[j] = j;
        }
        return {n, std::move(a)};
    }
    static PiMap identity(std::size_t n) { return identity(n, n); }

    std::size_t inputs() const { return assignment_.size(); }
    std::size_t outputs() const { return outputs_; }
    std::optional<std::size_t> operator[](std::size_t j) const { return assignment_.at(j); }

    void assign(std::size_t input, std::optional<std::size_t> output)
    {
        if (output && *output >= outputs_) {
            throw std::invalid_argument("PiMap: output index out of range");
        }
        assignment_.at(input) = output;
    }

    // Throws std::invalid_argument unless the map fits `split` and covers
    // every output.
    void validate(const QuantifierSplit& split) const
    {
        if (split.size() != inputs()) {
            throw std::invalid_argument("PiMap: input count does not match the split");
        }
        std::vector<bool> covered(outputs_, false);
        for (std::size_t j = 0; j < inputs(); ++j) {
            if (!assignment_[j]) {
                continue;
            }
            if (split.is_universal(j)) {
                throw std::invalid_argument("PiMap: universal input " + std::to_string(j) + " is assigned");
            }
            covered[*assignment_[j]] = true;
        }
        for (std::size_t i = 0; i < outputs_; ++i) {
            if (!covered[i]) {
                throw std::invalid_argument("PiMap: output " + std::to_string(i) + " has no assigned input");
            }
        }
    }

    // Split used for output i: universal unless assigned to i.
    QuantifierSplit split_for(std::size_t i, const QuantifierSplit& split) const
    {
        std::vector<bool> mask(inputs());
        for (std::size_t j = 0; j < inputs(); ++j) {
            mask[j] = split.is_universal(j) || assignment_[j] != i;
        }
        return QuantifierSplit::from_mask(std::move(mask));
    }

private:
    std::size_t outputs_ = 0;
    std::vector<std::optional<std::size_t>> assignment_;
};

// Input domain x = center + gen * diag(r) * e with e in [-1,1]^p. For each
// parameter, `inner` gives a set inside the domain and `outer` one
// containing it; they differ when the domain came from a box whose
// midpoint and radius are not exact.
struct Domain
{
    std::vector<double> center;
    RealMatrix gen;
    std::vector<double> inner;
    std::vector<double> outer;

    std::size_t dim() const { return center.size(); }
    std::size_t params() const { return gen.cols(); }
    bool exact() const { return inner == outer; }

    static Domain from_box(std::span<const Interval> b)
    {
        if (is_empty(b)) {
            throw std::invalid_argument("Domain: empty box");
        }
        Domain d;
        d.center = aerange::center(b);
        d.gen = RealMatrix::identity(b.size());
        for (const auto& x : b) {
            d.inner.push_back(x.is_point() ? 0.0 : x.inner_radius());
            d.outer.push_back(x.is_point() ? 0.0 : x.outer_radius());
        }
        return d;
    }

    // Parameterization for one role: existential parameters take the inner
    // radius under-role and the outer one over-role, universal the reverse.
    AffineParam role(const std::vector<bool>& universal, bool under) const
    {
        AffineParam p;
        p.center = center;
        p.gen = gen;
        p.scale.resize(params());
        for (std::size_t j = 0; j < params(); ++j) {
            p.scale[j] = (universal[j] == under) ? outer[j] : inner[j];
        }
        return p;
    }

    Box enclosure() const { return role(std::vector<bool>(params(), false), false).enclosure(); }
};

// Product domain: the variables of `a` followed by those of `b`.
inline Domain concat(const Domain& a, const Domain& b)
{
    Domain d;
    d.center = a.center;
    d.center.insert(d.center.end(), b.center.begin(), b.center.end());
    d.gen = RealMatrix(a.dim() + b.dim(), a.params() + b.params(), 0.0);
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.params(); ++j) {
            d.gen(i, j) = a.gen(i, j);
        }
    }
    for (std::size_t i = 0; i < b.dim(); ++i) {
        for (std::size_t j = 0; j < b.params(); ++j) {
            d.gen(a.dim() + i, a.params() + j) = b.gen(i, j);
        }
    }
    d.inner = a.inner;
    d.inner.insert(d.inner.end(), b.inner.begin(), b.inner.end());
    d.outer = a.outer;
    d.outer.insert(d.outer.end(), b.outer.begin(), b.outer.end());
    return d;
}

namespace detail
{

// Linearizations of out * f keyed by parameter scaling, so components whose
// splits lead to the same parameterization share one evaluation.
class LinearizationCache
{
public:
    LinearizationCache(std::span<const Expr> f, const RealMatrix* out, std::span<const double> params,
                       LinearizeOptions opts)
        : f_(f), out_(out), params_(params), opts_(opts)
    {
    }

    const Linearization& get(const AffineParam& p)
    {
        for (const auto& [scale, lin] : entries_) {
            if (scale == p.scale) {
                return lin;
            }
        }
        entries_.emplace_back(p.scale, linearize(f_, p, out_, params_, opts_));
        return entries_.back().second;
    }

private:
    std::span<const Expr> f_;
    const RealMatrix* out_;
    std::span<const double> params_;
    LinearizeOptions opts_;
    std::list<std::pair<std::vector<double>, Linearization>> entries_;
};

inline std::size_t output_count(std::span<const Expr> f, const RealMatrix* out)
{
    return out != nullptr ? out->rows() : f.size();
}

inline LinearizeOptions joint_options(const Method& m, std::size_t max_terms)
{
    LinearizeOptions o = options_for(m);
    o.max_terms = max_terms;
    return o;
}

} // namespace detail

struct JointOptions
{
    Method method = Method::mv();
    std::size_t max_terms = 0;
};

// Under-approximation of the robust joint image of out * f over `dom`.
// Returns a box of empty intervals if any component is empty.
inline Box joint_under(std::span<const Expr> f, const Domain& dom, const RealMatrix* out, const PiMap& pi,
                       const QuantifierSplit& split, std::span<const double> params = {},
                       const JointOptions& opts = {})
{
    pi.validate(split);
    const std::size_t n = detail::output_count(f, out);
    if (pi.outputs() != n) {
        throw std::invalid_argument("PiMap: output count does not match the function");
    }
    detail::LinearizationCache cache(f, out, params, detail::joint_options(opts.method, opts.max_terms));
    Box z(n);
    for (std::size_t i = 0; i < n; ++i) {
        const QuantifierSplit si = pi.split_for(i, split);
        const auto& ul = cache.get(dom.role(si.mask(), true));
        const auto& ol = cache.get(dom.role(si.mask(), false));
        z[i] = ae_range(ul, ol, i, si, opts.method).under;
        if (z[i].is_empty()) {
            return Box(n, Interval::empty());
        }
    }
    return z;
}

// Componentwise over-approximation of the robust image of out * f.
inline Box joint_over(std::span<const Expr> f, const Domain& dom, const RealMatrix* out,
                      const QuantifierSplit& split, std::span<const double> params = {},
                      const JointOptions& opts = {})
{
    const std::size_t n = detail::output_count(f, out);
    detail::LinearizationCache cache(f, out, params, detail::joint_options(opts.method, opts.max_terms));
    const auto& ul = cache.get(dom.role(split.mask(), true));
    const auto& ol = cache.get(dom.role(split.mask(), false));
    Box z(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = ae_range(ul, ol, i, split, opts.method).over;
    }
    if (split.has_universal()) {
        const auto plain = QuantifierSplit::existential_only(split.size());
        const auto& pl = cache.get(dom.role(plain.mask(), false));
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = intersect(z[i], first_order_range(pl, pl, i, plain, Method::mv()).over);
        }
    }
    return z;
}

inline Box joint_under(std::span<const Expr> f, std::span<const Interval> b, const PiMap& pi,
                       const Method& method, const QuantifierSplit& split, std::span<const double> params = {})
{
    return joint_under(f, Domain::from_box(b), nullptr, pi, split, params, {method});
}

inline Box joint_over(std::span<const Expr> f, std::span<const Interval> b, const Method& method,
                      const QuantifierSplit& split, std::span<const double> params = {})
{
    return joint_over(f, Domain::from_box(b), nullptr, split, params, {method});
}

enum class Role
{
    under,
    over
};

// A set {y : C y in z} with a generator form c + A diag(r) e. For the under
// role the generator set lies inside the constraint set, for the over role
// it contains it. `axis_aligned` marks C = A = identity, where the set is
// the box z itself.
struct SkewedBox
{
    RealMatrix C;
    Box z;
    std::vector<double> gen_center;
    RealMatrix gen_matrix;
    std::vector<double> gen_radius;
    double lambda = 1.0;
    double mu = 0.0;
    bool axis_aligned = false;

    std::size_t dim() const { return z.size(); }
    bool is_empty() const { return z.empty() || aerange::is_empty(z); }

    static SkewedBox empty_set(std::size_t n)
    {
        SkewedBox s;
        s.C = RealMatrix::identity(n);
        s.z = Box(n, Interval::empty());
        s.gen_matrix = RealMatrix::identity(n);
        s.axis_aligned = true;
        return s;
    }

    static SkewedBox from_box(std::span<const Interval> b, Role role)
    {
        if (aerange::is_empty(b)) {
            return empty_set(b.size());
        }
        SkewedBox s;
        s.C = RealMatrix::identity(b.size());
        s.z.assign(b.begin(), b.end());
        s.gen_center = center(b);
        s.gen_matrix = RealMatrix::identity(b.size());
        for (const auto& x : b) {
            s.gen_radius.push_back(x.is_point() ? 0.0 : role == Role::under ? x.inner_radius() : x.outer_radius());
        }
        s.axis_aligned = true;
        return s;
    }

    // Domain parameterizing this set.
    Domain domain() const
    {
        if (is_empty()) {
            throw std::invalid_argument("SkewedBox: domain of an empty set");
        }
        if (axis_aligned) {
            return Domain::from_box(z);
        }
        Domain d;
        d.center = gen_center;
        d.gen = gen_matrix;
        d.inner = gen_radius;
        d.outer = gen_radius;
        return d;
    }

    // Rigorous bounds on the coordinate projections of the set: inside the
    // true projection for the under role, containing it for the over role.
    Box projection(Role role) const
    {
        if (is_empty()) {
            return Box(dim(), Interval::empty());
        }
        if (axis_aligned) {
            return z;
        }
        Box out;
        for (std::size_t l = 0; l < dim(); ++l) {
            Interval spread(0.0);
            for (std::size_t j = 0; j < dim(); ++j) {
                spread += abs(Interval(gen_matrix(l, j))) * Interval(gen_radius[j]);
            }
            const Interval c(gen_center[l]);
            if (role == Role::over) {
                out.emplace_back((c - Interval(spread.hi())).lo(), (c + Interval(spread.hi())).hi());
            } else {
                const double lo = (c - Interval(spread.hi())).hi();
                const double hi = (c + Interval(spread.hi())).lo();
                out.push_back(lo <= hi ? Interval(lo, hi) : Interval(gen_center[l]));
            }
        }
        return out;
    }

    // Whether C y can lie in z, with z widened by tol * max(1, |z_i|).
    bool contains(std::span<const double> y, double tol = 0.0) const
    {
        if (is_empty()) {
            return false;
        }
        std::vector<Interval> yi(y.begin(), y.end());
        const auto cy = multiply(to_interval(C), std::span<const Interval>(yi));
        for (std::size_t i = 0; i < dim(); ++i) {
            const double w = tol * std::max(1.0, z[i].mag());
            if (cy[i].hi() < z[i].lo() - w || cy[i].lo() > z[i].hi() + w) {
                return false;
            }
        }
        return true;
    }

    // Corners c + A diag(r) s, s in {-1,1}^n, in floating point.
    // Logarithm of the volume of the generator form (-inf when flat).
    double log_volume() const
    {
        if (is_empty()) {
            return -std::numeric_limits<double>::infinity();
        }
        double v = axis_aligned ? 0.0 : log_abs_det(gen_matrix);
        for (double r : gen_radius) {
            v += std::log(2.0 * r);
        }
        return v;
    }

    std::vector<std::vector<double>> corners() const
    {
        std::vector<std::vector<double>> out;
        if (is_empty()) {
            return out;
        }
        const std::size_t n = dim();
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
            std::vector<double> y = gen_center;
            for (std::size_t j = 0; j < n; ++j) {
                const double s = (mask >> j & 1U) ? gen_radius[j] : -gen_radius[j];
                for (std::size_t l = 0; l < n; ++l) {
                    y[l] += gen_matrix(l, j) * s;
                }
            }
            out.push_back(std::move(y));
        }
        return out;
    }
};

// Upper bound on ||I - C A|| in the infinity norm.
inline double regularity_bound(const RealMatrix& C, const RealMatrix& A)
{
    const IntervalMatrix b = multiply(to_interval(C), to_interval(A));
    double mu = 0.0;
    for (std::size_t i = 0; i < b.rows(); ++i) {
        Interval row(0.0);
        for (std::size_t j = 0; j < b.cols(); ++j) {
            row += abs((i == j ? Interval(1.0) : Interval(0.0)) - b(i, j));
        }
        mu = std::max(mu, row.hi());
    }
    return mu;
}

struct GeneratorCertificate
{
    bool ok = false;
    double lambda = 0.0;
    double mu = 0.0;
    SkewedBox set;
};

// Generator form for {y : C y in z} with matrix A, center A mid(z).
// Under role: the largest scale lambda in [0,1] with
//   C c + (C A) diag(lambda r) [-1,1]^n inside z,
// so the generator set lies in the constraint set. Over role: radii v with
// v_j >= t_j + mu ||t|| / (1 - mu), t = |z - C c|, which contain it.
// Both need mu = ||I - C A|| < 1; the under role also needs C c in z.
inline GeneratorCertificate certify_generator(const RealMatrix& C, std::span<const Interval> z,
                                              const RealMatrix& A, Role role)
{
    const std::size_t n = z.size();
    GeneratorCertificate cert;
    cert.mu = regularity_bound(C, A);
    if (!(cert.mu < 1.0) || is_empty(z)) {
        return cert;
    }
    const std::vector<double> zc = center(z);
    const std::vector<double> gc = multiply(A, std::span<const double>(zc));
    std::vector<Interval> gci(gc.begin(), gc.end());
    const IntervalMatrix ci = to_interval(C);
    const std::vector<Interval> cg = multiply(ci, std::span<const Interval>(gci));
    const IntervalMatrix ca = multiply(ci, to_interval(A));

    SkewedBox& s = cert.set;
    s.C = C;
    s.z.assign(z.begin(), z.end());
    s.gen_center = gc;
    s.gen_matrix = A;
    s.mu = cert.mu;

    if (role == Role::over) {
        std::vector<Interval> t(n);
        double tmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = Interval(std::max((Interval(z[i].hi()) - cg[i]).hi(), (cg[i] - Interval(z[i].lo())).hi()));
            tmax = std::max(tmax, t[i].hi());
        }
        const Interval extra = Interval(cert.mu) * Interval(tmax) / (Interval(1.0) - Interval(cert.mu));
        for (std::size_t j = 0; j < n; ++j) {
            s.gen_radius.push_back((t[j] + extra).hi());
        }
        s.lambda = 1.0;
        cert.lambda = 1.0;
        cert.ok = true;
        return cert;
    }

    std::vector<double> r;
    for (const auto& x : z) {
        r.push_back(x.outer_radius());
    }
    double lambda = 1.0;
    std::vector<double> spread(n);
    for (std::size_t i = 0; i < n; ++i) {
        Interval si(0.0);
        for (std::size_t j = 0; j < n; ++j) {
            si += Interval(ca(i, j).mag()) * Interval(r[j]);
        }
        spread[i] = si.hi();
        const double room = std::min((cg[i] - Interval(z[i].lo())).lo(), (Interval(z[i].hi()) - cg[i]).lo());
        if (room < 0) {
            return cert;
        }
        if (spread[i] > 0) {
            lambda = std::min(lambda, (Interval(room) / Interval(spread[i])).lo());
        }
    }
    lambda = std::max(lambda, 0.0);
    // Recheck with the rounded radii; the bounds above are rigorous, so at
    // most a few nudges are needed.
    for (int attempt = 0; attempt < 8; ++attempt) {
        std::vector<double> radius(n);
        for (std::size_t j = 0; j < n; ++j) {
            radius[j] = (Interval(r[j]) * Interval(lambda)).lo();
        }
        bool inside = true;
        for (std::size_t i = 0; i < n && inside; ++i) {
            Interval y = cg[i];
            for (std::size_t j = 0; j < n; ++j) {
                y += ca(i, j) * Interval(radius[j]) * Interval(-1.0, 1.0);
            }
            inside = y.subset_of(z[i]);
        }
        if (inside) {
            s.gen_radius = std::move(radius);
            s.lambda = lambda;
            cert.lambda = lambda;
            cert.ok = true;
            return cert;
        }
        lambda = attempt < 7 ? lambda * (1.0 - 0x1p-40) : 0.0;
    }
    return cert;
}

struct StepOutcome
{
    SkewedBox set;
    bool fallback = false;
    std::string warning;
};

namespace detail
{

// Float approximation of the Jacobian of x -> f(x) over the state part of
// `dom`, composed with the generator matrix: the shape of the image set.
inline std::optional<RealMatrix> image_shape(std::span<const Expr> f, const Domain& dom, std::size_t n,
                                             std::span<const double> params)
{
    try {
        const Box xb = dom.enclosure();
        const auto j = jacobian_eval<Interval>(f, std::span<const Interval>(xb), params);
        RealMatrix a(n, n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t l = 0; l < n; ++l) {
                const double jil = j(i, l).mid();
                if (!std::isfinite(jil)) {
                    return std::nullopt;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    a(i, k) += jil * dom.gen(l, k);
                }
            }
        }
        return a;
    } catch (const DomainError&) {
        return std::nullopt;
    }
}

struct Preconditioner
{
    RealMatrix A;
    RealMatrix C;
    bool identity = true;
    std::string warning;
};

inline Preconditioner choose_preconditioner(std::span<const Expr> f, const Domain& dom, std::size_t n,
                                            std::span<const double> params)
{
    Preconditioner p;
    p.A = RealMatrix::identity(n);
    p.C = RealMatrix::identity(n);
    const auto a = image_shape(f, dom, n, params);
    if (!a) {
        p.warning = "Jacobian center unavailable; identity preconditioning";
        return p;
    }
    const auto c = invert(*a);
    if (!c) {
        p.warning = "singular Jacobian center; identity preconditioning";
        return p;
    }
    if (!(regularity_bound(*c, *a) < 1.0)) {
        p.warning = "approximate inverse not certified; identity preconditioning";
        return p;
    }
    p.A = *a;
    p.C = *c;
    p.identity = false;
    return p;
}

} // namespace detail

// One preconditioned image step for one role. `dom` holds the states
// (first n parameters) followed by the inputs; the result covers the n
// outputs of f.
inline StepOutcome preconditioned_image(std::span<const Expr> f, const Domain& dom, const PiMap& pi,
                                        const QuantifierSplit& split, Role role,
                                        std::span<const double> params = {}, const JointOptions& opts = {})
{
    const std::size_t n = f.size();
    StepOutcome res;
    detail::Preconditioner pc = detail::choose_preconditioner(f, dom, n, params);
    const auto image = [&](const detail::Preconditioner& p) {
        const RealMatrix* out = p.identity ? nullptr : &p.C;
        return role == Role::under ? joint_under(f, dom, out, pi, split, params, opts)
                                   : joint_over(f, dom, out, split, params, opts);
    };
    Box z = image(pc);
    if (!pc.identity && !is_empty(z)) {
        GeneratorCertificate cert = certify_generator(pc.C, z, pc.A, role);
        if (cert.ok) {
            res.set = std::move(cert.set);
            return res;
        }
        pc = detail::Preconditioner{RealMatrix::identity(n), RealMatrix::identity(n), true,
                                    "generator certification failed; identity preconditioning"};
        z = image(pc);
    }
    res.fallback = !pc.warning.empty();
    res.warning = pc.warning;
    res.set = SkewedBox::from_box(z, role);
    return res;
}

struct StepPair
{
    StepOutcome under;
    StepOutcome over;
};

// Under and over images of one input set (followed by input boxes).
inline StepPair preconditioned_step(std::span<const Expr> f, const SkewedBox& input,
                                    std::span<const Interval> inputs, const PiMap& pi, const QuantifierSplit& split,
                                    std::span<const double> params = {}, const JointOptions& opts = {})
{
    const Domain dom = concat(input.domain(), Domain::from_box(inputs));
    return {preconditioned_image(f, dom, pi, split, Role::under, params, opts),
            preconditioned_image(f, dom, pi, split, Role::over, params, opts)};
}

} // namespace aerange

#endif
