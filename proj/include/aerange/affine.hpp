#ifndef AERANGE_AFFINE_HPP
#define AERANGE_AFFINE_HPP

// Affine arithmetic over noise symbols eps_j in [-1, 1].
//
// A form c + sum_j a_j eps_j represents a quantity that is an affine function
// of the shared symbols. Nonlinear operations and floating-point rounding add
// a fresh symbol whose coefficient bounds the error over the operands' full
// ranges. Because every such bound holds over the full range, instantiating
// only the *input* symbols on sub-ranges (SymbolRestriction) while leaving
// fresh symbols at [-1, 1] still encloses the exact value on the sub-range.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "interval.hpp"

namespace aerange
{

using SymbolId = std::uint32_t;

// Issues symbol indices for one computation. Input symbols are the ones a
// caller may later restrict; they are never merged by condensation.
class NoiseContext
{
public:
    // max_terms == 0 disables condensation.
    explicit NoiseContext(std::size_t max_terms = 0) : max_terms_(max_terms) {}

    SymbolId input_symbol()
    {
        const SymbolId id = next_++;
        input_.resize(next_, false);
        input_[id] = true;
        return id;
    }

    SymbolId fresh_symbol()
    {
        const SymbolId id = next_++;
        input_.resize(next_, false);
        return id;
    }

    bool is_input(SymbolId id) const { return id < input_.size() && input_[id]; }
    std::size_t issued() const { return next_; }
    std::size_t max_terms() const { return max_terms_; }
    void set_max_terms(std::size_t n) { max_terms_ = n; }

private:
    SymbolId next_ = 0;
    std::vector<bool> input_;
    std::size_t max_terms_;
};

namespace detail
{

// Error symbols created by operations on context-free constants. They are
// drawn from the upper half of the index space so they never collide with
// context-issued symbols.
inline SymbolId orphan_symbol()
{
    static std::atomic<SymbolId> next{0x80000000u};
    return next.fetch_add(1, std::memory_order_relaxed);
}

} // namespace detail

// Sub-ranges of [-1, 1] for selected symbols; every other symbol ranges over
// [-1, 1].
class SymbolRestriction
{
public:
    SymbolRestriction() = default;

    void set(SymbolId id, const Interval& range)
    {
        if (range.is_empty() || range.lo() < -1.0 || range.hi() > 1.0) {
            throw std::invalid_argument("symbol restriction must be a non-empty subset of [-1,1]");
        }
        auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                                   [](const auto& e, SymbolId s) { return e.first < s; });
        if (it != entries_.end() && it->first == id) {
            it->second = range;
        } else {
            entries_.insert(it, {id, range});
        }
    }

    Interval get(SymbolId id) const
    {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                                   [](const auto& e, SymbolId s) { return e.first < s; });
        if (it != entries_.end() && it->first == id) {
            return it->second;
        }
        return {-1.0, 1.0};
    }

    const std::vector<std::pair<SymbolId, Interval>>& entries() const { return entries_; }

private:
    std::vector<std::pair<SymbolId, Interval>> entries_;
};

class AffineForm
{
public:
    struct Term
    {
        SymbolId symbol;
        double coeff;
        friend bool operator==(const Term&, const Term&) = default;
    };

    AffineForm() = default;
    AffineForm(double c) : center_(c) {} // NOLINT(google-explicit-constructor)
    AffineForm(double c, std::vector<Term> terms, NoiseContext* ctx)
        : center_(c), terms_(std::move(terms)), ctx_(ctx)
    {
        std::sort(terms_.begin(), terms_.end(),
                  [](const Term& a, const Term& b) { return a.symbol < b.symbol; });
        std::erase_if(terms_, [](const Term& t) { return t.coeff == 0; });
    }

    // center + radius * eps with a new input symbol; radius must be >= 0.
    // A zero radius gives a constant form.
    static AffineForm variable(double center, double radius, NoiseContext& ctx)
    {
        if (radius == 0) {
            return {center, {}, &ctx};
        }
        return {center, {{ctx.input_symbol(), radius}}, &ctx};
    }

    double center() const { return center_; }
    const std::vector<Term>& terms() const { return terms_; }
    NoiseContext* context() const { return ctx_; }
    bool is_constant() const { return terms_.empty(); }

    double coeff(SymbolId id) const
    {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), id,
                                   [](const Term& t, SymbolId s) { return t.symbol < s; });
        return (it != terms_.end() && it->symbol == id) ? it->coeff : 0.0;
    }

    // Upper bound on sum |a_j|.
    double deviation() const
    {
        double d = 0.0;
        for (const auto& t : terms_) {
            d = rounding::add_up(d, std::fabs(t.coeff));
        }
        return d;
    }

    Interval range() const
    {
        Interval r(center_);
        for (const auto& t : terms_) {
            r += Interval(t.coeff) * Interval(-1.0, 1.0);
        }
        return r;
    }

    Interval instantiate(const SymbolRestriction& restr) const
    {
        Interval r(center_);
        const auto& entries = restr.entries();
        auto it = entries.begin();
        for (const auto& t : terms_) {
            while (it != entries.end() && it->first < t.symbol) {
                ++it;
            }
            const Interval eps = (it != entries.end() && it->first == t.symbol)
                                     ? it->second
                                     : Interval(-1.0, 1.0);
            r += Interval(t.coeff) * eps;
        }
        return r;
    }

    friend bool operator==(const AffineForm& a, const AffineForm& b)
    {
        return a.center_ == b.center_ && a.terms_ == b.terms_;
    }

    friend AffineForm operator+(const AffineForm& a, const AffineForm& b);
    friend AffineForm operator-(const AffineForm& a, const AffineForm& b);
    friend AffineForm operator-(const AffineForm& a);
    friend AffineForm operator*(const AffineForm& a, const AffineForm& b);
    friend AffineForm operator*(const Interval& s, const AffineForm& a);
    friend AffineForm operator/(const AffineForm& a, const AffineForm& b);

    AffineForm& operator+=(const AffineForm& o) { return *this = *this + o; }
    AffineForm& operator-=(const AffineForm& o) { return *this = *this - o; }
    AffineForm& operator*=(const AffineForm& o) { return *this = *this * o; }

private:
    friend class AffineBuilder;

    double center_ = 0.0;
    std::vector<Term> terms_;
    NoiseContext* ctx_ = nullptr;
};

// Accumulates a form from interval-valued coefficients: each coefficient is
// stored as its midpoint and the rounding slack goes into one error term
// carried by a fresh symbol.
class AffineBuilder
{
public:
    explicit AffineBuilder(NoiseContext* ctx) : ctx_(ctx) {}

    void set_center(const Interval& c)
    {
        center_ = c.mid();
        add_error(slack(c, center_));
    }

    void push(SymbolId id, const Interval& c)
    {
        const double m = c.mid();
        add_error(slack(c, m));
        if (m != 0) {
            terms_.push_back({id, m});
        }
    }

    void add_error(double e)
    {
        if (e > 0) {
            error_ = rounding::add_up(error_, e);
        }
    }

    AffineForm finish()
    {
        if (!std::isfinite(center_) || !std::isfinite(error_)) {
            throw DomainError("affine form overflow");
        }
        AffineForm out;
        out.center_ = center_;
        out.ctx_ = ctx_;
        out.terms_ = std::move(terms_);
        if (error_ > 0) {
            const SymbolId id = ctx_ != nullptr ? ctx_->fresh_symbol() : detail::orphan_symbol();
            out.terms_.push_back({id, error_});
        }
        condense(out);
        return out;
    }

private:
    static double slack(const Interval& c, double m)
    {
        return std::max(rounding::sub_up(c.hi(), m), rounding::sub_up(m, c.lo()));
    }

    // Merge the smallest non-input terms into one fresh symbol when the
    // context caps the number of terms.
    void condense(AffineForm& f) const
    {
        if (ctx_ == nullptr || ctx_->max_terms() == 0 || f.terms_.size() <= ctx_->max_terms()) {
            return;
        }
        std::vector<std::size_t> candidates;
        for (std::size_t i = 0; i < f.terms_.size(); ++i) {
            if (!ctx_->is_input(f.terms_[i].symbol)) {
                candidates.push_back(i);
            }
        }
        const std::size_t excess = f.terms_.size() - ctx_->max_terms() + 1;
        if (candidates.size() < 2) {
            return;
        }
        const std::size_t merge_count = std::min(excess, candidates.size());
        std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
            return std::fabs(f.terms_[a].coeff) < std::fabs(f.terms_[b].coeff);
        });
        double merged = 0.0;
        std::vector<bool> drop(f.terms_.size(), false);
        for (std::size_t k = 0; k < merge_count; ++k) {
            merged = rounding::add_up(merged, std::fabs(f.terms_[candidates[k]].coeff));
            drop[candidates[k]] = true;
        }
        std::vector<AffineForm::Term> kept;
        kept.reserve(f.terms_.size() - merge_count + 1);
        for (std::size_t i = 0; i < f.terms_.size(); ++i) {
            if (!drop[i]) {
                kept.push_back(f.terms_[i]);
            }
        }
        kept.push_back({ctx_->fresh_symbol(), merged});
        f.terms_ = std::move(kept);
    }

    NoiseContext* ctx_;
    double center_ = 0.0;
    double error_ = 0.0;
    std::vector<AffineForm::Term> terms_;
};

namespace detail
{

inline NoiseContext* pick_context(const AffineForm& a, const AffineForm& b)
{
    return a.context() != nullptr ? a.context() : b.context();
}

// Walks the union of both symbol sets in increasing order.
template <class Fn>
void merge_terms(const AffineForm& a, const AffineForm& b, Fn&& fn)
{
    auto ia = a.terms().begin();
    auto ib = b.terms().begin();
    while (ia != a.terms().end() || ib != b.terms().end()) {
        if (ib == b.terms().end() || (ia != a.terms().end() && ia->symbol < ib->symbol)) {
            fn(ia->symbol, ia->coeff, 0.0);
            ++ia;
        } else if (ia == a.terms().end() || ib->symbol < ia->symbol) {
            fn(ib->symbol, 0.0, ib->coeff);
            ++ib;
        } else {
            fn(ia->symbol, ia->coeff, ib->coeff);
            ++ia;
            ++ib;
        }
    }
}

} // namespace detail

inline AffineForm operator+(const AffineForm& a, const AffineForm& b)
{
    AffineBuilder out(detail::pick_context(a, b));
    out.set_center(Interval(a.center()) + Interval(b.center()));
    detail::merge_terms(a, b, [&](SymbolId id, double x, double y) {
        out.push(id, Interval(x) + Interval(y));
    });
    return out.finish();
}

inline AffineForm operator-(const AffineForm& a)
{
    AffineForm out = a;
    out.center_ = -out.center_;
    for (auto& t : out.terms_) {
        t.coeff = -t.coeff;
    }
    return out;
}

inline AffineForm operator-(const AffineForm& a, const AffineForm& b) { return a + (-b); }

inline AffineForm operator*(const Interval& s, const AffineForm& a)
{
    if (s.is_empty()) {
        throw DomainError("scaling an affine form by an empty interval");
    }
    AffineBuilder out(a.context());
    const Interval m(s.mid());
    out.set_center(m * Interval(a.center()));
    for (const auto& t : a.terms()) {
        out.push(t.symbol, m * Interval(t.coeff));
    }
    // (s - mid(s)) * a is bounded by rad(s) * max|a|.
    const double rad = s.outer_radius();
    if (rad > 0) {
        out.add_error(rounding::mul_up(rad, a.range().mag()));
    }
    return out.finish();
}

inline AffineForm operator*(const AffineForm& a, const Interval& s) { return s * a; }
inline AffineForm operator*(double s, const AffineForm& a) { return Interval(s) * a; }
inline AffineForm operator*(const AffineForm& a, double s) { return Interval(s) * a; }

// Linearization around the centers; the quadratic part is bounded by
// deviation(a) * deviation(b) and carried by a fresh symbol.
inline AffineForm operator*(const AffineForm& a, const AffineForm& b)
{
    if (a.is_constant()) {
        return Interval(a.center()) * b;
    }
    if (b.is_constant()) {
        return Interval(b.center()) * a;
    }
    AffineBuilder out(detail::pick_context(a, b));
    const Interval ca(a.center());
    const Interval cb(b.center());
    out.set_center(ca * cb);
    detail::merge_terms(a, b, [&](SymbolId id, double x, double y) {
        out.push(id, ca * Interval(y) + cb * Interval(x));
    });
    out.add_error(rounding::mul_up(a.deviation(), b.deviation()));
    return out.finish();
}

namespace detail
{

// slope * a + g where g encloses f(x) - slope * x over the range of a.
inline AffineForm linearized(const AffineForm& a, double slope, const Interval& offset)
{
    AffineBuilder out(a.context());
    const Interval s(slope);
    const Interval g_mid(offset.mid());
    out.set_center(s * Interval(a.center()) + g_mid);
    for (const auto& t : a.terms()) {
        out.push(t.symbol, s * Interval(t.coeff));
    }
    out.add_error(std::max(rounding::sub_up(offset.hi(), offset.mid()),
                           rounding::sub_up(offset.mid(), offset.lo())));
    return out.finish();
}

// Constant form enclosing an interval value.
inline AffineForm from_interval(const Interval& v, NoiseContext* ctx)
{
    AffineBuilder out(ctx);
    out.set_center(v);
    return out.finish();
}

// Min-range linearization for a function that is monotone with
// f(x) - slope * x increasing on [lo, hi]; `f` is its interval extension.
template <class F>
AffineForm increasing_remainder(const AffineForm& a, const Interval& range, double slope, F f)
{
    const Interval s(slope);
    const Interval g_lo = f(Interval(range.lo())) - s * Interval(range.lo());
    const Interval g_hi = f(Interval(range.hi())) - s * Interval(range.hi());
    return linearized(a, slope, Interval(g_lo.lo(), g_hi.hi()));
}

} // namespace detail

inline AffineForm exp(const AffineForm& a)
{
    const Interval r = a.range();
    if (a.is_constant() || r.is_point()) {
        return detail::from_interval(exp(r), a.context());
    }
    // exp(x) - s x with s <= exp(lo) is increasing on [lo, hi].
    const double slope = exp(Interval(r.lo())).lo();
    return detail::increasing_remainder(a, r, slope, [](const Interval& x) { return exp(x); });
}

inline AffineForm log(const AffineForm& a)
{
    const Interval r = a.range();
    if (r.lo() <= 0) {
        throw DomainError("log of an affine form whose range contains non-positive values");
    }
    if (a.is_constant() || r.is_point()) {
        return detail::from_interval(log(r), a.context());
    }
    // log(x) - s x with s <= 1/hi is increasing on [lo, hi].
    const double slope = (Interval(1.0) / Interval(r.hi())).lo();
    return detail::increasing_remainder(a, r, slope, [](const Interval& x) { return log(x); });
}

inline AffineForm sqrt(const AffineForm& a)
{
    const Interval r = a.range();
    if (r.lo() < 0) {
        throw DomainError("sqrt of an affine form whose range contains negative values");
    }
    if (a.is_constant() || r.is_point()) {
        return detail::from_interval(sqrt(r), a.context());
    }
    // sqrt(x) - s x with s <= 1 / (2 sqrt(hi)) is increasing on [lo, hi].
    const double slope = (Interval(1.0) / (Interval(2.0) * sqrt(Interval(r.hi())))).lo();
    return detail::increasing_remainder(a, r, slope, [](const Interval& x) { return sqrt(x); });
}

inline AffineForm reciprocal(const AffineForm& a)
{
    const Interval r = a.range();
    if (r.contains_zero()) {
        throw DomainError("division by an affine form whose range contains zero");
    }
    if (a.is_constant() || r.is_point()) {
        return detail::from_interval(Interval(1.0) / r, a.context());
    }
    if (r.hi() < 0) {
        return -reciprocal(-a);
    }
    // On [lo, hi] > 0, 1/x - s x with s >= -1/hi^2 is decreasing, so
    // x -> s x - 1/x is increasing and gives the enclosure after negation.
    const double slope = (-(Interval(1.0) / sqr(Interval(r.hi())))).hi();
    const Interval s(slope);
    const Interval g_at_hi = Interval(1.0) / Interval(r.hi()) - s * Interval(r.hi());
    const Interval g_at_lo = Interval(1.0) / Interval(r.lo()) - s * Interval(r.lo());
    return detail::linearized(a, slope, Interval(g_at_hi.lo(), g_at_lo.hi()));
}

inline AffineForm operator/(const AffineForm& a, const AffineForm& b)
{
    if (b.is_constant()) {
        if (b.center() == 0) {
            throw DomainError("division by zero");
        }
        return (Interval(1.0) / Interval(b.center())) * a;
    }
    return a * reciprocal(b);
}

namespace detail
{

// Mean-value linearization around the center for functions that are not
// monotone in general: f(x) - s x over [lo, hi] is enclosed by
// (f(c) - s c) + (f'([lo, hi]) - s) * ([lo, hi] - c).
template <class F, class DF>
AffineForm mean_value_linearized(const AffineForm& a, F f, DF df)
{
    const Interval r = a.range();
    if (a.is_constant() || r.is_point()) {
        return from_interval(f(r), a.context());
    }
    const double c = a.center();
    const Interval c_iv(c);
    const double slope = df(c_iv).mid();
    const Interval s(slope);
    const Interval offset = (f(c_iv) - s * c_iv) + (df(r) - s) * (r - c_iv);
    return linearized(a, slope, offset);
}

} // namespace detail

inline AffineForm sin(const AffineForm& a)
{
    return detail::mean_value_linearized(
        a, [](const Interval& x) { return sin(x); }, [](const Interval& x) { return cos(x); });
}

inline AffineForm cos(const AffineForm& a)
{
    return detail::mean_value_linearized(
        a, [](const Interval& x) { return cos(x); }, [](const Interval& x) { return -sin(x); });
}

// (c + d)^2 = c^2 + 2 c d + d^2 with d^2 in [0, dev(a)^2].
inline AffineForm sqr(const AffineForm& a)
{
    if (a.is_constant()) {
        return detail::from_interval(sqr(Interval(a.center())), a.context());
    }
    const double half = rounding::mul_up(a.deviation(), a.deviation()) / 2;
    AffineBuilder out(a.context());
    const Interval two_c(2.0 * a.center());
    out.set_center(sqr(Interval(a.center())) + Interval(half));
    for (const auto& t : a.terms()) {
        out.push(t.symbol, two_c * Interval(t.coeff));
    }
    out.add_error(half);
    return out.finish();
}

inline AffineForm pow_int(const AffineForm& a, int n)
{
    if (n == 0) {
        return {1.0};
    }
    if (n < 0) {
        return reciprocal(pow_int(a, -n));
    }
    AffineForm result(1.0);
    AffineForm base = a;
    bool first = true;
    while (n > 0) {
        if (n & 1) {
            result = first ? base : result * base;
            first = false;
        }
        n >>= 1;
        if (n > 0) {
            base = sqr(base);
        }
    }
    return result;
}

// One form per box component: center c(b_i) plus a new input symbol with
// coefficient r(b_i). Point components are constants.
inline std::vector<AffineForm> af_from_box(std::span<const Interval> b, NoiseContext& ctx)
{
    if (is_empty(b)) {
        throw std::invalid_argument("af_from_box: empty box");
    }
    std::vector<AffineForm> out;
    out.reserve(b.size());
    for (const auto& x : b) {
        out.push_back(AffineForm::variable(x.mid(), x.is_point() ? 0.0 : x.outer_radius(), ctx));
    }
    return out;
}

inline std::ostream& operator<<(std::ostream& os, const AffineForm& a)
{
    os << format_double(a.center());
    for (const auto& t : a.terms()) {
        os << (t.coeff < 0 ? " - " : " + ") << format_double(std::fabs(t.coeff)) << "*e"
           << t.symbol;
    }
    return os;
}

} // namespace aerange

#endif
