#ifndef AERANGE_REACH_HPP
#define AERANGE_REACH_HPP

// Bounded-horizon reachability for discrete-time systems x' = f(x, u, w).
//
// reach_iterate propagates an under and an over set step by step through the
// image of f. reach_unroll instead evaluates the k-fold composition f^k over
// the initial set (and all inputs seen so far), carrying an affine
// enclosure of its Jacobian from step to step.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <list>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ae_core.hpp"
#include "dual.hpp"
#include "joint_range.hpp"
#include "model.hpp"

namespace aerange
{

enum class ReachMethod
{
    iterate,
    unroll
};

enum class Order
{
    mv,
    taylor2
};

enum class Precondition
{
    none,
    jacobian_center
};

struct ReachOptions
{
    ReachMethod method = ReachMethod::iterate;
    Order order = Order::mv;
    int quadrature_k = 1;
    Precondition precondition = Precondition::none;
    bool robust = false;
    std::uint64_t seed = 0;
    // Number of steps; the model horizon when unset.
    std::optional<std::size_t> steps;
    // Term cap for the affine forms carried by reach_unroll; 0 picks 300.
    std::size_t max_terms = 0;
};

struct ReachStep
{
    SkewedBox under;
    SkewedBox over;
    // Coordinate bounds: inside the projection of the reachable set for
    // `under_proj` (components may be empty), containing it for `over_proj`.
    Box under_proj;
    Box over_proj;
};

struct ReachResult
{
    ReachMethod method = ReachMethod::iterate;
    std::vector<ReachStep> steps;
    double seconds = 0.0;
    std::vector<std::string> warnings;
    // First step whose joint under-approximation is empty.
    std::optional<std::size_t> empty_under_onset;
};

inline Method method_of(const ReachOptions& opts)
{
    if (opts.quadrature_k < 1) {
        throw std::invalid_argument("quadrature_k must be at least 1");
    }
    if (opts.order == Order::taylor2) {
        if (opts.quadrature_k != 1) {
            throw std::invalid_argument("quadrature applies to the mean-value order only");
        }
        return Method::taylor2();
    }
    return opts.quadrature_k > 1 ? Method::quad(opts.quadrature_k) : Method::mv();
}

namespace detail
{

// Domain whose inner radii stay inside `inner` and outer radii cover
// `outer`, both around the midpoint of `outer`. `inner_ok` is false when
// some component has no inner set around that midpoint.
struct RangeDomain
{
    Domain dom;
    bool inner_ok = true;
};

inline RangeDomain ranges_domain(std::span<const Interval> outer, std::span<const Interval> inner)
{
    RangeDomain r;
    r.dom = Domain::from_box(outer);
    for (std::size_t j = 0; j < outer.size(); ++j) {
        const double c = r.dom.center[j];
        if (inner[j].is_empty() || !inner[j].contains(c)) {
            r.dom.inner[j] = 0.0;
            r.inner_ok = false;
            continue;
        }
        const double d = std::min((Interval(c) - Interval(inner[j].lo())).lo(),
                                  (Interval(inner[j].hi()) - Interval(c)).lo());
        r.dom.inner[j] = std::min(r.dom.inner[j], std::max(d, 0.0));
    }
    return r;
}

inline RangeDomain input_domain(const SystemModel& m)
{
    Box outer = m.control_ranges;
    outer.insert(outer.end(), m.disturbance_ranges.begin(), m.disturbance_ranges.end());
    Box inner = m.control_ranges_inner;
    inner.insert(inner.end(), m.disturbance_ranges_inner.begin(), m.disturbance_ranges_inner.end());
    return ranges_domain(outer, inner);
}

inline QuantifierSplit env_split(const SystemModel& m, bool robust)
{
    std::vector<bool> mask(m.env_size(), false);
    for (std::size_t j = 0; j < m.env_size(); ++j) {
        mask[j] = robust && m.is_disturbance(j);
    }
    return QuantifierSplit::from_mask(std::move(mask));
}

inline PiMap env_pi(const SystemModel& m)
{
    PiMap pi = PiMap::identity(m.n(), m.env_size());
    for (const auto& [input, state] : m.pi) {
        pi.assign(input, state);
    }
    return pi;
}

inline ReachStep initial_step(const SystemModel& m)
{
    ReachStep s;
    s.under = SkewedBox::from_box(m.init_inner, Role::under);
    s.over = SkewedBox::from_box(m.init, Role::over);
    s.under_proj = m.init_inner;
    s.over_proj = m.init;
    return s;
}

class Stopwatch
{
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct FallbackLog
{
    std::size_t count = 0;
    std::size_t first = 0;
    std::string reason;

    void note(const StepOutcome& o, std::size_t step)
    {
        if (!o.fallback) {
            return;
        }
        if (count++ == 0) {
            first = step;
            reason = o.warning;
        }
    }

    void report(std::vector<std::string>& out, const char* chain) const
    {
        if (count > 0) {
            out.push_back(std::string(chain) + " chain: " + reason + " (" + std::to_string(count) +
                          " steps, first at step " + std::to_string(first) + ")");
        }
    }
};

} // namespace detail

// Iterated image: I^{k+1} from I^k and O^{k+1} from O^k, each step with a
// fresh copy of the input ranges.
inline ReachResult reach_iterate(const SystemModel& model, const ReachOptions& opts)
{
    const detail::Stopwatch clock;
    const Method method = method_of(opts);
    const std::size_t steps = opts.steps.value_or(model.horizon);
    const std::span<const Expr> f(model.dynamics);
    const QuantifierSplit split = detail::env_split(model, opts.robust);
    const PiMap pi = detail::env_pi(model);
    const detail::RangeDomain inputs = detail::input_domain(model);
    const detail::RangeDomain init = detail::ranges_domain(model.init, model.init_inner);
    const JointOptions jopts{method, 0};
    const bool precondition = opts.precondition == Precondition::jacobian_center;

    ReachResult res;
    res.method = ReachMethod::iterate;
    res.steps.push_back(detail::initial_step(model));
    bool under_alive = inputs.inner_ok && init.inner_ok;
    if (!under_alive) {
        res.warnings.emplace_back("initial or input set has no representable inner point; under chain empty");
        res.steps[0].under = SkewedBox::empty_set(model.n());
        res.steps[0].under_proj = Box(model.n(), Interval::empty());
        res.empty_under_onset = 0;
    }
    detail::FallbackLog under_log;
    detail::FallbackLog over_log;

    const auto advance = [&](const Domain& dom, Role role, detail::FallbackLog& log, std::size_t k) {
        const auto plain = [&] {
            const Box z = role == Role::under ? joint_under(f, dom, nullptr, pi, split, model.param_values, jopts)
                                              : joint_over(f, dom, nullptr, split, model.param_values, jopts);
            return SkewedBox::from_box(z, role);
        };
        if (!precondition) {
            return plain();
        }
        StepOutcome o = preconditioned_image(f, dom, pi, split, role, model.param_values, jopts);
        log.note(o, k);
        return std::move(o.set);
    };

    const auto finite = [](const Box& b) {
        return std::all_of(b.begin(), b.end(), [](const Interval& x) { return std::isfinite(x.width()); });
    };
    bool over_alive = true;
    Box box_over = model.init;
    for (std::size_t k = 0; k < steps; ++k) {
        const ReachStep& prev = res.steps.back();
        ReachStep next;
        if (prev.over.is_empty()) {
            next.over = prev.over;
        } else if (over_alive) {
            try {
                const Domain over_dom =
                    k == 0 ? concat(init.dom, inputs.dom) : concat(prev.over.domain(), inputs.dom);
                next.over = advance(over_dom, Role::over, over_log, k + 1);
                if (precondition) {
                    // An axis-aligned chain runs alongside; both are sound, so each
                    // step keeps the smaller set and wrapping cannot run away.
                    Box z = joint_over(f, concat(Domain::from_box(box_over), inputs.dom), nullptr, split,
                                       model.param_values, jopts);
                    const Box proj = next.over.projection(Role::over);
                    for (std::size_t i = 0; i < z.size(); ++i) {
                        z[i] = intersect(z[i], proj[i]);
                    }
                    box_over = z;
                    SkewedBox box = SkewedBox::from_box(z, Role::over);
                    if (box.log_volume() < next.over.log_volume()) {
                        next.over = std::move(box);
                    }
                }
                over_alive = finite(next.over.projection(Role::over));
                if (next.over.is_empty()) {
                    res.warnings.push_back("over-approximation empty from step " + std::to_string(k + 1) +
                                           ": no state is reachable for every disturbance");
                }
            } catch (const DomainError& e) {
                over_alive = false;
                res.warnings.push_back("over-approximation unbounded from step " + std::to_string(k + 1) + ": " +
                                       e.what());
            }
            if (!over_alive) {
                next.over = SkewedBox::from_box(Box(model.n(), Interval::entire()), Role::over);
            }
        } else {
            next.over = prev.over;
        }
        if (under_alive) {
            if (next.over.is_empty()) {
                next.under = SkewedBox::empty_set(model.n());
            } else {
                try {
                    const Domain under_dom =
                        k == 0 ? concat(init.dom, inputs.dom) : concat(prev.under.domain(), inputs.dom);
                    next.under = advance(under_dom, Role::under, under_log, k + 1);
                } catch (const DomainError& e) {
                    next.under = SkewedBox::empty_set(model.n());
                    res.warnings.push_back(std::string("under step failed: ") + e.what());
                }
            }
            if (next.under.is_empty()) {
                under_alive = false;
                res.empty_under_onset = k + 1;
                res.warnings.push_back("under-approximation empty from step " + std::to_string(k + 1) +
                                       "; over-approximation continues");
            }
        } else {
            next.under = SkewedBox::empty_set(model.n());
        }
        next.under_proj = next.under.projection(Role::under);
        next.over_proj = next.over.projection(Role::over);
        res.steps.push_back(std::move(next));
    }
    under_log.report(res.warnings, "under");
    over_log.report(res.warnings, "over");
    res.seconds = clock.seconds();
    return res;
}

namespace detail
{

// One parameterization of the initial set and the inputs of every step,
// iterated through f. Parameter slots repeat per step: the n states come
// first, then the inputs of step 0, step 1, and so on.
class UnrollChain
{
public:
    // `radius[s]` for slot s (n states followed by the model inputs).
    UnrollChain(const SystemModel& m, std::vector<double> center, std::vector<double> radius,
                std::size_t max_terms, bool second_order)
        : model_(m), center_(std::move(center)), radius_(std::move(radius)), second_order_(second_order)
    {
        lin_.ctx->set_max_terms(max_terms);
        const std::size_t n = m.n();
        for (std::size_t l = 0; l < n; ++l) {
            add_parameter(center_[l], radius_[l]);
        }
        state_.assign(pending_.begin(), pending_.end());
        center_state_.assign(pending_center_.begin(), pending_center_.end());
        box_state_.assign(pending_box_.begin(), pending_box_.end());
        for (std::size_t l = 0; l < n; ++l) {
            center_value_.emplace_back(center_[l]);
        }
        clear_pending();
    }

    const std::vector<double>& radius() const { return radius_; }

    void step()
    {
        const SystemModel& m = model_;
        const std::size_t n = m.n();
        for (std::size_t q = 0; q < m.input_count(); ++q) {
            add_parameter(center_[n + q], radius_[n + q]);
        }
        const std::size_t p = params_;
        std::vector<Dual1<AffineForm>> env;
        env.reserve(m.env_size());
        for (auto& x : state_) {
            extend(x.grad, p, AffineForm(0.0));
            env.push_back(x);
        }
        env.insert(env.end(), pending_.begin(), pending_.end());
        state_ = eval<Dual1<AffineForm>>(std::span<const Expr>(m.dynamics), std::span<const Dual1<AffineForm>>(env),
                                          m.param_values);

        std::vector<Interval> cenv(center_value_.begin(), center_value_.end());
        for (std::size_t q = 0; q < m.input_count(); ++q) {
            cenv.emplace_back(center_[n + q]);
        }
        center_value_ = eval<Interval>(std::span<const Expr>(m.dynamics), std::span<const Interval>(cenv),
                                       m.param_values);

        if (second_order_) {
            std::vector<Dual1<Interval>> c2;
            for (auto& x : center_state_) {
                extend(x.grad, p, Interval(0.0));
                c2.push_back(x);
            }
            c2.insert(c2.end(), pending_center_.begin(), pending_center_.end());
            center_state_ = eval<Dual1<Interval>>(std::span<const Expr>(m.dynamics),
                                                  std::span<const Dual1<Interval>>(c2), m.param_values);
            std::vector<Dual2<Interval>> b2;
            for (auto& x : box_state_) {
                extend(x.value.grad, p, Interval(0.0));
                extend(x.grad, p, Dual1<Interval>(0.0));
                for (auto& g : x.grad) {
                    extend(g.grad, p, Interval(0.0));
                }
                b2.push_back(x);
            }
            b2.insert(b2.end(), pending_box_.begin(), pending_box_.end());
            box_state_ = eval<Dual2<Interval>>(std::span<const Expr>(m.dynamics), std::span<const Dual2<Interval>>(b2),
                                               m.param_values);
        }
        clear_pending();
        refresh();
    }

    const Linearization& linearization() const { return lin_; }

private:
    template <class T>
    static void extend(std::vector<T>& g, std::size_t p, const T& zero)
    {
        if (!g.empty() && g.size() < p) {
            g.resize(p, zero);
        }
    }

    void add_parameter(double c, double r)
    {
        const SymbolId sym = lin_.ctx->input_symbol();
        lin_.symbols.push_back(sym);
        const std::size_t j = params_++;
        const std::size_t p = params_;
        std::vector<AffineForm> g(p, AffineForm(0.0));
        g[j] = AffineForm(r);
        const AffineForm v = r == 0 ? AffineForm(c) : AffineForm(c, {{sym, r}}, lin_.ctx.get());
        pending_.emplace_back(v, std::move(g));
        // Earlier pending parameters of this step need the longer gradient.
        for (auto& x : pending_) {
            x.grad.resize(p, AffineForm(0.0));
        }
        if (second_order_) {
            std::vector<Interval> gc(p, Interval(0.0));
            gc[j] = Interval(r);
            pending_center_.emplace_back(Interval(c), gc);
            for (auto& x : pending_center_) {
                x.grad.resize(p, Interval(0.0));
            }
            const Interval xb = Interval(c) + Interval(r) * Interval(-1.0, 1.0);
            std::vector<Dual1<Interval>> g2(p, Dual1<Interval>(0.0));
            g2[j] = Dual1<Interval>(Interval(r));
            pending_box_.emplace_back(Dual1<Interval>(xb, gc), std::move(g2));
            for (auto& x : pending_box_) {
                x.value.grad.resize(p, Interval(0.0));
                x.grad.resize(p, Dual1<Interval>(0.0));
            }
        }
    }

    void clear_pending()
    {
        pending_.clear();
        pending_center_.clear();
        pending_box_.clear();
    }

    void refresh()
    {
        const std::size_t n = model_.n();
        lin_.f0 = center_value_;
        lin_.jac = Matrix<AffineForm>(n, params_, AffineForm(0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < params_; ++j) {
                lin_.jac(i, j) = state_[i].d(j);
            }
        }
        if (second_order_) {
            IntervalMatrix cg(n, params_, Interval(0.0));
            lin_.hess.clear();
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < params_; ++j) {
                    cg(i, j) = center_state_[i].d(j);
                }
                lin_.hess.push_back(hessian_of(box_state_[i], params_));
            }
            lin_.center_grad = std::move(cg);
        }
    }

    const SystemModel& model_;
    std::vector<double> center_;
    std::vector<double> radius_;
    bool second_order_;
    std::size_t params_ = 0;
    Linearization lin_;
    std::vector<Dual1<AffineForm>> state_;
    std::vector<Interval> center_value_;
    std::vector<Dual1<Interval>> center_state_;
    std::vector<Dual2<Interval>> box_state_;
    std::vector<Dual1<AffineForm>> pending_;
    std::vector<Dual1<Interval>> pending_center_;
    std::vector<Dual2<Interval>> pending_box_;
};

// Per-slot radii for one role: existential slots take the inner radius in
// the under role and the outer one in the over role; universal slots the
// reverse.
inline std::vector<double> slot_radii(const Domain& slots, const std::vector<bool>& universal, bool under)
{
    std::vector<double> r(slots.params());
    for (std::size_t s = 0; s < r.size(); ++s) {
        r[s] = (universal[s] == under) ? slots.outer[s] : slots.inner[s];
    }
    return r;
}

// Expands a per-slot mask to the parameters after `steps` steps.
inline QuantifierSplit expand_split(const std::vector<bool>& slot_universal, std::size_t n, std::size_t steps)
{
    std::vector<bool> mask(slot_universal.begin(), slot_universal.begin() + static_cast<std::ptrdiff_t>(n));
    for (std::size_t k = 0; k < steps; ++k) {
        mask.insert(mask.end(), slot_universal.begin() + static_cast<std::ptrdiff_t>(n), slot_universal.end());
    }
    return QuantifierSplit::from_mask(std::move(mask));
}

} // namespace detail

// Iterated-function reachability: step k bounds f^k over the initial set
// and the inputs of steps 0..k-1. The joint under box uses the model's
// assignment (states to themselves, controls as declared); the projected
// unders treat every state and control as existential.
inline ReachResult reach_unroll(const SystemModel& model, const ReachOptions& opts)
{
    const detail::Stopwatch clock;
    const Method method = method_of(opts);
    const std::size_t steps = opts.steps.value_or(model.horizon);
    const std::size_t n = model.n();
    const PiMap pi = detail::env_pi(model);
    const detail::RangeDomain init = detail::ranges_domain(model.init, model.init_inner);
    const detail::RangeDomain inputs = detail::input_domain(model);
    const Domain slots = concat(init.dom, inputs.dom);
    const bool under_ok = init.inner_ok && inputs.inner_ok;
    const std::size_t max_terms = opts.max_terms != 0 ? opts.max_terms : 300;

    // Slot masks: projected and over use the environment split; component
    // i of the joint under also makes everything not assigned to i universal.
    const QuantifierSplit env = detail::env_split(model, opts.robust);
    const std::vector<bool> env_mask = env.mask();
    std::vector<std::vector<bool>> joint_masks;
    for (std::size_t i = 0; i < n; ++i) {
        joint_masks.push_back(pi.split_for(i, env).mask());
    }
    std::vector<bool> plain_mask(model.env_size(), false);

    std::list<detail::UnrollChain> chains;
    const auto chain_for = [&](const std::vector<double>& radius) -> detail::UnrollChain& {
        for (auto& c : chains) {
            if (c.radius() == radius) {
                return c;
            }
        }
        return chains.emplace_back(model, slots.center, radius, max_terms, method.scheme == Scheme::taylor2);
    };
    detail::UnrollChain* over_chain = &chain_for(detail::slot_radii(slots, env_mask, false));
    detail::UnrollChain* plain_chain =
        env.has_universal() ? &chain_for(detail::slot_radii(slots, plain_mask, false)) : nullptr;
    detail::UnrollChain* proj_chain = under_ok ? &chain_for(detail::slot_radii(slots, env_mask, true)) : nullptr;
    std::vector<detail::UnrollChain*> joint_chains;
    if (under_ok) {
        for (const auto& mask : joint_masks) {
            joint_chains.push_back(&chain_for(detail::slot_radii(slots, mask, true)));
        }
    }

    ReachResult res;
    res.method = ReachMethod::unroll;
    res.steps.push_back(detail::initial_step(model));
    if (!under_ok) {
        res.warnings.emplace_back("initial or input set has no representable inner point; unders empty");
        res.steps[0].under = SkewedBox::empty_set(n);
        res.steps[0].under_proj = Box(n, Interval::empty());
        res.empty_under_onset = 0;
    }
    std::size_t empty_steps = 0;
    for (std::size_t k = 1; k <= steps; ++k) {
        try {
            for (auto& c : chains) {
                c.step();
            }
        } catch (const DomainError& e) {
            res.warnings.push_back("evaluation of f^" + std::to_string(k) + " failed (" + e.what() +
                                   "); remaining over-approximations unbounded");
            ReachStep s;
            s.over_proj.assign(n, Interval::entire());
            s.over = SkewedBox::from_box(s.over_proj, Role::over);
            s.under_proj.assign(n, Interval::empty());
            s.under = SkewedBox::empty_set(n);
            if (!res.empty_under_onset) {
                res.empty_under_onset = k;
            }
            empty_steps += steps + 1 - k;
            res.steps.resize(steps + 1, s);
            break;
        }
        const QuantifierSplit split = detail::expand_split(env_mask, n, k);
        ReachStep s;
        s.over_proj.resize(n);
        const Linearization& ol = over_chain->linearization();
        for (std::size_t i = 0; i < n; ++i) {
            s.over_proj[i] = ae_range(ol, ol, i, split, method).over;
            if (plain_chain != nullptr) {
                const Linearization& pl = plain_chain->linearization();
                const auto plain = QuantifierSplit::existential_only(split.size());
                s.over_proj[i] = intersect(s.over_proj[i], first_order_range(pl, pl, i, plain, Method::mv()).over);
            }
        }
        s.over = SkewedBox::from_box(s.over_proj, Role::over);
        s.under_proj.assign(n, Interval::empty());
        Box joint(n, Interval::empty());
        if (under_ok) {
            const Linearization& pl = proj_chain->linearization();
            for (std::size_t i = 0; i < n; ++i) {
                s.under_proj[i] = ae_range(pl, pl, i, split, method).under;
                const Linearization& jl = joint_chains[i]->linearization();
                joint[i] = ae_range(jl, jl, i, detail::expand_split(joint_masks[i], n, k), method).under;
            }
        }
        s.under = SkewedBox::from_box(joint, Role::under);
        if (s.under.is_empty()) {
            ++empty_steps;
            if (!res.empty_under_onset) {
                res.empty_under_onset = k;
            }
        }
        res.steps.push_back(std::move(s));
    }
    if (empty_steps > 0) {
        res.warnings.push_back("joint under-approximation empty at " + std::to_string(empty_steps) +
                               " steps, first at step " + std::to_string(*res.empty_under_onset));
    }
    res.seconds = clock.seconds();
    return res;
}

inline ReachResult reach(const SystemModel& model, const ReachOptions& opts)
{
    return opts.method == ReachMethod::iterate ? reach_iterate(model, opts) : reach_unroll(model, opts);
}

// Sampled trajectories: uniform initial states and per-step uniform inputs
// from the declared (inward) ranges. Trajectory t uses its own generator
// seeded from (seed, t), so the result does not depend on threading.
class TrajectorySampler
{
public:
    TrajectorySampler(const SystemModel& model, std::uint64_t seed) : model_(model), seed_(seed) {}

    // Calls visit(step, trajectory, state) for step 0..steps.
    void run(std::size_t count, std::size_t steps,
             const std::function<void(std::size_t, std::size_t, std::span<const double>)>& visit) const
    {
        for (std::size_t t = 0; t < count; ++t) {
            trajectory(t, steps, visit);
        }
    }

    void trajectory(std::size_t t, std::size_t steps,
                    const std::function<void(std::size_t, std::size_t, std::span<const double>)>& visit) const
    {
        const SystemModel& m = model_;
        std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                          static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
        std::mt19937_64 rng(seq);
        const auto draw = [&](const Interval& x) {
            if (x.is_point()) {
                return x.lo();
            }
            std::uniform_real_distribution<double> d(x.lo(), x.hi());
            return std::min(d(rng), x.hi());
        };
        std::vector<double> x(m.n());
        for (std::size_t l = 0; l < m.n(); ++l) {
            const Interval& box = m.init_inner[l].is_empty() ? m.init[l] : m.init_inner[l];
            x[l] = draw(box);
        }
        visit(0, t, x);
        std::vector<double> env(m.env_size());
        for (std::size_t k = 1; k <= steps; ++k) {
            std::copy(x.begin(), x.end(), env.begin());
            for (std::size_t q = 0; q < m.controls.size(); ++q) {
                env[m.n() + q] = draw(m.control_ranges_inner[q]);
            }
            for (std::size_t q = 0; q < m.disturbances.size(); ++q) {
                env[m.n() + m.controls.size() + q] = draw(m.disturbance_ranges_inner[q]);
            }
            for (std::size_t l = 0; l < m.n(); ++l) {
                x[l] = eval<double>(m.dynamics[l], std::span<const double>(env), m.param_values);
            }
            visit(k, t, x);
        }
    }

private:
    const SystemModel& model_;
    std::uint64_t seed_;
};

// Point clouds [step][trajectory][component].
inline std::vector<std::vector<std::vector<double>>> simulate_samples(const SystemModel& model, std::size_t count,
                                                                      std::uint64_t seed,
                                                                      std::optional<std::size_t> steps = {})
{
    if (count == 0) {
        throw std::invalid_argument("simulate_samples: need at least one trajectory");
    }
    const std::size_t k = steps.value_or(model.horizon);
    std::vector<std::vector<std::vector<double>>> clouds(k + 1, std::vector<std::vector<double>>(count));
    TrajectorySampler(model, seed).run(count, k, [&](std::size_t step, std::size_t t, std::span<const double> x) {
        clouds[step][t].assign(x.begin(), x.end());
    });
    return clouds;
}

struct ContainmentReport
{
    std::size_t checked = 0;
    std::size_t violations = 0;
    std::optional<std::size_t> first_step;
    std::optional<std::size_t> first_trajectory;
};

// Checks sampled trajectories against the over sets of `result`, with the
// relative tolerance `tol` for floating-point simulation error. Runs on
// several threads; per-trajectory seeding keeps the outcome deterministic.
inline ContainmentReport check_samples(const SystemModel& model, const ReachResult& result, std::size_t count,
                                       std::uint64_t seed, double tol = 1e-9)
{
    const std::size_t steps = result.steps.size() - 1;
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), count / 64 + 1));
    std::vector<ContainmentReport> parts(workers);
    const TrajectorySampler sampler(model, seed);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            ContainmentReport& rep = parts[w];
            for (std::size_t t = w; t < count; t += workers) {
                sampler.trajectory(t, steps, [&](std::size_t k, std::size_t tr, std::span<const double> x) {
                    ++rep.checked;
                    if (!result.steps[k].over.contains(x, tol)) {
                        if (rep.violations++ == 0 || k < *rep.first_step) {
                            rep.first_step = k;
                            rep.first_trajectory = tr;
                        }
                    }
                });
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    ContainmentReport total;
    for (const auto& p : parts) {
        total.checked += p.checked;
        total.violations += p.violations;
        if (p.first_step && (!total.first_step || *p.first_step < *total.first_step)) {
            total.first_step = p.first_step;
            total.first_trajectory = p.first_trajectory;
        }
    }
    return total;
}

// Whether every generator corner of `inner` lies in the constraint set of
// `outer` (relative tolerance `tol`).
inline bool corners_inside(const SkewedBox& inner, const SkewedBox& outer, double tol = 1e-9)
{
    if (inner.is_empty()) {
        return true;
    }
    for (const auto& y : inner.corners()) {
        if (!outer.contains(y, tol)) {
            return false;
        }
    }
    return true;
}

} // namespace aerange

#endif
