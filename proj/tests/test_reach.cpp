#include <aerange/reach.hpp>

#include <gtest/gtest.h>

#include <string>

using namespace aerange;

namespace
{

SystemModel model_file(const std::string& name)
{
    return load_model(std::string(AERANGE_MODELS_DIR) + "/" + name + ".sys");
}

ReachOptions options(ReachMethod m, std::size_t steps)
{
    ReachOptions o;
    o.method = m;
    o.steps = steps;
    return o;
}

bool subset(const Interval& a, const Interval& b)
{
    return a.is_empty() || (!b.is_empty() && b.lo() <= a.lo() && a.hi() <= b.hi());
}

void expect_sandwich(const ReachResult& r)
{
    for (std::size_t k = 0; k < r.steps.size(); ++k) {
        const ReachStep& s = r.steps[k];
        for (std::size_t i = 0; i < s.over_proj.size(); ++i) {
            EXPECT_TRUE(subset(s.under_proj[i], s.over_proj[i])) << "step " << k << " component " << i;
        }
        EXPECT_TRUE(corners_inside(s.under, s.over)) << "step " << k;
    }
}

const ReachMethod kMethods[] = {ReachMethod::iterate, ReachMethod::unroll};

} // namespace

TEST(Reach, HalvingMapIsExact)
{
    const SystemModel m = parse_model("states x\ninit x=[1,2]\nhorizon 4\ndynamics\n  x' = 0.5*x\n");
    for (ReachMethod method : kMethods) {
        const ReachResult r = reach(m, options(method, 4));
        ASSERT_EQ(r.steps.size(), 5u);
        const Interval want(0.0625, 0.125);
        EXPECT_NEAR(r.steps[4].under_proj[0].lo(), want.lo(), 1e-12);
        EXPECT_NEAR(r.steps[4].under_proj[0].hi(), want.hi(), 1e-12);
        EXPECT_NEAR(r.steps[4].over_proj[0].lo(), want.lo(), 1e-12);
        EXPECT_NEAR(r.steps[4].over_proj[0].hi(), want.hi(), 1e-12);
        EXPECT_FALSE(r.empty_under_onset);
    }
}

TEST(Reach, StepZeroIsInitialBox)
{
    const SystemModel m = model_file("testmodel");
    for (ReachMethod method : kMethods) {
        const ReachResult r = reach(m, options(method, 0));
        ASSERT_EQ(r.steps.size(), 1u);
        for (std::size_t i = 0; i < m.n(); ++i) {
            EXPECT_EQ(r.steps[0].over_proj[i].lo(), m.init[i].lo());
            EXPECT_EQ(r.steps[0].over_proj[i].hi(), m.init[i].hi());
            EXPECT_TRUE(subset(r.steps[0].under_proj[i], m.init[i]));
        }
    }
}

TEST(Reach, HorizonDefaultsToModel)
{
    const SystemModel m = model_file("testmodel");
    ReachOptions o;
    EXPECT_EQ(reach(m, o).steps.size(), m.horizon + 1);
}

TEST(Reach, ControlledDriftBounds)
{
    // Reachable set after k steps is exactly [0, 1 + k].
    const SystemModel m = parse_model(
        "states x\ncontrol u in [0,1]\ninit x=[0,1]\nhorizon 5\ndynamics\n  x' = x + u\npi u -> x\n");
    for (ReachMethod method : kMethods) {
        const ReachResult r = reach(m, options(method, 5));
        for (std::size_t k = 1; k <= 5; ++k) {
            const Interval exact(0.0, 1.0 + static_cast<double>(k));
            EXPECT_TRUE(subset(r.steps[k].under_proj[0], exact)) << k;
            EXPECT_TRUE(subset(exact, r.steps[k].over_proj[0])) << k;
            EXPECT_NEAR(r.steps[k].over_proj[0].width(), exact.width(), 1e-9);
            EXPECT_NEAR(r.steps[k].under_proj[0].width(), exact.width(), 1e-9);
        }
    }
}

TEST(Reach, UnassignedControlIsUniversalInJointUnder)
{
    const SystemModel m =
        parse_model("states x\ncontrol u in [0,1]\ninit x=[0,2]\nhorizon 1\ndynamics\n  x' = x + u\n");
    const ReachResult r = reach(m, options(ReachMethod::iterate, 1));
    // Every z in [1,2] has x = z - u in [0,2] for all u.
    EXPECT_NEAR(r.steps[1].under_proj[0].lo(), 1.0, 1e-9);
    EXPECT_NEAR(r.steps[1].under_proj[0].hi(), 2.0, 1e-9);
    const ReachResult u = reach(m, options(ReachMethod::unroll, 1));
    EXPECT_NEAR(u.steps[1].under_proj[0].width(), 3.0, 1e-9);
}

TEST(Reach, SandwichOnBundledModels)
{
    for (const char* name : {"testmodel", "sir"}) {
        const SystemModel m = model_file(name);
        for (ReachMethod method : kMethods) {
            for (Order order : {Order::mv, Order::taylor2}) {
                ReachOptions o = options(method, 20);
                o.order = order;
                SCOPED_TRACE(std::string(name) + (method == ReachMethod::iterate ? " iterate" : " unroll"));
                expect_sandwich(reach(m, o));
            }
        }
    }
}

TEST(Reach, SampledTrajectoriesStayInOverSets)
{
    for (const char* name : {"testmodel", "sir"}) {
        const SystemModel m = model_file(name);
        for (ReachMethod method : kMethods) {
            for (Precondition pre : {Precondition::none, Precondition::jacobian_center}) {
                if (method == ReachMethod::unroll && pre != Precondition::none) {
                    continue;
                }
                ReachOptions o = options(method, 20);
                o.precondition = pre;
                const ReachResult r = reach(m, o);
                const ContainmentReport rep = check_samples(m, r, 10000, 7);
                EXPECT_EQ(rep.checked, 10000u * 21u);
                EXPECT_EQ(rep.violations, 0u) << name << " first step " << rep.first_step.value_or(0);
            }
        }
    }
}

TEST(Reach, PreconditionedSandwich)
{
    const SystemModel m = model_file("testmodel");
    ReachOptions o = options(ReachMethod::iterate, 25);
    o.precondition = Precondition::jacobian_center;
    const ReachResult r = reach(m, o);
    expect_sandwich(r);
    EXPECT_FALSE(r.empty_under_onset);
}

TEST(Reach, RobustDisturbanceShrinksUnder)
{
    const SystemModel m = parse_model(
        "states x y\ndisturbance w in [-0.05,0.05]\ninit x=[0,1] y=[1,2]\nhorizon 6\n"
        "dynamics\n  x' = 0.9*x + 0.1*y + w\n  y' = 0.95*y - 0.05*x*x\n");
    for (ReachMethod method : kMethods) {
        ReachOptions plain = options(method, 6);
        ReachOptions robust = plain;
        robust.robust = true;
        const ReachResult a = reach(m, plain);
        const ReachResult b = reach(m, robust);
        expect_sandwich(b);
        for (std::size_t k = 1; k <= 6; ++k) {
            for (std::size_t i = 0; i < 2; ++i) {
                EXPECT_TRUE(subset(b.steps[k].under_proj[i], a.steps[k].under_proj[i])) << k << "," << i;
                EXPECT_TRUE(subset(b.steps[k].over_proj[i], a.steps[k].over_proj[i])) << k << "," << i;
            }
        }
    }
}

TEST(Reach, PointInitialValue)
{
    const SystemModel m = model_file("sir_point");
    const ReachResult it = reach(m, options(ReachMethod::iterate, 60));
    ASSERT_TRUE(it.empty_under_onset);
    EXPECT_LE(*it.empty_under_onset, 5u);
    EXPECT_FALSE(it.steps.back().over.is_empty());

    const ReachResult un = reach(m, options(ReachMethod::unroll, 60));
    for (std::size_t k = 1; k <= 60; ++k) {
        for (std::size_t i = 0; i < 3; ++i) {
            EXPECT_FALSE(un.steps[k].under_proj[i].is_empty()) << k << "," << i;
        }
    }
    expect_sandwich(un);
}

TEST(Reach, SamplesAreDeterministic)
{
    const SystemModel m = model_file("sir");
    const auto a = simulate_samples(m, 50, 3, 10);
    const auto b = simulate_samples(m, 50, 3, 10);
    const auto c = simulate_samples(m, 50, 4, 10);
    ASSERT_EQ(a.size(), 11u);
    ASSERT_EQ(a[0].size(), 50u);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    for (const auto& x : a[0]) {
        for (std::size_t i = 0; i < m.n(); ++i) {
            EXPECT_TRUE(m.init[i].contains(x[i]));
        }
    }
    EXPECT_THROW(simulate_samples(m, 0, 3), std::invalid_argument);
}

TEST(Reach, RejectsBadOptions)
{
    const SystemModel m = model_file("testmodel");
    ReachOptions o;
    o.quadrature_k = 0;
    EXPECT_THROW(reach(m, o), std::invalid_argument);
    o.quadrature_k = 3;
    o.order = Order::taylor2;
    EXPECT_THROW(reach(m, o), std::invalid_argument);
}

TEST(Reach, QuadratureNeverLoosensUnroll)
{
    const SystemModel m = model_file("testmodel");
    ReachOptions a = options(ReachMethod::unroll, 25);
    ReachOptions b = a;
    b.quadrature_k = 4;
    const ReachResult ra = reach(m, a);
    const ReachResult rb = reach(m, b);
    for (std::size_t k = 1; k <= 25; ++k) {
        for (std::size_t i = 0; i < m.n(); ++i) {
            EXPECT_TRUE(subset(ra.steps[k].under_proj[i], rb.steps[k].under_proj[i]));
            EXPECT_TRUE(subset(rb.steps[k].over_proj[i], ra.steps[k].over_proj[i]));
        }
    }
}
