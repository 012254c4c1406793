#include <gtest/gtest.h>

#include <aerange/model.hpp>

#include "generators.hpp"

using namespace aerange;

TEST(Expr, EvaluationExamples)
{
    const Expr f = parse_expression("x^2 - x", {"x"});
    const std::vector<Interval> box{Interval(2, 3)};
    EXPECT_EQ(eval<Interval>(f, box), Interval(1, 7));
    const std::vector<double> pt{2.5};
    EXPECT_EQ(eval<double>(f, pt), 3.75);
    const Expr c = parse_expression("3.75", {"x"});
    EXPECT_EQ(eval<double>(c, pt), 3.75);
    EXPECT_EQ(eval<Interval>(c, box), Interval(3.75));
}

TEST(Expr, Precedence)
{
    const std::vector<double> env{2.0, 3.0};
    const auto v = [&](const char* s) { return eval<double>(parse_expression(s, {"x", "y"}), env); };
    EXPECT_EQ(v("x + y * 2"), 8.0);
    EXPECT_EQ(v("-x^2"), -4.0);
    EXPECT_EQ(v("(x + y)^2"), 25.0);
    EXPECT_EQ(v("x / y / 2"), 2.0 / 3.0 / 2.0);
    EXPECT_EQ(v("x - y - 1"), -2.0);
    EXPECT_EQ(v("x^-1"), 0.5);
    EXPECT_DOUBLE_EQ(v("exp(log(x)) + sqrt(4) + sin(0) + cos(0)"), 5.0);
}

TEST(Expr, Errors)
{
    try {
        parse_expression("x + x9", {"x"});
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("x9"), std::string::npos);
        EXPECT_EQ(e.column(), 5u);
    }
    EXPECT_THROW(parse_expression("x^1.5", {"x"}), ParseError);
    EXPECT_THROW(parse_expression("foo(x)", {"x"}), ParseError);
    EXPECT_THROW(parse_expression("(x", {"x"}), ParseError);
    EXPECT_THROW(parse_expression("x x", {"x"}), ParseError);
}

TEST(Expr, DomainErrorNamesSubexpression)
{
    const Expr f = parse_expression("x + log(x - 1)", {"x"});
    const std::vector<Interval> env{Interval(0, 2)};
    try {
        eval<Interval>(f, env);
        FAIL();
    } catch (const EvalError& e) {
        EXPECT_NE(std::string(e.what()).find("log((x - 1))"), std::string::npos) << e.what();
    }
}

TEST(Model, SirFixture)
{
    const SystemModel m = load_model(std::string(AERANGE_MODELS_DIR) + "/sir.sys");
    EXPECT_EQ(m.name, "sir");
    EXPECT_EQ(m.n(), 3u);
    EXPECT_EQ(m.horizon, 60u);
    EXPECT_EQ(m.dynamics.size(), 3u);
    EXPECT_EQ(m.param_values, (std::vector<double>{0.34, 0.05, 0.5}));
    // 0.79 and 0.8 are inexact and get widened outward by one step.
    EXPECT_EQ(m.init[0].lo(), std::nextafter(0.79, 0.0));
    EXPECT_EQ(m.init[0].hi(), std::nextafter(0.80, 1.0));
    EXPECT_EQ(m.init[2].lo(), 0.0);
    EXPECT_TRUE(m.init[2].contains(0.1));
    EXPECT_EQ(m.init[2].hi(), std::nextafter(0.1, 1.0));
}

TEST(Model, AllFixturesParse)
{
    for (const char* name : {"testmodel", "sir", "sir_point", "honeybees"}) {
        const SystemModel m = load_model(std::string(AERANGE_MODELS_DIR) + "/" + name + ".sys");
        EXPECT_EQ(m.dynamics.size(), m.n()) << name;
        EXPECT_EQ(m.init.size(), m.n()) << name;
    }
    const SystemModel bees = load_model(std::string(AERANGE_MODELS_DIR) + "/honeybees.sys");
    EXPECT_EQ(bees.n(), 5u);
    EXPECT_EQ(bees.init[0], Interval(500));
    EXPECT_EQ(bees.init[1], Interval(390, 400));
    EXPECT_EQ(bees.horizon, 1500u);
    const SystemModel pt = load_model(std::string(AERANGE_MODELS_DIR) + "/sir_point.sys");
    EXPECT_EQ(pt.init[2], Interval(0));
}

TEST(Model, InputsAndPi)
{
    const SystemModel m = parse_model(R"(system s
states x y
control u in [-0.5, 0.5]
disturbance w in [-1,1]   # universal
param k=2
init x=[0,1] y=0.25
dynamics
  x' = x + k*u
  y' = y + w*x
pi u -> x
)");
    EXPECT_EQ(m.controls, std::vector<std::string>{"u"});
    EXPECT_EQ(m.disturbances, std::vector<std::string>{"w"});
    EXPECT_EQ(m.disturbance_ranges[0], Interval(-1, 1));
    EXPECT_EQ(m.control_ranges[0], Interval(-0.5, 0.5));
    EXPECT_EQ(m.control_ranges_inner[0], Interval(-0.5, 0.5));
    EXPECT_TRUE(m.is_disturbance(3));
    ASSERT_EQ(m.pi.size(), 1u);
    EXPECT_EQ(m.pi[0], (std::pair<std::size_t, std::size_t>{2, 0}));
    const std::vector<double> env{1.0, 2.0, 0.25, -1.0};
    EXPECT_EQ(eval<double>(m.dynamics[0], env, m.param_values), 1.5);
    EXPECT_EQ(eval<double>(m.dynamics[1], env, m.param_values), 1.0);
}

TEST(Model, InexactControlRangeNarrowsInward)
{
    const SystemModel m = parse_model("states x\ncontrol u in [-0.1,0.1]\ninit x=0\ndynamics\nx' = x+u\n");
    EXPECT_TRUE(m.control_ranges_inner[0].subset_of(m.control_ranges[0]));
    EXPECT_LT(m.control_ranges_inner[0].hi(), m.control_ranges[0].hi());
}

TEST(Model, Diagnostics)
{
    const auto error_of = [](const char* text) -> ParseError {
        try {
            parse_model(text);
        } catch (const ParseError& e) {
            return e;
        }
        ADD_FAILURE() << "no error for: " << text;
        return ParseError("", 0, 0);
    };
    {
        const ParseError e = error_of("states x\ninit x=0\ndynamics\n  x' = x + x9\n");
        EXPECT_EQ(e.line(), 4u);
        EXPECT_EQ(e.column(), 12u);
        EXPECT_NE(std::string(e.what()).find("x9"), std::string::npos);
    }
    EXPECT_EQ(error_of("states x y\ninit x=0 y=0\ndynamics\nx' = x\n").line(), 5u);
    EXPECT_EQ(error_of("states x\ninit x=0\ndisturbance w in [0,1]\ndynamics\nx' = x+w\npi w -> x\n").line(), 6u);
    EXPECT_EQ(error_of("states x\ncontrol u in [0,1]\ninit x=0\ndynamics\nx' = x+u\npi u -> z\n").line(), 6u);
    EXPECT_EQ(error_of("states x\nfoo bar\n").line(), 2u);
    EXPECT_EQ(error_of("states x x\n").column(), 10u);
    EXPECT_EQ(error_of("states x\ninit x=[2,1]\n").line(), 2u);
}

TEST(ExprProperty, PrettyPrintRoundTrip)
{
    std::mt19937_64 rng(606);
    const std::vector<std::string> vars{"x0", "x1", "x2"};
    for (int trial = 0; trial < 500; ++trial) {
        const Expr e(testgen::random_smooth(rng, 3, 5));
        const std::string text = to_string(e);
        const Expr once = parse_expression(text, vars);
        const Expr twice = parse_expression(to_string(once), vars);
        EXPECT_TRUE(structurally_equal(once, twice)) << text;
        EXPECT_EQ(to_string(once), to_string(twice));
    }
    // Parsed input round-trips exactly.
    const char* samples[] = {"x0^2 - x0*x1 + 3.25/x2", "-sin(x0)^3 + exp(-x1)", "sqrt(1 + x0^2) - log(2 + x1^-2)"};
    for (const char* s : samples) {
        const Expr once = parse_expression(s, vars);
        EXPECT_TRUE(structurally_equal(once, parse_expression(to_string(once), vars))) << s;
    }
}

TEST(ExprProperty, CenterValueInsideIntervalValue)
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        const Expr e(testgen::random_smooth(rng, 2, 4));
        const Box b = testgen::random_box(rng, 2, 2.0, 1.0);
        const auto c = center(b);
        const Interval iv = eval<Interval>(e, b);
        EXPECT_TRUE(iv.contains(eval<double>(e, c))) << to_string(e) << " " << iv;
    }
}
