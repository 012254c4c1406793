#include <aerange/io.hpp>

#include <gtest/gtest.h>

#include <bit>
#include <cstdint>
#include <random>
#include <sstream>

using namespace aerange;

namespace
{

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

bool same_bits(const Interval& a, const Interval& b)
{
    return (a.is_empty() && b.is_empty()) || (same_bits(a.lo(), b.lo()) && same_bits(a.hi(), b.hi()));
}

void expect_same(const Box& a, const Box& b)
{
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_TRUE(same_bits(a[i], b[i])) << i;
    }
}

SystemModel model_file(const std::string& name)
{
    return load_model(std::string(AERANGE_MODELS_DIR) + "/" + name + ".sys");
}

} // namespace

TEST(Io, FormatDoubleRoundTrips)
{
    std::mt19937_64 rng(11);
    for (int t = 0; t < 20000; ++t) {
        const double v = std::bit_cast<double>(rng());
        if (std::isnan(v)) {
            continue;
        }
        const std::string s = format_double(v);
        EXPECT_TRUE(same_bits(std::strtod(s.c_str(), nullptr), v)) << s;
    }
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(-2.5), "-2.5");
}

TEST(Io, IntervalJson)
{
    EXPECT_TRUE(to_json(Interval::empty()).is_null());
    EXPECT_TRUE(interval_from_json(nullptr).is_empty());
    const Interval e = interval_from_json(Json::parse(to_json(Interval::entire()).dump()));
    EXPECT_EQ(e.lo(), -std::numeric_limits<double>::infinity());
    EXPECT_EQ(e.hi(), std::numeric_limits<double>::infinity());
    const Interval x(0.1, 1.0 / 3.0);
    EXPECT_TRUE(same_bits(interval_from_json(Json::parse(to_json(x).dump())), x));
    EXPECT_THROW(interval_from_json(Json::array({1.0})), std::invalid_argument);
    EXPECT_THROW(interval_from_json(Json::array({1.0, "x"})), std::invalid_argument);
}

TEST(Io, ReachResultRoundTripIsBitExact)
{
    for (const char* name : {"testmodel", "sir", "sir_point"}) {
        const SystemModel m = model_file(name);
        ReachOptions o;
        o.steps = 15;
        o.precondition = Precondition::jacobian_center;
        const ReachResult r = reach(m, o);
        const ReachResult back = reach_result_from_json(Json::parse(to_json(r, m.states).dump()));
        ASSERT_EQ(back.steps.size(), r.steps.size());
        EXPECT_EQ(back.warnings, r.warnings);
        EXPECT_EQ(back.empty_under_onset, r.empty_under_onset);
        for (std::size_t k = 0; k < r.steps.size(); ++k) {
            expect_same(back.steps[k].under_proj, r.steps[k].under_proj);
            expect_same(back.steps[k].over_proj, r.steps[k].over_proj);
            expect_same(back.steps[k].over.z, r.steps[k].over.z);
            expect_same(back.steps[k].under.z, r.steps[k].under.z);
            EXPECT_EQ(back.steps[k].over.C.rows(), r.steps[k].over.C.rows());
            for (std::size_t i = 0; i < r.steps[k].over.C.rows(); ++i) {
                for (std::size_t j = 0; j < r.steps[k].over.C.cols(); ++j) {
                    EXPECT_TRUE(same_bits(back.steps[k].over.C(i, j), r.steps[k].over.C(i, j)));
                    EXPECT_TRUE(same_bits(back.steps[k].over.gen_matrix(i, j), r.steps[k].over.gen_matrix(i, j)));
                }
            }
            EXPECT_EQ(back.steps[k].over.gen_radius, r.steps[k].over.gen_radius);
            EXPECT_EQ(back.steps[k].over.axis_aligned, r.steps[k].over.axis_aligned);
        }
    }
}

TEST(Io, CsvShape)
{
    const SystemModel m = model_file("sir_point");
    ReachOptions o;
    o.steps = 7;
    const ReachResult r = reach(m, o);
    std::ostringstream os;
    write_csv(os, r, m.states);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, kCsvHeader);
    std::size_t rows = 0;
    bool saw_empty = false;
    while (std::getline(is, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5) << line;
        saw_empty = saw_empty || line.find(",,,") != std::string::npos;
    }
    EXPECT_EQ(rows, 8u * 3u);
    EXPECT_TRUE(saw_empty);
    EXPECT_NE(os.str().find("\n3,x2,"), std::string::npos);
}
