#ifndef AERANGE_IO_HPP
#define AERANGE_IO_HPP

// JSON and CSV serialization of reachability results.
//
// JSON: an interval is [lo, hi] or null when empty; non-finite endpoints are
// the strings "-inf" / "inf". Doubles are written in shortest round-trip
// form, so reading a document back reproduces every endpoint bit for bit.

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "joint_range.hpp"
#include "reach.hpp"

namespace aerange
{

using Json = nlohmann::json;

namespace detail
{

inline Json number_to_json(double v)
{
    if (std::isfinite(v)) {
        return v;
    }
    if (std::isnan(v)) {
        throw std::invalid_argument("cannot serialize NaN");
    }
    return v > 0 ? "inf" : "-inf";
}

inline double number_from_json(const Json& j)
{
    if (j.is_number()) {
        return j.get<double>();
    }
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf") {
            return -std::numeric_limits<double>::infinity();
        }
    }
    throw std::invalid_argument("expected a number, got " + j.dump());
}

inline Json vector_to_json(const std::vector<double>& v)
{
    Json a = Json::array();
    for (double x : v) {
        a.push_back(number_to_json(x));
    }
    return a;
}

inline std::vector<double> vector_from_json(const Json& j)
{
    std::vector<double> v;
    for (const auto& x : j) {
        v.push_back(number_from_json(x));
    }
    return v;
}

inline Json matrix_to_json(const RealMatrix& m)
{
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            row.push_back(number_to_json(m(i, j)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline RealMatrix matrix_from_json(const Json& j)
{
    const std::size_t r = j.size();
    const std::size_t c = r == 0 ? 0 : j[0].size();
    RealMatrix m(r, c, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        if (j[i].size() != c) {
            throw std::invalid_argument("ragged matrix");
        }
        for (std::size_t k = 0; k < c; ++k) {
            m(i, k) = number_from_json(j[i][k]);
        }
    }
    return m;
}

} // namespace detail

inline Json to_json(const Interval& x)
{
    if (x.is_empty()) {
        return nullptr;
    }
    return Json::array({detail::number_to_json(x.lo()), detail::number_to_json(x.hi())});
}

inline Interval interval_from_json(const Json& j)
{
    if (j.is_null()) {
        return Interval::empty();
    }
    if (!j.is_array() || j.size() != 2) {
        throw std::invalid_argument("interval must be [lo, hi] or null");
    }
    return {detail::number_from_json(j[0]), detail::number_from_json(j[1])};
}

inline Json to_json(const Box& b)
{
    Json a = Json::array();
    for (const auto& x : b) {
        a.push_back(to_json(x));
    }
    return a;
}

inline Box box_from_json(const Json& j)
{
    Box b;
    for (const auto& x : j) {
        b.push_back(interval_from_json(x));
    }
    return b;
}

inline Json to_json(const SkewedBox& s)
{
    return Json{{"C", detail::matrix_to_json(s.C)},
                {"z", to_json(s.z)},
                {"generator",
                 {{"center", detail::vector_to_json(s.gen_center)},
                  {"matrix", detail::matrix_to_json(s.gen_matrix)},
                  {"radius", detail::vector_to_json(s.gen_radius)}}},
                {"lambda", detail::number_to_json(s.lambda)},
                {"mu", detail::number_to_json(s.mu)},
                {"axis_aligned", s.axis_aligned}};
}

inline SkewedBox skewed_box_from_json(const Json& j)
{
    SkewedBox s;
    s.C = detail::matrix_from_json(j.at("C"));
    s.z = box_from_json(j.at("z"));
    const Json& g = j.at("generator");
    s.gen_center = detail::vector_from_json(g.at("center"));
    s.gen_matrix = detail::matrix_from_json(g.at("matrix"));
    s.gen_radius = detail::vector_from_json(g.at("radius"));
    s.lambda = detail::number_from_json(j.at("lambda"));
    s.mu = detail::number_from_json(j.at("mu"));
    s.axis_aligned = j.at("axis_aligned").get<bool>();
    return s;
}

inline const char* to_string(ReachMethod m) { return m == ReachMethod::iterate ? "iterate" : "unroll"; }

inline Json to_json(const ReachResult& r, const std::vector<std::string>& names)
{
    Json steps = Json::array();
    for (std::size_t k = 0; k < r.steps.size(); ++k) {
        const ReachStep& s = r.steps[k];
        steps.push_back({{"step", k},
                         {"under", to_json(s.under)},
                         {"over", to_json(s.over)},
                         {"under_projection", to_json(s.under_proj)},
                         {"over_projection", to_json(s.over_proj)}});
    }
    Json j{{"method", to_string(r.method)},
           {"components", names},
           {"seconds", r.seconds},
           {"warnings", r.warnings},
           {"steps", std::move(steps)}};
    j["empty_under_onset"] = r.empty_under_onset ? Json(*r.empty_under_onset) : Json(nullptr);
    return j;
}

inline ReachResult reach_result_from_json(const Json& j)
{
    ReachResult r;
    const std::string m = j.at("method").get<std::string>();
    if (m != "iterate" && m != "unroll") {
        throw std::invalid_argument("unknown method '" + m + "'");
    }
    r.method = m == "iterate" ? ReachMethod::iterate : ReachMethod::unroll;
    r.seconds = j.at("seconds").get<double>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (!j.at("empty_under_onset").is_null()) {
        r.empty_under_onset = j.at("empty_under_onset").get<std::size_t>();
    }
    for (const auto& s : j.at("steps")) {
        ReachStep step;
        step.under = skewed_box_from_json(s.at("under"));
        step.over = skewed_box_from_json(s.at("over"));
        step.under_proj = box_from_json(s.at("under_projection"));
        step.over_proj = box_from_json(s.at("over_projection"));
        r.steps.push_back(std::move(step));
    }
    return r;
}

inline constexpr const char* kCsvHeader = "step,component,under_lo,under_hi,over_lo,over_hi";

// One row per (step, component), steps numbered from `first_step`. Empty
// intervals leave both fields blank.
inline void write_csv(std::ostream& os, const ReachResult& r, const std::vector<std::string>& names,
                      std::size_t first_step = 0)
{
    const auto cells = [&](const Interval& x) {
        return x.is_empty() ? std::string(",") : format_double(x.lo()) + "," + format_double(x.hi());
    };
    os << kCsvHeader << '\n';
    for (std::size_t k = 0; k < r.steps.size(); ++k) {
        const ReachStep& s = r.steps[k];
        for (std::size_t i = 0; i < names.size(); ++i) {
            os << first_step + k << ',' << names[i] << ',' << cells(s.under_proj[i]) << ',' << cells(s.over_proj[i]) << '\n';
        }
    }
}

} // namespace aerange

#endif
