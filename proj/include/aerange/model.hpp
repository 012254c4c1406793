#ifndef AERANGE_MODEL_HPP
#define AERANGE_MODEL_HPP

// Parser for the line-oriented system description format:
//
//   system sir
//   states x1 x2 x3
//   control u in [-1, 1]
//   disturbance w in [-0.1, 0.1]
//   param beta = 0.34
//   init x1=[0.79,0.80] x2=[0.19,0.20] x3=0
//   horizon 60
//   dynamics
//     x1' = x1 - beta*x1*x2*Delta
//   pi u -> x1
//
// '#' starts a comment. See docs/model-format.md for the grammar.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "expr.hpp"
#include "interval.hpp"

namespace aerange
{

// Dynamics expressions evaluate over the environment
// (states..., controls..., disturbances...).
struct SystemModel
{
    std::string name;
    std::vector<std::string> states;
    std::vector<std::string> controls;
    std::vector<std::string> disturbances;
    // Outward enclosures of the declared ranges.
    Box control_ranges;
    Box disturbance_ranges;
    // Inward approximations of the declared ranges; used where a value must
    // be guaranteed to lie in the declared set.
    Box control_ranges_inner;
    Box disturbance_ranges_inner;
    std::vector<std::string> param_names;
    std::vector<double> param_values;
    std::vector<Expr> dynamics;
    Box init;
    // Inward approximation of the initial set; a component is empty when an
    // inexact decimal point value has no representable inner point.
    Box init_inner;
    std::size_t horizon = 0;
    // Explicit assignments (environment index -> state index).
    std::vector<std::pair<std::size_t, std::size_t>> pi;

    std::size_t n() const { return states.size(); }
    std::size_t input_count() const { return controls.size() + disturbances.size(); }
    std::size_t env_size() const { return n() + input_count(); }
    bool is_disturbance(std::size_t env_index) const
    {
        return env_index >= n() + controls.size() && env_index < env_size();
    }
    std::string env_name(std::size_t env_index) const
    {
        if (env_index < n()) {
            return states[env_index];
        }
        if (env_index < n() + controls.size()) {
            return controls[env_index - n()];
        }
        return disturbances[env_index - n() - controls.size()];
    }
};

namespace detail
{

// Decimal value as (significant digits, exponent) with value = 0.digits * 10^exp,
// no leading or trailing zeros in digits; "0" for zero.
inline std::pair<std::string, long> normalize_decimal(std::string_view s)
{
    std::string digits;
    long exp10 = 0;
    bool seen_point = false;
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        ++i;
    }
    long int_digits = 0;
    for (; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '.') {
            seen_point = true;
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            if (!seen_point) {
                ++int_digits;
            }
        } else if (c == 'e' || c == 'E') {
            long e = 0;
            std::from_chars(s.data() + i + 1 + (s[i + 1] == '+' ? 1 : 0), s.data() + s.size(), e);
            exp10 = e;
            break;
        }
    }
    const auto first = digits.find_first_not_of('0');
    if (first == std::string::npos) {
        return {"0", 0};
    }
    const long point = int_digits - static_cast<long>(first) + exp10;
    digits = digits.substr(first);
    while (!digits.empty() && digits.back() == '0') {
        digits.pop_back();
    }
    return {digits, point};
}

// True when the decimal literal is exactly representable as the double v.
inline bool literal_is_exact(std::string_view literal, double v)
{
    if (!std::isfinite(v)) {
        return false;
    }
    char buf[1200];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 1100);
    return normalize_decimal(literal) == normalize_decimal(std::string_view(buf, res.ptr - buf));
}

class ModelParser
{
public:
    explicit ModelParser(std::string_view text) : text_(text) {}

    SystemModel parse()
    {
        split_lines();
        for (line_no_ = 0; line_no_ < lines_.size(); ++line_no_) {
            std::string_view line = lines_[line_no_];
            pos_ = 0;
            cur_ = line;
            skip_ws();
            if (at_end()) {
                continue;
            }
            const std::size_t kw_col = pos_;
            const std::string kw = ident("keyword");
            if (in_dynamics_ && peek() == '\'') {
                parse_dynamics_line(kw, kw_col);
                continue;
            }
            in_dynamics_ = false;
            if (kw == "system") {
                model_.name = ident("system name");
            } else if (kw == "states") {
                parse_states();
            } else if (kw == "control" || kw == "disturbance") {
                parse_input(kw == "control");
            } else if (kw == "param") {
                parse_param();
            } else if (kw == "init") {
                parse_init();
            } else if (kw == "horizon") {
                model_.horizon = static_cast<std::size_t>(integer("horizon"));
            } else if (kw == "dynamics") {
                in_dynamics_ = true;
            } else if (kw == "pi") {
                pending_pi_.push_back({line_no_, pos_});
                pos_ = cur_.size();
            } else {
                fail_at("unknown keyword '" + kw + "'", kw_col);
            }
            skip_ws();
            if (!at_end()) {
                fail("unexpected trailing text");
            }
        }
        finish();
        return std::move(model_);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }
    [[noreturn]] void fail_at(const std::string& msg, std::size_t col) const
    {
        throw ParseError(msg, line_no_ + 1, col + 1);
    }

    void split_lines()
    {
        std::size_t start = 0;
        while (start <= text_.size()) {
            std::size_t end = text_.find('\n', start);
            if (end == std::string_view::npos) {
                end = text_.size();
            }
            std::string_view l = text_.substr(start, end - start);
            if (!l.empty() && l.back() == '\r') {
                l.remove_suffix(1);
            }
            const auto hash = l.find('#');
            if (hash != std::string_view::npos) {
                l = l.substr(0, hash);
            }
            lines_.push_back(l);
            start = end + 1;
        }
    }

    bool at_end() const { return pos_ >= cur_.size(); }
    char peek() const { return at_end() ? '\0' : cur_[pos_]; }
    void skip_ws()
    {
        while (!at_end() && (cur_[pos_] == ' ' || cur_[pos_] == '\t')) {
            ++pos_;
        }
    }
    void expect(char c)
    {
        skip_ws();
        if (peek() != c) {
            fail(std::string("expected '") + c + "'");
        }
        ++pos_;
    }
    bool accept(char c)
    {
        skip_ws();
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string ident(const char* what)
    {
        skip_ws();
        const std::size_t start = pos_;
        if (at_end() || !(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')) {
            fail(std::string("expected ") + what);
        }
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
            ++pos_;
        }
        return std::string(cur_.substr(start, pos_ - start));
    }

    long integer(const char* what)
    {
        skip_ws();
        long v = 0;
        auto [ptr, ec] = std::from_chars(cur_.data() + pos_, cur_.data() + cur_.size(), v);
        if (ec != std::errc() || v < 0) {
            fail(std::string("expected non-negative integer for ") + what);
        }
        pos_ = static_cast<std::size_t>(ptr - cur_.data());
        return v;
    }

    // Returns the parsed value and the literal text.
    std::pair<double, std::string_view> number()
    {
        skip_ws();
        const std::size_t start = pos_;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(cur_.data() + pos_, cur_.data() + cur_.size(), v);
        if (ec != std::errc()) {
            fail("expected a number");
        }
        pos_ = static_cast<std::size_t>(ptr - cur_.data());
        return {v, cur_.substr(start, pos_ - start)};
    }

    // Interval literal [a,b] or a single number; `outward` selects the
    // widening direction for inexact endpoints.
    Interval interval_literal(bool outward, bool allow_empty = false)
    {
        skip_ws();
        const std::size_t start = pos_;
        double lo = 0.0;
        double hi = 0.0;
        std::string_view lo_text;
        std::string_view hi_text;
        if (accept('[')) {
            std::tie(lo, lo_text) = number();
            expect(',');
            std::tie(hi, hi_text) = number();
            expect(']');
        } else {
            std::tie(lo, lo_text) = number();
            hi = lo;
            hi_text = lo_text;
        }
        if (!(lo <= hi)) {
            fail_at("interval lower bound exceeds upper bound", start);
        }
        const bool lo_exact = literal_is_exact(lo_text, lo);
        const bool hi_exact = literal_is_exact(hi_text, hi);
        if (outward) {
            return {lo_exact ? lo : rounding::next_down(lo), hi_exact ? hi : rounding::next_up(hi)};
        }
        const Interval inner(lo_exact ? lo : rounding::next_up(lo), hi_exact ? hi : rounding::next_down(hi));
        if (inner.is_empty() && !allow_empty) {
            fail_at("interval too narrow to represent", start);
        }
        return inner;
    }

    void declare(const std::string& name, std::size_t col)
    {
        if (std::find(declared_.begin(), declared_.end(), name) != declared_.end()) {
            fail_at("duplicate identifier '" + name + "'", col);
        }
        if (name == "sin" || name == "cos" || name == "exp" || name == "log" || name == "sqrt") {
            fail_at("reserved name '" + name + "'", col);
        }
        declared_.push_back(name);
    }

    void parse_states()
    {
        while (true) {
            skip_ws();
            if (at_end()) {
                break;
            }
            const std::size_t col = pos_;
            const std::string name = ident("state name");
            declare(name, col);
            model_.states.push_back(name);
            accept(',');
        }
        if (model_.states.empty()) {
            fail("expected at least one state name");
        }
    }

    void parse_input(bool is_control)
    {
        skip_ws();
        const std::size_t col = pos_;
        const std::string name = ident(is_control ? "control name" : "disturbance name");
        declare(name, col);
        skip_ws();
        const std::size_t in_col = pos_;
        if (ident("'in'") != "in") {
            fail_at("expected 'in'", in_col);
        }
        const std::size_t range_col = pos_;
        const Interval outer = interval_literal(true);
        const std::size_t saved = pos_;
        pos_ = range_col;
        const Interval inner = interval_literal(false);
        pos_ = saved;
        if (is_control) {
            model_.controls.push_back(name);
            model_.control_ranges.push_back(outer);
            model_.control_ranges_inner.push_back(inner);
        } else {
            model_.disturbances.push_back(name);
            model_.disturbance_ranges.push_back(outer);
            model_.disturbance_ranges_inner.push_back(inner);
        }
    }

    void parse_param()
    {
        skip_ws();
        const std::size_t col = pos_;
        const std::string name = ident("parameter name");
        declare(name, col);
        expect('=');
        skip_ws();
        bool negative = false;
        if (accept('-')) {
            negative = true;
        }
        const double v = number().first;
        model_.param_names.push_back(name);
        model_.param_values.push_back(negative ? -v : v);
    }

    void parse_init()
    {
        while (true) {
            skip_ws();
            if (at_end()) {
                break;
            }
            const std::size_t col = pos_;
            const std::string name = ident("state name");
            expect('=');
            const std::size_t range_col = pos_;
            const Interval outer = interval_literal(true);
            const std::size_t saved = pos_;
            pos_ = range_col;
            const Interval inner = interval_literal(false, true);
            pos_ = saved;
            init_entries_.push_back({name, outer, inner, line_no_, col});
            accept(',');
        }
    }

    void parse_dynamics_line(const std::string& name, std::size_t col)
    {
        ++pos_; // the prime
        expect('=');
        skip_ws();
        dyn_entries_.push_back({name, std::string(cur_.substr(pos_)), line_no_, col, pos_});
        pos_ = cur_.size();
    }

    std::optional<std::size_t> env_index(std::string_view name) const
    {
        const auto find = [&](const std::vector<std::string>& v) -> std::optional<std::size_t> {
            auto it = std::find(v.begin(), v.end(), name);
            if (it == v.end()) {
                return std::nullopt;
            }
            return static_cast<std::size_t>(it - v.begin());
        };
        if (auto i = find(model_.states)) {
            return *i;
        }
        if (auto i = find(model_.controls)) {
            return model_.n() + *i;
        }
        if (auto i = find(model_.disturbances)) {
            return model_.n() + model_.controls.size() + *i;
        }
        return std::nullopt;
    }

    void finish()
    {
        if (model_.states.empty()) {
            line_no_ = lines_.empty() ? 0 : lines_.size() - 1;
            throw ParseError("no 'states' declaration", line_no_ + 1, 1);
        }
        // Initial box.
        model_.init.assign(model_.n(), Interval::empty());
        model_.init_inner.assign(model_.n(), Interval::empty());
        for (const auto& e : init_entries_) {
            line_no_ = e.line;
            auto it = std::find(model_.states.begin(), model_.states.end(), e.name);
            if (it == model_.states.end()) {
                fail_at("undeclared state '" + e.name + "' in init", e.col);
            }
            model_.init[static_cast<std::size_t>(it - model_.states.begin())] = e.range;
            model_.init_inner[static_cast<std::size_t>(it - model_.states.begin())] = e.inner;
        }
        for (std::size_t i = 0; i < model_.n(); ++i) {
            if (model_.init[i].is_empty()) {
                throw ParseError("missing init range for state '" + model_.states[i] + "'",
                                 lines_.size(), 1);
            }
        }
        // Dynamics.
        const Resolver resolve = [&](std::string_view name) -> std::optional<Identifier> {
            if (auto i = env_index(name)) {
                return Identifier{Identifier::Kind::Var, *i};
            }
            auto it = std::find(model_.param_names.begin(), model_.param_names.end(), name);
            if (it != model_.param_names.end()) {
                return Identifier{Identifier::Kind::Param,
                                  static_cast<std::size_t>(it - model_.param_names.begin())};
            }
            return std::nullopt;
        };
        std::vector<std::optional<Expr>> dyn(model_.n());
        for (const auto& d : dyn_entries_) {
            line_no_ = d.line;
            auto it = std::find(model_.states.begin(), model_.states.end(), d.name);
            if (it == model_.states.end()) {
                fail_at("dynamics for undeclared state '" + d.name + "'", d.col);
            }
            auto& slot = dyn[static_cast<std::size_t>(it - model_.states.begin())];
            if (slot) {
                fail_at("duplicate dynamics for state '" + d.name + "'", d.col);
            }
            slot = parse_expression(d.text, resolve, d.line + 1, d.text_col + 1);
        }
        for (std::size_t i = 0; i < model_.n(); ++i) {
            if (!dyn[i]) {
                throw ParseError("dimension mismatch: no dynamics for state '" + model_.states[i] + "'",
                                 lines_.size(), 1);
            }
            model_.dynamics.push_back(*dyn[i]);
        }
        // Explicit pi assignments.
        for (const auto& [line, col] : pending_pi_) {
            line_no_ = line;
            cur_ = lines_[line];
            pos_ = col;
            skip_ws();
            const std::size_t in_col = pos_;
            const std::string in = ident("input name");
            expect('-');
            expect('>');
            skip_ws();
            const std::size_t out_col = pos_;
            const std::string out = ident("state name");
            skip_ws();
            if (!at_end()) {
                fail("unexpected trailing text");
            }
            const auto src = env_index(in);
            if (!src) {
                fail_at("undeclared identifier '" + in + "'", in_col);
            }
            if (model_.is_disturbance(*src)) {
                fail_at("pi cannot assign disturbance '" + in + "'", in_col);
            }
            auto it = std::find(model_.states.begin(), model_.states.end(), out);
            if (it == model_.states.end()) {
                fail_at("pi targets nonexistent component '" + out + "'", out_col);
            }
            model_.pi.emplace_back(*src, static_cast<std::size_t>(it - model_.states.begin()));
        }
    }

    struct InitEntry
    {
        std::string name;
        Interval range;
        Interval inner;
        std::size_t line;
        std::size_t col;
    };
    struct DynEntry
    {
        std::string name;
        std::string text;
        std::size_t line;
        std::size_t col;
        std::size_t text_col;
    };

    std::string_view text_;
    std::vector<std::string_view> lines_;
    std::size_t line_no_ = 0;
    std::string_view cur_;
    std::size_t pos_ = 0;
    bool in_dynamics_ = false;
    SystemModel model_;
    std::vector<std::string> declared_;
    std::vector<InitEntry> init_entries_;
    std::vector<DynEntry> dyn_entries_;
    std::vector<std::pair<std::size_t, std::size_t>> pending_pi_;
};

} // namespace detail

inline SystemModel parse_model(std::string_view text)
{
    return detail::ModelParser(text).parse();
}

inline SystemModel load_model(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open model file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

} // namespace aerange

#endif
