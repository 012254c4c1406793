#ifndef AERANGE_SVG_HPP
#define AERANGE_SVG_HPP

// Plots of two state components over all steps: over sets as outlines,
// under sets filled, optional sample points. Presentation only; plain
// floating point throughout.

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "reach.hpp"

namespace aerange
{

namespace detail
{

using Point2 = std::array<double, 2>;

inline std::vector<Point2> convex_hull(std::vector<Point2> p)
{
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (p.size() < 3) {
        return p;
    }
    const auto cross = [](const Point2& o, const Point2& a, const Point2& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<Point2> h(2 * p.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) {
            --k;
        }
        h[k++] = p[i];
    }
    for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0) {
            --k;
        }
        h[k++] = p[i];
    }
    h.resize(k - 1);
    return h;
}

// Outline of the projection of `s` onto components (a, b).
inline std::vector<Point2> outline(const SkewedBox& s, std::size_t a, std::size_t b, Role role)
{
    if (s.is_empty()) {
        return {};
    }
    if (s.axis_aligned || s.dim() > 12) {
        const Box p = s.projection(role);
        if (!std::isfinite(p[a].width()) || !std::isfinite(p[b].width())) {
            return {};
        }
        return {{p[a].lo(), p[b].lo()}, {p[a].hi(), p[b].lo()}, {p[a].hi(), p[b].hi()}, {p[a].lo(), p[b].hi()}};
    }
    std::vector<Point2> pts;
    for (const auto& y : s.corners()) {
        pts.push_back({y[a], y[b]});
    }
    return convex_hull(std::move(pts));
}

} // namespace detail

struct SvgOptions
{
    std::size_t x = 0;
    std::size_t y = 1;
    double width = 640;
    double height = 480;
};

// `samples` is [step][trajectory][component], possibly empty.
inline std::string render_svg(const ReachResult& r, const std::vector<std::string>& names,
                              const std::vector<std::vector<std::vector<double>>>& samples, const SvgOptions& o = {})
{
    using detail::Point2;
    std::vector<std::vector<Point2>> overs;
    std::vector<std::vector<Point2>> unders;
    double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
    const auto grow = [&](const Point2& p) {
        xlo = std::min(xlo, p[0]);
        xhi = std::max(xhi, p[0]);
        ylo = std::min(ylo, p[1]);
        yhi = std::max(yhi, p[1]);
    };
    for (const auto& s : r.steps) {
        overs.push_back(detail::outline(s.over, o.x, o.y, Role::over));
        unders.push_back(detail::outline(s.under, o.x, o.y, Role::under));
        std::for_each(overs.back().begin(), overs.back().end(), grow);
    }
    for (const auto& step : samples) {
        for (const auto& p : step) {
            grow({p[o.x], p[o.y]});
        }
    }
    if (!(xlo < xhi)) {
        xlo -= 1;
        xhi += 1;
    }
    if (!(ylo < yhi)) {
        ylo -= 1;
        yhi += 1;
    }
    const double m = 40;
    const auto px = [&](const Point2& p) {
        return Point2{m + (p[0] - xlo) / (xhi - xlo) * (o.width - 2 * m),
                      o.height - m - (p[1] - ylo) / (yhi - ylo) * (o.height - 2 * m)};
    };
    const auto poly = [&](const std::vector<Point2>& pts, const char* style) {
        std::ostringstream s;
        s << "<polygon points=\"";
        for (const auto& p : pts) {
            const Point2 q = px(p);
            s << q[0] << ',' << q[1] << ' ';
        }
        s << "\" " << style << "/>\n";
        return s.str();
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\"" << o.height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const auto& u : unders) {
        if (u.size() >= 3) {
            svg << poly(u, "fill=\"#7fbf7f\" fill-opacity=\"0.6\" stroke=\"none\"");
        }
    }
    for (const auto& step : samples) {
        for (const auto& p : step) {
            const Point2 q = px({p[o.x], p[o.y]});
            svg << "<circle cx=\"" << q[0] << "\" cy=\"" << q[1] << "\" r=\"0.6\" fill=\"#555\"/>\n";
        }
    }
    for (const auto& v : overs) {
        if (v.size() >= 3) {
            svg << poly(v, "fill=\"none\" stroke=\"#c0392b\" stroke-width=\"0.8\"");
        }
    }
    svg << "<text x=\"" << o.width / 2 << "\" y=\"" << o.height - 10 << "\" text-anchor=\"middle\">" << names[o.x]
        << "</text>\n"
        << "<text x=\"12\" y=\"" << o.height / 2 << "\" transform=\"rotate(-90 12 " << o.height / 2
        << ")\" text-anchor=\"middle\">" << names[o.y] << "</text>\n"
        << "</svg>\n";
    return svg.str();
}

} // namespace aerange

#endif
