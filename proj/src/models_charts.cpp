#include <cmath>

#include "projtrac/expr.hpp"
#include "projtrac/models.hpp"

namespace projtrac {

namespace {

std::vector<std::string> angle_names(int count) {
    std::vector<std::string> names;
    for (int i = 1; i <= count; ++i) names.push_back("th" + std::to_string(i));
    return names;
}

// round metric of S^k in hyperspherical angles, written into g starting at diagonal offset
void add_sphere(Mat& g, int n, int offset, const Context& ctx, const Series& factor) {
    Series f = factor;
    for (int i = offset; i < n; ++i) {
        g[i * n + i] = f;
        f = f * sin(ctx.coord(i)) * sin(ctx.coord(i));
    }
}

void check_rho(const std::vector<double>& anchor) {
    if (anchor[0] < 0.0) throw Error(ErrorCode::EvaluationOutsideDomain, "negative rho");
}

}  // namespace

Chart minkowski_cartesian_chart(int n) {
    Chart c;
    c.id = "minkowski_cartesian";
    c.coords.push_back("t");
    for (int i = 1; i < n; ++i) c.coords.push_back("x" + std::to_string(i));
    c.metric = [n](const Context& ctx) {
        Mat g(n * n, ctx.zero());
        for (int i = 0; i < n; ++i) g[i * n + i] = ctx.constant(i == 0 ? -1.0 : 1.0);
        return g;
    };
    return c;
}

Chart minkowski_projective_chart(int n) {
    if (n < 2) throw Error(ErrorCode::UnknownModel, "projective chart needs n >= 2");
    Chart c;
    c.id = "minkowski_projective";
    c.coords = {"rho"};
    for (int i = 1; i < n; ++i) c.coords.push_back("y" + std::to_string(i));
    c.boundary = 0;
    c.check_anchor = check_rho;
    c.metric = [n](const Context& ctx) {
        // t = 1/rho, x_i = y_i/rho
        Mat g(n * n, ctx.zero());
        Series irho = ctx.coord(0).inverse();
        Series irho2 = irho * irho;
        Series y2 = ctx.zero();
        for (int i = 1; i < n; ++i) y2 += ctx.coord(i) * ctx.coord(i);
        g[0] = (y2 - 1.0) * irho2 * irho2;
        for (int i = 1; i < n; ++i) {
            g[i] = g[i * n] = -(ctx.coord(i) * irho2 * irho);
            g[i * n + i] = irho2;
        }
        return g;
    };
    return c;
}

Chart minkowski_wedge_chart(int n, Wedge wedge) {
    if (n < 3) throw Error(ErrorCode::UnknownModel, "wedge charts need n >= 3");
    Chart c;
    c.id = wedge == Wedge::Spacelike ? "minkowski_spacelike" : "minkowski_timelike";
    c.coords = {"rho", "s"};
    for (auto& a : angle_names(n - 2)) c.coords.push_back(a);
    c.boundary = 0;
    c.check_anchor = check_rho;
    c.metric = [n, wedge](const Context& ctx) {
        const double eps = wedge == Wedge::Spacelike ? 1.0 : -1.0;
        Mat g(n * n, ctx.zero());
        Series irho2 = (ctx.coord(0) * ctx.coord(0)).inverse();
        g[0] = irho2 * irho2 * eps;
        g[n + 1] = irho2 * (-eps);
        const Series& s = ctx.coord(1);
        Series radial = wedge == Wedge::Spacelike ? cosh(s) : sinh(s);
        add_sphere(g, n, 2, ctx, irho2 * radial * radial);
        return g;
    };
    return c;
}

Chart wedge_boundary_chart(int n, Wedge wedge) {
    Chart c;
    c.id = wedge == Wedge::Spacelike ? "de_sitter" : "hyperbolic";
    c.coords = {"s"};
    for (auto& a : angle_names(n - 2)) c.coords.push_back(a);
    const int m = n - 1;
    c.metric = [m, wedge](const Context& ctx) {
        const double eps = wedge == Wedge::Spacelike ? 1.0 : -1.0;
        Mat g(m * m, ctx.zero());
        g[0] = ctx.constant(-eps);
        const Series& s = ctx.coord(0);
        Series radial = wedge == Wedge::Spacelike ? cosh(s) : sinh(s);
        add_sphere(g, m, 1, ctx, radial * radial);
        return g;
    };
    return c;
}

Chart schwarzschild_chart(int n, double mass) {
    if (n < 4) throw Error(ErrorCode::UnknownModel, "Schwarzschild-Tangherlini needs n >= 4");
    if (mass < 0) throw Error(ErrorCode::UnknownModel, "negative mass");
    Chart c;
    c.id = "schwarzschild";
    c.coords = {"rho", "s"};
    for (auto& a : angle_names(n - 2)) c.coords.push_back(a);
    c.boundary = 0;
    c.check_anchor = [n, mass](const std::vector<double>& anchor) {
        check_rho(anchor);
        if (anchor[0] == 0.0 || mass == 0.0) return;
        const double r = std::cosh(anchor[1]) / anchor[0];
        const double rh = std::pow(2.0 * mass, 1.0 / (n - 3));
        if (r <= rh) throw Error(ErrorCode::AnchorInsideHorizon, "r = " + std::to_string(r) + " <= " + std::to_string(rh));
    };
    c.metric = [n, mass](const Context& ctx) {
        Mat g(n * n, ctx.zero());
        const Series& rho = ctx.coord(0);
        const Series& s = ctx.coord(1);
        Series ch = cosh(s), sh = sinh(s);
        Series x = rho / ch;
        Series xp = x;
        for (int k = 1; k < n - 3; ++k) xp = xp * x;
        Series f = 1.0 - xp * (2.0 * mass);
        Series fi = f.inverse();
        Series irho = rho.inverse();
        Series irho2 = irho * irho;
        g[0] = (ch * ch * fi - sh * sh * f) * irho2 * irho2;
        g[1] = g[n] = -(sh * ch * (fi - f)) * irho2 * irho;
        g[n + 1] = (sh * sh * fi - ch * ch * f) * irho2;
        add_sphere(g, n, 2, ctx, ch * ch * irho2);
        return g;
    };
    return c;
}

Chart expression_chart(const std::string& id, const std::vector<std::string>& coords, int boundary,
                       const std::map<std::string, std::string>& components,
                       const std::map<std::string, double>& params) {
    const int n = static_cast<int>(coords.size());
    std::vector<std::pair<std::pair<int, int>, Expr>> exprs;
    for (const auto& [key, text] : components) {
        // key g_<a>_<b>
        if (key.rfind("g_", 0) != 0) throw Error(ErrorCode::ConfigParseError, "metric key " + key);
        std::string rest = key.substr(2);
        int a = -1, b = -1;
        for (int i = 0; i < n && a < 0; ++i)
            for (int j = 0; j < n; ++j)
                if (rest == coords[i] + "_" + coords[j]) {
                    a = i;
                    b = j;
                    break;
                }
        if (a < 0) throw Error(ErrorCode::ConfigParseError, "metric key " + key + " does not name two coordinates");
        Expr e = Expr::parse(text);
        for (const auto& idn : e.identifiers()) {
            bool known = params.count(idn) > 0;
            for (const auto& cname : coords) known = known || cname == idn;
            if (!known) throw Error(ErrorCode::ConfigParseError, "unknown identifier '" + idn + "' in " + key);
        }
        exprs.push_back({{a, b}, e});
    }
    Chart c;
    c.id = id;
    c.coords = coords;
    c.boundary = boundary;
    c.metric = [n, exprs, params, coords](const Context& ctx) {
        std::map<std::string, Series> vars;
        for (const auto& [k, v] : params) vars[k] = ctx.constant(v);
        for (int i = 0; i < n; ++i) vars[coords[i]] = ctx.coord(i);
        Mat g(n * n, ctx.zero());
        for (const auto& [ab, e] : exprs) {
            Series v = e.eval(vars, ctx.basis(), ctx.order());
            g[ab.first * n + ab.second] = v;
            g[ab.second * n + ab.first] = v;
        }
        return g;
    };
    return c;
}

}  // namespace projtrac
