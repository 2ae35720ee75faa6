#include <cmath>
#include <random>

#include "doctest.h"
#include "projtrac/compactify.hpp"
#include "projtrac/expr.hpp"
#include "projtrac/models.hpp"
#include "projtrac/tractor.hpp"

using namespace projtrac;

namespace {

Chart round_sphere() {
    return expression_chart("s2", {"th", "ph"}, -1, {{"g_th_th", "1"}, {"g_ph_ph", "sin(th)^2"}}, {});
}

double value(const Series& s) { return static_cast<double>(s.normalized().body().constant_term()); }

}  // namespace

TEST_CASE("expressions evaluate like the closed form") {
    Expr e = Expr::parse("sqrt(x^2 + 1) * exp(-y) - cosh(x)/2");
    std::map<std::string, double> v{{"x", 0.7}, {"y", -0.3}};
    CHECK(e.eval(v) == doctest::Approx(std::sqrt(0.49 + 1) * std::exp(0.3) - std::cosh(0.7) / 2).epsilon(1e-14));
    CHECK(e.identifiers() == std::vector<std::string>{"x", "y"});
    CHECK_THROWS_AS(Expr::parse("x + * y"), Error);
    CHECK_THROWS_AS(Expr::parse("x + z").eval(v), Error);
}

TEST_CASE("Christoffel symbols of the round sphere") {
    Chart ch = round_sphere();
    const double th = 0.9;
    Context ctx = ch.context({th, 0.4}, 3);
    Mat g = ch.metric(ctx);
    Connection lc = levi_civita(g, ctx);
    // Gamma^th_phph = -sin cos, Gamma^ph_thph = cot
    CHECK(value(lc.G(0, 1, 1)) == doctest::Approx(-std::sin(th) * std::cos(th)).epsilon(1e-13));
    CHECK(value(lc.G(1, 0, 1)) == doctest::Approx(std::cos(th) / std::sin(th)).epsilon(1e-13));
    CHECK(value(lc.G(1, 1, 0)) == doctest::Approx(std::cos(th) / std::sin(th)).epsilon(1e-13));
    CHECK(std::abs(value(lc.G(0, 0, 0))) < 1e-15);
    // first derivative of Gamma^th_phph in th: -cos(2 th)
    Series d = lc.G(0, 1, 1).partial(0);
    CHECK(value(d) == doctest::Approx(-std::cos(2 * th)).epsilon(1e-12));
}

TEST_CASE("unit sphere has Ricci = g and vanishing Weyl tensor") {
    Chart ch = round_sphere();
    Context ctx = ch.context({1.1, 0.2}, 3);
    Mat g = ch.metric(ctx);
    CurvaturePack c = curvature(levi_civita(g, ctx), ctx);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int d = 0; d <= 1; ++d) CHECK(std::abs((c.ricci[a * 2 + b] - g[a * 2 + b]).degree_norm(d)) < 1e-11);
    for (const auto& w : c.weyl) CHECK(w.normalized().max_abs() < 1e-11);
}

TEST_CASE("Schwarzschild-Tangherlini is Ricci-flat in the interior, a perturbed metric is not") {
    for (int n : {4, 5}) {
        Chart ch = schwarzschild_chart(n, 0.7);
        std::vector<double> a(n, 1.0);
        a[0] = 0.4;
        a[1] = 0.5;
        CompactModel m = build_compact_model(ch, a, 6, 3);
        CHECK(m.ricci_residual < 1e-8);
    }
    Chart bent = expression_chart("bent", {"t", "x", "y"}, -1,
                                  {{"g_t_t", "-(1 + 0.2*x^2)"}, {"g_x_x", "1"}, {"g_y_y", "1"}}, {});
    CHECK_THROWS_AS(build_compact_model(bent, {0.1, 0.2, 0.3}, 6, 3), Error);
}

TEST_CASE("chart domains") {
    CHECK_THROWS_AS(schwarzschild_chart(3, 1.0), Error);
    CHECK_THROWS_AS(minkowski_wedge_chart(2, Wedge::Spacelike), Error);
    Chart s = schwarzschild_chart(4, 1.0);
    CHECK_THROWS_AS(s.check_anchor({1.2, 0.8, 0.9, 1.1}), Error);
    CHECK_NOTHROW(s.check_anchor({0.2, 0.8, 0.9, 1.1}));
}

TEST_CASE("coordinate determinant and inverse agree with a direct expansion") {
    Context ctx({"x", "y"}, -1, {0.3, -0.2}, 3);
    Series x = ctx.coord(0), y = ctx.coord(1);
    Mat m = {1.0 + x * y, x, y, 2.0 + y * y};
    Series d = det(m, 2);
    CHECK((d - ((1.0 + x * y) * (2.0 + y * y) - x * y)).normalized().max_abs() < 1e-14);
    Mat inv = inverse(m, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Series acc = m[i * 2] * inv[j] + m[i * 2 + 1] * inv[2 + j];
            CHECK((acc - (i == j ? 1.0 : 0.0)).normalized().max_abs() < 1e-13);
        }
}

TEST_CASE("splitting change is a group action") {
    Context ctx({"x", "y", "z"}, -1, {0.1, 0.2, 0.3}, 2);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Series> data;
    for (int i = 0; i < 4; ++i) data.push_back(ctx.constant(u(rng)) + ctx.coord(i % 3) * u(rng));
    Field t = make_field(ctx, {Slot::CoTractor}, data, 1);
    std::vector<Series> a{ctx.coord(1), ctx.constant(0.5), ctx.coord(0) * ctx.coord(2)};
    std::vector<Series> b{ctx.constant(-0.2), ctx.coord(2), ctx.constant(0.1)};
    std::vector<Series> ab{a[0] + b[0], a[1] + b[1], a[2] + b[2]};
    Field two = splitting_change(splitting_change(t, a), b);
    Field one = splitting_change(t, ab);
    for (size_t i = 0; i < t.size(); ++i) CHECK((two[i] - one[i]).normalized().max_abs() < 1e-14);
}
