#include <cmath>
#include <random>

#include "doctest.h"
#include "projtrac/checks.hpp"
#include "projtrac/models.hpp"

using namespace projtrac;

namespace {

std::shared_ptr<const ScaledModel> flat(std::vector<double> a, Wedge w = Wedge::Spacelike, const TauSpec& sp = {}) {
    auto m = std::make_shared<const CompactModel>(build_compact_model(minkowski_wedge_chart(static_cast<int>(a.size()), w), a, 7, 3));
    return std::make_shared<const ScaledModel>(scale_model(m, sp));
}

double field_max(const Field& f) {
    double m = 0.0;
    for (size_t i = 0; i < f.size(); ++i) m = std::max(m, f[i].normalized().max_abs());
    return m;
}

Field random_cotractor(const Context& ctx, int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> c(-0.5, 0.5);
    Field chi(ctx, {Slot::CoTractor});
    for (int A = 0; A <= n; ++A) {
        Series v = ctx.constant(c(rng));
        for (int i = 0; i < n; ++i) v += ctx.coord(i) * c(rng);
        chi[A] = v;
    }
    return chi;
}

}  // namespace

TEST_CASE("a pure gauge change keeps the extended curvature zero") {
    auto s = flat({1.2, 0.8, 0.9, 1.1});
    GaugedStructure g = apply_gauge(metric_gauge_structure(s), random_cotractor(s->ctx(), 4, 5), "random");
    CHECK(extended_flatness_check(g, 1).finalize().pass);
    CHECK(parallel_check(g, 2).finalize().pass);
}

TEST_CASE("a non-closed upsilon has nonzero extended curvature") {
    auto s = flat({1.2, 0.8, 0.9, 1.1});
    GaugedStructure g = metric_gauge_structure(s);
    g.upsilon.at({0, 1}) += s->ctx().coord(1) * 0.5;
    ExtendedCurvature F = extended_curvature(g);
    CHECK(field_max(F.first) > 0.1);
    CHECK_FALSE(extended_flatness_check(g, 1).finalize().pass);
}

TEST_CASE("decomposing the full extended metric returns its components") {
    auto s = flat({0, 0.6, 1.0, 1.3});
    GaugedStructure g = boundary_gauge(s);
    ExtendedMetric d = decompose_extended_metric(g.full_H());
    CHECK((d.f - g.metric.f).normalized().max_abs() < 1e-9);
    CHECK(field_max(d.J - g.metric.J) < 1e-9);
    CHECK(field_max(d.H - g.metric.H) < 1e-9);
    CHECK(field_max(d.phi - g.metric.phi) < 1e-9);
}

TEST_CASE("f_zero_offset vanishes in a gauge that already has f = 0") {
    auto s = flat({0, 0.7, 0.9, 1.2}, Wedge::Timelike);
    GaugedStructure g = boundary_gauge(s);
    CHECK(field_max(f_zero_offset(g)) < 1e-9);
}

TEST_CASE("inside, the metric gauge and the boundary gauge are the two roots of lambda-bar (1 - lambda-bar nu) = 0") {
    auto s = flat({1.2, 0.8, 0.9, 1.1});
    GaugedStructure mg = metric_gauge_structure(s);
    GaugedStructure bg = boundary_gauge(s);
    CHECK(mg.metric.lambda_bar().normalized().max_abs() < 1e-12);
    CHECK((bg.metric.lambda_bar() * s->nu - 1.0).normalized().max_abs() < 1e-9);
    CHECK(boundary_gauge_check(mg, 2).finalize().pass);
    CHECK(boundary_gauge_check(bg, 2).finalize().pass);
}

TEST_CASE("the boundary gauge offset has the stated leading terms") {
    auto s = flat({0, 0.6, 1.0, 1.3});
    Field chi = boundary_gauge_offset(*s);
    const Series& sigma = s->model->sigma;
    // sigma chi_Y -> -1/2 nu^-1 at the boundary
    const double lead = static_cast<double>((sigma * chi[0]).rho_coefficient(0).constant_term());
    const double nu = static_cast<double>(s->nu.rho_coefficient(0).constant_term());
    CHECK(lead == doctest::Approx(-0.5 / nu).epsilon(1e-12));
}

TEST_CASE("metric gauge errors") {
    auto s = flat({0, 0.6, 1.0, 1.3});
    CHECK_THROWS_AS(metric_gauge(boundary_gauge(s)), Error);
}

TEST_CASE("changes of tau: transitions, order table and shift of iota^* upsilon") {
    auto m = std::make_shared<const CompactModel>(build_compact_model(minkowski_wedge_chart(4, Wedge::Spacelike), {0, 0.6, 1.0, 1.3}, 7, 3));
    auto s = std::make_shared<const ScaledModel>(scale_model(m, {}));
    const std::string om = "0.2+0.3*s+0.1*s*th1";
    TauSpec sp;
    sp.omega = om;
    auto t = std::make_shared<const ScaledModel>(scale_model(m, sp));
    TauChange c = gauge_change_of_tau(s, t);
    CHECK(transition_check(c, 2).finalize().pass);
    CHECK(tau_change_table_check(c, om, {}).finalize().pass);
    CHECK(upsilon_shift_check(c, om, {}).finalize().pass);
    // changing tau back and forth composes to the identity
    TauChange back = gauge_change_of_tau(t, s);
    CHECK(transition_check(back, 2).finalize().pass);
}

TEST_CASE("geodesic property and its control on the flat model") {
    for (bool b : {false, true}) {
        auto s = flat({b ? 0.0 : 1.2, 0.8, 0.9, 1.1}, Wedge::Timelike);
        CHECK(geodesic_check(*s, 2).finalize().pass);
        CHECK(geodesic_negative_control(*s, 2).max_residual() > 1e-3);
    }
}
