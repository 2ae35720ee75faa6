#include "projtrac/checks.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

namespace projtrac {

namespace {

void profile(CheckReport& r, const Field& e, const Context& ctx, int hi) {
    if (ctx.at_boundary()) add_rho_residuals(r, e, std::min(0, lowest_order(e)), hi);
    else add_residuals(r, e, 0, hi);
}

void profile(CheckReport& r, const Series& e, const Context& ctx, int hi) {
    if (ctx.at_boundary()) add_rho_residuals(r, e, std::min(0, e.valuation()), hi);
    else add_residuals(r, e, 0, hi);
}

// rho^k coefficients for k < 0; (-1, 0) when there are none
void poles(CheckReport& r, const Field& f) {
    const int lo = lowest_order(f);
    if (lo < 0) add_rho_residuals(r, f, lo, -1);
    else merge_residuals(r, {{-1, 0.0}});
}

double at_anchor(const Series& s, const Context& ctx) {
    if (ctx.at_boundary()) return static_cast<double>(s.rho_coefficient(0).constant_term());
    return static_cast<double>(s.normalized().body().constant_term()) * (s.normalized().valuation() == 0 ? 1.0 : 0.0);
}

Jet diff(const Jet& a, const Jet& b) {
    const int K = std::min(a.order(), b.order());
    return a.truncate(K) - b.truncate(K);
}

}  // namespace

CheckReport scale_criterion_check(const ScaledModel& s, int hi) {
    const Context& ctx = s.ctx();
    CheckReport rep = make_check("scale_criterion",
                                 "a distinguished scale: N^a is pole-free and lambda_0 = -detd hbar = iota^* nu^-1 = "
                                 "+-iota^* tau^2",
                                 anchor_label(ctx), 1e-9);
    if (s.model->orbit_sign == 0)
        throw Error(ErrorCode::NullInfinityAnchor, "lambda_0 vanishes at the boundary point below the anchor");
    BoundaryData bd = boundary_data(s);
    CheckReport np = make_check("N_pole_free", "N^a has no negative powers of rho", rep.anchor, rep.tolerance);
    poles(np, s.N);
    rep.parts.push_back(np);
    auto pair = [&](std::string id, std::string statement, const Jet& a, const Jet& b) {
        CheckReport p = make_check(std::move(id), std::move(statement), rep.anchor, rep.tolerance);
        Jet d = diff(a, b);
        add_residuals(p, Series(d), 0, std::min(hi, d.order()));
        rep.parts.push_back(p);
    };
    pair("det_vs_nu", "-detd hbar = iota^* nu^-1", bd.lambda0_det, bd.lambda0_nu);
    pair("det_vs_tau", "-detd hbar = +-iota^* tau^2", bd.lambda0_det, bd.lambda0_tau);
    pair("nu_vs_tau", "iota^* nu^-1 = +-iota^* tau^2", bd.lambda0_nu, bd.lambda0_tau);
    rep.observed.emplace_back("lambda0", bd.lambda0);
    return rep;
}

CheckReport scale_negative_control(std::shared_ptr<const CompactModel> m, const std::string& factor) {
    CheckReport rep = make_check("scale_negative_control",
                                 "rescaling tau by " + factor + " breaks iota^* tau = sqrt|lambda_0| and must raise "
                                 "ScaleNotDistinguished",
                                 anchor_label(m->ctx), 0.0);
    TauSpec spec;
    spec.factor = factor;
    try {
        ScaledModel s = scale_model(m, spec);
        rep.error = "negative control did not fire: N is pole-free for the rescaled tau";
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ScaleNotDistinguished) throw;
        rep.residuals.emplace_back(0, 0.0);
    }
    return rep;
}

CheckReport metric_gauge_uniqueness_check(std::shared_ptr<const ScaledModel> s, int gauges, unsigned seed, int hi,
                                          double tolerance) {
    const Context& ctx = s->ctx();
    const int n = s->n();
    CheckReport rep = make_check("metric_gauge_uniqueness",
                                 "metric_gauge from random starting gauges returns upsilon_Ac = -sigma^-1 zeta_cb Z^b_A",
                                 anchor_label(ctx), tolerance);
    GaugedStructure mg = metric_gauge_structure(s);
    CheckReport formula = make_check("formula", "the metric gauge carries upsilon_Ac = -sigma^-1 zeta_cb Z^b_A",
                                     rep.anchor, tolerance);
    Field expect(ctx, {Slot::Lower, Slot::CoTractor});
    Series isig = s->model->sigma.inverse();
    for (int c = 0; c < n; ++c) {
        expect.at({c, 0}) = ctx.zero();
        for (int b = 0; b < n; ++b) expect.at({c, b + 1}) = -(isig * s->zeta_low[c * n + b]);
    }
    add_residuals(formula, mg.upsilon - expect, 0, hi);
    rep.parts.push_back(formula);

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> coef(-0.5, 0.5);
    CheckReport agree = make_check("random_starts", "upsilon after metric_gauge agrees across random starting gauges",
                                   rep.anchor, tolerance);
    for (int g = 0; g < gauges; ++g) {
        Field chi(ctx, {Slot::CoTractor});
        for (int A = 0; A <= n; ++A) {
            Series v = ctx.constant(coef(rng));
            for (int i = 0; i < n; ++i) {
                v += ctx.coord(i) * coef(rng);
                v += ctx.coord(i) * ctx.coord((i + A) % n) * coef(rng);
            }
            chi[A] = v;
        }
        GaugedStructure back = metric_gauge(apply_gauge(mg, chi, "random"));
        add_residuals(agree, back.upsilon - mg.upsilon, 0, hi);
    }
    rep.parts.push_back(agree);
    rep.observed.emplace_back("gauges", gauges);
    return rep;
}

CheckReport boundary_gauge_check(const GaugedStructure& g, int hi) {
    const Context& ctx = g.ctx();
    const int n = g.n();
    CheckReport rep = make_check("boundary_gauge",
                                 "joint gauge: f = 0, lambda_A = lambda-bar Y_A, lambda-bar (1 - lambda-bar nu) = 0, "
                                 "extended metric pole-free",
                                 anchor_label(ctx), 1e-9);
    CheckReport f = make_check("f_zero", "f = 0", rep.anchor, rep.tolerance);
    profile(f, g.metric.f, ctx, hi);
    CheckReport lam = make_check("lambda_along_Y", "lambda_A - lambda-bar Y_A = 0", rep.anchor, rep.tolerance);
    Field l = g.metric.lambda();
    Field e(ctx, {Slot::CoTractor});
    e[0] = l[0] - g.metric.lambda_bar();
    for (int a = 0; a < n; ++a) e[a + 1] = l[a + 1];
    profile(lam, e, ctx, hi);
    CheckReport lb = make_check("lambda_bar", "lambda-bar (1 - lambda-bar nu) = 0", rep.anchor, rep.tolerance);
    const Series lbar = g.metric.lambda_bar();
    profile(lb, lbar * (1.0 - lbar * g.scale->nu), ctx, hi);
    CheckReport pf = make_check("pole_free", "H^{AB}, Phi_{AB} and upsilon have no negative powers of rho", rep.anchor,
                                rep.tolerance);
    if (ctx.at_boundary()) {
        poles(pf, g.full_H());
        poles(pf, g.full_Phi());
        poles(pf, g.upsilon);
    } else {
        pf.residuals.emplace_back(-1, 0.0);
    }
    rep.parts = {f, lam, lb, pf};
    rep.order_kind = ctx.at_boundary() ? "rho" : "total";
    return rep;
}

CheckReport extended_invertibility_check(const GaugedStructure& g, double bound) {
    const Context& ctx = g.ctx();
    CheckReport rep = make_check("extended_invertibility",
                                 "H^{AB} of the extended bundle is invertible at the anchor: |det| / prod |rows| above the bound",
                                 anchor_label(ctx), 0.0);
    Field H = g.full_H();
    const int m = H.dims()[0];
    Eigen::MatrixXd M(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) M(i, j) = at_anchor(H.at({i, j}), ctx);
    double rows = 1.0;
    for (int i = 0; i < m; ++i) rows *= M.row(i).norm();
    const double det = M.determinant();
    const double ratio = rows > 0 ? std::abs(det) / rows : 0.0;
    rep.observed.emplace_back("det", det);
    rep.observed.emplace_back("hadamard_ratio", ratio);
    rep.observed.emplace_back("bound", bound);
    if (!(ratio > bound)) rep.error = "extended metric degenerate: Hadamard ratio " + std::to_string(ratio);
    else rep.residuals.emplace_back(0, 0.0);
    return rep;
}

CheckReport extended_flatness_check(const GaugedStructure& g, int hi) {
    const Context& ctx = g.ctx();
    CheckReport rep = make_check("extended_flatness", "the extended curvature F_ab vanishes", anchor_label(ctx), 1e-10);
    ExtendedCurvature F = extended_curvature(g);
    CheckReport first = make_check("first_part", "2 nabla_[a upsilon_|A|b] = 0", rep.anchor, rep.tolerance);
    profile(first, F.first, ctx, hi);
    CheckReport om = make_check("omega", "Omega_ab^C_D = 0", rep.anchor, rep.tolerance);
    profile(om, F.omega, ctx, hi);
    CheckReport full = make_check("full", "F_ab = 0", rep.anchor, rep.tolerance);
    profile(full, F.full, ctx, hi);
    rep.parts = {first, om, full};
    rep.order_kind = ctx.at_boundary() ? "rho" : "total";
    return rep;
}

}  // namespace projtrac
