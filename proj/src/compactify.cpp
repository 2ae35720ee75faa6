#include "projtrac/compactify.hpp"

#include <cmath>

#include "projtrac/expr.hpp"

namespace projtrac {

namespace {

Field scalar_field(const Context& ctx, const Series& s, Rational w) {
    Field f(ctx, {}, std::move(w));
    f[0] = s;
    return f;
}

Series sigma_of(const Mat& g, int n) {
    return pow(abs(det(g, n)), -1.0 / (2.0 * (n + 1)));
}

Series from_jet(const Jet& j) { return Series(j); }

}  // namespace

int boundary_orbit_sign(const Chart& chart, const std::vector<double>& anchor) {
    if (chart.boundary < 0) return 0;
    std::vector<double> b = anchor;
    b[chart.boundary] = 0.0;
    Context bctx(chart.coords, chart.boundary, b, 3);
    const int n = chart.dim();
    Mat ginv = inverse(chart.metric(bctx), n);
    Mat tang;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != chart.boundary && j != chart.boundary) tang.push_back(ginv[i * n + j]);
    Series d = det(tang, n - 1).normalized();
    const double c = d.body().constant_term();
    if (std::abs(c) < 1e-12) return 0;
    return c > 0 ? -1 : 1;
}

CompactModel build_compact_model(const Chart& chart, const std::vector<double>& anchor, int order, int check_order,
                                 double ricci_tol) {
    CompactModel m;
    m.chart = chart;
    m.ctx = chart.context(anchor, order);
    m.n = chart.dim();
    const int n = m.n;
    m.g = chart.metric(m.ctx);
    m.ginv = inverse(m.g, n);
    m.sigma = sigma_of(m.g, n);
    Series is2 = (m.sigma * m.sigma).inverse();
    m.zeta.resize(n * n);
    for (int i = 0; i < n * n; ++i) m.zeta[i] = m.ginv[i] * is2;
    m.lc = levi_civita(m.g, m.ctx);
    CurvaturePack cp = curvature(m.lc, m.ctx);
    double worst = 0.0;
    for (const auto& r : cp.ricci) {
        const int lo = std::min(0, r.valuation());
        for (int d = lo; d <= std::min(check_order, r.precision()); ++d) worst = std::max(worst, r.degree_norm(d));
    }
    m.ricci_residual = worst;
    if (worst > ricci_tol)
        throw Error(ErrorCode::NotRicciFlat, "Ricci residual " + std::to_string(worst) + " at chart " + chart.id);
    m.orbit_sign = boundary_orbit_sign(chart, anchor);
    return m;
}

Series canonical_tau(const CompactModel& m) {
    const Context& ctx = m.ctx;
    if (m.chart.boundary < 0) return m.sigma;
    Jet c;
    if (ctx.at_boundary()) {
        c = m.sigma.rho_coefficient(1);
    } else {
        std::vector<double> b = ctx.anchor();
        b[m.chart.boundary] = 0.0;
        Context bctx(m.chart.coords, m.chart.boundary, b, ctx.order() + 2);
        c = sigma_of(m.chart.metric(bctx), m.n).rho_coefficient(1);
    }
    Jet e = reembed(c.truncate(std::min(c.order(), ctx.order())), ctx.basis());
    return Series(e);
}

Series evaluate_expression(const std::string& text, const Context& ctx, const std::map<std::string, double>& params) {
    std::map<std::string, Series> vars;
    for (const auto& [k, v] : params) vars[k] = ctx.constant(v);
    for (int i = 0; i < ctx.dim(); ++i) vars[ctx.names()[i]] = ctx.coord(i);
    return Expr::parse(text).eval(vars, ctx.basis(), ctx.order());
}

ScaledModel scale_model(std::shared_ptr<const CompactModel> mp, const TauSpec& spec) {
    const CompactModel& m = *mp;
    const Context& ctx = m.ctx;
    if (spec.levi_civita) {
        if (ctx.at_boundary()) throw Error(ErrorCode::OnBoundary, "Levi-Civita scale is singular at the boundary");
        return scale_model_from_tau(mp, spec, m.sigma);
    }
    Series tau = canonical_tau(m);
    if (!spec.factor.empty()) tau = tau * evaluate_expression(spec.factor, ctx, spec.params);
    if (!spec.omega.empty()) tau = tau + evaluate_expression(spec.omega, ctx, spec.params) * m.sigma * orbit_eps(m);
    return scale_model_from_tau(mp, spec, std::move(tau));
}

ScaledModel scale_model_from_tau(std::shared_ptr<const CompactModel> mp, const TauSpec& spec, Series tau) {
    const CompactModel& m = *mp;
    const Context& ctx = m.ctx;
    const int n = m.n;
    ScaledModel s;
    s.model = mp;
    s.spec = spec;
    s.tau = std::move(tau);
    if (spec.levi_civita) {
        s.ups.assign(n, ctx.zero());
    } else {
        Series ratio = m.sigma / s.tau;
        Series iratio = ratio.inverse();
        s.ups.resize(n);
        for (int a = 0; a < n; ++a) s.ups[a] = ratio.partial(a) * iratio;
    }
    s.conn = offset(m.lc, s.ups);
    s.curv = curvature(s.conn, ctx);
    s.conn.schouten = s.curv.schouten;

    s.sigma_f = scalar_field(ctx, m.sigma, 1);
    s.grad_sigma = covariant_derivative(s.sigma_f, s.conn, ctx);
    s.I = thomas_d(s.sigma_f, s.conn, ctx);
    s.zeta = make_field(ctx, {Slot::Upper, Slot::Upper}, m.zeta, -2);
    s.H = metrisability_tractor(s.zeta, s.conn, ctx);
    s.nu = s.H.at({0, 0});

    Series is2 = (m.sigma * m.sigma).inverse();
    s.N = Field(ctx, {Slot::Upper}, -3);
    for (int a = 0; a < n; ++a) {
        Series acc = ctx.zero();
        for (int b = 0; b < n; ++b) acc += m.zeta[a * n + b] * s.grad_sigma[b];
        s.N[a] = acc * is2;
    }
    if (ctx.at_boundary() && spec.require_distinguished) {
        for (int a = 0; a < n; ++a)
            if (!s.N[a].pole_free())
                throw Error(ErrorCode::ScaleNotDistinguished,
                            "N^" + ctx.names()[a] + " has a pole of order " + std::to_string(-s.N[a].normalized().valuation()));
    }
    s.zeta_low = inverse(m.zeta, n);
    Series c = (s.nu * m.sigma * m.sigma).inverse();
    Mat q(n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) q[a * n + b] = s.zeta_low[a * n + b] - c * s.grad_sigma[a] * s.grad_sigma[b];
    s.q = make_field(ctx, {Slot::Lower, Slot::Lower}, q, 2);
    return s;
}

BoundaryData boundary_data(const ScaledModel& s, double sign_tol) {
    const Context& ctx = s.ctx();
    if (!ctx.at_boundary()) throw Error(ErrorCode::BoundaryNotDefined, "anchor is not on the boundary");
    const int n = s.n();
    const int r = ctx.boundary_index();
    BoundaryData bd;
    Jet c = s.model->sigma.rho_coefficient(1);
    bd.kappa = pow(c.constant_term() > 0 ? c : -c, 1.0 / n);
    Jet k2 = bd.kappa * bd.kappa;
    Jet ik2 = k2.inverse();
    std::vector<int> tang;
    for (int i = 0; i < n; ++i)
        if (i != r) tang.push_back(i);
    const int m = n - 1;
    auto fit = [](const Jet& a, const Jet& b) {
        const int K = std::min(a.order(), b.order());
        return std::make_pair(a.truncate(K), b.truncate(K));
    };
    Mat hb;
    for (int i : tang)
        for (int j : tang) {
            Jet z = s.model->zeta[i * n + j].restrict();
            auto [a, b] = fit(z, ik2);
            bd.hbar.push_back(a * b);
            hb.push_back(from_jet(bd.hbar.back()));
        }
    bd.lambda0_det = -det(hb, m).body();
    Jet inu = s.nu.inverse().restrict();
    {
        auto [a, b] = fit(inu, k2);
        bd.lambda0_nu = a * b;
    }
    Jet t = s.tau.restrict();
    {
        auto [a, b] = fit(t * t, k2);
        bd.lambda0_tau = a * b;
    }
    bd.lambda0 = bd.lambda0_det.constant_term();
    if (bd.lambda0 > sign_tol) bd.orbit = "H+";
    else if (bd.lambda0 < -sign_tol) bd.orbit = "H-";
    else bd.orbit = "H0";
    if (bd.orbit == "H-") bd.lambda0_tau = -bd.lambda0_tau;
    for (int i : tang)
        for (int j : tang) {
            Jet qq = s.q.at({i, j}).restrict();
            auto [a, b] = fit(qq, k2);
            bd.qbar.push_back(a * b);
        }
    return bd;
}

std::string classify_boundary_point(const ScaledModel& s, double sign_tol) {
    return boundary_data(s, sign_tol).orbit;
}

CheckReport schouten_asymptotics_check(const ScaledModel& s, int hi) {
    const Context& ctx = s.ctx();
    const int n = s.n();
    CheckReport rep;
    rep.id = "schouten_asymptotics";
    rep.statement = "nabla_a nu = -2 sigma N^b P_ab and nabla_c lambda^a = P_cb zeta^ba - nu delta_c^a with lambda = -sigma N; "
                    "P_ab = nu q_ab + nu^-2 (P N N) nabla_a sigma nabla_b sigma + O(sigma)";
    const Mat& P = s.conn.schouten;
    Field dnu = covariant_derivative(scalar_field(ctx, s.nu, -2), s.conn, ctx);
    Field dN = covariant_derivative(s.N, s.conn, ctx);
    const Series& sig = s.model->sigma;
    Field e1(ctx, {Slot::Lower});
    Field e2(ctx, {Slot::Lower, Slot::Upper});
    for (int c = 0; c < n; ++c) {
        Series acc = dnu[c];
        for (int b = 0; b < n; ++b) acc += sig * s.N[b] * P[c * n + b] * 2.0;
        e1[c] = acc;
        for (int a = 0; a < n; ++a) {
            Series v = s.grad_sigma[c] * s.N[a] + sig * dN.at({c, a});
            if (a == c) v -= s.nu;
            for (int b = 0; b < n; ++b) v += P[c * n + b] * s.model->zeta[b * n + a];
            e2.at({c, a}) = v;
        }
    }
    CheckReport p1, p2;
    p1.id = "nu_identity";
    p1.statement = "nabla_a nu + 2 sigma N^b P_ab = 0";
    p2.id = "N_identity";
    p2.statement = "P_cb zeta^ba - nu delta_c^a + nabla_c sigma N^a + sigma nabla_c N^a = 0";
    p1.anchor = p2.anchor = rep.anchor = anchor_label(ctx);
    p1.tolerance = p2.tolerance = rep.tolerance;
    if (ctx.at_boundary()) {
        const int lo = std::min(lowest_order(e1), lowest_order(e2));
        add_rho_residuals(p1, e1, lo, 1);
        add_rho_residuals(p2, e2, lo, 1);
        p1.order_kind = p2.order_kind = "rho";
        // asymptotic form, rho^0 and below
        Series inu = s.nu.inverse();
        Series pnn = ctx.zero();
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) pnn += P[a * n + b] * s.N[a] * s.N[b];
        Field e3(ctx, {Slot::Lower, Slot::Lower});
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                e3.at({a, b}) = P[a * n + b] - s.nu * s.q.at({a, b}) - inu * inu * pnn * s.grad_sigma[a] * s.grad_sigma[b];
        CheckReport p3;
        p3.id = "asymptotic_form";
        p3.statement = "P_ab - nu q_ab - nu^-2 (P N N) nabla_a sigma nabla_b sigma = O(sigma)";
        p3.anchor = rep.anchor;
        p3.tolerance = rep.tolerance;
        p3.order_kind = "rho";
        if (s.model->orbit_sign == 0) {
            p3.error = "NullInfinityAnchor: the asymptotic form needs a distinguished scale, lambda_0 vanishes here";
            p3.excluded = true;
        } else {
            add_rho_residuals(p3, e3, std::min(lo, lowest_order(e3)), 0);
        }
        rep.order_kind = "rho";
        rep.parts = {p1, p2, p3};
    } else {
        add_residuals(p1, e1, 0, hi);
        add_residuals(p2, e2, 0, hi);
        rep.parts = {p1, p2};
    }
    for (const auto& p : rep.parts)
        if (!p.excluded) merge_residuals(rep, p.residuals);
    return rep;
}

CheckReport tractor_parallel_check(const ScaledModel& s, int hi, bool include_curvature) {
    const Context& ctx = s.ctx();
    const int m = s.n() + 1;
    CheckReport rep;
    rep.id = "tractor_parallel";
    rep.statement = "the metrisability tractor H and the scale tractor I are parallel and H^AB I_B = 0";
    rep.anchor = anchor_label(ctx);
    auto profile = [&](CheckReport& r, const Field& e) {
        if (ctx.at_boundary()) add_rho_residuals(r, e, std::min(0, lowest_order(e)), hi);
        else add_residuals(r, e, 0, hi);
    };
    auto part = [&](std::string id, std::string statement, const Field& e) {
        CheckReport p;
        p.id = std::move(id);
        p.statement = std::move(statement);
        p.anchor = rep.anchor;
        p.tolerance = rep.tolerance;
        profile(p, e);
        rep.parts.push_back(p);
    };
    part("nabla_H", "nabla_c H^AB = 0", covariant_derivative(s.H, s.conn, ctx));
    part("nabla_I", "nabla_c I_A = 0", covariant_derivative(s.I, s.conn, ctx));
    Field hi_f(ctx, {Slot::Tractor});
    for (int A = 0; A < m; ++A) {
        Series acc = ctx.zero();
        for (int B = 0; B < m; ++B) acc += s.H.at({A, B}) * s.I[B];
        hi_f[A] = acc;
    }
    part("H_I", "H^AB I_B = 0", hi_f);
    if (include_curvature) part("tractor_curvature", "Omega_ab^C_D = 0", tractor_curvature(s.curv, ctx));
    rep.order_kind = ctx.at_boundary() ? "rho" : "total";
    for (const auto& p : rep.parts) merge_residuals(rep, p.residuals);
    return rep;
}

}  // namespace projtrac
