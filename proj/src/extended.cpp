#include "projtrac/extended.hpp"

#include <cmath>

namespace projtrac {

namespace {

// residual profile: powers of rho from the lowest pole at a boundary anchor, total degree elsewhere
void add_profile(CheckReport& r, const Field& e, const Context& ctx, int hi) {
    if (ctx.at_boundary()) add_rho_residuals(r, e, lowest_order(e), hi);
    else add_residuals(r, e, 0, hi);
}

double eps_of(const ScaledModel& s) { return orbit_eps(*s.model); }

void require_not_null_infinity(const ScaledModel& s) {
    if (s.model->chart.boundary >= 0 && s.model->orbit_sign == 0)
        throw Error(ErrorCode::NullInfinityAnchor, "lambda_0 vanishes at the boundary point below the anchor");
}

Series cotractor_dot(const Field& h, const Field& chi, int A) {
    // H^{AB} chi_B
    const int m = chi.dims()[0];
    Series acc = h.at({A, 0}) * chi[0];
    for (int B = 1; B < m; ++B) acc += h.at({A, B}) * chi[B];
    return acc;
}

}  // namespace

Field ExtendedMetric::lambda() const {
    const int m = phi.dims()[0];
    std::vector<Series> d(m);
    for (int A = 0; A < m; ++A) d[A] = phi.at({A, 0});
    return Field::from_parts(phi.n(), {Slot::CoTractor}, 1, std::move(d));
}

Field GaugedStructure::full_H() const {
    const int m = n() + 1;
    Field h(ctx(), {Slot::ExtUpper, Slot::ExtUpper});
    h.at({0, 0}) = metric.f;
    for (int B = 0; B < m; ++B) {
        h.at({0, B + 1}) = metric.J[B];
        h.at({B + 1, 0}) = metric.J[B];
        for (int A = 0; A < m; ++A) h.at({A + 1, B + 1}) = metric.H.at({A, B});
    }
    return h;
}

Field GaugedStructure::full_Phi() const {
    const int m = n() + 1;
    Field p(ctx(), {Slot::ExtLower, Slot::ExtLower});
    for (int C = 0; C < m; ++C) {
        p.at({0, C + 1}) = scale->I[C];
        p.at({C + 1, 0}) = scale->I[C];
        for (int B = 0; B < m; ++B) p.at({B + 1, C + 1}) = metric.phi.at({B, C});
    }
    return p;
}

Connection extended_connection(const Connection& conn, const Field& upsilon) {
    const int n = conn.n;
    Connection c = conn;
    c.upsilon.resize((n + 1) * n);
    for (int A = 0; A <= n; ++A)
        for (int b = 0; b < n; ++b) c.upsilon[A * n + b] = upsilon.at({b, A});
    return c;
}

Connection GaugedStructure::connection() const { return extended_connection(scale->conn, upsilon); }

Field extended_derivative(const Field& t, const GaugedStructure& g) {
    return covariant_derivative(t, g.connection(), g.ctx());
}

GaugedStructure apply_gauge(const GaugedStructure& g, const Field& chi, std::string label) {
    const Context& ctx = g.ctx();
    const int m = g.n() + 1;
    GaugedStructure r = g;
    r.gauge = std::move(label);
    r.chi = g.chi + chi;
    r.upsilon = g.upsilon - covariant_derivative(chi, g.scale->conn, ctx);
    Series f = g.metric.f;
    for (int A = 0; A < m; ++A) {
        const Series hchi = cotractor_dot(g.metric.H, chi, A);
        r.metric.J[A] = g.metric.J[A] + hchi;
        f += g.metric.J[A] * chi[A] * 2.0 + hchi * chi[A];
    }
    r.metric.f = f;
    const Field& I = g.scale->I;
    for (int A = 0; A < m; ++A)
        for (int B = 0; B < m; ++B) r.metric.phi.at({A, B}) = g.metric.phi.at({A, B}) - chi[A] * I[B] - I[A] * chi[B];
    return r;
}

GaugedStructure metric_gauge_structure(std::shared_ptr<const ScaledModel> s) {
    const Context& ctx = s->ctx();
    const int n = s->n();
    GaugedStructure g;
    g.scale = s;
    g.gauge = "metric";
    g.chi = Field(ctx, {Slot::CoTractor});
    const Series isig = s->model->sigma.inverse();
    g.upsilon = Field(ctx, {Slot::Lower, Slot::CoTractor});
    g.metric.f = ctx.zero();
    g.metric.J = Field(ctx, {Slot::Tractor});
    g.metric.J[0] = isig;
    g.metric.H = s->H;
    g.metric.phi = Field(ctx, {Slot::CoTractor, Slot::CoTractor});
    for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
            g.upsilon.at({c, b + 1}) = -(isig * s->zeta_low[c * n + b]);
            g.metric.phi.at({b + 1, c + 1}) = s->zeta_low[b * n + c];
        }
    return g;
}

Field metric_gauge_offset(const GaugedStructure& g) {
    const Context& ctx = g.ctx();
    const int m = g.n() + 1;
    const Series isig = g.scale->model->sigma.inverse();
    const Series lb = g.metric.lambda_bar() * isig * isig * 0.5;
    Field chi(ctx, {Slot::CoTractor});
    for (int A = 0; A < m; ++A) chi[A] = g.metric.phi.at({A, 0}) * isig - lb * g.scale->I[A];
    return chi;
}

GaugedStructure metric_gauge(const GaugedStructure& g) {
    if (g.ctx().at_boundary()) throw Error(ErrorCode::OnBoundary, "the metric gauge is singular on the boundary");
    return apply_gauge(g, metric_gauge_offset(g), "metric");
}

Field boundary_gauge_offset(const ScaledModel& s) {
    const Context& ctx = s.ctx();
    const int n = s.n();
    const Series isig = s.model->sigma.inverse();
    const Series c = s.nu.inverse() * isig * 0.5;
    Field chi(ctx, {Slot::CoTractor});
    chi[0] = -c;
    for (int a = 0; a < n; ++a) chi[a + 1] = c * isig * s.grad_sigma[a];
    return chi;
}

GaugedStructure boundary_gauge(std::shared_ptr<const ScaledModel> s) {
    require_not_null_infinity(*s);
    if (s->ctx().at_boundary() && boundary_data(*s).orbit == "H0")
        throw Error(ErrorCode::NullInfinityAnchor, "anchor on null infinity");
    GaugedStructure g = apply_gauge(metric_gauge_structure(s), boundary_gauge_offset(*s), "boundary");
    if (s->ctx().at_boundary()) {
        auto check = [](const Series& x, const char* what) {
            if (!x.pole_free())
                throw Error(ErrorCode::ScaleNotDistinguished,
                            std::string("boundary gauge component ") + what + " keeps a pole");
        };
        check(g.metric.f, "f");
        for (size_t i = 0; i < g.metric.J.size(); ++i) check(g.metric.J[i], "J");
        for (size_t i = 0; i < g.metric.phi.size(); ++i) check(g.metric.phi[i], "phi");
        for (size_t i = 0; i < g.upsilon.size(); ++i) check(g.upsilon[i], "upsilon");
    }
    return g;
}

Field f_zero_offset(const GaugedStructure& g) {
    const ScaledModel& s = *g.scale;
    const Context& ctx = g.ctx();
    const int n = g.n();
    const Series& sig = s.model->sigma;
    const Series lb = g.metric.lambda_bar();
    const Series s2 = sig * sig;
    const Series disc = 1.0 - g.metric.f * s2 * (lb * lb * s.nu).inverse();
    const Series chi = -(lb * s2.inverse() * (1.0 - sqrt(disc)));
    Field out(ctx, {Slot::CoTractor});
    out[0] = ctx.zero();
    for (int a = 0; a < n; ++a) out[a + 1] = chi * s.grad_sigma[a];
    return out;
}

Field constructed_upsilon(const ScaledModel& s) {
    const Context& ctx = s.ctx();
    const int n = s.n();
    const Mat& P = s.conn.schouten;
    const Series inu = s.nu.inverse();
    const Series inu2 = inu * inu;
    const Series isig = s.model->sigma.inverse();
    std::vector<Series> NP(n);  // N^d P_db
    for (int b = 0; b < n; ++b) {
        Series acc = s.N[0] * P[0 * n + b];
        for (int d = 1; d < n; ++d) acc += s.N[d] * P[d * n + b];
        NP[b] = acc;
    }
    Field u(ctx, {Slot::Lower, Slot::CoTractor});
    for (int b = 0; b < n; ++b) {
        u.at({b, 0}) = inu2 * NP[b];
        for (int a = 0; a < n; ++a)
            u.at({b, a + 1}) = isig * (inu * P[a * n + b] - inu2 * s.grad_sigma[a] * NP[b] - s.q.at({a, b}));
    }
    return u;
}

GaugedStructure constructed_structure(std::shared_ptr<const ScaledModel> s) {
    require_not_null_infinity(*s);
    const Context& ctx = s->ctx();
    const int n = s->n();
    GaugedStructure g;
    g.scale = s;
    g.gauge = "constructed";
    g.upsilon = constructed_upsilon(*s);
    g.chi = boundary_gauge_offset(*s);
    const Series inu = s->nu.inverse();
    g.metric.f = ctx.zero();
    g.metric.H = s->H;
    g.metric.J = Field(ctx, {Slot::Tractor});
    g.metric.J[0] = ctx.zero();
    for (int a = 0; a < n; ++a) g.metric.J[a + 1] = inu * s->N[a];
    g.metric.phi = Field(ctx, {Slot::CoTractor, Slot::CoTractor});
    g.metric.phi.at({0, 0}) = inu;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) g.metric.phi.at({a + 1, b + 1}) = s->q.at({a, b});
    if (ctx.at_boundary())
        for (size_t i = 0; i < g.upsilon.size(); ++i)
            if (!g.upsilon[i].pole_free())
                throw Error(ErrorCode::PoleDetected, "constructed upsilon keeps a pole: the Schouten asymptotics fail");
    return g;
}

ExtendedMetric decompose_extended_metric(const Field& full, double tol) {
    const int M = full.dims()[0];
    const int m = M - 1;
    Mat A(M * M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) A[i * M + j] = full.at({i, j});
    const Series d = det(A, M).normalized();
    if (d.valuation() > 0 || std::abs(d.leading_constant()) <= tol)
        throw Error(ErrorCode::SingularPairing, "extended metric is degenerate at the anchor");
    Mat inv = inverse(A, M);
    Series phi00 = inv[0].normalized();
    if (phi00.valuation() <= 0 && std::abs(phi00.leading_constant()) > tol)
        throw Error(ErrorCode::NotNull, "I is not null for the inverse pairing");
    ExtendedMetric em;
    em.f = full.at({0, 0});
    std::vector<Series> J(m), H(m * m), phi(m * m);
    for (int A1 = 0; A1 < m; ++A1) {
        J[A1] = full.at({0, A1 + 1});
        for (int B = 0; B < m; ++B) {
            H[A1 * m + B] = full.at({A1 + 1, B + 1});
            phi[A1 * m + B] = inv[(A1 + 1) * M + B + 1];
        }
    }
    const int n = full.n();
    em.J = Field::from_parts(n, {Slot::Tractor}, 0, std::move(J));
    em.H = Field::from_parts(n, {Slot::Tractor, Slot::Tractor}, 0, std::move(H));
    em.phi = Field::from_parts(n, {Slot::CoTractor, Slot::CoTractor}, 0, std::move(phi));
    return em;
}

ExtendedCurvature extended_curvature(const GaugedStructure& g) {
    const Context& ctx = g.ctx();
    const int n = g.n();
    if (ctx.order() < 2) throw Error(ErrorCode::OrderExhausted, "extended curvature needs jet order 2");
    ExtendedCurvature ec;
    Field du = covariant_derivative(g.upsilon, g.scale->conn, ctx);
    ec.first = Field(ctx, {Slot::Lower, Slot::Lower, Slot::CoTractor});
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int A = 0; A <= n; ++A) ec.first.at({a, b, A}) = du.at({a, b, A}) - du.at({b, a, A});
    ec.omega = tractor_curvature(g.scale->curv, ctx);
    ec.full = Field(ctx, {Slot::Lower, Slot::Lower, Slot::ExtUpper, Slot::ExtLower});
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int B = 0; B <= n; ++B) {
                ec.full.at({a, b, 0, B + 1}) = ec.first.at({a, b, B});
                for (int A = 0; A <= n; ++A) ec.full.at({a, b, A + 1, B + 1}) = ec.omega.at({a, b, A, B});
            }
    return ec;
}

CheckReport parallel_check(const GaugedStructure& g, int hi) {
    const Context& ctx = g.ctx();
    const int n = g.n();
    const int m = n + 1;
    CheckReport rep;
    rep.id = "extended_parallel";
    rep.statement = "nabla J = -H upsilon, nabla f = -2 J upsilon, nabla phi = 2 upsilon_(A I_B); nabla of the extended metric vanishes";
    rep.anchor = anchor_label(ctx);
    const Connection& conn = g.scale->conn;
    Field dJ = covariant_derivative(g.metric.J, conn, ctx);
    Field df = gradient(g.metric.f, ctx);
    Field dphi = covariant_derivative(g.metric.phi, conn, ctx);
    const Field& I = g.scale->I;
    Field e1(ctx, {Slot::Lower, Slot::Tractor});
    Field e2(ctx, {Slot::Lower});
    Field e3(ctx, {Slot::Lower, Slot::CoTractor, Slot::CoTractor});
    for (int c = 0; c < n; ++c) {
        Series acc = df[c];
        for (int B = 0; B < m; ++B) acc += g.metric.J[B] * g.upsilon.at({c, B}) * 2.0;
        e2[c] = acc;
        for (int A = 0; A < m; ++A) {
            Series v = dJ.at({c, A});
            for (int B = 0; B < m; ++B) v += g.metric.H.at({A, B}) * g.upsilon.at({c, B});
            e1.at({c, A}) = v;
            for (int B = 0; B < m; ++B)
                e3.at({c, A, B}) = dphi.at({c, A, B}) - g.upsilon.at({c, A}) * I[B] - g.upsilon.at({c, B}) * I[A];
        }
    }
    CheckReport p1 = rep, p2 = rep, p3 = rep, p4 = rep;
    p1.id = "nabla_J";
    p1.statement = "nabla_c J^A + H^AB upsilon_Bc = 0";
    p2.id = "nabla_f";
    p2.statement = "nabla_c f + 2 J^B upsilon_Bc = 0";
    p3.id = "nabla_phi";
    p3.statement = "nabla_c phi_AB - upsilon_Ac I_B - upsilon_Bc I_A = 0";
    p4.id = "nabla_full_metric";
    p4.statement = "nabla_c H^{AB} = 0 on the extended bundle";
    add_profile(p1, e1, ctx, hi);
    add_profile(p2, e2, ctx, hi);
    add_profile(p3, e3, ctx, hi);
    add_profile(p4, extended_derivative(g.full_H(), g), ctx, hi);
    rep.parts = {p1, p2, p3, p4};
    rep.order_kind = p1.order_kind;
    return rep;
}

CheckReport extended_metric_relations_check(const GaugedStructure& g, int hi) {
    const Context& ctx = g.ctx();
    const int n = g.n();
    const int m = n + 1;
    const ScaledModel& s = *g.scale;
    const Series& sig = s.model->sigma;
    CheckReport rep;
    rep.id = "extended_metric_relations";
    rep.statement = "H phi + J I = delta, f I = -J phi, J I = 1; phi_AB = D_B lambda_A - sigma upsilon_Ab Z^b_B - "
                    "upsilon_Cb Z^b_B X^C I_A, sigma J = X - H lambda, sigma^2 f = -lambda-bar + H lambda lambda";
    rep.anchor = anchor_label(ctx);
    const Field& I = s.I;
    Field r1(ctx, {Slot::Tractor, Slot::CoTractor});
    Field r2(ctx, {Slot::CoTractor});
    Field r3(ctx, {});
    Series ji = g.metric.J[0] * I[0];
    for (int C = 1; C < m; ++C) ji += g.metric.J[C] * I[C];
    r3[0] = ji - 1.0;
    for (int A = 0; A < m; ++A) {
        for (int B = 0; B < m; ++B) {
            Series v = g.metric.J[A] * I[B];
            if (A == B) v = v - 1.0;
            for (int C = 0; C < m; ++C) v += g.metric.H.at({A, C}) * g.metric.phi.at({C, B});
            r1.at({A, B}) = v;
        }
        Series w = g.metric.f * I[A];
        for (int B = 0; B < m; ++B) w += g.metric.J[B] * g.metric.phi.at({A, B});
        r2[A] = w;
    }
    Field lam = g.metric.lambda();
    Field Dl = thomas_d(lam, s.conn, ctx);  // [B][A] = D_B lambda_A
    Field r4(ctx, {Slot::CoTractor, Slot::CoTractor});
    for (int A = 0; A < m; ++A) {
        r4.at({A, 0}) = g.metric.phi.at({A, 0}) - Dl.at({0, A});
        for (int b = 0; b < n; ++b)
            r4.at({A, b + 1}) = g.metric.phi.at({A, b + 1}) - Dl.at({b + 1, A}) + sig * g.upsilon.at({b, A}) +
                                g.upsilon.at({b, 0}) * I[A];
    }
    Field r5(ctx, {Slot::Tractor});
    for (int A = 0; A < m; ++A) {
        Series v = sig * g.metric.J[A] + cotractor_dot(g.metric.H, lam, A);
        if (A == 0) v = v - 1.0;
        r5[A] = v;
    }
    Field r6(ctx, {});
    {
        Series v = sig * sig * g.metric.f + g.metric.lambda_bar();
        for (int A = 0; A < m; ++A) v -= cotractor_dot(g.metric.H, lam, A) * lam[A];
        r6[0] = v;
    }
    CheckReport inv = rep, par = rep;
    inv.id = "inverse_relations";
    inv.statement = "H phi + J I = delta, f I = -J phi, J I = 1";
    par.id = "lambda_parametrisation";
    par.statement = "phi, J and f expressed through lambda_A, lambda-bar and upsilon";
    add_profile(inv, r1, ctx, hi);
    add_profile(inv, r2, ctx, hi);
    add_profile(inv, r3, ctx, hi);
    add_profile(par, r4, ctx, hi);
    add_profile(par, r5, ctx, hi);
    add_profile(par, r6, ctx, hi);
    rep.parts = {inv, par};
    rep.order_kind = inv.order_kind;
    return rep;
}

CheckReport curvature_commutator_check(const GaugedStructure& g, const Field& T, int hi) {
    const Context& ctx = g.ctx();
    const int n = g.n();
    CheckReport rep;
    rep.id = "extended_curvature_commutator";
    rep.statement = "[nabla_a, nabla_b] T = F_ab T on extended tractors";
    rep.anchor = anchor_label(ctx);
    const Connection conn = g.connection();
    Field dT = covariant_derivative(T, conn, ctx);
    Field ddT = covariant_derivative(dT, conn, ctx);
    ExtendedCurvature F = extended_curvature(g);
    const Field FT = contract(F.full, T);
    const size_t N = T.size();
    Field e = FT;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (size_t I = 0; I < N; ++I) {
                const size_t ab = (static_cast<size_t>(a) * n + b) * N + I;
                const size_t ba = (static_cast<size_t>(b) * n + a) * N + I;
                e[ab] = ddT[ab] - ddT[ba] - FT[ab];
            }
    add_profile(rep, e, ctx, hi);
    return rep;
}

TauChange gauge_change_of_tau(std::shared_ptr<const ScaledModel> from, std::shared_ptr<const ScaledModel> to) {
    if (from->model != to->model) throw Error(ErrorCode::ChartMismatch, "scales of different models");
    const int n = from->n();
    TauChange c;
    c.from = from;
    c.to = to;
    std::vector<Series> d(n);
    for (int a = 0; a < n; ++a) d[a] = from->ups[a] - to->ups[a];
    c.chi = splitting_change(boundary_gauge_offset(*to), d);
    c.transition = c.chi - boundary_gauge_offset(*from);
    c.upsilon_from = constructed_upsilon(*from);
    c.upsilon_to = splitting_change(constructed_upsilon(*to), d);
    return c;
}

CheckReport tau_change_table_check(const TauChange& c, const std::string& omega,
                                   const std::map<std::string, double>& params) {
    const ScaledModel& s = *c.from;
    const Context& ctx = s.ctx();
    const int n = s.n();
    CheckReport rep;
    rep.id = "tau_change_table";
    rep.statement = "boundary gauge of tau~ in the splitting of tau: Y part -1/2 sigma^-1 nu^-1 - tau^-1 nu^-1 omega + O(sigma); "
                    "Z part 1/2 nu^-1 sigma^-2 nabla sigma, vanishing sigma^-1 order, sigma^0 combination";
    rep.anchor = anchor_label(ctx);
    if (!ctx.at_boundary()) {
        rep.error = "BoundaryNotDefined: the order table is an expansion at the boundary";
        return rep;
    }
    const Series& sig = s.model->sigma;
    const Series w = evaluate_expression(omega, ctx, params) * eps_of(s);
    const Series inu = s.nu.inverse();
    const Series itau = s.tau.inverse();
    const Series isig = sig.inverse();
    Field dw = gradient(w, ctx);
    Series eta_w = ctx.zero(), grad2 = ctx.zero();
    for (int a = 0; a < n; ++a) {
        eta_w += s.N[a] * dw[a];
        for (int b = 0; b < n; ++b) grad2 += s.model->zeta[a * n + b] * dw[a] * dw[b];
    }
    eta_w = eta_w * inu;
    const Series w2t2 = w * w * itau * itau;
    const Series B = w2t2 - inu * itau * itau * grad2 + 2.0 * itau * eta_w;
    Field ey(ctx, {});
    ey[0] = c.chi[0] + 0.5 * isig * inu + itau * inu * w;
    Field ez(ctx, {Slot::Lower});
    for (int a = 0; a < n; ++a) {
        const Series& ds = s.grad_sigma[a];
        const Series A0 = inu * B * ds - 4.0 * w2t2 * inu * ds - 2.0 * inu * itau * (dw[a] - w * w * itau * ds);
        ez[a] = 2.0 * c.chi[a + 1] - (inu * isig * isig * ds + A0);
    }
    CheckReport py = rep, pz = rep;
    py.id = "tau_change_Y";
    py.statement = "Y part of chi~ through sigma^0";
    pz.id = "tau_change_Z";
    pz.statement = "Z part of chi~ at orders sigma^-2, sigma^-1, sigma^0";
    add_rho_residuals(py, ey, std::min(-2, lowest_order(ey)), 0);
    add_rho_residuals(pz, ez, std::min(-2, lowest_order(ez)), 0);
    rep.parts = {py, pz};
    rep.order_kind = "rho";
    return rep;
}

std::vector<Jet> boundary_upsilon(const ScaledModel& s) {
    const Context& ctx = s.ctx();
    if (!ctx.at_boundary()) throw Error(ErrorCode::BoundaryNotDefined, "anchor is not on the boundary");
    const int n = s.n();
    const int r = ctx.boundary_index();
    Field u = constructed_upsilon(s);
    std::vector<Jet> out;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != r && b != r) out.push_back(u.at({b, a + 1}).restrict());
    return out;
}

CheckReport upsilon_shift_check(const TauChange& c, const std::string& omega,
                                const std::map<std::string, double>& params) {
    const ScaledModel& s = *c.from;
    const Context& ctx = s.ctx();
    const int n = s.n();
    CheckReport rep;
    rep.id = "upsilon_shift";
    rep.statement = "iota^* upsilon~_ab = iota^* upsilon_ab + tau_0 nabla_a nabla_b omega +- tau_0^-1 hbar_ab omega";
    rep.anchor = anchor_label(ctx);
    if (!ctx.at_boundary()) {
        rep.error = "BoundaryNotDefined: anchor is not on the boundary";
        return rep;
    }
    const int r = ctx.boundary_index();
    const double eps = eps_of(s);
    const Series om = evaluate_expression(omega, ctx, params);
    Field hess = covariant_derivative(gradient(om, ctx), s.conn, ctx);
    std::vector<int> tang;
    for (int i = 0; i < n; ++i)
        if (i != r) tang.push_back(i);
    const int m = n - 1;
    Mat zt;
    for (int i : tang)
        for (int j : tang) zt.push_back(Series(s.model->zeta[i * n + j].restrict()));
    Mat hbar = inverse(zt, m);
    const Jet tau0 = s.tau.restrict();
    const Series t0(tau0), it0 = t0.inverse();
    const Series om0(om.restrict());
    std::vector<Series> diff;
    for (int ia = 0; ia < m; ++ia)
        for (int ib = 0; ib < m; ++ib) {
            const int a = tang[ia], b = tang[ib];
            const Series du = Series(c.upsilon_to.at({b, a + 1}).restrict()) - Series(c.upsilon_from.at({b, a + 1}).restrict());
            const Series h(hess.at({a, b}).restrict());
            diff.push_back(du - t0 * h - eps * it0 * hbar[ia * m + ib] * om0);
        }
    double worst = 0.0;
    int top = 0;
    for (const auto& d : diff) {
        worst = std::max(worst, d.max_abs());
        top = std::max(top, d.order());
    }
    std::vector<std::pair<int, double>> prof;
    for (int k = 0; k <= top; ++k) {
        double v = 0.0;
        for (const auto& d : diff) v = std::max(v, d.degree_norm(k));
        prof.emplace_back(k, v);
    }
    merge_residuals(rep, prof);
    return rep;
}

CheckReport transition_check(const TauChange& c, int hi) {
    const Context& ctx = c.from->ctx();
    CheckReport rep;
    rep.id = "tau_transition";
    rep.statement = "constructed upsilon of tau~ equals upsilon of tau minus nabla of the transition cotractor";
    rep.anchor = anchor_label(ctx);
    Field e = c.upsilon_to - c.upsilon_from + covariant_derivative(c.transition, c.from->conn, ctx);
    add_profile(rep, e, ctx, hi);
    return rep;
}

namespace {

Field geodesic_residual(const ScaledModel& s, const Field& V) {
    const Context& ctx = s.ctx();
    const int n = s.n();
    Field dV = covariant_derivative(V, s.conn, ctx);
    Field r(ctx, {Slot::Upper}, -4);
    for (int a = 0; a < n; ++a) {
        Series acc = V[0] * dV.at({0, a});
        for (int c = 1; c < n; ++c) acc += V[c] * dV.at({c, a});
        r[a] = acc;
    }
    return r;
}

Field unit_N(const ScaledModel& s) {
    const Context& ctx = s.ctx();
    const int n = s.n();
    double nmax = 0.0;
    for (int a = 0; a < n; ++a) nmax = std::max(nmax, std::abs(s.N[a].normalized().leading_constant()));
    if (nmax < 1e-9) throw Error(ErrorCode::VanishingN, "N vanishes at the anchor");
    const Series f = pow(abs(s.nu), -0.5);
    Field V(ctx, {Slot::Upper}, -2);
    for (int a = 0; a < n; ++a) V[a] = f * s.N[a];
    return V;
}

}  // namespace

CheckReport geodesic_check(const ScaledModel& s, int hi) {
    CheckReport rep;
    rep.id = "geodesic";
    rep.statement = "|nu|^-1/2 N^c nabla_c (|nu|^-1/2 N^a) = 0";
    rep.anchor = anchor_label(s.ctx());
    add_residuals(rep, geodesic_residual(s, unit_N(s)), 0, hi);
    return rep;
}

CheckReport geodesic_negative_control(const ScaledModel& s, int hi, double delta) {
    const Context& ctx = s.ctx();
    const int n = s.n();
    CheckReport rep;
    rep.id = "geodesic_negative_control";
    rep.statement = "a generic weight -2 vector field is not geodesic";
    rep.anchor = anchor_label(ctx);
    Field V = unit_N(s);
    for (int a = 0; a < n; ++a) {
        const int b = (a + 1) % n;
        Series y = ctx.coord(b) - ctx.anchor()[b];
        V[a] = V[a] + (1.0 + 0.5 * (a + 1) * y + 0.25 * y * y) * delta;
    }
    add_residuals(rep, geodesic_residual(s, V), 0, hi);
    return rep;
}

Jet boundary_section(const ScaledModel& s) { return boundary_section(s, canonical_tau(*s.model)); }

Jet boundary_section(const ScaledModel& s, const Series& reference) {
    const Context& ctx = s.ctx();
    if (!ctx.at_boundary()) throw Error(ErrorCode::BoundaryNotDefined, "anchor is not on the boundary");
    return ((s.tau - reference) / s.model->sigma * eps_of(s)).restrict();
}

}  // namespace projtrac
