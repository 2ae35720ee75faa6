#include "projtrac/carroll.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace projtrac {

namespace {

std::vector<int> tangential(const Context& ctx) {
    std::vector<int> t;
    for (int i = 0; i < ctx.dim(); ++i)
        if (i != ctx.boundary_index()) t.push_back(i);
    return t;
}

int min_order(const std::vector<Jet>& v) {
    int k = v.front().order();
    for (const auto& j : v) k = std::min(k, j.order());
    return k;
}

// tangential block of tau^2 zeta^ij restricted, inverted: h_ij
std::vector<Jet> boundary_h(const ScaledModel& s) {
    const Context& ctx = s.ctx();
    const int n = s.n();
    const std::vector<int> t = tangential(ctx);
    const int m = n - 1;
    Series t2 = s.tau * s.tau;
    Mat up;
    for (int i : t)
        for (int j : t) up.push_back(Series((t2 * s.model->zeta[i * n + j]).restrict()));
    Mat low = inverse(up, m);
    std::vector<Jet> out;
    for (const auto& x : low) out.push_back(x.body());
    return out;
}

Jet fit(const Jet& a, int k) { return a.order() > k ? a.truncate(k) : a; }

// derivative of a base tractor (frame components) along i by the induced connection
std::vector<Jet> induced_derivative(const InducedConnection& c, const std::vector<Jet>& T, int i) {
    const int f = c.m + 2;
    std::vector<Jet> A = c.matrix(i);
    std::vector<Jet> out;
    for (int C = 0; C < f; ++C) {
        Jet acc = T[C].partial(i);
        for (int B = 0; B < f; ++B) {
            const int K = std::min(acc.order(), std::min(A[C * f + B].order(), T[B].order()));
            acc = acc.truncate(K);
            acc += A[C * f + B].truncate(K) * T[B].truncate(K);
        }
        out.push_back(acc);
    }
    return out;
}

// fixed polynomial tractor on the base: T^B = 1 + (B+1)/2 y_(B mod m) - y_((B+1) mod m)^2 / 4
std::vector<Jet> sample_base_tractor(const InducedConnection& c, int order) {
    BasisPtr b = c.h.front().basis_ptr();
    std::vector<Jet> T;
    for (int B = 0; B < c.m + 2; ++B) {
        Jet y1 = Jet::variable(b, order, B % c.m, 0.0);
        Jet y2 = Jet::variable(b, order, (B + 1) % c.m, 0.0);
        Jet t = Jet::constant(b, order, 1.0);
        t += y1 * (0.5 * (B + 1));
        t += y2 * y2 * (-0.25);
        T.push_back(t);
    }
    return T;
}

// (x^0 - u x^-, x^a, x^-) on the extended boundary
std::vector<Series> vertical_lift(const ExtendedBoundary& ext, const std::vector<Jet>& T) {
    const int f = ext.m + 2;
    std::vector<Series> out;
    for (int B = 0; B < f; ++B) out.push_back(ext.lift(T[B]));
    out[0] = out[0] - ext.ctx.coord(ext.m) * out[f - 1];
    return out;
}

// nabla_alpha T on the extended boundary
std::vector<Series> cartan_derivative(const CarrollConnection& c, const std::vector<Series>& T, int alpha) {
    const int f = c.f();
    std::vector<Series> out;
    for (int C = 0; C < f; ++C) {
        Series acc = T[C].partial(alpha);
        for (int B = 0; B < f; ++B) acc += c.A[alpha][C * f + B] * T[B];
        out.push_back(acc);
    }
    return out;
}

Field scalar(const Context& ctx, const Series& s, Rational w) {
    Field f(ctx, {}, std::move(w));
    f[0] = s;
    return f;
}

void add_list(CheckReport& r, const std::vector<Series>& v, int hi) {
    for (const auto& s : v) add_residuals(r, s, 0, hi);
}

}  // namespace

int InducedConnection::order() const {
    return std::min(std::min(min_order(h), min_order(gamma)), std::min(min_order(upsilon), min_order(x_coupling)));
}

std::vector<Jet> InducedConnection::matrix(int i) const {
    const int f = m + 2;
    const int K = order();
    BasisPtr b = h.front().basis_ptr();
    std::vector<Jet> A(f * f, Jet(b, K));
    A[(1 + i) * f + (m + 1)] = Jet::constant(b, K, 1.0);
    for (int j = 0; j < m; ++j) {
        for (int k = 0; k < m; ++k) A[(1 + k) * f + 1 + j] = fit(gamma[(k * m + i) * m + j], K);
        A[(m + 1) * f + 1 + j] = fit(h[i * m + j], K) * static_cast<double>(-eps);
        A[0 * f + 1 + j] = fit(upsilon[i * m + j], K);
    }
    return A;
}

InducedConnection induced_noneffective_connection(std::shared_ptr<const ScaledModel> s) {
    const Context& ctx = s->ctx();
    if (!ctx.at_boundary()) throw Error(ErrorCode::BoundaryNotDefined, "anchor is not on the boundary");
    if (s->model->orbit_sign == 0)
        throw Error(ErrorCode::NullInfinityAnchor, "lambda_0 vanishes at the boundary point below the anchor");
    const int n = s->n();
    InducedConnection c;
    c.scale = s;
    c.m = n - 1;
    c.eps = s->model->orbit_sign;
    const std::vector<int> t = tangential(ctx);
    for (int i : t) {
        c.coords.push_back(ctx.names()[i]);
        c.anchor.push_back(ctx.anchor()[i]);
    }
    c.h = boundary_h(*s);
    for (int k : t)
        for (int i : t)
            for (int j : t) c.gamma.push_back(s->conn.G(k, i, j).restrict());
    Jet itau = s->tau.restrict().inverse();
    for (const Jet& u : boundary_upsilon(*s)) {
        const int K = std::min(u.order(), itau.order());
        c.upsilon.push_back(u.truncate(K) * itau.truncate(K));
    }
    for (int i : t)
        for (int j : t) c.x_coupling.push_back(-s->conn.schouten[i * n + j].restrict());
    return c;
}

CheckReport induced_connection_check(const InducedConnection& c, int hi) {
    const ScaledModel& s = *c.scale;
    const Context& ctx = s.ctx();
    const int n = s.n();
    const int m = c.m;
    CheckReport rep;
    rep.id = "induced_connection";
    rep.statement = "on H+-: upsilon_[ab] = 0, the W-row couples to X by -+ tau_0^-2 hbar_ab, iota^* upsilon is finite "
                    "and the boundary is totally geodesic for the scale";
    rep.anchor = anchor_label(ctx);
    auto part = [&](std::string id, std::string st, const std::vector<Jet>& v) {
        CheckReport p;
        p.id = std::move(id);
        p.statement = std::move(st);
        p.anchor = rep.anchor;
        for (const auto& j : v) add_residuals(p, Series(j), 0, hi);
        rep.parts.push_back(p);
    };
    std::vector<Jet> asym, xc, geo;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            asym.push_back(c.upsilon[i * m + j] - c.upsilon[j * m + i]);
            Jet e = c.h[i * m + j] * static_cast<double>(-c.eps);
            const int K = std::min(e.order(), c.x_coupling[i * m + j].order());
            xc.push_back(c.x_coupling[i * m + j].truncate(K) - e.truncate(K));
        }
    const int r = ctx.boundary_index();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != r && j != r) geo.push_back(s.conn.G(r, i, j).restrict());
    part("upsilon_symmetric", "upsilon_[ab] = 0", asym);
    part("x_coupling", "-iota^* P_ab = -+ tau_0^-2 hbar_ab", xc);
    part("totally_geodesic", "iota^* Gamma^rho_ab = 0", geo);
    CheckReport fin;
    fin.id = "upsilon_finite";
    fin.statement = "sigma^-1 (nu^-1 P - q) has no pole at the boundary: negative powers of rho vanish";
    fin.anchor = rep.anchor;
    Field up = constructed_upsilon(s);
    for (int a = 0; a < n; ++a)
        for (int bb = 0; bb < n; ++bb)
            if (a != r && bb != r) add_rho_residuals(fin, up.at({bb, a + 1}), std::min(-1, up.at({bb, a + 1}).valuation()), -1);
    rep.parts.push_back(fin);
    return rep;
}

Series ExtendedBoundary::lift(const Jet& j) const { return Series(reembed(j, ctx.basis())); }

ExtendedBoundary extended_boundary(std::shared_ptr<const CompactModel> model, double u0, const TauSpec& base) {
    const Context& mctx = model->ctx;
    if (!mctx.at_boundary()) throw Error(ErrorCode::BoundaryNotDefined, "anchor is not on the boundary");
    if (model->orbit_sign == 0)
        throw Error(ErrorCode::NullInfinityAnchor, "lambda_0 vanishes at the boundary point below the anchor");
    ExtendedBoundary e;
    e.model = model;
    e.m = model->n - 1;
    e.eps = model->orbit_sign;
    auto s0 = std::make_shared<const ScaledModel>(scale_model(model, base));
    e.base = base;
    e.base_tau = s0->tau;
    std::vector<Jet> h = boundary_h(*s0);
    std::vector<std::string> names;
    std::vector<double> anchor;
    for (int i : tangential(mctx)) {
        names.push_back(mctx.names()[i]);
        anchor.push_back(mctx.anchor()[i]);
    }
    for (const auto& x : names)
        if (x == "u") throw Error(ErrorCode::ChartMismatch, "boundary coordinate named u clashes with the fibre");
    names.push_back("u");
    anchor.push_back(u0);
    e.ctx = Context(names, -1, anchor, min_order(h));
    const int d = e.m + 1;
    e.h = Field(e.ctx, {Slot::Lower, Slot::Lower});
    Mat hb;
    for (int i = 0; i < e.m; ++i)
        for (int j = 0; j < e.m; ++j) {
            e.h.at({i, j}) = e.lift(h[i * e.m + j]);
            hb.push_back(e.h.at({i, j}));
        }
    e.n = Field(e.ctx, {Slot::Upper});
    e.n[d - 1] = e.ctx.constant(1.0);
    e.tau0 = pow(abs(det(hb, e.m)), -1.0 / (2.0 * (e.m + 2)));
    return e;
}

const Jet& register_section(ExtendedBoundary& ext, const std::string& label, const ScaledModel& s) {
    if (s.model->chart.id != ext.model->chart.id || s.ctx().anchor() != ext.model->ctx.anchor())
        throw Error(ErrorCode::ChartMismatch, "scale lives on a different chart or anchor");
    return ext.sections[label] = boundary_section(s, ext.base_tau);
}

std::shared_ptr<const ScaledModel> section_scale(const ExtendedBoundary& ext, const std::string& label) {
    auto it = ext.sections.find(label);
    if (it == ext.sections.end()) throw Error(ErrorCode::UnknownQuantity, "no section registered as " + label);
    const CompactModel& m = *ext.model;
    Series w(reembed(it->second, m.ctx.basis()));
    Series tau = ext.base_tau + w * m.sigma * orbit_eps(m);
    TauSpec spec;
    spec.omega = "section:" + label;
    return std::make_shared<const ScaledModel>(scale_model_from_tau(ext.model, spec, std::move(tau)));
}

Series CarrollConnection::u_coefficient(int i, int j) const {
    const int dd = d();
    return linear.G(dd - 1, i, j);
}

CarrollConnection effective_cartan_connection(std::shared_ptr<const ExtendedBoundary> ext, const std::string& section) {
    CarrollConnection c;
    c.ext = ext;
    c.section = section;
    c.induced = induced_noneffective_connection(section_scale(*ext, section));
    const int m = ext->m;
    const int d = m + 1;
    const int f = m + 2;
    const Context& ctx = ext->ctx;
    const Series& u = ctx.coord(m);
    const Series eps = ctx.constant(ext->eps);
    for (int i = 0; i < m; ++i) {
        std::vector<Jet> Ai = c.induced.matrix(i);
        std::vector<Series> row;
        for (const auto& a : Ai) row.push_back(ext->lift(a));
        for (int j = 0; j < m; ++j) row[0 * f + 1 + j] += eps * u * ext->h.at({i, j});
        c.A.push_back(row);
    }
    std::vector<Series> Au(f * f, ctx.zero());
    Au[0 * f + (f - 1)] = ctx.constant(1.0);
    c.A.push_back(Au);

    Mat gamma(d * d * d, ctx.zero());
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) gamma[(k * d + i) * d + j] = c.A[i][(1 + k) * f + 1 + j];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) gamma[(m * d + i) * d + j] = c.A[i][0 * f + 1 + j];
    c.linear = connection_from_christoffels(std::move(gamma), d);

    c.F.assign(d * d * f * f, ctx.zero());
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            if (a == b) continue;
            for (int C = 0; C < f; ++C)
                for (int B = 0; B < f; ++B) {
                    Series v = c.A[b][C * f + B].partial(a) - c.A[a][C * f + B].partial(b);
                    for (int E = 0; E < f; ++E)
                        v += c.A[a][C * f + E] * c.A[b][E * f + B] - c.A[b][C * f + E] * c.A[a][E * f + B];
                    c.F[((a * d + b) * f + C) * f + B] = v;
                }
        }

    // admissible co-frame: Gram-Schmidt of the coordinate vectors in h, null directions nudged
    std::vector<std::vector<double>> hm(m, std::vector<double>(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) hm[i][j] = ext->h.at({i, j}).body().constant_term();
    auto dot = [&](const std::vector<double>& x, const std::vector<double>& y) {
        double s = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) s += hm[i][j] * x[i] * y[j];
        return s;
    };
    std::vector<std::vector<double>> frame;
    for (int k = 0; k < m; ++k) {
        std::vector<double> v(m, 0.0);
        v[k] = 1.0;
        for (int attempt = 0; attempt <= m; ++attempt) {
            std::vector<double> w = v;
            for (size_t p = 0; p < frame.size(); ++p) {
                const double cpt = dot(w, frame[p]) * c.eta[p];
                for (int i = 0; i < m; ++i) w[i] -= cpt * frame[p][i];
            }
            const double nn = dot(w, w);
            if (std::abs(nn) > 1e-10) {
                for (auto& x : w) x /= std::sqrt(std::abs(nn));
                frame.push_back(w);
                c.eta.push_back(nn > 0 ? 1 : -1);
                break;
            }
            v[(k + attempt + 1) % m] += 1.0;
        }
        if (static_cast<int>(frame.size()) != k + 1) throw Error(ErrorCode::SingularMetric, "h is degenerate on the base");
    }
    // co-frame = inverse of the frame matrix (columns are frame vectors)
    Mat fm;
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) fm.push_back(ctx.constant(frame[k][i]));
    Mat inv = inverse(fm, m);
    std::vector<double> du(d, 0.0);
    du[m] = 1.0;
    c.coframe.push_back(du);
    for (int k = 0; k < m; ++k) {
        std::vector<double> row(d, 0.0);
        for (int i = 0; i < m; ++i) row[i] = inv[k * m + i].body().constant_term();
        c.coframe.push_back(row);
    }
    return c;
}

CheckReport carroll_structure_check(const CarrollConnection& c, int hi) {
    const ExtendedBoundary& ext = *c.ext;
    const Context& ctx = ext.ctx;
    const int d = c.d();
    const int f = c.f();
    CheckReport rep;
    rep.id = "carroll_structure";
    rep.statement = "the effective connection on the extended boundary is torsion free with nabla h = 0 and nabla n = 0";
    rep.anchor = anchor_label(ctx);
    auto part = [&](std::string id, std::string st) {
        CheckReport p;
        p.id = std::move(id);
        p.statement = std::move(st);
        p.anchor = rep.anchor;
        return p;
    };
    CheckReport tor = part("torsion", "Gamma^c_[ab] = 0");
    std::vector<Series> t;
    for (int k = 0; k < d; ++k)
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b) t.push_back(c.linear.G(k, a, b) - c.linear.G(k, b, a));
    add_list(tor, t, hi);
    rep.parts.push_back(tor);

    CheckReport ct = part("cartan_torsion", "F_ab maps E_- to zero");
    t.clear();
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int C = 0; C < f; ++C) t.push_back(c.curvature(a, b, C, f - 1));
    add_list(ct, t, hi - 1);
    rep.parts.push_back(ct);

    CheckReport nh = part("nabla_h", "nabla_c h_ab = 0");
    add_residuals(nh, covariant_derivative(ext.h, c.linear, ctx), 0, hi - 1);
    rep.parts.push_back(nh);

    CheckReport nn = part("nabla_n", "nabla_c n^a = 0");
    add_residuals(nn, covariant_derivative(ext.n, c.linear, ctx), 0, hi);
    rep.parts.push_back(nn);

    CheckReport fr = part("admissible_frame", "(du, m^i) is dual to (n, m_i) with h = eta_ij m^i m^j at the anchor");
    const int m = ext.m;
    double worst = std::abs(c.coframe[0][m] - 1.0);
    for (int k = 1; k <= m; ++k) worst = std::max(worst, std::abs(c.coframe[k][m]));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double s = 0.0;
            for (int k = 1; k <= m; ++k) s += c.eta[k - 1] * c.coframe[k][i] * c.coframe[k][j];
            worst = std::max(worst, static_cast<double>(std::abs(s - ext.h.at({i, j}).body().constant_term())));
        }
    int neg = 0;
    for (int e : c.eta) neg += e < 0;
    if (neg != (ext.eps > 0 ? 1 : 0)) fr.error = "frame signature does not match the orbit";
    fr.residuals.emplace_back(0, worst);
    rep.parts.push_back(fr);
    return rep;
}

CheckReport vertical_curvature_check(const CarrollConnection& c, int hi) {
    const ExtendedBoundary& ext = *c.ext;
    const Context& ctx = ext.ctx;
    const int m = ext.m;
    const int d = c.d();
    const int f = c.f();
    CheckReport rep;
    rep.id = "vertical_curvature";
    rep.statement = "n^c F_cd = 0; vertically constant tractors (T^0 - u T^-, T^a, T^-) reproduce the induced connection on H+-";
    rep.anchor = anchor_label(ctx);
    CheckReport nf;
    nf.id = "n_contract_F";
    nf.statement = "n^c F_cd = 0";
    nf.anchor = rep.anchor;
    std::vector<Series> t;
    for (int b = 0; b < d; ++b)
        for (int C = 0; C < f; ++C)
            for (int B = 0; B < f; ++B) t.push_back(c.curvature(m, b, C, B));
    add_list(nf, t, hi - 1);
    rep.parts.push_back(nf);

    const int K = c.induced.order();
    std::vector<Jet> T = sample_base_tractor(c.induced, K);
    std::vector<Series> Tl = vertical_lift(ext, T);
    CheckReport vt;
    vt.id = "vertical_transport";
    vt.statement = "d_u T~^0 + T~^- = 0, d_u T~^a = 0, d_u T~^- = 0";
    vt.anchor = rep.anchor;
    add_list(vt, cartan_derivative(c, Tl, m), hi);
    rep.parts.push_back(vt);

    CheckReport q;
    q.id = "quotient";
    q.statement = "horizontal derivative of T~ is the lift of the induced derivative of T";
    q.anchor = rep.anchor;
    for (int i = 0; i < m; ++i) {
        std::vector<Series> lhs = cartan_derivative(c, Tl, i);
        std::vector<Series> rhs = vertical_lift(ext, induced_derivative(c.induced, T, i));
        for (int C = 0; C < f; ++C) add_residuals(q, lhs[C] - rhs[C], 0, hi - 1);
    }
    rep.parts.push_back(q);
    return rep;
}

double vertical_negative_control(const CarrollConnection& c) {
    const ExtendedBoundary& ext = *c.ext;
    std::vector<Jet> T = sample_base_tractor(c.induced, c.induced.order());
    std::vector<Series> Tl = vertical_lift(ext, T);
    for (size_t B = 0; B < Tl.size(); ++B) Tl[B] += ext.ctx.coord(ext.m) * (0.3 * (B + 1));
    double worst = 0.0;
    for (const auto& s : cartan_derivative(c, Tl, ext.m)) worst = std::max(worst, std::abs(s.degree_norm(0)));
    return worst;
}

CheckReport cartan_flatness_check(const CarrollConnection& c, int hi) {
    CheckReport rep;
    rep.id = "cartan_flatness";
    rep.statement = "the Cartan curvature F_ab vanishes";
    rep.anchor = anchor_label(c.ext->ctx);
    add_list(rep, c.F, hi - 1);
    return rep;
}

CheckReport section_change_check(const CarrollConnection& a, const CarrollConnection& b, int hi) {
    const ExtendedBoundary& ext = *a.ext;
    const int m = ext.m;
    CheckReport rep;
    rep.id = "section_change";
    rep.statement = "u -> u - omega and tau_0^-1 upsilon_ab +- u h_ab -> same + nabla_a nabla_b omega";
    rep.anchor = anchor_label(ext.ctx);
    if (a.ext != b.ext) {
        rep.error = "ChartMismatch: connections on different extended boundaries";
        return rep;
    }
    const Jet& wa = ext.sections.at(a.section);
    const Jet& wb = ext.sections.at(b.section);
    const int K = std::min(wa.order(), wb.order());
    Jet w = wa.truncate(K);
    w = wb.truncate(K) - w;
    const Series om = ext.lift(w);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            // coefficients are affine in u, so evaluating at u - omega subtracts omega d_u
            const Series gb = b.u_coefficient(i, j) - om * b.u_coefficient(i, j).partial(m);
            Series hess = om.partial(i).partial(j);
            for (int k = 0; k < m; ++k) hess -= a.linear.G(k, i, j) * om.partial(k);
            add_residuals(rep, gb - a.u_coefficient(i, j) - hess, 0, hi);
        }
    return rep;
}

BoundaryTractors boundary_projective_tractors(const CarrollConnection& c, const std::string& f,
                                              const std::map<std::string, double>& params, int hbar_sign) {
    const ExtendedBoundary& ext = *c.ext;
    const Context& ctx = ext.ctx;
    const int d = c.d();
    const int m = ext.m;
    Series F = f.empty() ? ctx.zero() : evaluate_expression(f, ctx, params);
    if (!F.partial(m).is_negligible(1e-12))
        throw Error(ErrorCode::NotAdaptedScale, "scale depends on the fibre coordinate");
    BoundaryTractors t;
    t.hbar_sign = hbar_sign == 0 ? ext.eps : hbar_sign;
    std::vector<Series> ups(d);
    for (int a = 0; a < d; ++a) ups[a] = -F.partial(a);
    t.conn = offset(c.linear, ups);
    t.conn = with_schouten(t.conn, curvature(t.conn, ctx));
    t.tau0 = scalar(ctx, ext.tau0, 1);
    t.grad_tau0 = covariant_derivative(t.tau0, t.conn, ctx);
    Series itau = ext.tau0.inverse();
    t.I = Field(ctx, {Slot::Tractor});
    for (int a = 0; a < d; ++a) t.I[a + 1] = ext.n[a] * itau;
    t.H = Field(ctx, {Slot::CoTractor, Slot::CoTractor});
    const Series& tau = ext.tau0;
    t.H.at({0, 0}) = tau * tau;
    for (int b = 0; b < d; ++b) {
        t.H.at({0, b + 1}) = tau * t.grad_tau0[b];
        t.H.at({b + 1, 0}) = t.H.at({0, b + 1});
        for (int a = 0; a < d; ++a)
            t.H.at({a + 1, b + 1}) = tau * tau * ext.h.at({a, b}) * static_cast<double>(t.hbar_sign) +
                                     t.grad_tau0[a] * t.grad_tau0[b];
    }
    return t;
}

CheckReport boundary_tractor_check(const BoundaryTractors& t, const Context& ctx, int hi) {
    CheckReport rep;
    rep.id = "boundary_tractors";
    rep.statement = "nabla I = 0, nabla H = 0 and I^A H_AB = 0 on the extended boundary";
    rep.anchor = anchor_label(ctx);
    CheckReport ni;
    ni.id = "nabla_I";
    ni.statement = "nabla_c I^A = 0";
    ni.anchor = rep.anchor;
    add_residuals(ni, covariant_derivative(t.I, t.conn, ctx), 0, hi - 1);
    CheckReport nh;
    nh.id = "nabla_H";
    nh.statement = "nabla_c H_AB = 0";
    nh.anchor = rep.anchor;
    add_residuals(nh, covariant_derivative(t.H, t.conn, ctx), 0, hi - 1);
    CheckReport ih;
    ih.id = "degenerate";
    ih.statement = "I^A H_AB = 0";
    ih.anchor = rep.anchor;
    add_residuals(ih, contract(t.I, t.H), 0, hi);
    rep.parts = {ni, nh, ih};
    return rep;
}

CheckReport adapted_scale_invariance_check(const CarrollConnection& c, const std::string& f,
                                           const std::map<std::string, double>& params, int hi) {
    const Context& ctx = c.ext->ctx;
    CheckReport rep;
    rep.id = "adapted_scale_invariance";
    rep.statement = "I and H written in two adapted scales are related by the change of splitting";
    rep.anchor = anchor_label(ctx);
    BoundaryTractors t0 = boundary_projective_tractors(c, "", {}, 0);
    BoundaryTractors t1 = boundary_projective_tractors(c, f, params, 0);
    Series F = evaluate_expression(f, ctx, params);
    std::vector<Series> ups;
    for (int a = 0; a < c.d(); ++a) ups.push_back(-F.partial(a));
    add_residuals(rep, splitting_change(t0.I, ups) - t1.I, 0, hi);
    add_residuals(rep, splitting_change(t0.H, ups) - t1.H, 0, hi);
    return rep;
}

namespace {

// L_nbar sigma for a weight-1 density: nbar^a d_a sigma - (1/(d+1)) d_a(nbar^a) sigma, nbar = tau0^-1 d_u
Series lie_nbar(const ExtendedBoundary& ext, const Series& sigma) {
    const int d = ext.dim();
    Series nb = ext.tau0.inverse();
    return nb * sigma.partial(d - 1) - nb.partial(d - 1) * sigma * (1.0 / (d + 1));
}

}  // namespace

CheckReport density_pullback_check(const CarrollConnection& c, int hi) {
    const ExtendedBoundary& ext = *c.ext;
    const Context& ctx = ext.ctx;
    const int d = c.d();
    CheckReport rep;
    rep.id = "density_pullback";
    rep.statement = "L_nbar vanishes on pulled back densities and defines the tractor I = nbar^a W_a";
    rep.anchor = anchor_label(ctx);
    CheckReport pb;
    pb.id = "pullback";
    pb.statement = "L_nbar (pi^* sigma) = 0";
    pb.anchor = rep.anchor;
    Series y = ctx.coord(0) - ctx.anchor()[0];
    Series base = ext.tau0 * (1.0 + y * 0.3 + y * y * 0.2);
    add_residuals(pb, lie_nbar(ext, base), 0, hi);
    add_residuals(pb, lie_nbar(ext, ext.tau0), 0, hi);
    rep.parts.push_back(pb);

    // solve I^A D_A sigma_beta = L_nbar sigma_beta for sigma_0 = tau0, sigma_b = tau0 x^b
    BoundaryTractors t = boundary_projective_tractors(c, "", {}, 0);
    Mat M;
    std::vector<Series> rhs;
    for (int beta = 0; beta <= d; ++beta) {
        Series s = beta == 0 ? ext.tau0 : ext.tau0 * (ctx.coord(beta - 1) - ctx.anchor()[beta - 1]);
        Field D = thomas_d(scalar(ctx, s, 1), t.conn, ctx);
        for (int A = 0; A <= d; ++A) M.push_back(D[A]);
        rhs.push_back(lie_nbar(ext, s));
    }
    Mat Mi = inverse(M, d + 1);
    CheckReport ci;
    ci.id = "canonical_I";
    ci.statement = "the tractor read off from L_nbar equals nbar^a W_a";
    ci.anchor = rep.anchor;
    for (int A = 0; A <= d; ++A) {
        // I^A = sum_beta (M^-1)^{A beta} L_beta with M[beta][A] = D_A sigma_beta
        Series acc = ctx.zero();
        for (int beta = 0; beta <= d; ++beta) acc += Mi[A * (d + 1) + beta] * rhs[beta];
        add_residuals(ci, acc - t.I[A], 0, hi - 1);
    }
    rep.parts.push_back(ci);
    return rep;
}

double density_negative_control(const CarrollConnection& c) {
    const ExtendedBoundary& ext = *c.ext;
    Series s = ext.tau0 * ext.ctx.coord(ext.m);
    return std::abs((lie_nbar(ext, s) / ext.tau0).body().constant_term());
}

CheckReport model_invariants_check(const ScaledModel& s, int hi) {
    const CompactModel& m = *s.model;
    const Context& ctx = s.ctx();
    const int n = s.n();
    CheckReport rep;
    rep.id = "model_invariants";
    rep.statement = "|detd zeta| = sigma^2, lambda_0 iota^* nu = 1 and the boundary metric is de Sitter over H+, "
                    "hyperbolic over H-";
    rep.anchor = anchor_label(ctx);
    rep.tolerance = 1e-9;

    CheckReport dz;
    dz.id = "detd_zeta";
    dz.statement = "|detd zeta| = sigma^2";
    dz.anchor = rep.anchor;
    dz.tolerance = 1e-9;
    add_residuals(dz, abs(detd(m.zeta, n)) - m.sigma * m.sigma, 0, hi);
    rep.parts.push_back(dz);
    if (!ctx.at_boundary()) return rep;
    if (m.orbit_sign == 0) {
        for (const char* id : {"lambda0_nu", "boundary_metric"}) {
            CheckReport x = make_check(id, "needs lambda_0 != 0 below the anchor", rep.anchor, rep.tolerance);
            x.error = "NullInfinityAnchor: lambda_0 vanishes at the boundary point below the anchor";
            x.excluded = true;
            rep.parts.push_back(x);
        }
        return rep;
    }

    BoundaryData bd = boundary_data(s);
    CheckReport ln;
    ln.id = "lambda0_nu";
    ln.statement = "lambda_0 iota^* nu = 1";
    ln.anchor = rep.anchor;
    ln.tolerance = 1e-9;
    {
        const int K = std::min(bd.lambda0_det.order(), bd.lambda0_nu.order());
        Jet r = bd.lambda0_det.truncate(K) * bd.lambda0_nu.truncate(K).inverse() - Jet::constant(bd.lambda0_det.basis_ptr(), K, 1.0L);
        add_residuals(ln, Series(r), 0, std::min(hi, K));
    }
    rep.parts.push_back(ln);

    CheckReport bm;
    bm.id = "boundary_metric";
    bm.statement = "Ric(h) = (R/m) h with R constant; h Lorentzian with R > 0 over H+, Riemannian with R < 0 over H-";
    bm.anchor = rep.anchor;
    bm.tolerance = 1e-9;
    const std::vector<Jet> h = boundary_h(s);
    const int dim = n - 1;
    std::vector<std::string> names;
    std::vector<double> anchor;
    for (int i : tangential(ctx)) {
        names.push_back(ctx.names()[i]);
        anchor.push_back(ctx.anchor()[i]);
    }
    Context bctx(names, -1, anchor, min_order(h));
    Mat hs;
    for (const auto& x : h) hs.push_back(Series(reembed(x, bctx.basis())));
    CurvaturePack curv = curvature(levi_civita(hs, bctx), bctx);
    Mat hinv = inverse(hs, dim);
    Series R = bctx.zero();
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) R += hinv[i * dim + j] * curv.ricci[i * dim + j];
    const int top = std::min(hi, curv.ricci.front().body().order() - 1);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) add_residuals(bm, curv.ricci[i * dim + j] - R * hs[i * dim + j] / dim, 0, top);
        add_residuals(bm, R.partial(i), 0, top - 1);
    }
    Eigen::MatrixXd h0(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) h0(i, j) = static_cast<double>(hs[i * dim + j].body().constant_term());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h0);
    int neg = 0;
    for (int i = 0; i < dim; ++i) neg += es.eigenvalues()(i) < 0;
    const double r0 = static_cast<double>(R.body().constant_term());
    const bool want_lorentz = m.orbit_sign > 0;
    const bool lorentz = neg == 1;
    const bool riemann = neg == 0;
    if ((want_lorentz && !(lorentz && r0 > 0)) || (!want_lorentz && !(riemann && r0 < 0)))
        bm.error = "boundary metric has " + std::to_string(neg) + " negative directions and scalar curvature " +
                   std::to_string(r0);
    rep.parts.push_back(bm);
    return rep;
}

}  // namespace projtrac
