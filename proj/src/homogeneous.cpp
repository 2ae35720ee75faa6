#include "projtrac/homogeneous.hpp"

#include <algorithm>
#include <cmath>

namespace projtrac {

RMat RMat::identity(int n) {
    RMat r(n);
    for (int i = 0; i < n; ++i) r(i, i) = 1;
    return r;
}

RMat operator*(const RMat& x, const RMat& y) {
    const int n = x.size;
    RMat r(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (x(i, k) == 0) continue;
            for (int j = 0; j < n; ++j) r(i, j) += x(i, k) * y(k, j);
        }
    return r;
}

std::vector<Rational> operator*(const RMat& x, const std::vector<Rational>& v) {
    const int n = x.size;
    std::vector<Rational> r(n, Rational(0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r[i] += x(i, j) * v[j];
    return r;
}

RMat inverse(const RMat& x) {
    const int n = x.size;
    RMat a = x;
    RMat r = RMat::identity(n);
    for (int c = 0; c < n; ++c) {
        int p = c;
        while (p < n && a(p, c) == 0) ++p;
        if (p == n) throw Error(ErrorCode::SingularMetric, "singular rational matrix");
        if (p != c)
            for (int j = 0; j < n; ++j) {
                std::swap(a(p, j), a(c, j));
                std::swap(r(p, j), r(c, j));
            }
        const Rational piv = a(c, c);
        for (int j = 0; j < n; ++j) {
            a(c, j) /= piv;
            r(c, j) /= piv;
        }
        for (int i = 0; i < n; ++i) {
            if (i == c || a(i, c) == 0) continue;
            const Rational f = a(i, c);
            for (int j = 0; j < n; ++j) {
                a(i, j) -= f * a(c, j);
                r(i, j) -= f * r(c, j);
            }
        }
    }
    return r;
}

bool equal_mod_centre(const RMat& x, const RMat& y) {
    if (x.size != y.size) return false;
    // find the ratio from the first nonzero entry
    Rational ratio = 0;
    for (size_t i = 0; i < x.a.size(); ++i) {
        if ((x.a[i] == 0) != (y.a[i] == 0)) return false;
        if (x.a[i] != 0 && ratio == 0) ratio = y.a[i] / x.a[i];
    }
    if (ratio == 0) return true;
    for (size_t i = 0; i < x.a.size(); ++i)
        if (x.a[i] * ratio != y.a[i]) return false;
    return true;
}

bool projectively_equal(const std::vector<Rational>& x, const std::vector<Rational>& y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
        for (size_t j = i + 1; j < x.size(); ++j)
            if (x[i] * y[j] != x[j] * y[i]) return false;
    bool zx = std::all_of(x.begin(), x.end(), [](const Rational& r) { return r == 0; });
    bool zy = std::all_of(y.begin(), y.end(), [](const Rational& r) { return r == 0; });
    return zx == zy;
}

HomogeneousModel homogeneous_model(int n) {
    if (n < 2) throw Error(ErrorCode::ChartMismatch, "homogeneous model needs n >= 2");
    HomogeneousModel m;
    m.n = n;
    m.eta.assign(n, 1);
    m.eta[0] = -1;
    return m;
}

RMat HomogeneousModel::element(const RMat& A, const std::vector<Rational>& chi, const Rational& chi0,
                               const std::vector<Rational>& omega, const std::vector<Rational>& ups,
                               const Rational& a) const {
    RMat g(size());
    g(0, 0) = 1;
    g(0, n + 1) = chi0;
    g(n + 1, n + 1) = a;
    for (int i = 0; i < n; ++i) {
        g(0, i + 1) = chi[i];
        g(i + 1, n + 1) = omega[i];
        g(n + 1, i + 1) = ups[i];
        for (int j = 0; j < n; ++j) g(i + 1, j + 1) = A(i, j);
    }
    return g;
}

RMat HomogeneousModel::poincare(const RMat& A, const std::vector<Rational>& omega) const {
    std::vector<Rational> chi(n, Rational(0)), ups(n, Rational(0));
    Rational ww = 0;
    for (int r = 0; r < n; ++r) ww += eta[r] * omega[r] * omega[r];
    for (int nu = 0; nu < n; ++nu)
        for (int r = 0; r < n; ++r) chi[nu] -= omega[r] * eta[r] * A(r, nu);
    return element(A, chi, -ww / 2, omega, ups, Rational(1));
}

bool HomogeneousModel::in_G(const RMat& g) const {
    if (g.size != size() || g(0, 0) == 0) return false;
    for (int i = 1; i < size(); ++i)
        if (g(i, 0) != 0) return false;
    RMat b = base_block(g);
    try {
        (void)inverse(b);
    } catch (const Error&) {
        return false;
    }
    return true;
}

bool HomogeneousModel::in_P(const RMat& g) const {
    if (!in_G(g)) return false;
    for (int i = 1; i <= n; ++i)
        if (g(i, n + 1) != 0) return false;
    return true;
}

bool HomogeneousModel::in_K(const RMat& g) const {
    if (!in_P(g)) return false;
    const Rational c = g(0, 0);
    const Rational e = g(n + 1, n + 1) / c;
    if (e != 1 && !(e == -1 && (n + 1) % 2 == 0)) return false;
    for (int i = 1; i <= n + 1; ++i)
        for (int j = 1; j <= n + 1; ++j)
            if (g(i, j) != (i == j ? e * c : Rational(0))) return false;
    return true;
}

bool HomogeneousModel::is_lorentz(const RMat& A) const {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Rational s = 0;
            for (int r = 0; r < n; ++r) s += A(r, i) * eta[r] * A(r, j);
            if (s != (i == j ? Rational(eta[i]) : Rational(0))) return false;
        }
    return true;
}

Rational HomogeneousModel::quadratic(const std::vector<Rational>& x) const {
    Rational q = 2 * x[0] * x[n + 1];
    for (int i = 0; i < n; ++i) q += eta[i] * x[i + 1] * x[i + 1];
    return q;
}

RMat HomogeneousModel::base_block(const RMat& g) {
    const int s = g.size - 1;
    RMat b(s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) b(i, j) = g(i + 1, j + 1);
    return b;
}

std::string orbit_name(Orbit o) {
    switch (o) {
    case Orbit::Interior: return "interior-line";
    case Orbit::Ti: return "Ti";
    case Orbit::Scri: return "Scri";
    case Orbit::Spi: return "Spi";
    }
    return "";
}

std::string base_orbit_name(BaseOrbit o) {
    switch (o) {
    case BaseOrbit::Minkowski: return "Minkowski";
    case BaseOrbit::H: return "H";
    case BaseOrbit::S: return "S";
    case BaseOrbit::dS: return "dS";
    }
    return "";
}

BaseOrbit base_of(Orbit o) {
    switch (o) {
    case Orbit::Interior: return BaseOrbit::Minkowski;
    case Orbit::Ti: return BaseOrbit::H;
    case Orbit::Scri: return BaseOrbit::S;
    case Orbit::Spi: return BaseOrbit::dS;
    }
    return BaseOrbit::Minkowski;
}

std::vector<Rational> project(const std::vector<Rational>& x) { return std::vector<Rational>(x.begin() + 1, x.end()); }

BaseOrbit base_classify(const HomogeneousModel& m, const std::vector<Rational>& xb) {
    if (static_cast<int>(xb.size()) != m.n + 1) throw Error(ErrorCode::ChartMismatch, "base point needs n+1 coordinates");
    if (xb[m.n] != 0) return BaseOrbit::Minkowski;
    Rational q = 0;
    bool zero = true;
    for (int i = 0; i < m.n; ++i) {
        q += m.eta[i] * xb[i] * xb[i];
        zero = zero && xb[i] == 0;
    }
    if (zero) throw Error(ErrorCode::RemovedPoint, "zero vector is not a point of projective space");
    if (q < 0) return BaseOrbit::H;
    if (q == 0) return BaseOrbit::S;
    return BaseOrbit::dS;
}

Orbit orbit_classify(const HomogeneousModel& m, const std::vector<Rational>& x) {
    if (static_cast<int>(x.size()) != m.size()) throw Error(ErrorCode::ChartMismatch, "point needs n+2 homogeneous coordinates");
    bool base_zero = true;
    for (int i = 1; i < m.size(); ++i) base_zero = base_zero && x[i] == 0;
    if (base_zero) {
        if (x[0] == 0) throw Error(ErrorCode::RemovedPoint, "zero vector is not a point of projective space");
        throw Error(ErrorCode::RemovedPoint, "the fixed point [I] is removed");
    }
    if (x[m.n + 1] != 0) return Orbit::Interior;
    const Rational q = m.quadratic(x);  // eta(x, x) when x_+ = 0
    if (q < 0) return Orbit::Ti;
    if (q == 0) return Orbit::Scri;
    return Orbit::Spi;
}

Rational RationalSampler::small(int range, int den) {
    std::uniform_int_distribution<int> p(-range, range), q(1, den);
    return Rational(p(rng), q(rng));
}

Rational RationalSampler::nonzero(int range, int den) {
    for (;;) {
        Rational r = small(range, den);
        if (r != 0) return r;
    }
}

RMat RationalSampler::lorentz(const HomogeneousModel& m, int factors) {
    const int n = m.n;
    RMat A = RMat::identity(n);
    std::uniform_int_distribution<int> axis(1, n - 1);
    for (int f = 0; f < factors; ++f) {
        RMat B = RMat::identity(n);
        if (f % 2 == 0) {
            // boost in the (0, i) plane with cosh = (1+t^2)/(1-t^2), sinh = 2t/(1-t^2), |t| < 1
            const int i = axis(rng);
            Rational t = small(4, 5);
            if (t >= 1 || t <= -1) t = t / 5;
            const Rational d = 1 - t * t;
            B(0, 0) = (1 + t * t) / d;
            B(i, i) = B(0, 0);
            B(0, i) = 2 * t / d;
            B(i, 0) = B(0, i);
        } else {
            // rotation in an (i, j) plane with a rational Pythagorean angle
            const int i = axis(rng);
            int j = axis(rng);
            if (j == i) j = i % (n - 1) + 1;
            if (j == i) continue;
            const Rational t = small();
            const Rational d = 1 + t * t;
            B(i, i) = (1 - t * t) / d;
            B(j, j) = B(i, i);
            B(i, j) = -2 * t / d;
            B(j, i) = 2 * t / d;
        }
        A = B * A;
    }
    return A;
}

RMat RationalSampler::poincare(const HomogeneousModel& m) {
    RMat A = lorentz(m);
    std::vector<Rational> w(m.n);
    for (auto& x : w) x = small();
    return m.poincare(A, w);
}

RMat RationalSampler::group(const HomogeneousModel& m) {
    const int n = m.n;
    for (;;) {
        RMat A(n);
        for (auto& x : A.a) x = small(3, 3);
        std::vector<Rational> chi(n), w(n), u(n);
        for (int i = 0; i < n; ++i) {
            chi[i] = small();
            w[i] = small();
            u[i] = small();
        }
        RMat g = m.element(A, chi, small(), w, u, nonzero());
        if (m.in_G(g)) return g;
    }
}

RMat RationalSampler::kernel(const HomogeneousModel& m) {
    const int n = m.n;
    RMat A(n);
    const Rational e = ((n + 1) % 2 == 0 && (rng() & 1)) ? Rational(-1) : Rational(1);
    for (int i = 0; i < n; ++i) A(i, i) = e;
    std::vector<Rational> chi(n), z(n, Rational(0));
    for (auto& x : chi) x = small();
    return m.element(A, chi, small(), z, z, e);
}

std::vector<Rational> RationalSampler::point(const HomogeneousModel& m, Orbit o) {
    const int n = m.n;
    std::vector<Rational> x(n + 2, Rational(0));
    x[0] = small();
    switch (o) {
    case Orbit::Interior:
        for (int i = 1; i <= n; ++i) x[i] = small();
        x[n + 1] = nonzero();
        break;
    case Orbit::Ti: {
        Rational s = 0;
        for (int i = 2; i <= n; ++i) {
            x[i] = small();
            s += abs(x[i]);
        }
        x[1] = (rng() & 1) ? Rational(s + 1) : Rational(-(s + 1));
        break;
    }
    case Orbit::Spi: {
        x[1] = small();
        for (int i = 2; i <= n; ++i) x[i] = small();
        x[2] = abs(x[1]) + 1;
        break;
    }
    case Orbit::Scri: {
        // inverse stereographic image of a random point of R^(n-2), scaled
        std::vector<Rational> p(n - 2);
        Rational s2 = 0;
        for (auto& v : p) {
            v = small();
            s2 += v * v;
        }
        const Rational d = s2 + 1;
        const Rational lam = nonzero();
        x[1] = lam;
        for (int i = 0; i < n - 2; ++i) x[i + 2] = lam * 2 * p[i] / d;
        x[n] = lam * (s2 - 1) / d;
        if (n == 2) x[2] = lam;
        break;
    }
    }
    return x;
}

namespace {

void count(CheckReport& r, int order, int failures) {
    for (auto& [o, v] : r.residuals)
        if (o == order) {
            v += failures;
            return;
        }
    r.residuals.emplace_back(order, static_cast<double>(failures));
}

CheckReport sub(std::string id, std::string statement) {
    CheckReport p;
    p.id = std::move(id);
    p.statement = std::move(statement);
    p.tolerance = 0.0;
    return p;
}

}  // namespace

CheckReport kernel_check(const HomogeneousModel& m, unsigned seed) {
    RationalSampler rs(seed);
    CheckReport rep;
    rep.id = "kernel";
    rep.statement = "K is a normal subgroup of G contained in P, acts trivially on RP^n and is not discrete";
    rep.anchor = "n=" + std::to_string(m.n);
    rep.tolerance = 0.0;
    const int n = m.n;

    CheckReport normal = sub("normal", "g k g^-1 lies in K");
    CheckReport trivial = sub("trivial_action", "k fixes every base point");
    CheckReport inP = sub("K_in_P", "K is contained in P");
    CheckReport fixes = sub("P_fixes_origin", "P fixes the model point [e_+] of RP^n");
    CheckReport closure = sub("closure", "products of G (P) elements lie in G (P)");
    CheckReport oneparam = sub("one_parameter", "k(t1) k(t2) = k(t1 + t2) for k(t) = exp(t X), X in the Lie algebra of K");
    int f_normal = 0, f_triv = 0, f_in = 0, f_fix = 0, f_clos = 0, f_one = 0;
    for (int it = 0; it < 20; ++it) {
        RMat k = rs.kernel(m);
        RMat g = rs.group(m);
        if (!m.in_K(k)) ++f_in;
        if (!m.in_P(k)) ++f_in;
        if (!m.in_K(g * k * inverse(g))) ++f_normal;
        RMat kb = HomogeneousModel::base_block(k);
        for (int p = 0; p < 10; ++p) {
            std::vector<Rational> xb(n + 1);
            for (auto& v : xb) v = rs.small();
            if (std::all_of(xb.begin(), xb.end(), [](const Rational& r) { return r == 0; })) xb[0] = 1;
            if (!projectively_equal(kb * xb, xb)) ++f_triv;
        }
        // P element: random G with omega cleared
        RMat pe = rs.group(m);
        for (int i = 1; i <= n; ++i) pe(i, n + 1) = 0;
        if (m.in_G(pe)) {
            std::vector<Rational> origin(n + 1, Rational(0));
            origin[n] = 1;
            if (!projectively_equal(HomogeneousModel::base_block(pe) * origin, origin)) ++f_fix;
            RMat pe2 = rs.group(m);
            for (int i = 1; i <= n; ++i) pe2(i, n + 1) = 0;
            if (m.in_G(pe2) && !m.in_P(pe * pe2)) ++f_clos;
        }
        if (!m.in_G(g * rs.group(m))) ++f_clos;
        // k(t) = 1 + t X with X = [[0, c, c0], [0, 0, 0], [0, 0, 0]]
        std::vector<Rational> c(n + 1);
        for (auto& v : c) v = rs.small();
        const Rational t1 = rs.small(), t2 = rs.small();
        auto kt = [&](const Rational& t) {
            RMat r = RMat::identity(n + 2);
            for (int j = 0; j <= n; ++j) r(0, j + 1) = t * c[j];
            return r;
        };
        if (!(kt(t1) * kt(t2) == kt(t1 + t2)) || !m.in_K(kt(t1))) ++f_one;
    }
    count(normal, 0, f_normal);
    count(trivial, 0, f_triv);
    count(inP, 0, f_in);
    count(fixes, 0, f_fix);
    count(closure, 0, f_clos);
    count(oneparam, 0, f_one);
    rep.parts = {normal, trivial, inP, fixes, closure, oneparam};
    for (auto& p : rep.parts) p.anchor = rep.anchor;
    return rep;
}

CheckReport orbit_invariance_check(const HomogeneousModel& m, int elements, unsigned seed) {
    RationalSampler rs(seed);
    CheckReport rep;
    rep.id = "orbit_invariance";
    rep.statement = "orbit labels and the quadratic form 2 x_0 x_+ + eta(x, x) are invariant under the Poincare subgroup, "
                    "which fixes [I]";
    rep.anchor = "n=" + std::to_string(m.n);
    rep.tolerance = 0.0;
    std::vector<std::vector<Rational>> pts;
    for (Orbit o : {Orbit::Interior, Orbit::Ti, Orbit::Scri, Orbit::Spi})
        for (int k = 0; k < 3; ++k) pts.push_back(rs.point(m, o));
    std::vector<Rational> I(m.size(), Rational(0));
    I[0] = 1;
    int f_label = 0, f_q = 0, f_group = 0;
    for (int e = 0; e < elements; ++e) {
        RMat g = rs.poincare(m);
        RMat A = HomogeneousModel::base_block(g);
        RMat L(m.n);
        for (int i = 0; i < m.n; ++i)
            for (int j = 0; j < m.n; ++j) L(i, j) = A(i, j);
        if (!m.is_lorentz(L) || !m.in_G(g)) ++f_group;
        if (!projectively_equal(g * I, I)) ++f_group;
        for (const auto& x : pts) {
            const auto y = g * x;
            if (orbit_classify(m, y) != orbit_classify(m, x)) ++f_label;
            if (m.quadratic(y) != m.quadratic(x)) ++f_q;
        }
    }
    CheckReport lab = sub("labels", "orbit_classify(g x) = orbit_classify(x)");
    CheckReport quad = sub("quadratic_form", "Q(g x) = Q(x)");
    CheckReport grp = sub("poincare_subgroup", "sampled elements are Lorentz in the A block, lie in G and fix [I]");
    count(lab, 0, f_label);
    count(quad, 0, f_q);
    count(grp, 0, f_group);
    rep.parts = {lab, quad, grp};
    for (auto& p : rep.parts) p.anchor = rep.anchor;
    return rep;
}

CheckReport fibration_check(const HomogeneousModel& m, int points, unsigned seed) {
    RationalSampler rs(seed);
    CheckReport rep;
    rep.id = "fibration";
    rep.statement = "RP^(n+1) minus a point fibres over RP^n: R x M -> M, Ti -> H, Scri -> S, Spi -> dS";
    rep.anchor = "n=" + std::to_string(m.n);
    rep.tolerance = 0.0;
    const Orbit all[] = {Orbit::Interior, Orbit::Ti, Orbit::Scri, Orbit::Spi};
    int f_base = 0, f_fibre = 0, f_equi = 0, f_sample = 0;
    for (int p = 0; p < points; ++p) {
        const Orbit o = all[p % 4];
        auto x = rs.point(m, o);
        if (orbit_classify(m, x) != o) ++f_sample;
        if (base_classify(m, project(x)) != base_of(orbit_classify(m, x))) ++f_base;
        auto y = x;
        y[0] += rs.nonzero();
        if (orbit_classify(m, y) != orbit_classify(m, x) && o != Orbit::Interior) ++f_fibre;
        if (base_classify(m, project(y)) != base_classify(m, project(x))) ++f_fibre;
        RMat g = (p % 2 == 0) ? rs.poincare(m) : rs.group(m);
        if (!projectively_equal(project(g * x), HomogeneousModel::base_block(g) * project(x))) ++f_equi;
    }
    CheckReport s = sub("samples", "sampled points lie in the intended orbit");
    CheckReport b = sub("base_orbit", "the projection lands in the matching base orbit");
    CheckReport f = sub("fibres", "labels are constant along the lines through [I]");
    CheckReport e = sub("equivariance", "projection intertwines the actions of G on RP^(n+1) and RP^n");
    count(s, 0, f_sample);
    count(b, 0, f_base);
    count(f, 0, f_fibre);
    count(e, 0, f_equi);
    rep.parts = {s, b, f, e};
    for (auto& p : rep.parts) p.anchor = rep.anchor;
    return rep;
}

CheckReport maurer_cartan_check(const HomogeneousModel& m, int order) {
    const int n = m.n;
    const int N = n + 2;
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
    std::vector<double> anchor(n);
    for (int i = 0; i < n; ++i) anchor[i] = 0.1 * (i + 1);
    Context ctx(names, -1, anchor, order + 1);
    CheckReport rep;
    rep.id = "maurer_cartan";
    rep.statement = "the Maurer-Cartan form of G pulled back by a local section of G -> G/P is g-valued and flat";
    rep.anchor = anchor_label(ctx);
    // s(x) = [[1, chi(x), chi0(x)], [0, 1 + B(x), x], [0, Ups(x), 1]]
    Mat s(N * N, ctx.zero());
    s[0] = ctx.constant(1.0);
    Series sum = ctx.zero();
    for (int i = 0; i < n; ++i) sum += ctx.coord(i);
    s[0 * N + N - 1] = sum * 0.2;
    s[(N - 1) * N + N - 1] = ctx.constant(1.0);
    for (int i = 0; i < n; ++i) {
        const Series& x = ctx.coord(i);
        s[0 * N + i + 1] = x * 0.3 + x * x * 0.1;
        s[(i + 1) * N + N - 1] = x;
        s[(N - 1) * N + i + 1] = x * 0.5;
        for (int j = 0; j < n; ++j) s[(i + 1) * N + j + 1] = (i == j ? ctx.constant(1.0) : ctx.zero()) + x * ctx.coord(j) * 0.1;
    }
    Mat si = inverse(s, N);
    auto mul = [&](const Mat& a, const Mat& b) {
        Mat r(N * N, ctx.zero());
        for (int i = 0; i < N; ++i)
            for (int k = 0; k < N; ++k)
                for (int j = 0; j < N; ++j) r[i * N + j] += a[i * N + k] * b[k * N + j];
        return r;
    };
    std::vector<Mat> theta;
    for (int a = 0; a < n; ++a) {
        Mat ds(N * N);
        for (int i = 0; i < N * N; ++i) ds[i] = s[i].partial(a);
        theta.push_back(mul(si, ds));
    }
    CheckReport alg = sub("g_valued", "s^-1 ds has vanishing first column");
    alg.tolerance = 1e-12;
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < N; ++i) add_residuals(alg, theta[a][i * N + 0], 0, order - 1);
    CheckReport flat = sub("flat", "d theta + theta ^ theta = 0");
    flat.tolerance = 1e-12;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            Mat ab = mul(theta[a], theta[b]);
            Mat ba = mul(theta[b], theta[a]);
            for (int i = 0; i < N * N; ++i)
                add_residuals(flat, theta[b][i].partial(a) - theta[a][i].partial(b) + ab[i] - ba[i], 0, order - 1);
        }
    alg.anchor = flat.anchor = rep.anchor;
    rep.parts = {alg, flat};
    return rep;
}

}  // namespace projtrac
