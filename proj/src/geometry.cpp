#include "projtrac/geometry.hpp"

#include <algorithm>
#include <map>

namespace projtrac {

Context::Context(std::vector<std::string> names, int boundary, std::vector<double> anchor, int order)
    : names_(std::move(names)), boundary_(boundary), anchor_(std::move(anchor)), order_(order) {
    const int n = dim();
    if (static_cast<int>(anchor_.size()) != n)
        throw Error(ErrorCode::ChartMismatch, "anchor has " + std::to_string(anchor_.size()) + " coordinates, chart has " +
                                                  std::to_string(n));
    const bool on_boundary = boundary_ >= 0 && anchor_[boundary_] == 0.0;
    basis_ = Basis::get(names_, on_boundary ? boundary_ : -1, order_);
    for (int i = 0; i < n; ++i) {
        if (on_boundary && i == boundary_)
            coords_.emplace_back(Jet::constant(basis_, order_, 1.0), 1);
        else
            coords_.emplace_back(Jet::variable(basis_, order_, i, anchor_[i]));
    }
}

namespace {

// Laplace expansion with memoized minors over column masks; rows are consumed in order.
Series det_rec(const Mat& m, int n, int row, unsigned mask, std::map<unsigned, Series>& memo, const Series& one) {
    if (row == n) return one;
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    Series acc;
    bool have = false;
    int sign_pos = 0;
    for (int j = 0; j < n; ++j) {
        if (mask & (1u << j)) continue;
        const Series& e = m[row * n + j];
        if (!e.is_zero()) {
            Series term = e * det_rec(m, n, row + 1, mask | (1u << j), memo, one);
            if (sign_pos % 2) term = -term;
            acc = have ? acc + term : term;
            have = true;
        }
        ++sign_pos;
    }
    if (!have) acc = one * 0.0;
    memo.emplace(mask, acc);
    return acc;
}

}  // namespace

Series det(const Mat& m, int n) {
    if (n == 0) throw Error(ErrorCode::SingularMetric, "empty matrix");
    std::map<unsigned, Series> memo;
    // the unit carries the widest precision so it never limits the products
    int prec = 0;
    for (const auto& e : m) prec = std::max(prec, e.order());
    Series one = Series::constant(m[0].basis_ptr(), prec, 1.0);
    return det_rec(m, n, 0, 0u, memo, one);
}

Mat inverse(const Mat& m, int n) {
    Series d = det(m, n);
    Series dinv;
    try {
        dinv = d.inverse();
    } catch (const Error&) {
        throw Error(ErrorCode::SingularMetric, "matrix not invertible at anchor");
    }
    if (n == 1) return {dinv};
    Mat inv(n * n);
    Mat minor((n - 1) * (n - 1));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            int p = 0;
            for (int r = 0; r < n; ++r) {
                if (r == i) continue;
                for (int c = 0; c < n; ++c) {
                    if (c == j) continue;
                    minor[p++] = m[r * n + c];
                }
            }
            Series cof = det(minor, n - 1) * dinv;
            inv[j * n + i] = ((i + j) % 2) ? -cof : cof;
        }
    }
    return inv;
}

Context Chart::context(const std::vector<double>& anchor, int order) const {
    if (static_cast<int>(anchor.size()) != dim())
        throw Error(ErrorCode::ChartMismatch, "anchor dimension does not match chart " + id);
    if (check_anchor) check_anchor(anchor);
    return Context(coords, boundary, anchor, order);
}

int slot_dim(Slot s, int n) {
    switch (s) {
    case Slot::Lower:
    case Slot::Upper: return n;
    case Slot::CoTractor:
    case Slot::Tractor: return n + 1;
    case Slot::ExtLower:
    case Slot::ExtUpper: return n + 2;
    }
    return n;
}

Field::Field(const Context& ctx, std::vector<Slot> slots, Rational weight)
    : n_(ctx.dim()), slots_(std::move(slots)), weight_(std::move(weight)) {
    size_t total = 1;
    for (Slot s : slots_) {
        dims_.push_back(slot_dim(s, n_));
        total *= dims_.back();
    }
    data_.assign(total, ctx.zero());
}

Field Field::from_parts(int n, std::vector<Slot> slots, Rational weight, std::vector<Series> data) {
    Field f;
    f.n_ = n;
    f.slots_ = std::move(slots);
    f.weight_ = std::move(weight);
    size_t total = 1;
    for (Slot s : f.slots_) {
        f.dims_.push_back(slot_dim(s, n));
        total *= f.dims_.back();
    }
    if (data.size() != total) throw Error(ErrorCode::ChartMismatch, "component count does not match slots");
    f.data_ = std::move(data);
    return f;
}

size_t Field::flat(const int* idx) const {
    size_t f = 0;
    for (size_t p = 0; p < dims_.size(); ++p) f = f * dims_[p] + idx[p];
    return f;
}

std::vector<int> Field::unflat(size_t i) const {
    std::vector<int> idx(dims_.size());
    for (size_t p = dims_.size(); p-- > 0;) {
        idx[p] = static_cast<int>(i % dims_[p]);
        i /= dims_[p];
    }
    return idx;
}

Field& Field::operator+=(const Field& o) {
    if (o.dims_ != dims_) throw Error(ErrorCode::ChartMismatch, "field shapes differ");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

Field& Field::operator-=(const Field& o) {
    if (o.dims_ != dims_) throw Error(ErrorCode::ChartMismatch, "field shapes differ");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

Field& Field::operator*=(double s) {
    for (auto& x : data_) x *= s;
    return *this;
}

Field Field::times(const Series& s) const {
    Field r = *this;
    for (auto& x : r.data_) x = x * s;
    return r;
}

double Field::degree_norm(int d) const {
    double m = 0.0;
    for (const auto& x : data_) m = std::max(m, x.degree_norm(d));
    return m;
}

int Field::valuation() const {
    int v = 1 << 20;
    for (const auto& x : data_) {
        Series s = x.normalized();
        if (s.order() == 0 && s.body().constant_term() == 0.0) continue;
        v = std::min(v, s.valuation());
    }
    return v;
}

int Field::precision() const {
    int p = 1 << 20;
    for (const auto& x : data_) p = std::min(p, x.precision());
    return p;
}

Connection connection_from_christoffels(Mat gamma, int n) {
    Connection c;
    c.n = n;
    c.gamma = std::move(gamma);
    c.trace.resize(n);
    for (int a = 0; a < n; ++a) {
        Series t = c.G(0, a, 0);
        for (int b = 1; b < n; ++b) t += c.G(b, a, b);
        c.trace[a] = t;
    }
    return c;
}

Connection levi_civita(const Mat& g, const Context& ctx) {
    const int n = ctx.dim();
    Mat ginv = inverse(g, n);
    // dg[(e*n + a)*n + b] = d_e g_ab
    Mat dg(n * n * n);
    for (int e = 0; e < n; ++e)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) dg[(e * n + a) * n + b] = g[a * n + b].partial(e);
    Mat gamma(n * n * n);
    for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
            // lowered: Gamma_dab = (d_a g_bd + d_b g_ad - d_d g_ab)/2
            std::vector<Series> low(n);
            for (int d = 0; d < n; ++d)
                low[d] = (dg[(a * n + b) * n + d] + dg[(b * n + a) * n + d] - dg[(d * n + a) * n + b]) * 0.5;
            for (int c = 0; c < n; ++c) {
                Series s = ginv[c * n] * low[0];
                for (int d = 1; d < n; ++d) s += ginv[c * n + d] * low[d];
                gamma[(c * n + a) * n + b] = s;
                gamma[(c * n + b) * n + a] = s;
            }
        }
    }
    return connection_from_christoffels(std::move(gamma), n);
}

Connection offset(const Connection& conn, const std::vector<Series>& ups) {
    const int n = conn.n;
    Mat gamma = conn.gamma;
    for (int c = 0; c < n; ++c)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                Series& g = gamma[(c * n + a) * n + b];
                if (c == a) g += ups[b];
                if (c == b) g += ups[a];
            }
    return connection_from_christoffels(std::move(gamma), n);
}

Field gradient(const Series& s, const Context& ctx) {
    Field f(ctx, {Slot::Lower});
    for (int c = 0; c < ctx.dim(); ++c) f[c] = s.partial(c);
    return f;
}

namespace {

Field field_from(const Context& ctx, std::vector<Slot> slots, const std::vector<Series>& data) {
    Field f(ctx, std::move(slots));
    for (size_t i = 0; i < f.size(); ++i) f[i] = data[i];
    return f;
}

}  // namespace

CurvaturePack curvature(const Connection& conn, const Context& ctx) {
    const int n = conn.n;
    if (n < 2) throw Error(ErrorCode::ChartMismatch, "curvature needs dimension >= 2");
    CurvaturePack cp;
    cp.n = n;
    // dG[((a*n + c)*n + b)*n + d] = d_a Gamma^c_bd
    std::vector<Series> dG(n * n * n * n);
    for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c)
            for (int b = 0; b < n; ++b)
                for (int d = b; d < n; ++d) {
                    Series s = conn.G(c, b, d).partial(a);
                    dG[((a * n + c) * n + b) * n + d] = s;
                    dG[((a * n + c) * n + d) * n + b] = s;
                }
    // GG[((a*n + c)*n + b)*n + d] = Gamma^c_ae Gamma^e_bd
    std::vector<Series> GG(n * n * n * n);
    for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c)
            for (int b = 0; b < n; ++b)
                for (int d = 0; d < n; ++d) {
                    Series s = conn.G(c, a, 0) * conn.G(0, b, d);
                    for (int e = 1; e < n; ++e) s += conn.G(c, a, e) * conn.G(e, b, d);
                    GG[((a * n + c) * n + b) * n + d] = s;
                }
    cp.riemann.assign(n * n * n * n, ctx.zero());
    auto R = [&](int a, int b, int c, int d) -> Series& { return cp.riemann[((a * n + b) * n + c) * n + d]; };
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    Series s = dG[((a * n + c) * n + b) * n + d] - dG[((b * n + c) * n + a) * n + d] +
                               GG[((a * n + c) * n + b) * n + d] - GG[((b * n + c) * n + a) * n + d];
                    R(a, b, c, d) = s;
                    R(b, a, c, d) = -s;
                }
    cp.ricci.assign(n * n, ctx.zero());
    for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d) {
            Series s = R(0, b, 0, d);
            for (int a = 1; a < n; ++a) s += R(a, b, a, d);
            cp.ricci[b * n + d] = s;
        }
    cp.beta.assign(n * n, ctx.zero());
    cp.schouten.assign(n * n, ctx.zero());
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            cp.beta[a * n + b] = (cp.ricci[a * n + b] - cp.ricci[b * n + a]) * (-1.0 / (n + 1));
        }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            cp.schouten[a * n + b] = (cp.ricci[a * n + b] + cp.beta[a * n + b]) * (1.0 / (n - 1));
    cp.weyl = cp.riemann;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    Series& w = cp.weyl[((a * n + b) * n + c) * n + d];
                    if (c == a) w -= cp.schouten[b * n + d];
                    if (c == b) w += cp.schouten[a * n + d];
                    if (c == d) w -= cp.beta[a * n + b];
                }
    Field P = field_from(ctx, {Slot::Lower, Slot::Lower}, cp.schouten);
    Field dP = covariant_derivative(P, conn, ctx);
    cp.cotton.resize(n * n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int d = 0; d < n; ++d) cp.cotton[(a * n + b) * n + d] = dP.at({a, b, d}) - dP.at({b, a, d});
    return cp;
}

Connection with_schouten(Connection conn, const CurvaturePack& curv) {
    conn.schouten = curv.schouten;
    return conn;
}

Field covariant_derivative(const Field& f, const Connection& conn, const Context& ctx) {
    const int n = conn.n;
    if (f.n() != n || ctx.dim() != n) throw Error(ErrorCode::ChartMismatch, "field and connection dimensions differ");
    bool needs_p = false, needs_ups = false;
    for (Slot s : f.slots()) {
        if (s != Slot::Lower && s != Slot::Upper) needs_p = true;
        if (s == Slot::ExtLower || s == Slot::ExtUpper) needs_ups = true;
    }
    if (needs_p && conn.schouten.empty())
        throw Error(ErrorCode::ChartMismatch, "tractor derivative needs the Schouten tensor");
    if (needs_ups && conn.upsilon.empty())
        throw Error(ErrorCode::GaugeMismatch, "extended derivative needs an extended connection");

    std::vector<Slot> rslots = {Slot::Lower};
    rslots.insert(rslots.end(), f.slots().begin(), f.slots().end());
    Field r(ctx, rslots, f.weight());
    const double wfac = static_cast<double>(f.weight()) / (n + 1);
    const size_t N = f.size();
    const int rank = static_cast<int>(f.slots().size());

    for (int c = 0; c < n; ++c) {
        const Series trn = conn.trace[c] * (1.0 / (n + 1));
        // tractor connection matrix C_c[alpha][beta]; null entries are zero
        std::vector<const Series*> C((n + 1) * (n + 1), nullptr);
        std::vector<Series> Cstore((n + 1) * (n + 1));
        Series minus_one = ctx.constant(-1.0);
        if (needs_p) {
            Cstore[0] = trn;
            C[0] = &Cstore[0];
            Cstore[c + 1] = minus_one;
            C[c + 1] = &Cstore[c + 1];
            for (int a = 0; a < n; ++a) {
                Cstore[(a + 1) * (n + 1)] = conn.schouten[c * n + a];
                C[(a + 1) * (n + 1)] = &Cstore[(a + 1) * (n + 1)];
                for (int b = 0; b < n; ++b) {
                    Series e = -conn.G(b, c, a);
                    if (a == b) e += trn;
                    Cstore[(a + 1) * (n + 1) + b + 1] = e;
                    C[(a + 1) * (n + 1) + b + 1] = &Cstore[(a + 1) * (n + 1) + b + 1];
                }
            }
            for (auto& p : C)
                if (p && p->is_zero()) p = nullptr;
        }
        for (size_t I = 0; I < N; ++I) {
            std::vector<int> idx = f.unflat(I);
            Series val = f[I].partial(c);
            if (wfac != 0.0 && !f[I].is_zero()) val += trn * f[I] * static_cast<double>(f.weight());
            for (int p = 0; p < rank; ++p) {
                const int i = idx[p];
                std::vector<int> j = idx;
                auto comp = [&](int k) -> const Series& {
                    j[p] = k;
                    return f.at(j);
                };
                auto add = [&](const Series& coef, const Series& comp_val, double sign) {
                    if (comp_val.is_zero()) return;
                    Series t = coef * comp_val;
                    if (sign < 0) val -= t;
                    else val += t;
                };
                switch (f.slots()[p]) {
                case Slot::Upper:
                    for (int k = 0; k < n; ++k) add(conn.G(i, c, k), comp(k), 1.0);
                    break;
                case Slot::Lower:
                    for (int k = 0; k < n; ++k) add(conn.G(k, c, i), comp(k), -1.0);
                    break;
                case Slot::CoTractor:
                    for (int k = 0; k <= n; ++k)
                        if (C[i * (n + 1) + k]) add(*C[i * (n + 1) + k], comp(k), 1.0);
                    break;
                case Slot::Tractor:
                    for (int k = 0; k <= n; ++k)
                        if (C[k * (n + 1) + i]) add(*C[k * (n + 1) + i], comp(k), -1.0);
                    break;
                case Slot::ExtUpper:
                    if (i == 0) {
                        for (int k = 0; k <= n; ++k) add(conn.upsilon[k * n + c], comp(k + 1), 1.0);
                    } else {
                        for (int k = 0; k <= n; ++k)
                            if (C[k * (n + 1) + i - 1]) add(*C[k * (n + 1) + i - 1], comp(k + 1), -1.0);
                    }
                    break;
                case Slot::ExtLower:
                    if (i > 0) {
                        for (int k = 0; k <= n; ++k)
                            if (C[(i - 1) * (n + 1) + k]) add(*C[(i - 1) * (n + 1) + k], comp(k + 1), 1.0);
                        add(conn.upsilon[(i - 1) * n + c], comp(0), -1.0);
                    }
                    break;
                }
            }
            r[static_cast<size_t>(c) * N + I] = val;
        }
    }
    return r;
}

Series detd(const Mat& h, int n) { return det(h, n); }

}  // namespace projtrac
