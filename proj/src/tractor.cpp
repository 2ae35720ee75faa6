#include "projtrac/tractor.hpp"

namespace projtrac {

Field make_field(const Context& ctx, std::vector<Slot> slots, const std::vector<Series>& data, Rational weight) {
    Field f(ctx, std::move(slots), std::move(weight));
    if (data.size() != f.size()) throw Error(ErrorCode::ChartMismatch, "component count does not match slots");
    for (size_t i = 0; i < f.size(); ++i) f[i] = data[i];
    return f;
}

Field splitting_change(const Field& t, const std::vector<Series>& ups) {
    const int n = t.n();
    Field r = t;
    const size_t N = t.size();
    for (size_t p = 0; p < t.slots().size(); ++p) {
        const Slot s = t.slots()[p];
        if (s == Slot::Lower || s == Slot::Upper) continue;
        const int off = (s == Slot::ExtLower || s == Slot::ExtUpper) ? 1 : 0;
        const bool down = s == Slot::CoTractor || s == Slot::ExtLower;
        Field src = r;
        for (size_t I = 0; I < N; ++I) {
            std::vector<int> idx = src.unflat(I);
            const int i = idx[p] - off;
            if (i < 0) continue;
            if (down && i >= 1) {
                // mu_a + Upsilon_a sigma
                idx[p] = off;
                r[I] = src[I] + ups[i - 1] * src.at(idx);
            } else if (!down && i == 0) {
                // rho - Upsilon_a xi^a
                Series acc = src[I];
                for (int a = 0; a < n; ++a) {
                    idx[p] = off + 1 + a;
                    acc -= ups[a] * src.at(idx);
                }
                r[I] = acc;
            }
        }
    }
    return r;
}

Field thomas_d(const Field& t, const Connection& conn, const Context& ctx) {
    const int n = t.n();
    Field dt = covariant_derivative(t, conn, ctx);
    std::vector<Slot> slots = {Slot::CoTractor};
    slots.insert(slots.end(), t.slots().begin(), t.slots().end());
    Field r(ctx, slots, t.weight() - 1);
    const size_t N = t.size();
    const double w = static_cast<double>(t.weight());
    for (size_t I = 0; I < N; ++I) {
        r[I] = t[I] * w;
        for (int a = 0; a < n; ++a) r[(a + 1) * N + I] = dt[a * N + I];
    }
    return r;
}

Field tractor_curvature(const CurvaturePack& curv, const Context& ctx) {
    const int n = curv.n;
    Field om(ctx, {Slot::Lower, Slot::Lower, Slot::Tractor, Slot::CoTractor});
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int d = 0; d < n; ++d) {
                om.at({a, b, 0, d + 1}) = -curv.cotton[(a * n + b) * n + d];
                for (int c = 0; c < n; ++c) om.at({a, b, c + 1, d + 1}) = curv.weyl[((a * n + b) * n + c) * n + d];
            }
    return om;
}

Field metrisability_tractor(const Field& zeta, const Connection& conn, const Context& ctx) {
    const int n = ctx.dim();
    Field dz = covariant_derivative(zeta, conn, ctx);
    Field ddz = covariant_derivative(dz, conn, ctx);
    Field H(ctx, {Slot::Tractor, Slot::Tractor});
    Series pz = ctx.zero(), div2 = ctx.zero();
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            pz += conn.schouten[a * n + b] * zeta.at({a, b});
            div2 += ddz.at({a, b, a, b});
        }
    H.at({0, 0}) = pz * (1.0 / n) + div2 * (1.0 / (n * (n + 1.0)));
    for (int b = 0; b < n; ++b) {
        Series lam = dz.at({0, 0, b});
        for (int c = 1; c < n; ++c) lam += dz.at({c, c, b});
        lam *= -1.0 / (n + 1);
        H.at({0, b + 1}) = lam;
        H.at({b + 1, 0}) = lam;
        for (int a = 0; a < n; ++a) H.at({a + 1, b + 1}) = zeta.at({a, b});
    }
    return H;
}

Series det_tractor(const Field& h) {
    const int m = h.dims()[0];
    Mat M(m * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) M[i * m + j] = h.at({i, j});
    return det(M, m);
}

namespace {

bool dual(Slot a, Slot b) {
    auto pair = [](Slot x, Slot y) { return x == y; };
    return (pair(a, Slot::Lower) && pair(b, Slot::Upper)) || (pair(a, Slot::Upper) && pair(b, Slot::Lower)) ||
           (pair(a, Slot::CoTractor) && pair(b, Slot::Tractor)) || (pair(a, Slot::Tractor) && pair(b, Slot::CoTractor)) ||
           (pair(a, Slot::ExtLower) && pair(b, Slot::ExtUpper)) || (pair(a, Slot::ExtUpper) && pair(b, Slot::ExtLower));
}

}  // namespace

Field contract(const Field& a, const Field& b) {
    if (a.slots().empty() || b.slots().empty() || !dual(a.slots().back(), b.slots().front()))
        throw Error(ErrorCode::ChartMismatch, "contraction of non-dual slots");
    const int m = a.dims().back();
    std::vector<Slot> slots(a.slots().begin(), a.slots().end() - 1);
    slots.insert(slots.end(), b.slots().begin() + 1, b.slots().end());
    const size_t NA = a.size() / m, NB = b.size() / m;
    std::vector<Series> out(NA * NB);
    for (size_t i = 0; i < NA; ++i)
        for (size_t j = 0; j < NB; ++j) {
            Series acc;
            bool have = false;
            for (int k = 0; k < m; ++k) {
                const Series& x = a[i * m + k];
                const Series& y = b[k * NB + j];
                if (x.is_zero() || y.is_zero()) continue;
                acc = have ? acc + x * y : x * y;
                have = true;
            }
            out[i * NB + j] = have ? acc : a[0] * 0.0;
        }
    return Field::from_parts(a.n(), std::move(slots), a.weight() + b.weight(), std::move(out));
}

}  // namespace projtrac
