#include "projtrac/series.hpp"

#include <algorithm>
#include <cmath>

namespace projtrac {

namespace {

// The part of the body free of the boundary variable is negligible when each of its
// coefficients is small against the largest body coefficient of the same degree.
bool rho0_negligible(const Jet& body, int r, double tol) {
    const Basis& B = body.basis();
    std::vector<Real> scale(body.order() + 1, 1.0);
    for (size_t i = 0; i < body.size(); ++i) {
        Real& s = scale[B.degree(i)];
        s = std::max(s, std::abs(body[i]));
    }
    for (size_t i = 0; i < body.size(); ++i)
        if (B.exponents(i)[r] == 0 && std::abs(body[i]) > tol * scale[B.degree(i)]) return false;
    return true;
}

Series from_jet_fn(const Series& a, Jet (*fn)(const Jet&)) {
    Jet j = a.to_jet();
    return Series(fn(j));
}

}  // namespace

bool Series::is_negligible(double tol) const {
    return body_.max_abs() <= tol;
}

Series Series::normalized(double tol) const {
    const int r = boundary();
    if (r < 0) return *this;
    Series s = *this;
    while (s.body_.order() > 0 && rho0_negligible(s.body_, r, tol)) {
        s.body_ = s.body_.shift_down(r);
        s.v_ += 1;
    }
    return s;
}

double Series::leading_constant() const {
    if (v_ > 0) return 0.0;
    return body_.constant_term();
}

Series operator+(const Series& a, const Series& b) {
    const int r = a.boundary();
    if (r < 0 || a.v_ == b.v_) {
        const int K = std::min(a.order(), b.order());
        Jet sum = a.body_.truncate(K);
        sum += b.body_.truncate(K);
        Series out(std::move(sum), a.v_);
        return r < 0 ? out : out.normalized(Series::cancel_tol);
    }
    const Series& lo = a.v_ < b.v_ ? a : b;
    const Series& hi = a.v_ < b.v_ ? b : a;
    const int d = hi.v_ - lo.v_;
    const int K = std::min(lo.order(), hi.order() + d);
    Jet sum = lo.body_.truncate(K);
    sum += hi.body_.truncate(std::max(0, std::min(hi.order(), K - d))).shift_up(r, d, K).truncate(K);
    return Series(std::move(sum), lo.v_).normalized(Series::cancel_tol);
}

Series operator+(const Series& a, double s) {
    if (s == 0.0) return a;
    Series c = Series::constant(a.basis_ptr(), std::max(0, a.precision()), s);
    if (a.precision() < 0) throw Error(ErrorCode::OrderExhausted, "adding a constant to a series without precision");
    return a + c;
}

Series operator*(const Series& a, const Series& b) {
    const int K = std::min(a.order(), b.order());
    return Series(a.body_.truncate(K) * b.body_.truncate(K), a.v_ + b.v_);
}

Series Series::inverse() const {
    Series n = normalized();
    if (std::abs(n.body_.constant_term()) <= default_tol)
        throw Error(ErrorCode::DivisionByZeroConstantTerm, "series vanishes at the anchor");
    return Series(n.body_.inverse(), -n.v_);
}

Series operator/(const Series& a, const Series& b) {
    return a * b.inverse();
}

Series Series::partial(int var) const {
    const int r = boundary();
    if (var == r && r >= 0) {
        // d/drho (rho^v B) = rho^(v-1) (v B + rho dB/drho): an Euler operator on the body
        Jet nb = body_;
        const Basis& B = nb.basis();
        for (size_t i = 0; i < nb.size(); ++i) nb[i] *= static_cast<double>(v_ + B.exponents(i)[r]);
        return Series(std::move(nb), v_ - 1);
    }
    if (r >= 0 && order() == 0) {
        // only rho^v * const is known; its y-derivative is known to vanish through degree v-1
        return Series(Jet(body_.basis_ptr(), 0), v_ - 1);
    }
    return Series(body_.partial(var), v_);
}

Series Series::truncate_precision(int p) const {
    const int K = p - v_;
    if (K >= order()) return *this;
    if (K < 0) throw Error(ErrorCode::OrderExhausted, "truncation below valuation");
    return Series(body_.truncate(K), v_);
}

Jet Series::to_jet(double tol) const {
    Series n = normalized(tol);
    if (n.v_ < 0) {
        if (n.order() == 0 && std::abs(n.body_.constant_term()) <= tol) {
            if (n.precision() < 0) throw Error(ErrorCode::OrderExhausted, "series known only below degree 0");
            return Jet(n.basis_ptr(), n.precision());
        }
        throw Error(ErrorCode::PoleDetected, "negative power of the boundary variable survives (valuation " +
                                                 std::to_string(n.v_) + ")");
    }
    if (n.v_ == 0) return n.body_;
    return n.body_.shift_up(boundary(), n.v_, n.precision());
}

Jet Series::restrict(double tol) const {
    if (boundary() < 0) throw Error(ErrorCode::NoBoundaryVariable, "interior anchor");
    return restrict_to_boundary(to_jet(tol));
}

double Series::degree_norm(int d) const {
    const int k = d - v_;
    if (k < 0 || k > order()) return 0.0;
    return projtrac::degree_norm(body_, k);
}

Jet Series::rho_coefficient(int k) const {
    const int r = boundary();
    if (r < 0) throw Error(ErrorCode::NoBoundaryVariable, "interior anchor");
    const int a = k - v_;
    if (a > order()) throw Error(ErrorCode::OrderExhausted, "rho coefficient beyond precision");
    Jet src = body_;
    if (a < 0) return restrict_to_boundary(Jet(src.basis_ptr(), 0));
    for (int s = 0; s < a; ++s) src = src.shift_down(r);
    return restrict_to_boundary(src);
}

Series sqrt(const Series& a) {
    Series n = a.normalized();
    if (n.valuation() % 2 != 0) throw Error(ErrorCode::NonPositiveConstantTerm, "sqrt of odd power of rho");
    return Series(sqrt(n.body()), n.valuation() / 2);
}

Series pow(const Series& a, double p) {
    Series n = a.normalized();
    const double vp = n.valuation() * p;
    if (std::abs(vp - std::round(vp)) > 1e-12)
        throw Error(ErrorCode::NonPositiveConstantTerm, "non-integral power of rho");
    return Series(pow(n.body(), p), static_cast<int>(std::lround(vp)));
}

Series abs(const Series& a) {
    Series n = a.normalized();
    const double c = n.body().constant_term();
    if (c == 0.0) throw Error(ErrorCode::DivisionByZeroConstantTerm, "abs of series vanishing at anchor");
    return c > 0 ? a : -a;
}

Series exp(const Series& a) { return from_jet_fn(a, &exp); }
Series log(const Series& a) {
    Series n = a.normalized();
    if (n.valuation() != 0) throw Error(ErrorCode::NonPositiveConstantTerm, "log of series vanishing at anchor");
    return Series(log(n.body()));
}
Series sin(const Series& a) { return from_jet_fn(a, &sin); }
Series cos(const Series& a) { return from_jet_fn(a, &cos); }
Series sinh(const Series& a) { return from_jet_fn(a, &sinh); }
Series cosh(const Series& a) { return from_jet_fn(a, &cosh); }

}  // namespace projtrac
