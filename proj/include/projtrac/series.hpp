#pragma once
#include <vector>

#include "projtrac/jet.hpp"

namespace projtrac {

// rho^v * body at a boundary anchor, where rho is the basis' boundary variable and
// body is a jet in all variables. Terms are known through total degree v + order.
// Away from the boundary the basis has no boundary variable and v stays 0.
class Series {
public:
    Series() = default;
    explicit Series(Jet body, int v = 0) : v_(v), body_(std::move(body)) {
        if (v_ != 0 && body_.basis().boundary() < 0)
            throw Error(ErrorCode::NoBoundaryVariable, "shifted series without boundary variable");
    }
    static Series constant(const BasisPtr& b, int order, double c) { return Series(Jet::constant(b, order, c)); }

    int valuation() const { return v_; }
    int order() const { return body_.order(); }
    int precision() const { return v_ + body_.order(); }
    const Jet& body() const { return body_; }
    const BasisPtr& basis_ptr() const { return body_.basis_ptr(); }
    int boundary() const { return body_.basis().boundary(); }
    bool valid() const { return body_.valid(); }

    // Absorb negligible leading rho-powers of the body into the valuation.
    Series normalized(double tol = default_tol) const;
    // Value of the constant term, for v = 0 after normalization; 0 when v > 0.
    double leading_constant() const;

    Series operator-() const { return Series(-body_, v_); }
    Series& operator*=(double s) {
        body_ *= s;
        return *this;
    }
    friend Series operator+(const Series& a, const Series& b);
    friend Series operator-(const Series& a, const Series& b) { return a + (-b); }
    friend Series operator*(const Series& a, const Series& b);
    friend Series operator/(const Series& a, const Series& b);
    friend Series operator*(Series a, double s) { return a *= s; }
    friend Series operator*(double s, Series a) { return a *= s; }
    friend Series operator/(Series a, double s) { return a *= (1.0 / s); }
    friend Series operator+(const Series& a, double s);
    friend Series operator+(double s, const Series& a) { return a + s; }
    friend Series operator-(const Series& a, double s) { return a + (-s); }
    friend Series operator-(double s, const Series& a) { return (-a) + s; }
    Series& operator+=(const Series& o) { return *this = *this + o; }
    Series& operator-=(const Series& o) { return *this = *this - o; }

    Series inverse() const;
    Series partial(int var) const;
    Series truncate_precision(int p) const;

    // As a plain jet (v >= 0 required); throws PoleDetected on a surviving pole.
    Jet to_jet(double tol = default_tol) const;
    // Boundary restriction; throws PoleDetected on a surviving pole.
    Jet restrict(double tol = default_tol) const;

    // Largest |coefficient| among terms of total degree d (counting the rho^v factor).
    double degree_norm(int d) const;
    // Largest |coefficient| over all known terms.
    double max_abs() const { return body_.max_abs(); }
    // True if, after normalization, no negative rho-power survives.
    bool pole_free(double tol = default_tol) const { return normalized(tol).v_ >= 0 || is_negligible(tol); }
    bool is_negligible(double tol = default_tol) const;
    // every stored coefficient exactly zero
    bool is_zero() const {
        for (double c : body_.coefficients())
            if (c != 0.0) return false;
        return true;
    }

    // Coefficient of rho^k as a jet in the remaining variables (truncated consistently).
    Jet rho_coefficient(int k) const;

    // used before division and for pole decisions
    static constexpr double default_tol = 1e-9;
    // applied after every sum to absorb cancelled leading terms
    static constexpr double cancel_tol = 1e-12;

private:
    int v_ = 0;
    Jet body_;
};

Series sqrt(const Series& a);
Series pow(const Series& a, double p);
Series abs(const Series& a);
Series exp(const Series& a);
Series log(const Series& a);
Series sin(const Series& a);
Series cos(const Series& a);
Series sinh(const Series& a);
Series cosh(const Series& a);

}  // namespace projtrac
