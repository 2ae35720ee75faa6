#pragma once
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "projtrac/error.hpp"

namespace projtrac {

using Rational = boost::multiprecision::cpp_rational;

// Monomials in a fixed list of variables, ordered by total degree and then
// lexicographically. The monomials of degree <= K form a prefix, so a jet of
// order K is a prefix of a jet of any higher order.
class Basis {
public:
    static std::shared_ptr<const Basis> get(const std::vector<std::string>& names, int boundary,
                                            int order);

    int nvars() const { return nvars_; }
    const std::vector<std::string>& names() const { return names_; }
    int boundary() const { return boundary_; }
    int max_order() const { return max_order_; }
    int var_index(const std::string& name) const;

    size_t dim(int order) const { return order < 0 ? 0 : dims_[order]; }
    const uint8_t* exponents(size_t i) const { return &exps_[i * nvars_]; }
    int degree(size_t i) const { return degs_[i]; }
    long index(const int* exps) const;

    // k(i, j) = index of monomial_i * monomial_j, stored for j < dim(max_order - deg i).
    const uint32_t* product_row(size_t i) const { return &prod_[prod_off_[i]]; }
    // index of monomial_i / x_v, or -1 when x_v does not divide it
    long lower(size_t i, int v) const { return lower_[i * nvars_ + v]; }
    long raise(size_t i, int v) const { return raise_[i * nvars_ + v]; }

    bool same_variables(const Basis& other) const {
        return this == &other || (names_ == other.names_ && boundary_ == other.boundary_);
    }

private:
    Basis(std::vector<std::string> names, int boundary, int order);
    uint64_t key(const int* exps) const;

    std::vector<std::string> names_;
    int nvars_;
    int boundary_;
    int max_order_;
    std::vector<size_t> dims_;
    std::vector<uint8_t> exps_;
    std::vector<int> degs_;
    std::vector<std::pair<uint64_t, uint32_t>> lookup_;
    std::vector<uint32_t> prod_;
    std::vector<size_t> prod_off_;
    std::vector<long> lower_;
    std::vector<long> raise_;
};

using BasisPtr = std::shared_ptr<const Basis>;

inline BasisPtr wider(const BasisPtr& a, const BasisPtr& b) {
    return a->max_order() >= b->max_order() ? a : b;
}

// Truncated multivariate Taylor series: sum over |alpha| <= order of c_alpha dx^alpha.
template <class T>
class BasicJet {
public:
    BasicJet() = default;
    BasicJet(BasisPtr basis, int order) : basis_(std::move(basis)), order_(order) {
        if (order_ < 0) throw Error(ErrorCode::OrderExhausted, "negative jet order");
        if (order_ > basis_->max_order()) basis_ = Basis::get(basis_->names(), basis_->boundary(), order_);
        c_.assign(basis_->dim(order_), T(0));
    }

    static BasicJet constant(const BasisPtr& basis, int order, T value) {
        BasicJet j(basis, order);
        j.c_[0] = value;
        return j;
    }
    // The coordinate function x_var = at + dx_var.
    static BasicJet variable(const BasisPtr& basis, int order, int var, T at) {
        BasicJet j(basis, order);
        j.c_[0] = at;
        if (order >= 1) j.c_[1 + var] = T(1);
        return j;
    }

    bool valid() const { return static_cast<bool>(basis_); }
    const BasisPtr& basis_ptr() const { return basis_; }
    const Basis& basis() const { return *basis_; }
    int order() const { return order_; }
    size_t size() const { return c_.size(); }
    const T& operator[](size_t i) const { return c_[i]; }
    T& operator[](size_t i) { return c_[i]; }
    const std::vector<T>& coefficients() const { return c_; }
    T constant_term() const { return c_[0]; }

    T coeff(const std::vector<int>& exps) const {
        long idx = basis_->index(exps.data());
        if (idx < 0 || static_cast<size_t>(idx) >= c_.size()) return T(0);
        return c_[idx];
    }

    BasicJet truncate(int k) const {
        if (k > order_) throw Error(ErrorCode::IncompatibleJets, "cannot raise jet order by truncation");
        BasicJet r(basis_, k);
        for (size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = c_[i];
        return r;
    }

    bool compatible(const BasicJet& o) const {
        return basis_ && o.basis_ && basis_->same_variables(*o.basis_) && order_ == o.order_;
    }
    void require_compatible(const BasicJet& o) const {
        if (!compatible(o)) throw Error(ErrorCode::IncompatibleJets, "jets differ in variables or order");
    }

    BasicJet& operator+=(const BasicJet& o) {
        require_compatible(o);
        for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    BasicJet& operator-=(const BasicJet& o) {
        require_compatible(o);
        for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    BasicJet& operator*=(const T& s) {
        for (auto& x : c_) x *= s;
        return *this;
    }
    BasicJet operator-() const {
        BasicJet r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    friend BasicJet operator+(BasicJet a, const BasicJet& b) { return a += b; }
    friend BasicJet operator-(BasicJet a, const BasicJet& b) { return a -= b; }
    friend BasicJet operator*(BasicJet a, const T& s) { return a *= s; }
    friend BasicJet operator*(const T& s, BasicJet a) { return a *= s; }
    friend BasicJet operator+(BasicJet a, const T& s) { a.c_[0] += s; return a; }
    friend BasicJet operator-(BasicJet a, const T& s) { a.c_[0] -= s; return a; }

    friend BasicJet operator*(const BasicJet& a, const BasicJet& b) {
        a.require_compatible(b);
        BasicJet r(wider(a.basis_, b.basis_), a.order_);
        const Basis& B = *r.basis_;
        const int K = a.order_;
        const size_t n = a.c_.size();
        for (size_t i = 0; i < n; ++i) {
            const T& ai = a.c_[i];
            if (ai == T(0)) continue;
            const size_t lim = B.dim(K - B.degree(i));
            const uint32_t* row = B.product_row(i);
            for (size_t j = 0; j < lim; ++j) r.c_[row[j]] += ai * b.c_[j];
        }
        return r;
    }

    // 1/a, solved degree by degree from a * r = 1.
    BasicJet inverse() const {
        if (c_[0] == T(0))
            throw Error(ErrorCode::DivisionByZeroConstantTerm, "inverse of jet with zero constant term");
        BasicJet r(basis_, order_);
        const Basis& B = *basis_;
        std::vector<T> acc(c_.size(), T(0));
        const T inv0 = T(1) / c_[0];
        for (int d = 0; d <= order_; ++d) {
            const size_t lo = B.dim(d - 1), hi = B.dim(d);
            for (size_t k = lo; k < hi; ++k) r.c_[k] = ((k == 0 ? T(1) : T(0)) - acc[k]) * inv0;
            for (size_t j = lo; j < hi; ++j) {
                const T& rj = r.c_[j];
                if (rj == T(0)) continue;
                const size_t lim = B.dim(order_ - d);
                const uint32_t* row = B.product_row(j);
                for (size_t i = 1; i < lim; ++i) acc[row[i]] += c_[i] * rj;
            }
        }
        return r;
    }

    friend BasicJet operator/(const BasicJet& a, const BasicJet& b) {
        a.require_compatible(b);
        return a * b.inverse();
    }
    friend BasicJet operator/(BasicJet a, const T& s) {
        for (auto& x : a.c_) x /= s;
        return a;
    }

    // d/dx_var; the result has order K-1.
    BasicJet partial(int var) const {
        if (var < 0 || var >= basis_->nvars()) throw Error(ErrorCode::UnknownVariable, "variable index");
        if (order_ == 0) throw Error(ErrorCode::OrderExhausted, "partial of order-0 jet");
        BasicJet r(basis_, order_ - 1);
        const Basis& B = *basis_;
        for (size_t i = 0; i < c_.size(); ++i) {
            long lo = B.lower(i, var);
            if (lo < 0 || static_cast<size_t>(lo) >= r.c_.size()) continue;
            r.c_[lo] += c_[i] * T(static_cast<int>(B.exponents(i)[var]));
        }
        return r;
    }
    BasicJet partial(const std::string& name) const {
        int v = basis_->var_index(name);
        if (v < 0) throw Error(ErrorCode::UnknownVariable, name);
        return partial(v);
    }

    // Multiply by x_var^d and keep monomials of degree <= new_order.
    BasicJet shift_up(int var, int d, int new_order) const {
        BasisPtr b = basis_;
        if (new_order > b->max_order()) b = Basis::get(b->names(), b->boundary(), new_order);
        BasicJet r(b, new_order);
        for (size_t i = 0; i < c_.size(); ++i) {
            if (c_[i] == T(0)) continue;
            long k = static_cast<long>(i);
            for (int s = 0; s < d && k >= 0; ++s) k = b->raise(k, var);
            if (k >= 0 && static_cast<size_t>(k) < r.c_.size()) r.c_[k] = c_[i];
        }
        return r;
    }
    // Divide by x_var, dropping the part of degree 0 in x_var; order drops by one.
    BasicJet shift_down(int var) const {
        if (order_ == 0) throw Error(ErrorCode::OrderExhausted, "shift of order-0 jet");
        BasicJet r(basis_, order_ - 1);
        const Basis& B = *basis_;
        for (size_t i = 0; i < c_.size(); ++i) {
            long lo = B.lower(i, var);
            if (lo >= 0 && static_cast<size_t>(lo) < r.c_.size()) r.c_[lo] = c_[i];
        }
        return r;
    }

    T max_abs() const {
        T m(0);
        for (const auto& x : c_) {
            T a = x < T(0) ? T(-x) : x;
            if (a > m) m = a;
        }
        return m;
    }

private:
    BasisPtr basis_;
    int order_ = 0;
    std::vector<T> c_;
};

// Extended precision keeps roundoff from derivative chains well below the check tolerances.
using Real = long double;
using Jet = BasicJet<Real>;
using RationalJet = BasicJet<Rational>;

// f(a) = sum_k derivs[k] * (a - a0)^k, with derivs[k] = f^(k)(a0)/k!.
Jet compose(const Jet& a, const std::vector<Real>& derivs);

Jet sqrt(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet sinh(const Jet& a);
Jet cosh(const Jet& a);
Jet pow(const Jet& a, double p);
Jet pow(const Jet& a, int p);

Jet restrict_to_boundary(const Jet& a);
// Re-express a jet in a basis whose variables contain the jet's variables.
Jet reembed(const Jet& a, const BasisPtr& target);
// Sum of c_alpha * dx^alpha.
double evaluate(const Jet& a, const std::vector<double>& dx);
// Largest |c_alpha| among monomials of total degree d.
double degree_norm(const Jet& a, int d);

struct ChartPoint {
    std::string chart;
    std::vector<double> coords;
    int boundary_index = -1;
};

// Central difference of f along direction at point; the independent oracle for derivatives.
double fd_oracle(const std::function<double(const std::vector<double>&)>& f, const ChartPoint& point,
                 const std::vector<double>& direction, double step);

}  // namespace projtrac
