#pragma once
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "projtrac/series.hpp"

namespace projtrac {

// Jets are taken at a single anchor. At a boundary anchor (boundary coordinate = 0)
// the boundary coordinate is the Laurent variable rho; elsewhere all coordinates are
// ordinary jet variables.
class Context {
public:
    Context() = default;
    Context(std::vector<std::string> names, int boundary, std::vector<double> anchor, int order);

    int dim() const { return static_cast<int>(names_.size()); }
    int order() const { return order_; }
    bool at_boundary() const { return basis_->boundary() >= 0; }
    int boundary_index() const { return boundary_; }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<double>& anchor() const { return anchor_; }
    const BasisPtr& basis() const { return basis_; }
    const Series& coord(int i) const { return coords_[i]; }
    Series constant(double c) const { return Series::constant(basis_, order_, c); }
    Series zero() const { return constant(0.0); }
    // the same anchor at a different jet order
    Context with_order(int order) const { return Context(names_, boundary_, anchor_, order); }

private:
    std::vector<std::string> names_;
    int boundary_ = -1;
    std::vector<double> anchor_;
    int order_ = 0;
    BasisPtr basis_;
    std::vector<Series> coords_;
};

using Mat = std::vector<Series>;  // square, row-major

Series det(const Mat& m, int n);
Mat inverse(const Mat& m, int n);

struct Chart {
    std::string id;
    std::vector<std::string> coords;
    int boundary = -1;
    // coordinate components g_ab at the context's anchor, row-major
    std::function<Mat(const Context&)> metric;
    // throws if the anchor lies outside the chart's domain
    std::function<void(const std::vector<double>&)> check_anchor;

    int dim() const { return static_cast<int>(coords.size()); }
    Context context(const std::vector<double>& anchor, int order) const;
};

// Index slot kinds. Tractor slots have n+1 components: index 0 is the
// Y (cotractor) or X (tractor) part, index a+1 the Z or W part. Extended slots have
// n+2 components: index 0 is the L (down) or I (up) part, the rest a tractor slot.
enum class Slot { Lower, Upper, CoTractor, Tractor, ExtLower, ExtUpper };

int slot_dim(Slot s, int n);

class Field {
public:
    Field() = default;
    Field(const Context& ctx, std::vector<Slot> slots, Rational weight = 0);
    static Field from_parts(int n, std::vector<Slot> slots, Rational weight, std::vector<Series> data);

    int n() const { return n_; }
    const std::vector<Slot>& slots() const { return slots_; }
    const std::vector<int>& dims() const { return dims_; }
    const Rational& weight() const { return weight_; }
    void set_weight(Rational w) { weight_ = std::move(w); }
    size_t size() const { return data_.size(); }

    Series& operator[](size_t i) { return data_[i]; }
    const Series& operator[](size_t i) const { return data_[i]; }
    Series& at(std::initializer_list<int> idx) { return data_[flat(idx.begin())]; }
    const Series& at(std::initializer_list<int> idx) const { return data_[flat(idx.begin())]; }
    Series& at(const std::vector<int>& idx) { return data_[flat(idx.data())]; }
    const Series& at(const std::vector<int>& idx) const { return data_[flat(idx.data())]; }
    size_t flat(const int* idx) const;
    std::vector<int> unflat(size_t i) const;

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double s);
    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(Field a, double s) { return a *= s; }
    // component-wise product with a scalar series
    Field times(const Series& s) const;

    // largest coefficient among terms of total degree d over all components
    double degree_norm(int d) const;
    // lowest valuation over components after normalization (poles are negative)
    int valuation() const;
    // smallest precision over components
    int precision() const;

private:
    int n_ = 0;
    std::vector<Slot> slots_;
    std::vector<int> dims_;
    Rational weight_ = 0;
    std::vector<Series> data_;
};

struct Connection {
    int n = 0;
    Mat gamma;                    // Gamma^c_ab at (c*n + a)*n + b
    std::vector<Series> trace;    // Gamma^b_cb
    Mat schouten;                 // P_ab; empty until attached
    std::vector<Series> upsilon;  // extended part: upsilon_{alpha c} at alpha*n + c; empty if absent

    const Series& G(int c, int a, int b) const { return gamma[(c * n + a) * n + b]; }
};

Connection connection_from_christoffels(Mat gamma, int n);
Connection levi_civita(const Mat& g, const Context& ctx);
// projectively equivalent connection Gamma + delta Upsilon + delta Upsilon
Connection offset(const Connection& conn, const std::vector<Series>& ups);

struct CurvaturePack {
    int n = 0;
    std::vector<Series> riemann;  // R_ab^c_d at ((a*n+b)*n+c)*n+d
    Mat ricci;                    // R_bd = R_ab^a_d
    Mat beta;                     // -(2/(n+1)) R_[ab]
    Mat schouten;                 // (R_ab + beta_ab)/(n-1)
    std::vector<Series> weyl;     // same layout as riemann
    std::vector<Series> cotton;   // Y_abd = nabla_a P_bd - nabla_b P_ad, at (a*n+b)*n+d
};

CurvaturePack curvature(const Connection& conn, const Context& ctx);
Connection with_schouten(Connection conn, const CurvaturePack& curv);

// Covariant derivative; the new covector index is the first slot. Tractor slots use
// the normal tractor connection (requires P), extended slots additionally upsilon.
Field covariant_derivative(const Field& f, const Connection& conn, const Context& ctx);

// Partial derivatives of a scalar series, as a Lower field.
Field gradient(const Series& s, const Context& ctx);

// Coordinate determinant of a symmetric contravariant tensor; a density of weight n(w+2)+2.
Series detd(const Mat& h, int n);

}  // namespace projtrac
