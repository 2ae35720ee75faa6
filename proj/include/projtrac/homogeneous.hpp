#pragma once
#include <random>
#include <string>
#include <vector>

#include "projtrac/report.hpp"

namespace projtrac {

// Square rational matrix, row-major.
struct RMat {
    int size = 0;
    std::vector<Rational> a;

    RMat() = default;
    explicit RMat(int n) : size(n), a(static_cast<size_t>(n) * n, Rational(0)) {}
    static RMat identity(int n);
    Rational& operator()(int i, int j) { return a[static_cast<size_t>(i) * size + j]; }
    const Rational& operator()(int i, int j) const { return a[static_cast<size_t>(i) * size + j]; }
    bool operator==(const RMat& o) const { return size == o.size && a == o.a; }
};

RMat operator*(const RMat& x, const RMat& y);
std::vector<Rational> operator*(const RMat& x, const std::vector<Rational>& v);
// Gauss-Jordan; throws SingularMetric if x is singular
RMat inverse(const RMat& x);
// equal up to a nonzero scalar (the centre is represented by scalars)
bool equal_mod_centre(const RMat& x, const RMat& y);
// equal as points of projective space
bool projectively_equal(const std::vector<Rational>& x, const std::vector<Rational>& y);

// Matrices act on R^(n+2) with basis (I, e_1..e_n, e_+). G fixes the line of I:
//   g = [[1, chi, chi_0], [0, A, omega], [0, Upsilon, a]],  P: omega = 0,
//   K: A = eps 1, omega = 0, Upsilon = 0, a = eps with eps^(n+1) = 1.
// The Poincare subgroup is [[1, -omega^T eta A, -eta(omega, omega)/2], [0, A, omega], [0, 0, 1]], A in SO(1, n-1).
struct HomogeneousModel {
    int n = 0;
    std::vector<int> eta;  // diag(-1, 1, ..., 1)

    int size() const { return n + 2; }
    RMat element(const RMat& A, const std::vector<Rational>& chi, const Rational& chi0, const std::vector<Rational>& omega,
                 const std::vector<Rational>& ups, const Rational& a) const;
    RMat poincare(const RMat& A, const std::vector<Rational>& omega) const;
    bool in_G(const RMat& g) const;
    bool in_P(const RMat& g) const;
    bool in_K(const RMat& g) const;
    bool is_lorentz(const RMat& A) const;
    // 2 x_0 x_+ + eta(x, x): preserved by the Poincare subgroup
    Rational quadratic(const std::vector<Rational>& x) const;
    // the induced action on R^(n+1) = R^(n+2) / I
    static RMat base_block(const RMat& g);
};

HomogeneousModel homogeneous_model(int n);

enum class Orbit { Interior, Ti, Scri, Spi };
enum class BaseOrbit { Minkowski, H, S, dS };
std::string orbit_name(Orbit o);
std::string base_orbit_name(BaseOrbit o);

// Orbit of the Poincare group through [x] in RP^(n+1) minus [I]. Throws RemovedPoint at [I].
Orbit orbit_classify(const HomogeneousModel& m, const std::vector<Rational>& x);
// Orbit of the base point [xbar] in RP^n (n+1 homogeneous coordinates).
BaseOrbit base_classify(const HomogeneousModel& m, const std::vector<Rational>& xbar);
// [x_0 : x : x_+] -> [x : x_+]
std::vector<Rational> project(const std::vector<Rational>& x);
BaseOrbit base_of(Orbit o);

// Deterministic random elements and points (small rationals).
struct RationalSampler {
    std::mt19937 rng;
    explicit RationalSampler(unsigned seed) : rng(seed) {}
    Rational small(int range = 5, int den = 5);
    Rational nonzero(int range = 5, int den = 5);
    RMat lorentz(const HomogeneousModel& m, int factors = 3);
    RMat poincare(const HomogeneousModel& m);
    RMat group(const HomogeneousModel& m);
    RMat kernel(const HomogeneousModel& m);
    std::vector<Rational> point(const HomogeneousModel& m, Orbit o);
};

// gKg^-1 in K, K acts trivially on base points, a one-parameter subgroup of K, K in P,
// P fixes the model line and closure of G and P under sampled products. Residuals count failures.
CheckReport kernel_check(const HomogeneousModel& m, unsigned seed = 7);
// orbit labels and the quadratic form are invariant under random Poincare elements
CheckReport orbit_invariance_check(const HomogeneousModel& m, int elements = 100, unsigned seed = 11);
// labels fibre over the base orbits, are constant along the fibres and projection is equivariant
CheckReport fibration_check(const HomogeneousModel& m, int points = 50, unsigned seed = 13);
// d(s^-1 ds) + (s^-1 ds)^2 = 0 for a local section s(x) of G -> G/P, as jets of the given order
CheckReport maurer_cartan_check(const HomogeneousModel& m, int order = 3);

}  // namespace projtrac
