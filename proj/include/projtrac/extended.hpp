#pragma once
#include <memory>
#include <string>
#include <vector>

#include "projtrac/compactify.hpp"

namespace projtrac {

// Components of H^{AB} (extended) and its inverse Phi in a gauge L:
// H^{AB} = H pi pi + 2 J I pi + f I I, Phi = 2 I L Pi + phi Pi Pi.
struct ExtendedMetric {
    Series f;
    Field J;    // Tractor
    Field H;    // (Tractor, Tractor)
    Field phi;  // (CoTractor, CoTractor)

    // lambda_A = phi_AB X^B and lambda-bar = phi_AB X^A X^B
    Field lambda() const;
    Series lambda_bar() const { return phi.at({0, 0}); }
};

// A gauge on the extended bundle together with the scale it is written in. upsilon has slots
// (Lower c, CoTractor A) and parametrises nabla L = -upsilon Pi.
struct GaugedStructure {
    std::shared_ptr<const ScaledModel> scale;
    std::string gauge;  // "metric", "boundary", "constructed" or a caller label
    Field chi;          // accumulated offset from the base gauge
    Field upsilon;
    ExtendedMetric metric;

    const Context& ctx() const { return scale->ctx(); }
    int n() const { return scale->n(); }
    // (ExtUpper, ExtUpper): [0][0] = f, [0][B+1] = J^B, [A+1][B+1] = H^AB
    Field full_H() const;
    // (ExtLower, ExtLower): [0][C+1] = I_C, [B+1][C+1] = phi_BC
    Field full_Phi() const;
    // the scale's connection with upsilon attached
    Connection connection() const;
};

// Attach a (Lower, CoTractor) upsilon to a tractor connection.
Connection extended_connection(const Connection& conn, const Field& upsilon);

// Covariant derivative of an extended tractor field (new index first).
Field extended_derivative(const Field& t, const GaugedStructure& g);

// L -> L + chi Pi with chi a weight-0 cotractor in the structure's splitting.
GaugedStructure apply_gauge(const GaugedStructure& g, const Field& chi, std::string label);

// The metric gauge in the given scale: upsilon = -sigma^-1 zeta_cb Z^b, f = 0, J = sigma^-1 X, phi = zeta_bc Z Z.
// Components carry sigma^-1 poles at a boundary anchor.
GaugedStructure metric_gauge_structure(std::shared_ptr<const ScaledModel> s);

// Offset chi = lambda sigma^-1 - 1/2 lambda-bar sigma^-2 I taking any gauge to the metric gauge.
Field metric_gauge_offset(const GaugedStructure& g);
// Throws OnBoundary at a boundary anchor.
GaugedStructure metric_gauge(const GaugedStructure& g);

// Offset from the metric gauge, chi = -1/2 nu^-1 sigma^-1 (Y - sigma^-1 nabla sigma Z).
Field boundary_gauge_offset(const ScaledModel& s);
// Joint gauge lambda_A = lambda-bar Y_A, f = 0 for the scale. NullInfinityAnchor when lambda_0 vanishes
// below the anchor; PoleDetected if a component keeps a pole.
GaugedStructure boundary_gauge(std::shared_ptr<const ScaledModel> s);

// From a gauge with lambda_A = lambda-bar Y_A but f != 0, the offset chi_a = chi nabla_a sigma with
// chi = -(lambda-bar/sigma^2)(1 - sqrt(1 - f sigma^2 / (lambda-bar^2 nu))), the root regular as sigma -> 0.
Field f_zero_offset(const GaugedStructure& g);

// upsilon_Ab = nu^-2 N^c P_cb Y_A + sigma^-1 (nu^-1 P_ab - nu^-2 nabla_a sigma N^d P_db - q_ab) Z^a_A
Field constructed_upsilon(const ScaledModel& s);
// The structure carried by constructed_upsilon: f = 0, J = nu^-1 N^a W_a, phi = q Z Z + nu^-1 Y Y.
GaugedStructure constructed_structure(std::shared_ptr<const ScaledModel> s);

// Read off the components of a full (ExtUpper, ExtUpper) metric. Throws SingularPairing for a
// degenerate matrix and NotNull when Phi(I, I) does not vanish.
ExtendedMetric decompose_extended_metric(const Field& full_H, double tol = 1e-8);

// F_ab = 2 nabla_[a upsilon_|A|b] Pi I + Omega Pi pi, slots (Lower, Lower, ExtUpper, ExtLower).
struct ExtendedCurvature {
    Field first;  // 2 nabla_[a upsilon_|A|b], slots (Lower, Lower, CoTractor)
    Field omega;  // projective tractor curvature
    Field full;
};
ExtendedCurvature extended_curvature(const GaugedStructure& g);

// nabla J + H upsilon, nabla f + 2 J upsilon, nabla phi - 2 upsilon_(A I_B), the derivative of the full
// metric and of I through order hi. Boundary anchors report powers of rho from the lowest pole through hi.
CheckReport parallel_check(const GaugedStructure& g, int hi);

// H phi + J I - delta, f I + J phi, J I - 1, and the three relations expressing phi, J, f by lambda.
CheckReport extended_metric_relations_check(const GaugedStructure& g, int hi);

// [nabla_a, nabla_b] T - F_ab T for the given extended tractor T.
CheckReport curvature_commutator_check(const GaugedStructure& g, const Field& T, int hi);

// Change of distinguished scale tau -> tau~ = tau + eps omega sigma.
struct TauChange {
    std::shared_ptr<const ScaledModel> from, to;
    Field chi;        // the boundary-gauge offset of tau~ written in the splitting of tau
    Field transition; // chi - chi_tau: the offset from the gauge of tau to the gauge of tau~
    Field upsilon_from, upsilon_to;  // constructed upsilon, the second converted to the splitting of tau
};
TauChange gauge_change_of_tau(std::shared_ptr<const ScaledModel> from, std::shared_ptr<const ScaledModel> to);

// Order table for chi~ at a boundary anchor: Y part -1/2 sigma^-1 nu^-1 - tau^-1 nu^-1 w + O(sigma) and Z part
// 1/2 (nu^-1 sigma^-2 nabla sigma + 0 sigma^-1 + A_0) + O(sigma), w = eps omega.
CheckReport tau_change_table_check(const TauChange& c, const std::string& omega, const std::map<std::string, double>& params);

// iota^* of upsilon_ab (tangential components) as jets on the boundary.
std::vector<Jet> boundary_upsilon(const ScaledModel& s);
// iota^* upsilon~ - iota^* upsilon against tau_0 nabla_a nabla_b omega + eps tau_0^-1 hbar_ab omega,
// with the tangential Hessian of the ambient scale of tau.
CheckReport upsilon_shift_check(const TauChange& c, const std::string& omega, const std::map<std::string, double>& params);

// upsilon of tau~ (converted) = upsilon of tau - nabla chi, where chi is the transition.
CheckReport transition_check(const TauChange& c, int hi);

// |nu|^-1/2 N^c nabla_c (|nu|^-1/2 N^a) through order hi. VanishingN if N vanishes at the anchor.
CheckReport geodesic_check(const ScaledModel& s, int hi);
// Same residual for V = |nu|^-1/2 N + delta (a fixed polynomial vector field of weight -2).
CheckReport geodesic_negative_control(const ScaledModel& s, int hi, double delta = 0.5);

// Jet-valued section of the extended boundary carried by a distinguished tau: omega_0 = iota^* eps (tau - tau_ref)/sigma,
// relative to another distinguished tau_ref (by default the canonical one).
Jet boundary_section(const ScaledModel& s);
Jet boundary_section(const ScaledModel& s, const Series& reference);

}  // namespace projtrac
