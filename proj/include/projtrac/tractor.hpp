#pragma once
#include "projtrac/geometry.hpp"

namespace projtrac {

// Re-express tractor components in the splitting of the scale offset by Upsilon:
// cotractor (sigma, mu) -> (sigma, mu + Upsilon sigma), tractor (rho, xi) -> (rho - Upsilon.xi, xi).
// Extended slots transform through their tractor part.
Field splitting_change(const Field& t, const std::vector<Series>& ups);

// D_A t = (w t, nabla t) as a new leading cotractor slot; weight drops by one.
Field thomas_d(const Field& t, const Connection& conn, const Context& ctx);

// Omega_ab^C_D with slots (Lower, Lower, Tractor, CoTractor).
Field tractor_curvature(const CurvaturePack& curv, const Context& ctx);

// H^{AB} from zeta^{ab} (weight -2): (nu, lambda^b, zeta^{ab}) with
// lambda^b = -(1/(n+1)) nabla_c zeta^{cb}, nu = P_ab zeta^{ab}/n + nabla_a nabla_b zeta^{ab}/(n(n+1)).
Field metrisability_tractor(const Field& zeta, const Connection& conn, const Context& ctx);

// Determinant of the (n+1)x(n+1) component matrix of a two-slot tractor.
Series det_tractor(const Field& h);

// Field from a flat component list.
Field make_field(const Context& ctx, std::vector<Slot> slots, const std::vector<Series>& data, Rational weight = 0);

// Contract the last slot of a with the first slot of b (slot kinds must be dual).
Field contract(const Field& a, const Field& b);

}  // namespace projtrac
