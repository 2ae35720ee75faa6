#pragma once
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "projtrac/extended.hpp"

namespace projtrac {

// Non-effective connection induced on H+- by a distinguished scale, as jets in the boundary
// coordinates. Frame (I, E_1..E_m, E_-) with E_i = tau_0^-1 Wbar_i and E_- = tau_0^-1 X:
//   nabla_i E_- = E_i,  nabla_i E_j = Gamma^k_ij E_k -+ h_ij E_- + tau_0^-1 upsilon_ij I,  nabla I = 0.
struct InducedConnection {
    std::shared_ptr<const ScaledModel> scale;
    int m = 0;    // boundary dimension
    int eps = 1;  // +1 over H+, -1 over H-
    std::vector<std::string> coords;
    std::vector<double> anchor;
    std::vector<Jet> h;           // tau_0^-2 hbar_ij at i*m+j
    std::vector<Jet> gamma;       // iota^* Gamma^k_ij of the scale at (k*m+i)*m+j
    std::vector<Jet> upsilon;     // tau_0^-1 iota^* upsilon_ij
    std::vector<Jet> x_coupling;  // -iota^* (tau^2 P_ij): the E_- coefficient read off the ambient connection

    int order() const;
    // A_i with d_i T^C + A_i[C][B] T^B the derivative of T = T^B E_B; (m+2)^2 entries, row-major
    std::vector<Jet> matrix(int i) const;
};

// Throws NullInfinityAnchor at an H0 anchor, BoundaryNotDefined away from the boundary and
// PoleDetected when the sigma^-1 pole of upsilon does not cancel.
InducedConnection induced_noneffective_connection(std::shared_ptr<const ScaledModel> s);

// upsilon_[ij] = 0, the E_- coupling -iota^* P = -+ tau_0^-2 hbar and finiteness of iota^* upsilon.
CheckReport induced_connection_check(const InducedConnection& c, int hi);

// The extended boundary over the boundary chart below an anchor, realised as (boundary chart) x R
// with fibre coordinate u. Sections are recorded by omega_0 = iota^* eps (tau - tau_base)/sigma for a
// distinguished base scale (the canonical tau unless given).
struct ExtendedBoundary {
    std::shared_ptr<const CompactModel> model;  // at a boundary anchor
    TauSpec base;
    Series base_tau;
    int m = 0;
    int eps = 1;
    Context ctx;  // coordinates (y_1..y_m, u) at (y_0, u_0)
    std::map<std::string, Jet> sections;
    Field h;      // (Lower, Lower), no u components
    Field n;      // d_u
    Series tau0;  // the adapted scale |det h|^(-1/(2(m+2))) in the coordinates of the extended boundary

    int dim() const { return m + 1; }
    // lift a jet in the boundary coordinates to the extended boundary
    Series lift(const Jet& j) const;
};

ExtendedBoundary extended_boundary(std::shared_ptr<const CompactModel> model, double u0 = 0.0, const TauSpec& base = {});

// Record the section of a distinguished scale; returns omega_0.
const Jet& register_section(ExtendedBoundary& ext, const std::string& label, const ScaledModel& s);
// The representative tau_base + eps pi^* omega_0 sigma of a registered section. Scales with equal sections
// share it, so everything computed from it depends on tau only through the section.
std::shared_ptr<const ScaledModel> section_scale(const ExtendedBoundary& ext, const std::string& label);

struct CarrollConnection {
    std::shared_ptr<const ExtendedBoundary> ext;
    std::string section;
    InducedConnection induced;
    // A_alpha, alpha over (y_1..y_m, u), in the frame (I, E_1..E_m, E_-)
    std::vector<std::vector<Series>> A;
    Connection linear;  // Gamma^k_ij, Gamma^u_ij = tau_0^-1 upsilon_ij +- u h_ij, the rest 0
    // F_{alpha beta} [C][B] at ((alpha*d + beta)*f + C)*f + B, d = m+1, f = m+2
    std::vector<Series> F;
    // admissible co-frame (du, m^i) at the anchor, rows indexed by frame, columns by coordinate
    std::vector<std::vector<double>> coframe;
    std::vector<int> eta;  // signature of h on m^i

    int d() const { return ext->m + 1; }
    int f() const { return ext->m + 2; }
    const Series& curvature(int a, int b, int C, int B) const { return F[((a * d() + b) * f() + C) * f() + B]; }
    // tau_0^-1 upsilon_ij +- u h_ij
    Series u_coefficient(int i, int j) const;
};

CarrollConnection effective_cartan_connection(std::shared_ptr<const ExtendedBoundary> ext, const std::string& section);

// Torsion of the linear connection and of the Cartan connection, nabla h, nabla n and the admissible frame.
CheckReport carroll_structure_check(const CarrollConnection& c, int hi);

// n^c F_cd = 0, the vertical transport system for (T^0 - u T^-, T^a, T^-) and agreement of the horizontal
// derivative with the induced connection on H+-, for a fixed polynomial tractor T on the base.
CheckReport vertical_curvature_check(const CarrollConnection& c, int hi);
// size of n^c nabla_c T~ for a u-dependent tractor (expected far from zero)
double vertical_negative_control(const CarrollConnection& c);

// Full Cartan curvature F; zero on the flat model.
CheckReport cartan_flatness_check(const CarrollConnection& c, int hi);

// Section change: with omega = omega_b - omega_a, u -> u - omega and
// tau_0^-1 upsilon +- u h -> same + nabla_i nabla_j omega (Levi-Civita of h).
CheckReport section_change_check(const CarrollConnection& a, const CarrollConnection& b, int hi);

// Projective tractors of the extended boundary in the adapted scale e^f tau0, f a function of the base:
// I = nbar^a W_a and H = D tau0 D tau0 + s hbar Z Z with s = hbar_sign (default eps).
struct BoundaryTractors {
    Connection conn;  // the projective connection preserving the chosen scale, Schouten attached
    Field I;          // Tractor
    Field H;          // (CoTractor, CoTractor)
    Field tau0;       // weight 1
    Field grad_tau0;
    int hbar_sign = 1;
};
// Throws NotAdaptedScale if f depends on u.
BoundaryTractors boundary_projective_tractors(const CarrollConnection& c, const std::string& f = "",
                                              const std::map<std::string, double>& params = {}, int hbar_sign = 0);

// nabla I = 0, nabla H = 0, I^A H_AB = 0.
CheckReport boundary_tractor_check(const BoundaryTractors& t, const Context& ctx, int hi);
// The components in two adapted scales agree after the change of splitting.
CheckReport adapted_scale_invariance_check(const CarrollConnection& c, const std::string& f,
                                           const std::map<std::string, double>& params, int hi);

// L_nbar of pulled back densities vanishes and the tractor I read off from L_nbar on D_A sigma agrees
// with boundary_projective_tractors.
CheckReport density_pullback_check(const CarrollConnection& c, int hi);
// L_nbar (u tau0) / tau0 at the anchor (expected nonzero)
double density_negative_control(const CarrollConnection& c);

// Wedge invariants: |detd zeta| = sigma^2, lambda_0 iota^* nu = 1 at boundary anchors and the boundary
// metric h is of constant curvature, Lorentzian with R > 0 over H+ and Riemannian with R < 0 over H-.
CheckReport model_invariants_check(const ScaledModel& s, int hi);

}  // namespace projtrac
