#pragma once
#include <map>
#include <memory>
#include <string>

#include "projtrac/report.hpp"
#include "projtrac/tractor.hpp"

namespace projtrac {

// Choice of preserved density. The default is the canonical tau = lim sigma/rho extended
// independently of rho. A factor multiplies it; omega shifts it to tau + eps omega sigma,
// where eps = +1 over H+ and -1 over H-.
struct TauSpec {
    std::string factor;
    std::string omega;
    std::map<std::string, double> params;
    // use the Levi-Civita scale itself (tau = sigma); only away from the boundary
    bool levi_civita = false;
    // throw ScaleNotDistinguished when N keeps a pole at a boundary anchor
    bool require_distinguished = true;
};

struct CompactModel {
    Chart chart;
    Context ctx;
    int n = 0;
    int orbit_sign = 0;  // sign of lambda_0 at the boundary point below the anchor; 0 without boundary
    Mat g, ginv;
    Series sigma;  // coordinate function of |Vol_g|^(1/(n+1)), weight 1
    Mat zeta;      // sigma^-2 g^ab, weight -2
    Connection lc;
    double ricci_residual = 0.0;
};

// +1 over H+ (and away from the boundary), -1 over H-
inline double orbit_eps(const CompactModel& m) { return m.orbit_sign >= 0 ? 1.0 : -1.0; }

// Ricci-flatness is checked through the given order (NotRicciFlat above ricci_tol).
CompactModel build_compact_model(const Chart& chart, const std::vector<double>& anchor, int order, int check_order,
                                 double ricci_tol = 1e-8);

// Sign of lambda_0 at the boundary point (0, y) of a chart with a boundary coordinate.
int boundary_orbit_sign(const Chart& chart, const std::vector<double>& anchor);

struct ScaledModel {
    std::shared_ptr<const CompactModel> model;
    TauSpec spec;
    Series tau;                // weight 1
    std::vector<Series> ups;   // offset from the Levi-Civita scale, d log(sigma/tau)
    Connection conn;           // with Schouten tensor attached
    CurvaturePack curv;
    Field sigma_f;             // sigma as weight-1 scalar field
    Field grad_sigma;          // nabla sigma
    Field I;                   // D_A sigma
    Field zeta;                // zeta^ab as field
    Field H;                   // metrisability tractor
    Series nu;
    Field N;                   // sigma^-2 zeta^ab nabla_b sigma, weight -3
    Mat zeta_low;              // inverse of zeta, sigma^2 g_ab
    Field q;                   // zeta_ab - nu^-1 sigma^-2 nabla sigma nabla sigma

    const Context& ctx() const { return model->ctx; }
    int n() const { return model->n; }
};

Series canonical_tau(const CompactModel& m);
Series evaluate_expression(const std::string& text, const Context& ctx, const std::map<std::string, double>& params);

// Throws ScaleNotDistinguished when N keeps a pole at a boundary anchor.
ScaledModel scale_model(std::shared_ptr<const CompactModel> m, const TauSpec& spec);
// Same, for an explicitly given tau (spec is kept as a label only).
ScaledModel scale_model_from_tau(std::shared_ptr<const CompactModel> m, const TauSpec& spec, Series tau);

struct BoundaryData {
    Jet kappa;                    // |d_rho sigma|^(1/n) at rho = 0
    std::vector<Jet> hbar;        // hbar^ij, (n-1)x(n-1) in the boundary coordinates
    Jet lambda0_det;              // -detd hbar
    Jet lambda0_nu;               // iota^* nu^-1
    Jet lambda0_tau;              // +- iota^* tau^2
    std::vector<Jet> qbar;        // iota^* q_ij in boundary density units
    double lambda0 = 0.0;
    std::string orbit;            // "H+", "H-" or "H0"
};

BoundaryData boundary_data(const ScaledModel& s, double sign_tol = 1e-6);
std::string classify_boundary_point(const ScaledModel& s, double sign_tol = 1e-6);

// Identities from nabla H = 0: nabla_a nu + 2 sigma N^b P_ab = 0 and
// P_cb zeta^ba - nu delta + nabla_c sigma N^a + sigma nabla_c N^a = 0, through order hi;
// at boundary anchors also the rho^0 form P_ab = nu q_ab + nu^-2 (P N N) nabla sigma nabla sigma + O(sigma).
// Boundary residuals are keyed by the power of rho (exact identities through rho^1), interior
// residuals by total degree through hi.
CheckReport schouten_asymptotics_check(const ScaledModel& s, int hi);

// nabla H^{AB} = 0, nabla I_A = 0, H^{AB} I_B = 0 and, with include_curvature, Omega = 0.
// Boundary anchors report powers of rho from the lowest pole through hi.
CheckReport tractor_parallel_check(const ScaledModel& s, int hi, bool include_curvature = true);

}  // namespace projtrac
