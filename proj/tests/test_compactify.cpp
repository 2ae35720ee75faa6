#include <cmath>

#include "doctest.h"
#include "projtrac/carroll.hpp"
#include "projtrac/checks.hpp"
#include "projtrac/models.hpp"

using namespace projtrac;

namespace {

std::shared_ptr<const CompactModel> model(const Chart& ch, std::vector<double> a, int K = 3) {
    return std::make_shared<const CompactModel>(build_compact_model(ch, a, K + 4, K));
}

std::shared_ptr<const ScaledModel> scaled(std::shared_ptr<const CompactModel> m, const TauSpec& sp = {}) {
    return std::make_shared<const ScaledModel>(scale_model(std::move(m), sp));
}

}  // namespace

TEST_CASE("boundary orbits of the wedges and the projective chart") {
    auto sp = scaled(model(minkowski_wedge_chart(4, Wedge::Spacelike), {0, 0.6, 1.0, 1.3}));
    auto tl = scaled(model(minkowski_wedge_chart(4, Wedge::Timelike), {0, 0.6, 1.0, 1.3}));
    CHECK(classify_boundary_point(*sp) == "H+");
    CHECK(classify_boundary_point(*tl) == "H-");
    TauSpec raw;
    raw.require_distinguished = false;
    auto h0 = scaled(model(minkowski_projective_chart(4), {0, 0, 0.6, 0.8}), raw);
    CHECK(classify_boundary_point(*h0) == "H0");
    CHECK(h0->model->orbit_sign == 0);
}

TEST_CASE("lambda_0 = -detd hbar = iota^* nu^-1 = +-iota^* tau^2") {
    for (Wedge w : {Wedge::Spacelike, Wedge::Timelike}) {
        auto s = scaled(model(minkowski_wedge_chart(4, w), {0, 0.7, 0.9, 1.2}));
        BoundaryData bd = boundary_data(*s);
        CHECK(bd.lambda0 == doctest::Approx(static_cast<double>(bd.lambda0_det.constant_term())).epsilon(1e-12));
        CHECK(bd.lambda0 == doctest::Approx(static_cast<double>(bd.lambda0_tau.constant_term())).epsilon(1e-12));
        CHECK(static_cast<double>(bd.lambda0_det.constant_term()) ==
              doctest::Approx(static_cast<double>(bd.lambda0_nu.constant_term())).epsilon(1e-12));
        CHECK((w == Wedge::Spacelike ? bd.lambda0 > 0 : bd.lambda0 < 0));
    }
}

TEST_CASE("a rescaled tau is not distinguished") {
    auto m = model(minkowski_wedge_chart(4, Wedge::Spacelike), {0, 0.6, 1.0, 1.3});
    TauSpec sp;
    sp.factor = "1+0.3*s";
    try {
        scale_model(m, sp);
        FAIL("expected ScaleNotDistinguished");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ScaleNotDistinguished);
    }
    CHECK(scale_negative_control(m, "1+0.3*s").finalize().pass);
}

TEST_CASE("tractor parallel and Schouten identities on the flat model") {
    for (bool b : {false, true}) {
        auto s = scaled(model(minkowski_wedge_chart(3, Wedge::Timelike), {b ? 0.0 : 1.1, 0.8, 0.9}));
        CHECK(tractor_parallel_check(*s, 2).finalize().pass);
        CHECK(schouten_asymptotics_check(*s, 2).finalize().pass);
        CHECK(model_invariants_check(*s, 2).finalize().pass);
    }
}

TEST_CASE("a curved Ricci-flat model passes the tractor identities") {
    auto s = scaled(model(schwarzschild_chart(5, 1.0), {0, 0.6, 1.0, 1.3, 0.7}));
    CheckReport r = tractor_parallel_check(*s, 2, false);
    r.tolerance = 1e-8;
    for (auto& p : r.parts) p.tolerance = 1e-8;
    CHECK(r.finalize().pass);
    CheckReport sc = schouten_asymptotics_check(*s, 2);
    CHECK(sc.finalize().pass);
}
