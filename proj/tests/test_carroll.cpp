#include "doctest.h"
#include "projtrac/carroll.hpp"
#include "projtrac/models.hpp"

using namespace projtrac;

namespace {

struct Setup {
    std::shared_ptr<const CompactModel> m;
    std::shared_ptr<const ExtendedBoundary> ext;
};

Setup setup(Wedge w) {
    Setup s;
    s.m = std::make_shared<const CompactModel>(build_compact_model(minkowski_wedge_chart(4, w), {0, 0.6, 1.0, 1.3}, 7, 3));
    auto ext = std::make_shared<ExtendedBoundary>(extended_boundary(s.m, 0.3));
    register_section(*ext, "canonical", scale_model(s.m, {}));
    TauSpec a;
    a.omega = "0.2+0.3*s";
    register_section(*ext, "a", scale_model(s.m, a));
    TauSpec b;
    b.omega = "0.2+0.3*s+rho*(1+s)";
    register_section(*ext, "b", scale_model(s.m, b));
    s.ext = ext;
    return s;
}

}  // namespace

TEST_CASE("Carrollian structure, vertical curvature and flatness on the flat model") {
    for (Wedge w : {Wedge::Spacelike, Wedge::Timelike}) {
        Setup s = setup(w);
        CarrollConnection c = effective_cartan_connection(s.ext, "canonical");
        CHECK(c.ext->eps == (w == Wedge::Spacelike ? 1 : -1));
        CHECK(induced_connection_check(c.induced, 2).finalize().pass);
        CHECK(carroll_structure_check(c, 2).finalize().pass);
        CHECK(vertical_curvature_check(c, 2).finalize().pass);
        CHECK(cartan_flatness_check(c, 2).finalize().pass);
        CHECK(vertical_negative_control(c) > 1e-3);
        CHECK(boundary_tractor_check(boundary_projective_tractors(c), s.ext->ctx, 2).finalize().pass);
        CHECK(density_pullback_check(c, 2).finalize().pass);
    }
}

TEST_CASE("section change and dependence on tau only through the section") {
    Setup s = setup(Wedge::Spacelike);
    CarrollConnection c0 = effective_cartan_connection(s.ext, "canonical");
    CarrollConnection a = effective_cartan_connection(s.ext, "a");
    CarrollConnection b = effective_cartan_connection(s.ext, "b");
    CHECK(section_change_check(c0, a, 2).finalize().pass);
    // a and b differ by a multiple of sigma, so they give the same section
    REQUIRE(s.ext->sections.at("a").coefficients().size() == s.ext->sections.at("b").coefficients().size());
    for (size_t i = 0; i < a.induced.upsilon.size(); ++i)
        CHECK(a.induced.upsilon[i].coefficients() == b.induced.upsilon[i].coefficients());
}

TEST_CASE("adapted scales") {
    Setup s = setup(Wedge::Timelike);
    CarrollConnection c = effective_cartan_connection(s.ext, "canonical");
    const std::string y = s.ext->ctx.names().front();
    CHECK(adapted_scale_invariance_check(c, "0.3*" + y, {}, 2).finalize().pass);
    CHECK_THROWS_AS(boundary_projective_tractors(c, "0.2*u"), Error);
}

TEST_CASE("boundary structures need a boundary anchor off null infinity") {
    auto inside = std::make_shared<const CompactModel>(build_compact_model(minkowski_wedge_chart(4, Wedge::Spacelike), {1.2, 0.6, 1.0, 1.3}, 7, 3));
    auto s = std::make_shared<const ScaledModel>(scale_model(inside, {}));
    CHECK_THROWS_AS(induced_noneffective_connection(s), Error);
    auto h0 = std::make_shared<const CompactModel>(build_compact_model(minkowski_projective_chart(4), {0, 0, 0.6, 0.8}, 7, 3));
    TauSpec raw;
    raw.require_distinguished = false;
    try {
        induced_noneffective_connection(std::make_shared<const ScaledModel>(scale_model(h0, raw)));
        FAIL("expected NullInfinityAnchor");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NullInfinityAnchor);
    }
}
