#include <cmath>

#include "doctest.h"
#include "projtrac/suite.hpp"

using namespace projtrac;

namespace {

const char* minimal = R"(
[model]
name = minkowski
chart = spacelike
n = 4
[run]
order = 3
homogeneous = false
[anchors]
p = 1.2, 0.8, 0.9, 1.1
)";

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::ConfigParseError;
}

const CheckReport* find(const SuiteReport& r, const std::string& id, const std::string& anchor) {
    for (const auto& c : r.checks)
        if (c.id == id && c.anchor.rfind(anchor, 0) == 0) return &c;
    return nullptr;
}

}  // namespace

TEST_CASE("minimal config passes") {
    SuiteReport r = run_suite(parse_config(minimal));
    CHECK(r.pass);
    CHECK(r.count_failed() == 0);
    CHECK(r.count_passed() > 10);
}

TEST_CASE("reports are deterministic and round-trip") {
    RunConfig c = parse_config(minimal);
    c.homogeneous = true;
    const std::string a = to_json(run_suite(c));
    const std::string b = to_json(run_suite(c));
    CHECK(a == b);
    SuiteReport back = suite_from_json(a);
    CHECK(back == suite_from_json(b));
    CHECK(to_json(back) == a);
}

TEST_CASE("non-finite numbers survive the round trip") {
    SuiteReport r;
    r.model = {{"name", "x"}};
    r.order = 2;
    CheckReport c = make_check("c", "s", "a", 1e-9);
    c.residuals = {{0, std::nan("")}, {1, HUGE_VAL}};
    c.observed = {{"v", -HUGE_VAL}};
    c.finalize();
    r.checks.push_back(c);
    CHECK(suite_from_json(to_json(r)) == r);
}

TEST_CASE("null infinity anchors exclude the boundary checks") {
    SuiteReport r = run_suite(parse_config(R"(
[model]
name = minkowski
chart = projective
n = 4
[run]
order = 3
homogeneous = false
[anchors]
h0 = 0, 0, 0.6, 0.8
)"));
    CHECK(r.pass);
    CHECK(r.count_excluded() > 0);
    const CheckReport* carroll = find(r, "carroll_structure", "h0");
    REQUIRE(carroll);
    CHECK(carroll->excluded);
    CHECK(carroll->error.rfind("NullInfinityAnchor", 0) == 0);
    const CheckReport* tp = find(r, "tractor_parallel", "h0");
    REQUIRE(tp);
    CHECK(tp->pass);
}

TEST_CASE("a non-Ricci-flat metric is recorded and stops its anchor") {
    SuiteReport r = run_suite(parse_config(R"(
[model]
name = expression
coords = t, x, y
[metric]
g_t_t = -(1 + 0.2*x^2)
g_x_x = 1
g_y_y = 1
[run]
homogeneous = false
[anchors]
p = 0.1, 0.2, 0.3
)"));
    CHECK_FALSE(r.pass);
    REQUIRE(r.checks.size() == 1);
    CHECK(r.checks[0].id == "ricci_flat");
    CHECK(r.checks[0].error.rfind("NotRicciFlat", 0) == 0);
}

TEST_CASE("config errors") {
    CHECK(code_of([] { parse_config("[model]\nname = minkowski\n[run]\norder = 1\n[anchors]\np = 1,1,1,1\n"); }) ==
          ErrorCode::ConfigParseError);
    CHECK(code_of([] { parse_config("[model]\nnmae = minkowski\n[anchors]\np = 1,1,1,1\n"); }) == ErrorCode::ConfigParseError);
    CHECK(code_of([] { parse_config("[bogus]\nx = 1\n"); }) == ErrorCode::ConfigParseError);
    CHECK(code_of([] { parse_config("[model]\nname = minkowski\n"); }) == ErrorCode::ConfigParseError);
    CHECK(code_of([] { parse_config("[anchors]\np = 1, a, 2\n"); }) == ErrorCode::ConfigParseError);
    CHECK(code_of([] { parse_config("[tolerances]\ngeodesic = -1\n[anchors]\np = 1,1,1,1\n"); }) ==
          ErrorCode::ConfigParseError);
    CHECK(code_of([] { run_suite(parse_config("[model]\nname = kerr\n[anchors]\np = 1,1,1,1\n")); }) ==
          ErrorCode::UnknownModel);
    CHECK(code_of([] { run_suite(parse_config("[anchors]\np = 1,1,1\n")); }) == ErrorCode::ConfigParseError);
}

TEST_CASE("tolerance overrides") {
    RunConfig c = parse_config(minimal);
    c.tolerances["geodesic"] = 1e-30;
    SuiteReport r = run_suite(c);
    const CheckReport* g = find(r, "geodesic", "p");
    REQUIRE(g);
    CHECK(g->tolerance == 1e-30);
    c.tolerances.clear();
    c.global_tolerance = 1e-5;
    r = run_suite(c);
    CHECK(find(r, "geodesic", "p")->tolerance == 1e-5);
}

TEST_CASE("expand") {
    RunConfig c = parse_config("[anchors]\nscri = 0, 0.6, 1.0, 1.3\n");
    ExpansionTable chi = expand_quantity(c, "chi", 1);
    ExpansionTable nu = expand_quantity(c, "nu", 0);
    REQUIRE(!nu.rows.empty());
    const double n0 = nu.rows.front().sigma;
    bool seen = false;
    for (const auto& row : chi.rows)
        if (row.component == "Y" && row.order == -1) {
            CHECK(row.sigma == doctest::Approx(-0.5 / n0).epsilon(1e-12));
            seen = true;
        }
    CHECK(seen);
    CHECK(code_of([&] { expand_quantity(c, "kappa", 1); }) == ErrorCode::UnknownQuantity);

    ExpansionTable inside = expand_quantity(parse_config(minimal), "nu", 2);
    REQUIRE(inside.rows.size() == 1);
    CHECK(std::isfinite(inside.rows[0].rho));

    c.tau_factor = "1+0.3*s";
    ExpansionTable ups = expand_quantity(c, "upsilon", 0);
    CHECK(ups.diagnostic.rfind("PoleDetected", 0) == 0);
}
