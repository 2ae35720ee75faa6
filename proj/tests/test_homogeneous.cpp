#include "doctest.h"
#include "projtrac/homogeneous.hpp"

using namespace projtrac;

namespace {

std::vector<Rational> point(std::initializer_list<int> v) {
    std::vector<Rational> x;
    for (int i : v) x.emplace_back(i);
    return x;
}

}  // namespace

TEST_CASE("orbit labels of explicit points") {
    HomogeneousModel m = homogeneous_model(3);
    // (x_0, t, x, y, x_+)
    CHECK(orbit_classify(m, point({0, 1, 2, 0, 1})) == Orbit::Interior);
    CHECK(orbit_classify(m, point({5, 2, 1, 0, 0})) == Orbit::Ti);
    CHECK(orbit_classify(m, point({5, 1, 1, 0, 0})) == Orbit::Scri);
    CHECK(orbit_classify(m, point({5, 1, 2, 0, 0})) == Orbit::Spi);
    CHECK(base_of(Orbit::Ti) == BaseOrbit::H);
    CHECK(base_of(Orbit::Scri) == BaseOrbit::S);
    CHECK(base_of(Orbit::Spi) == BaseOrbit::dS);
    CHECK(base_of(Orbit::Interior) == BaseOrbit::Minkowski);
    CHECK(base_classify(m, project(point({5, 1, 2, 0, 0}))) == BaseOrbit::dS);
    CHECK_THROWS_AS(orbit_classify(m, point({1, 0, 0, 0, 0})), Error);
    CHECK_THROWS_AS(orbit_classify(m, point({0, 0, 0, 0, 0})), Error);
}

TEST_CASE("Poincare elements preserve the quadratic form and the labels") {
    HomogeneousModel m = homogeneous_model(4);
    RationalSampler rs(21);
    for (int k = 0; k < 20; ++k) {
        RMat g = rs.poincare(m);
        CHECK(m.in_G(g));
        for (Orbit o : {Orbit::Interior, Orbit::Ti, Orbit::Scri, Orbit::Spi}) {
            auto x = rs.point(m, o);
            auto y = g * x;
            CHECK(orbit_classify(m, y) == o);
            if (o != Orbit::Interior) CHECK(m.quadratic(y) == m.quadratic(x));
        }
    }
}

TEST_CASE("inverse and projective equality") {
    HomogeneousModel m = homogeneous_model(3);
    RationalSampler rs(5);
    RMat g = rs.group(m);
    CHECK(g * inverse(g) == RMat::identity(m.size()));
    RMat two = RMat::identity(m.size());
    for (int i = 0; i < m.size(); ++i) two(i, i) = 2;
    CHECK(equal_mod_centre(g * two, g));
    CHECK(projectively_equal(point({1, 2, 0, 3, 0}), point({2, 4, 0, 6, 0})));
    CHECK_FALSE(projectively_equal(point({1, 2, 0, 3, 0}), point({2, 4, 0, 5, 0})));
}

TEST_CASE("kernel, orbit invariance, fibration and Maurer-Cartan checks") {
    for (int n : {2, 3, 4}) {
        HomogeneousModel m = homogeneous_model(n);
        CHECK(kernel_check(m).finalize().pass);
        CHECK(orbit_invariance_check(m, 30).finalize().pass);
        CHECK(fibration_check(m, 20).finalize().pass);
        CHECK(maurer_cartan_check(m).finalize().pass);
    }
    CHECK_THROWS_AS(homogeneous_model(1), Error);
}
