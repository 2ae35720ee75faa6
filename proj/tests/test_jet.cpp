#include <random>

#include "doctest.h"
#include "projtrac/jet.hpp"

using namespace projtrac;

namespace {

BasisPtr rho_y(int K) { return Basis::get({"rho", "y"}, 0, K); }

Jet random_jet(const BasisPtr& b, int K, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Jet j(b, K);
    for (size_t i = 0; i < j.size(); ++i) j[i] = u(rng);
    return j;
}

double max_diff(const Jet& a, const Jet& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, static_cast<double>(std::abs(a[i] - b[i])));
    return m;
}

}  // namespace

TEST_CASE("basis is graded and prefix-closed") {
    auto b = Basis::get({"a", "b", "c"}, -1, 5);
    CHECK(b->dim(0) == 1);
    CHECK(b->dim(1) == 4);
    CHECK(b->dim(2) == 10);
    CHECK(b->dim(5) == 56);
    for (size_t i = 1; i < b->dim(5); ++i) CHECK(b->degree(i) >= b->degree(i - 1));
    int e[3] = {1, 2, 0};
    long idx = b->index(e);
    REQUIRE(idx >= 0);
    CHECK(b->exponents(idx)[1] == 2);
}

TEST_CASE("polynomial products and geometric series") {
    auto b = Basis::get({"rho"}, 0, 2);
    Jet rho = Jet::variable(b, 2, 0, 0.0);
    Jet one = Jet::constant(b, 2, 1.0);
    Jet p = (one + rho) * (one - rho);
    CHECK(p.coeff({0}) == 1.0);
    CHECK(p.coeff({1}) == 0.0);
    CHECK(p.coeff({2}) == -1.0);
    Jet g = one / (one - rho);
    CHECK(g.coeff({0}) == doctest::Approx(1.0));
    CHECK(g.coeff({1}) == doctest::Approx(1.0));
    CHECK(g.coeff({2}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(one / rho, Error);
}

TEST_CASE("long division against a least-squares fit of sampled values") {
    auto b = rho_y(2);
    Jet rho = Jet::variable(b, 2, 0, 0.0), y = Jet::variable(b, 2, 1, 0.0);
    Jet q = (rho + y + 1.0) / (y + 1.0);
    // fit c0 + c1 rho + c2 y + c3 rho^2 + c4 rho y + c5 y^2 to 20 samples
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1e-3, 1e-3);
    double A[20][6], rhs[20];
    for (int s = 0; s < 20; ++s) {
        double r = u(rng), w = u(rng);
        double row[6] = {1, r, w, r * r, r * w, w * w};
        for (int k = 0; k < 6; ++k) A[s][k] = row[k];
        rhs[s] = (1 + r + w) / (1 + w);
    }
    // normal equations, scaled to unit columns
    double scale[6] = {1, 1e3, 1e3, 1e6, 1e6, 1e6};
    double M[6][7] = {};
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j)
            for (int s = 0; s < 20; ++s) M[i][j] += A[s][i] * scale[i] * A[s][j] * scale[j];
        for (int s = 0; s < 20; ++s) M[i][6] += A[s][i] * scale[i] * rhs[s];
    }
    for (int c = 0; c < 6; ++c) {
        int p = c;
        for (int r = c + 1; r < 6; ++r)
            if (std::abs(M[r][c]) > std::abs(M[p][c])) p = r;
        for (int k = 0; k < 7; ++k) std::swap(M[c][k], M[p][k]);
        for (int r = 0; r < 6; ++r) {
            if (r == c) continue;
            double f = M[r][c] / M[c][c];
            for (int k = 0; k < 7; ++k) M[r][k] -= f * M[c][k];
        }
    }
    double fit[6];
    for (int i = 0; i < 6; ++i) fit[i] = M[i][6] / M[i][i] * scale[i];
    CHECK(q.coeff({0, 0}) == doctest::Approx(fit[0]).epsilon(1e-6));
    CHECK(q.coeff({1, 0}) == doctest::Approx(fit[1]).epsilon(1e-4));
    CHECK(q.coeff({0, 1}) == doctest::Approx(fit[2]).epsilon(1e-4));
    CHECK(std::abs(q.coeff({1, 1}) - fit[4]) < 5e-2);
    CHECK(std::abs(q.coeff({0, 2}) - fit[5]) < 5e-2);
}

TEST_CASE("sqrt") {
    auto b = Basis::get({"rho"}, 0, 2);
    Jet rho = Jet::variable(b, 2, 0, 0.0);
    Jet s = sqrt(rho + 1.0);
    CHECK(s.coeff({0}) == doctest::Approx(1.0));
    CHECK(s.coeff({1}) == doctest::Approx(0.5));
    CHECK(s.coeff({2}) == doctest::Approx(-0.125));
    auto b0 = Basis::get({"rho"}, 0, 0);
    CHECK(sqrt(Jet::constant(b0, 0, 4.0)).constant_term() == doctest::Approx(2.0));
    auto by = Basis::get({"y"}, -1, 4);
    Jet y1 = Jet::variable(by, 4, 0, 1.0);
    Jet r = sqrt(y1 * y1);
    CHECK(r.coeff({0}) == doctest::Approx(1.0));
    CHECK(r.coeff({1}) == doctest::Approx(1.0));
    for (int k = 2; k <= 4; ++k) CHECK(std::abs(r.coeff({k})) < 1e-14);
    CHECK_THROWS_AS(sqrt(rho), Error);
    CHECK_THROWS_AS(sqrt(rho - 1.0), Error);
}

TEST_CASE("partial derivatives") {
    auto b = rho_y(3);
    Jet rho = Jet::variable(b, 3, 0, 0.0), y = Jet::variable(b, 3, 1, 0.0);
    Jet d = (rho * rho * y).partial("rho");
    CHECK(d.order() == 2);
    CHECK(d.coeff({1, 1}) == 2.0);
    CHECK(d.max_abs() == 2.0);
    CHECK(Jet::constant(b, 3, 5.0).partial(0).max_abs() == 0.0);
    CHECK_THROWS_AS(rho.partial("z"), Error);
    CHECK_THROWS_AS(Jet::constant(b, 0, 1.0).partial(0), Error);

    // derivative of sqrt(1+rho) against the composed series (1+rho)^(-1/2)/2
    Jet s = sqrt(rho + 1.0).partial(0);
    Jet oracle = pow((rho + 1.0).truncate(2), -0.5) * 0.5;
    CHECK(max_diff(s, oracle) < 1e-14);
}

TEST_CASE("partial derivatives match the finite-difference oracle") {
    auto b = rho_y(4);
    const double x0 = 0.3, y0 = -0.2;
    Jet rho = Jet::variable(b, 4, 0, x0), y = Jet::variable(b, 4, 1, y0);
    Jet f = exp(rho * y) * sin(y) / (rho * rho + 1.0) + log(rho + 2.0) * cosh(y);
    auto fn = [](const std::vector<double>& p) {
        return std::exp(p[0] * p[1]) * std::sin(p[1]) / (p[0] * p[0] + 1.0) + std::log(p[0] + 2.0) * std::cosh(p[1]);
    };
    ChartPoint pt{"test", {x0, y0}, 0};
    CHECK(f.partial(0).constant_term() == doctest::Approx(fd_oracle(fn, pt, {1, 0}, 1e-3)).epsilon(1e-9));
    CHECK(f.partial(1).constant_term() == doctest::Approx(fd_oracle(fn, pt, {0, 1}, 1e-3)).epsilon(1e-9));
    CHECK(f.constant_term() == doctest::Approx(fn({x0, y0})));
}

TEST_CASE("fd oracle basics") {
    auto sq = [](const std::vector<double>& p) { return p[0] * p[0]; };
    CHECK(std::abs(fd_oracle(sq, ChartPoint{"x", {1.0}, -1}, {1.0}, 1e-4) - 2.0) < 1e-6);
    auto c = [](const std::vector<double>&) { return 3.0; };
    CHECK(std::abs(fd_oracle(c, ChartPoint{"x", {1.0}, -1}, {1.0}, 1e-4)) < 1e-12);
}

TEST_CASE("restriction to the boundary") {
    auto b = rho_y(3);
    Jet rho = Jet::variable(b, 3, 0, 0.0), y = Jet::variable(b, 3, 1, 0.0);
    Jet r = restrict_to_boundary(rho + rho * y + y * y + 1.0);
    CHECK(r.basis().nvars() == 1);
    CHECK(r.coeff({0}) == 1.0);
    CHECK(r.coeff({1}) == 0.0);
    CHECK(r.coeff({2}) == 1.0);
    CHECK(restrict_to_boundary(rho * exp(y)).max_abs() == 0.0);
    auto nb = Basis::get({"y"}, -1, 3);
    CHECK_THROWS_AS(restrict_to_boundary(Jet::constant(nb, 3, 1.0)), Error);
}

TEST_CASE("incompatible jets are rejected") {
    Jet a = Jet::constant(rho_y(3), 3, 1.0);
    Jet b = Jet::constant(rho_y(3), 2, 1.0);
    Jet c = Jet::constant(Basis::get({"rho", "z"}, 0, 3), 3, 1.0);
    CHECK_THROWS_AS(a + b, Error);
    CHECK_THROWS_AS(a * c, Error);
}

TEST_CASE("ring axioms, division round trip, commuting partials, restriction homomorphism") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int K = 1 + trial % 4;
        auto b = Basis::get({"rho", "y", "z"}, 0, K);
        Jet a = random_jet(b, K, rng), c = random_jet(b, K, rng), d = random_jet(b, K, rng);
        CHECK(max_diff((a * c) * d, a * (c * d)) < 1e-13);
        CHECK(max_diff(a * (c + d), a * c + a * d) < 1e-13);
        CHECK(max_diff(a * c, c * a) < 1e-14);
        d[0] = 2.0 + std::abs(d[0]);
        CHECK(max_diff((a / d) * d, a) < 1e-12);
        if (K >= 2) CHECK(max_diff(a.partial(0).partial(1), a.partial(1).partial(0)) < 1e-13);
        CHECK(max_diff(restrict_to_boundary(a * c), restrict_to_boundary(a) * restrict_to_boundary(c)) < 1e-13);
    }
}

TEST_CASE("exact rational jets") {
    auto b = Basis::get({"x"}, -1, 4);
    RationalJet x = RationalJet::variable(b, 4, 0, Rational(0));
    RationalJet one = RationalJet::constant(b, 4, Rational(1));
    RationalJet g = one / (one - x * Rational(1, 3));
    for (int k = 0; k <= 4; ++k) {
        Rational expect = 1;
        for (int i = 0; i < k; ++i) expect /= 3;
        CHECK(g.coeff({k}) == expect);
    }
}

TEST_CASE("re-embedding into a larger variable list") {
    auto by = Basis::get({"y"}, -1, 3);
    auto byu = Basis::get({"y", "u"}, -1, 3);
    Jet y = Jet::variable(by, 3, 0, 0.5);
    Jet e = reembed(y * y, byu);
    CHECK(e.coeff({0, 0}) == doctest::Approx(0.25));
    CHECK(e.coeff({1, 0}) == doctest::Approx(1.0));
    CHECK(e.coeff({2, 0}) == doctest::Approx(1.0));
    CHECK(e.partial("u").max_abs() == 0.0);
}
