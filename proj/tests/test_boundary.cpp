#include <doctest.h>

#include "hma/boundary.hpp"
#include "hma/error.hpp"
#include "hma/exact_solutions.hpp"
#include "hma/quadrature.hpp"

#include <cmath>
#include <numbers>

using namespace hma;

namespace {

const double pi = std::numbers::pi;

CauchyGoursatData smooth_data() {
    CauchyGoursatData d;
    d.c = 1.0;
    d.f = [](double s) { return s * s; };
    d.g = [](double s) { return s * s; };  // g(c) = f(c) = 1
    d.h = [](double) { return 0.0; };      // h(c) = f(0) = 0
    d.n = [](double s) { return 1.0 + s; };
    d.label = "smooth";
    return d;
}

}  // namespace

TEST_CASE("arcsine data are weakly compatible") {
    const auto r = validate_weak_compatibility(ArcsineSolution(1.0).data());
    CHECK(r.corner_ok);
    CHECK(r.n_integrable);
    CHECK(r.fprime_integrable);
    CHECK(r.pass);
    // n changes sign once, at c/2, so its L1 norm follows from the antiderivative
    const ArcsineSolution a(1.0);
    const double l1 = std::abs(a.N(0.5) - a.N(0.0)) + std::abs(a.N(1.0) - a.N(0.5));
    CHECK(r.n_l1 == doctest::Approx(l1).epsilon(1e-3));
    // f = arcsin(1 - 2s) is monotone from pi/2 to -pi/2
    CHECK(r.fprime_l1 == doctest::Approx(pi).epsilon(1e-6));
}

TEST_CASE("corner mismatch fails validation") {
    auto d = smooth_data();
    d.g = [](double s) { return s * s + 0.1; };
    const auto r = validate_weak_compatibility(d);
    CHECK_FALSE(r.corner_ok);
    CHECK(r.corner_gap_c0 == doctest::Approx(0.1));
    CHECK_FALSE(r.pass);
}

TEST_CASE("non-integrable normal derivative is rejected") {
    auto d = smooth_data();
    d.n = [](double s) { return 1.0 / s; };
    const auto r = validate_weak_compatibility(d);
    CHECK_FALSE(r.n_integrable);
    CHECK_FALSE(r.pass);

    d.n = [](double s) { return 1.0 / std::sqrt(s * (1.0 - s)); };  // integrable, value pi
    const auto ok = validate_weak_compatibility(d);
    CHECK(ok.n_integrable);
    CHECK(ok.n_l1 == doctest::Approx(pi).epsilon(1e-3));
}

TEST_CASE("f with unbounded variation is rejected") {
    auto d = smooth_data();
    d.f = [](double s) { return s > 0.0 ? s * std::sin(1.0 / s) : 0.0; };
    d.g = [](double) { return std::sin(1.0); };
    CHECK_FALSE(validate_weak_compatibility(d).fprime_integrable);
}

TEST_CASE("graded quadrature removes inverse square-root endpoints") {
    const double I = quad::graded_integral([](double s) { return 1.0 / std::sqrt(s * (2.0 - s)); }, 0.0, 2.0, 2.0);
    CHECK(I == doctest::Approx(pi).epsilon(1e-10));
    CHECK(integrate_normal(ArcsineSolution(1.0).data(), 0.2, 0.7) ==
          doctest::Approx(ArcsineSolution(1.0).N(0.7) - ArcsineSolution(1.0).N(0.2)));
}

TEST_CASE("kernel integrals match quadrature of the kernels") {
    const auto lam = make_profile(ProfileKind::polynomial, std::vector<double>{1.0, 0.5});
    const auto K = kernels(lam);
    for (auto [s, t] : {std::pair{0.4, 0.9}, std::pair{1.5, 0.2}, std::pair{2.0, 2.0}}) {
        const double I1 = quad::integrate([&](double sg) { return K.K1(s, t, sg); }, 0.0, s);
        const double I2 = quad::integrate([&](double tau) { return K.K2(s, t, tau); }, 0.0, t);
        CHECK(K.K1_integral(s, t) == doctest::Approx(I1).epsilon(1e-12));
        CHECK(K.K2_integral(s, t) == doctest::Approx(I2).epsilon(1e-12));
        // both below 1/2 for increasing positive lambda
        CHECK(K.K1_integral(s, t) < 0.5);
    }
    CHECK_THROWS_AS(K.K1(0.0, 0.0, 0.0), Error);
}

TEST_CASE("forcing reproduces the boundary values") {
    // On Gamma_1 the unified equation reduces to x = g: at t = 0 the row
    // integral is int_c^s lambda' g and the column integral vanishes.
    const auto lam = make_profile(ProfileKind::linear, std::vector<double>{1.0});
    const ArcsineSolution a(1.0);
    const auto d = a.data();
    for (double s : {1.0, 1.7, 2.5}) {
        const double G = assemble_G(d, lam, s, 0.0);
        const double tail = quad::integrate([&](double x) { return a.g(x) * lam.dlambda(x); }, 1.0, s);
        CHECK((G + tail) / (2.0 * lam.lambda(s)) == doctest::Approx(a.g(s)).epsilon(1e-10));
    }
    // On the Cauchy segment both integrals vanish and x = f.
    for (double s : {0.1, 0.5, 0.9}) CHECK(forcing_F(d, lam, s, 1.0 - s) == doctest::Approx(a.f(s)).epsilon(1e-10));
    CHECK_THROWS_AS(assemble_G(d, lam, 0.2, 0.2), Error);
}
