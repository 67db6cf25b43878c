#include <doctest.h>

#include "hma/energy.hpp"
#include "hma/error.hpp"
#include "hma/exact_solutions.hpp"

#include <cmath>
#include <numbers>

using namespace hma;

namespace {

const CurvatureProfile& lin() {
    static const auto p = make_profile(ProfileKind::linear, std::vector<double>{1.0});
    return p;
}

// x = sin(s) sin(t) e^{s - t}: zero on both axes
double xm(double s, double t) { return std::sin(s) * std::sin(t) * std::exp(s - t); }
double xm_s(double s, double t) { return (std::cos(s) + std::sin(s)) * std::sin(t) * std::exp(s - t); }
double xm_t(double s, double t) { return std::sin(s) * (std::cos(t) - std::sin(t)) * std::exp(s - t); }
double xm_st(double s, double t) { return (std::cos(s) + std::sin(s)) * (std::cos(t) - std::sin(t)) * std::exp(s - t); }

}  // namespace

TEST_CASE("line energy of a linear field") {
    const auto g = HodographGrid::cone(1.0, 3.0, 3.0, 1.0 / 16);
    const Field x = Field::sample(g, [](double s, double t) { return s - t; });
    for (double u : {1.0, 2.0, 3.0}) CHECK(line_energy(x, lin(), u) == doctest::Approx(2.0 * u * u).epsilon(1e-13));
    CHECK_THROWS_AS(line_energy(x, lin(), 1.03), Error);
    CHECK_THROWS_AS(line_energy(x, lin(), 4.0), Error);
    const auto tr = energy_trace(x, lin());
    CHECK(tr.u.size() == 33);
    CHECK(tr.u.front() == 1.0);
    CHECK(tr.u.back() == 3.0);
}

TEST_CASE("slab integral") {
    const auto g = HodographGrid::cone(0.5, 2.0, 2.0, 1.0 / 32);
    const Field one = Field::sample(g, [](double, double) { return 1.0; });
    CHECK(slab_integral(one, 0.5, 2.0) == doctest::Approx((4.0 - 0.25) / 2).epsilon(1e-13));
    const Field s = Field::sample(g, [](double a, double) { return a * a; });
    // int_c^u int_0^v s^2 ds dv = (u^4 - c^4)/12
    CHECK(slab_integral(s, 0.5, 2.0) == doctest::Approx((16.0 - 0.0625) / 12).epsilon(1e-3));
}

TEST_CASE("Gronwall bound for lambda = u, c = 1, u = 2, g = 0, E(c) = 1 is 2e") {
    const auto g = HodographGrid::cone(1.0, 2.0, 2.0, 1.0 / 8);
    const Field zero(g);
    CHECK(std::abs(gronwall_bound(1.0, zero, lin(), 1.0, 2.0) - 2.0 * std::exp(1.0)) <= 1e-10);
}

TEST_CASE("energy identity residual converges for a manufactured solution") {
    const auto lam = make_profile(ProfileKind::linear, std::vector<double>{1.0, 0.5});
    auto residual = [&](int n) {
        const auto g = HodographGrid::cone(0.5, 1.5, 1.5, 1.0 / n);
        const Field x = Field::sample(g, xm);
        const Field src = Field::sample(g, [&](double s, double t) {
            return 2 * lam.lambda(s + t) * xm_st(s, t) + lam.dlambda(s + t) * (xm_s(s, t) + xm_t(s, t));
        });
        return energy_identity_residual(x, src, lam, 0.5, 1.5);
    };
    const double r1 = residual(32), r2 = residual(64), r3 = residual(128);
    CHECK(std::log2(r1 / r2) >= 1.5);
    CHECK(std::log2(r2 / r3) >= 1.5);

    const auto g = HodographGrid::cone(0.5, 1.5, 1.5, 1.0 / 16);
    const Field bad = Field::sample(g, [](double s, double t) { return 1.0 + s * t; });
    try {
        energy_identity_residual(bad, Field(g), lam, 0.5, 1.5);
        FAIL("expected a hypothesis error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::hypothesis);
    }
}

TEST_CASE("solutions stay below the Gronwall bound") {
    const auto lam = make_profile(ProfileKind::linear, std::vector<double>{1.0, 0.5});
    const auto g = HodographGrid::cone(0.5, 1.5, 1.5, 1.0 / 64);
    const Field x = Field::sample(g, xm);
    const Field src = Field::sample(g, [&](double s, double t) {
        return 2 * lam.lambda(s + t) * xm_st(s, t) + lam.dlambda(s + t) * (xm_s(s, t) + xm_t(s, t));
    });
    const auto tr = energy_trace(x, lam);
    for (std::size_t k = 0; k < tr.u.size(); ++k)
        CHECK(tr.E[k] <= gronwall_bound(tr.E.front(), src, lam, 0.5, tr.u[k]));
}

TEST_CASE("refinement verdicts") {
    CHECK(assess_refinement(std::vector<double>{1.0, 1.5, 2.0, 2.5}).divergent);
    CHECK(assess_refinement(std::vector<double>{1.0, 3.0}).divergent);
    CHECK_FALSE(assess_refinement(std::vector<double>{1.0, 1.1, 1.11, 1.111}).divergent);
    CHECK_FALSE(assess_refinement(std::vector<double>{2.0, 2.0, 2.0}).divergent);
}

TEST_CASE("arcsine energy diverges logarithmically under refinement") {
    const ArcsineSolution a(1.0);
    std::vector<double> E;
    for (int n : {16, 32, 64}) {
        const auto g = HodographGrid::cone(1.0, 2.0, 2.0, 1.0 / n);
        E.push_back(line_energy(Field::sample(g, [&](double s, double t) { return a.x(s, t); }), lin(), 2.0));
    }
    CHECK(assess_refinement(E).divergent);
}

TEST_CASE("perturbations") {
    const auto sc = Perturbation::scaling(1e-3, 1.0, 2.0);
    CHECK(sc.dloglam_prime(1.4) == 0.0);
    CHECK(sc.mean() == doctest::Approx(1e-3));
    CHECK(sc.weighted_norm2(lin()) == 0.0);

    const auto dl = Perturbation::from_delta_lambda(
        lin(), [](double u) { return 1e-3 * u; }, [](double) { return 1e-3; }, 1.0, 2.0);
    CHECK(std::abs(dl.dloglam_prime(1.7)) < 1e-15);

    // delta log lambda = eps sin(pi (u - 1)): mean 2 eps/pi, norm2 = int (eps pi cos)^2 u du
    const double eps = 1e-2, pi = std::numbers::pi;
    Perturbation p;
    p.c = 1.0;
    p.C = 2.0;
    p.dloglam = [=](double u) { return eps * std::sin(pi * (u - 1)); };
    p.dloglam_prime = [=](double u) { return eps * pi * std::cos(pi * (u - 1)); };
    CHECK(p.mean() == doctest::Approx(2 * eps / pi).epsilon(1e-10));
    CHECK(std::abs(p.mean_free().mean()) < 1e-14);
    CHECK(p.weighted_norm2(lin()) == doctest::Approx(eps * eps * pi * pi * 0.75).epsilon(1e-10));
}

TEST_CASE("stability experiment") {
    const ArcsineSolution a(1.0);
    const auto g = HodographGrid::cone(1.0, 2.0, 2.0, 1.0 / 32);
    const auto sc = stability_experiment(a.data(), lin(), Perturbation::scaling(1e-3, 1.0, 2.0), g);
    CHECK(sc.report.sup_E1 <= 1e-10 * sc.report.sup_E0);

    Perturbation p;
    p.c = 1.0;
    p.C = 2.0;
    p.dloglam = [](double u) { return 1e-3 * u * u; };
    p.dloglam_prime = [](double u) { return 2e-3 * u; };
    const auto full = stability_experiment(a.data(), lin(), p, g);
    const auto mf = stability_experiment(a.data(), lin(), p.mean_free(), g);
    CHECK(std::isfinite(full.report.ratio));
    CHECK(full.report.ratio > 0.0);
    CHECK(sup_distance(full.x1, mf.x1) <= 1e-10);
}
