#include "hma/boundary.hpp"

#include "hma/error.hpp"
#include "hma/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hma {

namespace {

// Sequence of graded-quadrature L1 estimates with shrinking endpoint
// exclusion; integrable data makes the increments contract, a logarithmic
// (or worse) divergence keeps them from shrinking.
struct L1Estimate {
    double value = 0.0;
    bool converged = false;
};

L1Estimate graded_l1_estimate(const Sampler& fn, double c, double exclusion, double rel_tol) {
    double delta = exclusion * c;
    const double i0 = quad::graded_l1(fn, delta, c - delta, c);
    const double i1 = quad::graded_l1(fn, delta / 10, c - delta / 10, c);
    const double i2 = quad::graded_l1(fn, delta / 100, c - delta / 100, c);
    L1Estimate est;
    const double d1 = i1 - i0;
    const double d2 = i2 - i1;
    est.converged = std::isfinite(i2) && (d2 <= 0.6 * d1 || d2 <= rel_tol * std::max(i2, 1e-300));
    const double r = d1 > 0.0 ? d2 / d1 : 0.0;
    est.value = est.converged && r < 1.0 ? i2 + d2 * r / (1.0 - r) : i2;
    return est;
}

double total_variation(const Sampler& fn, double c, int pieces) {
    double tv = 0.0;
    double prev = fn(0.0);
    for (int k = 1; k <= pieces; ++k) {
        const double th = 0.5 * std::numbers::pi * k / pieces;
        const double sn = std::sin(th);
        const double v = fn(k == pieces ? c : c * sn * sn);
        tv += std::abs(v - prev);
        prev = v;
    }
    return tv;
}

void require_finite_interior(const Sampler& fn, double lo, double hi, const char* name) {
    for (int k = 0; k <= 64; ++k) {
        const double s = lo + (hi - lo) * k / 64.0;
        const double v = fn(s);
        if (!std::isfinite(v))
            throw Error(ErrorKind::invalid_argument,
                        std::string("boundary sampler ") + name + " is not finite at interior point " + std::to_string(s));
    }
}

}  // namespace

ValidationReport validate_weak_compatibility(const CauchyGoursatData& data, const ValidationOptions& options) {
    const double c = data.c;
    if (!(c > 0.0)) throw Error(ErrorKind::invalid_argument, "validate: c must be positive");
    const double delta = options.endpoint_exclusion * c;
    require_finite_interior(data.f, 0.0, c, "f");
    require_finite_interior(data.n, delta, c - delta, "n");
    require_finite_interior(data.g, c, c, "g");
    require_finite_interior(data.h, c, c, "h");

    ValidationReport r;
    r.corner_gap_c0 = std::abs(data.g(c) - data.f(c));
    r.corner_gap_0c = std::abs(data.h(c) - data.f(0.0));
    r.corner_ok = r.corner_gap_c0 <= options.corner_tol && r.corner_gap_0c <= options.corner_tol;

    const auto n_est = graded_l1_estimate(data.n, c, options.endpoint_exclusion, options.l1_rel_tol);
    r.n_l1 = n_est.value;
    r.n_integrable = n_est.converged;

    const double tv1 = total_variation(data.f, c, 1000);
    const double tv2 = total_variation(data.f, c, 2000);
    const double tv3 = total_variation(data.f, c, 4000);
    r.fprime_l1 = tv3;
    r.fprime_integrable = std::isfinite(tv3) &&
                          (tv3 - tv2 <= 0.6 * (tv2 - tv1) + 1e-12 || tv3 - tv2 <= options.l1_rel_tol * tv3);

    r.pass = r.corner_ok && r.n_integrable && r.fprime_integrable;
    return r;
}

double integrate_normal(const CauchyGoursatData& data, double a, double b) {
    if (a == b) return 0.0;
    if (data.N) return (*data.N)(b) - (*data.N)(a);
    return quad::graded_integral(data.n, a, b, data.c);
}

double assemble_G(const CauchyGoursatData& data, const CurvatureProfile& profile, double s, double t) {
    const double c = data.c;
    const double slack = 1e-12 * std::max(1.0, c);
    if (s < -slack || t < -slack || s + t < c - slack)
        throw Error(ErrorKind::invalid_argument, "assemble_G: point outside the closure of the cone");
    s = std::max(s, 0.0);
    t = std::max(t, 0.0);
    const double lc = profile.lambda(c);

    auto goursat = [&](const Sampler& data_fn, double v) {
        const double tail =
            quad::integrate([&](double x) { return data_fn(x) * profile.dlambda(x); }, c, v);
        return 2.0 * profile.lambda(v) * data_fn(v) - lc * data_fn(c) - tail;
    };
    const double part_s = s <= c ? lc * data.f(s) : goursat(data.g, s);
    const double part_t = t <= c ? lc * data.f(std::max(c - t, 0.0)) : goursat(data.h, t);
    const double lo = std::max(c - t, 0.0);
    const double hi = std::min(c, s);
    const double part_n = hi > lo ? lc * integrate_normal(data, lo, hi) : 0.0;
    return part_s + part_t + part_n;
}

double Kernels::K1(double s, double t, double sigma) const {
    if (!(s + t > 0.0)) throw Error(ErrorKind::invalid_argument, "K1: s + t must be positive");
    return profile->dlambda(sigma + t) / (2.0 * profile->lambda(s + t));
}

double Kernels::K2(double s, double t, double tau) const {
    if (!(s + t > 0.0)) throw Error(ErrorKind::invalid_argument, "K2: s + t must be positive");
    return profile->dlambda(s + tau) / (2.0 * profile->lambda(s + t));
}

double Kernels::K1_integral(double s, double t) const {
    const double l = profile->lambda(s + t);
    return (l - profile->lambda(t)) / (2.0 * l);
}

double Kernels::K2_integral(double s, double t) const {
    const double l = profile->lambda(s + t);
    return (l - profile->lambda(s)) / (2.0 * l);
}

Kernels kernels(const CurvatureProfile& profile) { return Kernels{&profile}; }

double forcing_F(const CauchyGoursatData& data, const CurvatureProfile& profile, double s, double t) {
    if (!(s + t > 0.0)) throw Error(ErrorKind::invalid_argument, "forcing_F: s + t must be positive");
    return assemble_G(data, profile, s, t) / (2.0 * profile.lambda(s + t));
}

}  // namespace hma
