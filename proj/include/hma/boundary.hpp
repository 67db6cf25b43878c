#pragma once

#include "hma/curvature.hpp"

#include <functional>
#include <optional>
#include <string>

namespace hma {

using Sampler = std::function<double(double)>;

/// Cauchy-Goursat data on the truncated cone {s, t >= 0, s + t >= c}:
///   x(s, 0)   = g(s),  s >= c     (Goursat, Gamma_1)
///   x(0, t)   = h(t),  t >= c     (Goursat, Gamma_2)
///   x(s, c-s) = f(s),  0 <= s <= c (Dirichlet on the Cauchy segment)
///   (d_s + d_t) x(s, c-s) = n(s)   (normal derivative, may blow up at 0 and c)
struct CauchyGoursatData {
    double c = 1.0;
    Sampler g;
    Sampler h;
    Sampler f;
    Sampler n;
    /// Antiderivative of n when known in closed form; used exactly in the forcing.
    std::optional<Sampler> N;
    std::string label;
};

struct ValidationOptions {
    double corner_tol = 1e-8;
    /// Endpoint exclusion for sampling n, as a fraction of c.
    double endpoint_exclusion = 1e-3;
    /// Relative tolerance for declaring the graded L1 estimates converged.
    double l1_rel_tol = 1e-3;
};

struct ValidationReport {
    double corner_gap_c0 = 0.0;  // |g(c) - f(c)|
    double corner_gap_0c = 0.0;  // |h(c) - f(0)|
    double n_l1 = 0.0;
    double fprime_l1 = 0.0;
    bool corner_ok = false;
    bool n_integrable = false;
    bool fprime_integrable = false;
    bool pass = false;
};

ValidationReport validate_weak_compatibility(const CauchyGoursatData& data, const ValidationOptions& options = {});

/// int_a^b n(sigma) d sigma for 0 <= a <= b <= c (antiderivative when available).
double integrate_normal(const CauchyGoursatData& data, double a, double b);

/// Boundary forcing G(s, t); (s, t) must lie in the closure of the cone.
double assemble_G(const CauchyGoursatData& data, const CurvatureProfile& profile, double s, double t);

/// Kernels and forcing of the second-kind Volterra form x = F + int K1 x + int K2 x.
struct Kernels {
    const CurvatureProfile* profile;
    double K1(double s, double t, double sigma) const;
    double K2(double s, double t, double tau) const;
    /// Closed forms of int_0^s K1 d sigma and int_0^t K2 d tau.
    double K1_integral(double s, double t) const;
    double K2_integral(double s, double t) const;
};

Kernels kernels(const CurvatureProfile& profile);

double forcing_F(const CauchyGoursatData& data, const CurvatureProfile& profile, double s, double t);

}  // namespace hma
