#pragma once

#include "hma/boundary.hpp"
#include "hma/curvature.hpp"

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hma {

/// Value and derivatives of a hodograph field in characteristic coordinates.
struct HodographJet {
    double x = 0, x_s = 0, x_t = 0, x_ss = 0, x_st = 0, x_tt = 0;
};

/// Same field in (u, p) = (s + t, s - t).
struct UPJet {
    double x = 0, x_u = 0, x_p = 0, x_uu = 0, x_up = 0, x_pp = 0;
};

/// Value and derivatives of a physical surface w(x, y).
struct PhysicalJet {
    double w = 0, w_x = 0, w_y = 0, w_xx = 0, w_xy = 0, w_yy = 0;
};

/// x_a = arcsin((t - s)/(t + s)) with lambda(u) = u, and its induced data on the cone.
class ArcsineSolution {
public:
    explicit ArcsineSolution(double c = 1.0);

    double c() const noexcept { return c_; }
    double x(double s, double t) const;
    HodographJet jet(double s, double t) const;
    UPJet jet_up(double u, double p) const;

    double g(double s) const;
    double h(double t) const;
    double f(double s) const;
    double fprime(double s) const;
    double n(double s) const;
    double N(double s) const;

    CauchyGoursatData data() const;
    static CurvatureProfile profile();

private:
    double c_;
};

/// w = A e^{-y} cos x, the surface with K = -A^2 e^{-2y}/(1 + A^2 e^{-2y})^2.
class ProductSolution {
public:
    explicit ProductSolution(double A = 1.0);

    double A() const noexcept { return A_; }
    PhysicalJet jet(double x, double y) const;
    double w(double x, double y) const { return jet(x, y).w; }
    double gaussian_curvature(double y) const;
    /// lambda(y) = A e^{-y}; equals the hodograph time u.
    double lambda(double y) const;
    double u_of_y(double y) const { return lambda(y); }
    double y_of_u(double u) const;
    /// Hodograph image: (s, t) -> (x, y, q).
    double x_of(double s, double t) const;
    double q_of(double s, double t) const;

private:
    double A_;
};

/// X(u, p) = -(5 pi/26)[(3u^4 - 12u^2 + 10) p + 8(u^2 - 1) p^3 + (8/5) p^5], an
/// Euler-Poisson-Darboux solution whose p-derivative changes sign along p = 0.
class PolynomialSolution {
public:
    UPJet jet_up(double u, double p) const;
    double x_up(double u, double p) const { return jet_up(u, p).x; }
    HodographJet jet(double s, double t) const;
    double x(double s, double t) const { return x_up(s + t, s - t); }

    /// Data on the unit diamond {s, t <= 1, s + t >= 1}: Cauchy data at u = 1,
    /// Goursat constants -pi/2, +pi/2.
    CauchyGoursatData diamond_data() const;
    /// Traces of X itself on a larger cone with c = 1 (smooth on all of Gamma_1, Gamma_2).
    CauchyGoursatData induced_data() const;
    static CurvatureProfile profile();
};

/// max |u (x_uu - x_pp) + x_u| over the probes (u, p).
double epd_residual(const std::function<UPJet(double, double)>& oracle,
                    std::span<const std::pair<double, double>> probes);

/// max |L[x]| = |2 lambda x_st + lambda'(x_s + x_t)| over (s, t) probes.
double hodograph_residual(const std::function<HodographJet(double, double)>& oracle, const CurvatureProfile& profile,
                          std::span<const std::pair<double, double>> probes);

/// max |w_xx w_yy - w_xy^2 + lambda(y)^2| over (x, y) probes.
double ma_residual_exact(const ProductSolution& oracle, std::span<const std::pair<double, double>> probes);

/// Named built-in data sets: "arcsine", "polynomial-diamond", "polynomial".
CauchyGoursatData builtin_data(const std::string& name, double c);

}  // namespace hma
