#include "hma/exact_solutions.hpp"

#include "hma/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hma {

using std::numbers::pi;

ArcsineSolution::ArcsineSolution(double c) : c_(c) {
    if (!(c > 0.0)) throw Error(ErrorKind::invalid_argument, "arcsine: c must be positive");
}

double ArcsineSolution::x(double s, double t) const {
    if (s == 0.0 && t == 0.0) return 0.0;
    return std::asin(std::clamp((t - s) / (t + s), -1.0, 1.0));
}

HodographJet ArcsineSolution::jet(double s, double t) const {
    HodographJet j;
    j.x = x(s, t);
    const double u = s + t;
    const double rs = std::sqrt(s), rt = std::sqrt(t);
    j.x_s = -rt / (rs * u);
    j.x_t = rs / (rt * u);
    j.x_ss = rt * (0.5 / (s * rs * u) + 1.0 / (rs * u * u));
    j.x_tt = -rs * (0.5 / (t * rt * u) + 1.0 / (rt * u * u));
    j.x_st = (t - s) / (2.0 * rs * rt * u * u);
    return j;
}

UPJet ArcsineSolution::jet_up(double u, double p) const {
    UPJet j;
    const double W = std::sqrt(u * u - p * p);
    const double W3 = W * W * W;
    j.x = -std::asin(std::clamp(p / u, -1.0, 1.0));
    j.x_p = -1.0 / W;
    j.x_u = p / (u * W);
    j.x_pp = -p / W3;
    j.x_uu = -p * (1.0 / (u * u * W) + 1.0 / W3);
    j.x_up = u / W3;
    return j;
}

double ArcsineSolution::g(double) const { return -pi / 2; }
double ArcsineSolution::h(double) const { return pi / 2; }
double ArcsineSolution::f(double s) const { return std::asin(std::clamp((c_ - 2.0 * s) / c_, -1.0, 1.0)); }
double ArcsineSolution::fprime(double s) const { return -1.0 / std::sqrt(s * (c_ - s)); }
double ArcsineSolution::n(double s) const { return (2.0 * s - c_) / (c_ * std::sqrt(s * (c_ - s))); }
double ArcsineSolution::N(double s) const { return -2.0 * std::sqrt(std::max(0.0, s * (c_ - s))) / c_; }

CauchyGoursatData ArcsineSolution::data() const {
    CauchyGoursatData d;
    d.c = c_;
    const ArcsineSolution self = *this;
    d.g = [self](double s) { return self.g(s); };
    d.h = [self](double t) { return self.h(t); };
    d.f = [self](double s) { return self.f(s); };
    d.n = [self](double s) { return self.n(s); };
    d.N = Sampler([self](double s) { return self.N(s); });
    d.label = "arcsine";
    return d;
}

CurvatureProfile ArcsineSolution::profile() {
    const double one[] = {1.0};
    return make_profile(ProfileKind::linear, one);
}

ProductSolution::ProductSolution(double A) : A_(A) {
    if (!(A > 0.0)) throw Error(ErrorKind::invalid_argument, "product: A must be positive");
}

PhysicalJet ProductSolution::jet(double x, double y) const {
    const double e = A_ * std::exp(-y);
    const double cx = std::cos(x), sx = std::sin(x);
    PhysicalJet j;
    j.w = e * cx;
    j.w_x = -e * sx;
    j.w_y = -e * cx;
    j.w_xx = -e * cx;
    j.w_xy = e * sx;
    j.w_yy = e * cx;
    return j;
}

double ProductSolution::gaussian_curvature(double y) const {
    const double e2 = A_ * A_ * std::exp(-2.0 * y);
    return -e2 / ((1.0 + e2) * (1.0 + e2));
}

double ProductSolution::lambda(double y) const { return A_ * std::exp(-y); }
double ProductSolution::y_of_u(double u) const { return std::log(A_ / u); }

double ProductSolution::x_of(double s, double t) const { return ArcsineSolution(1.0).x(s, t); }
double ProductSolution::q_of(double s, double t) const { return -2.0 * std::sqrt(s * t); }

namespace {
constexpr double kPolyScale = -5.0 * pi / 26.0;
}

UPJet PolynomialSolution::jet_up(double u, double p) const {
    const double u2 = u * u, p2 = p * p, p3 = p2 * p;
    UPJet j;
    j.x = kPolyScale * ((3 * u2 * u2 - 12 * u2 + 10) * p + 8 * (u2 - 1) * p3 + 1.6 * p3 * p2);
    j.x_p = kPolyScale * ((3 * u2 * u2 - 12 * u2 + 10) + 24 * (u2 - 1) * p2 + 8 * p2 * p2);
    j.x_u = kPolyScale * ((12 * u2 * u - 24 * u) * p + 16 * u * p3);
    j.x_uu = kPolyScale * ((36 * u2 - 24) * p + 16 * p3);
    j.x_up = kPolyScale * ((12 * u2 * u - 24 * u) + 48 * u * p2);
    j.x_pp = kPolyScale * (48 * (u2 - 1) * p + 32 * p3);
    return j;
}

HodographJet PolynomialSolution::jet(double s, double t) const {
    const UPJet a = jet_up(s + t, s - t);
    HodographJet j;
    j.x = a.x;
    j.x_s = a.x_u + a.x_p;
    j.x_t = a.x_u - a.x_p;
    j.x_ss = a.x_uu + 2 * a.x_up + a.x_pp;
    j.x_st = a.x_uu - a.x_pp;
    j.x_tt = a.x_uu - 2 * a.x_up + a.x_pp;
    return j;
}

CauchyGoursatData PolynomialSolution::diamond_data() const {
    const PolynomialSolution P;
    CauchyGoursatData d;
    d.c = 1.0;
    d.g = [](double) { return -pi / 2; };
    d.h = [](double) { return pi / 2; };
    d.f = [P](double s) { return P.x_up(1.0, 2 * s - 1); };
    d.n = [P](double s) { return 2.0 * P.jet_up(1.0, 2 * s - 1).x_u; };
    d.N = Sampler([](double s) {
        const double p = 2 * s - 1, p2 = p * p;
        return -(10.0 * pi / 13.0) * (p2 * p2 - 1.5 * p2);
    });
    d.label = "polynomial-diamond";
    return d;
}

CauchyGoursatData PolynomialSolution::induced_data() const {
    CauchyGoursatData d = diamond_data();
    const PolynomialSolution P;
    d.g = [P](double s) { return P.x(s, 0.0); };
    d.h = [P](double t) { return P.x(0.0, t); };
    d.label = "polynomial";
    return d;
}

CurvatureProfile PolynomialSolution::profile() { return ArcsineSolution::profile(); }

double epd_residual(const std::function<UPJet(double, double)>& oracle,
                    std::span<const std::pair<double, double>> probes) {
    double m = 0.0;
    for (auto [u, p] : probes) {
        const UPJet j = oracle(u, p);
        m = std::max(m, std::abs(u * (j.x_uu - j.x_pp) + j.x_u));
    }
    return m;
}

double hodograph_residual(const std::function<HodographJet(double, double)>& oracle, const CurvatureProfile& profile,
                          std::span<const std::pair<double, double>> probes) {
    double m = 0.0;
    for (auto [s, t] : probes) {
        const HodographJet j = oracle(s, t);
        const double u = s + t;
        m = std::max(m, std::abs(2.0 * profile.lambda(u) * j.x_st + profile.dlambda(u) * (j.x_s + j.x_t)));
    }
    return m;
}

double ma_residual_exact(const ProductSolution& oracle, std::span<const std::pair<double, double>> probes) {
    double m = 0.0;
    for (auto [x, y] : probes) {
        const PhysicalJet j = oracle.jet(x, y);
        const double l = oracle.lambda(y);
        m = std::max(m, std::abs(j.w_xx * j.w_yy - j.w_xy * j.w_xy + l * l));
    }
    return m;
}

CauchyGoursatData builtin_data(const std::string& name, double c) {
    if (name == "arcsine") return ArcsineSolution(c).data();
    if (name == "polynomial-diamond" || name == "polynomial") {
        if (std::abs(c - 1.0) > 1e-12) throw Error(ErrorKind::invalid_argument, name + " data requires c = 1");
        return name == "polynomial" ? PolynomialSolution().induced_data() : PolynomialSolution().diamond_data();
    }
    throw Error(ErrorKind::invalid_argument, "unknown built-in boundary data: " + name);
}

}  // namespace hma
