#include "hma/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hma::quad {

double integrate(const Fn& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol, &err);
}

namespace {

double theta_of(double sigma, double c) {
    const double r = std::clamp(sigma / c, 0.0, 1.0);
    return std::asin(std::sqrt(r));
}

}  // namespace

double graded_integral(const Fn& f, double a, double b, double c, double tol) {
    if (a == b) return 0.0;
    const double ta = theta_of(a, c);
    const double tb = theta_of(b, c);
    auto g = [&](double th) {
        const double sn = std::sin(th);
        const double cs = std::cos(th);
        const double jac = 2.0 * c * sn * cs;
        if (jac == 0.0) return 0.0;
        return f(c * sn * sn) * jac;
    };
    return integrate(g, ta, tb, tol);
}

double graded_l1(const Fn& f, double a, double b, double c, double tol) {
    return graded_integral([&](double s) { return std::abs(f(s)); }, a, b, c, tol);
}

void cumulative_trapezoid(std::span<const double> samples, double h, std::span<double> out) {
    if (samples.empty()) return;
    out[0] = 0.0;
    for (std::size_t k = 1; k < samples.size(); ++k)
        out[k] = out[k - 1] + 0.5 * h * (samples[k - 1] + samples[k]);
}

double trapezoid(std::span<const double> samples, double h) {
    if (samples.size() < 2) return 0.0;
    double acc = 0.5 * (samples.front() + samples.back());
    for (std::size_t k = 1; k + 1 < samples.size(); ++k) acc += samples[k];
    return acc * h;
}

SqrtEndpointWeights::SqrtEndpointWeights(int max_node) : root_sum_(static_cast<std::size_t>(std::max(max_node, 0) + 1), 0.0) {
    for (std::size_t q = 1; q < root_sum_.size(); ++q) root_sum_[q] = root_sum_[q - 1] + std::sqrt(static_cast<double>(q));
}

double SqrtEndpointWeights::weight(int b, int n) const {
    const double rb = std::sqrt(static_cast<double>(b));
    const double re = std::sqrt(static_cast<double>(b + n));
    const double exact = (2.0 / 3.0) * ((b + n) * re - b * rb);
    const double trap = root_sum_[b + n] - root_sum_[b] + 0.5 * (rb - re);
    return (exact - trap) / (std::sqrt(static_cast<double>(b + 1)) - rb);
}

void cumulative_trapezoid_sqrt(std::span<const double> samples, int b, double h, const SqrtEndpointWeights& w,
                               std::span<double> out) {
    cumulative_trapezoid(samples, h, out);
    if (samples.size() < 2) return;
    const double jump = h * (samples[1] - samples[0]);
    for (std::size_t k = 1; k < samples.size(); ++k) out[k] += w.weight(b, static_cast<int>(k)) * jump;
}

}  // namespace hma::quad
