#include "hma/curvature.hpp"

#include "hma/error.hpp"
#include "hma/quadrature.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace hma {

ProfileKind parse_profile_kind(std::string_view name) {
    if (name == "constant") return ProfileKind::constant;
    if (name == "linear") return ProfileKind::linear;
    if (name == "polynomial") return ProfileKind::polynomial;
    if (name == "tabulated") return ProfileKind::tabulated;
    throw Error(ErrorKind::invalid_argument, "unknown profile kind '" + std::string(name) + "'");
}

std::string_view to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::constant: return "constant";
        case ProfileKind::linear: return "linear";
        case ProfileKind::polynomial: return "polynomial";
        case ProfileKind::tabulated: return "tabulated";
    }
    return "?";
}

namespace {

// Fritsch-Carlson slopes: preserve monotonicity of the data between knots.
std::vector<double> monotone_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> delta(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) delta[k] = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
    std::vector<double> m(n);
    if (n == 2) {
        m[0] = m[1] = delta[0];
        return m;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (delta[k - 1] * delta[k] <= 0.0) {
            m[k] = 0.0;
        } else {
            const double h0 = x[k] - x[k - 1];
            const double h1 = x[k + 1] - x[k];
            const double w1 = 2.0 * h1 + h0;
            const double w2 = h1 + 2.0 * h0;
            m[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0) return 0.0;
        if (d0 * d1 <= 0.0 && std::abs(s) > std::abs(3.0 * d0)) return 3.0 * d0;
        return s;
    };
    m[0] = end_slope(x[1] - x[0], x[2] - x[1], delta[0], delta[1]);
    m[n - 1] = end_slope(x[n - 1] - x[n - 2], x[n - 2] - x[n - 3], delta[n - 2], delta[n - 3]);
    return m;
}

}  // namespace

std::size_t CurvatureProfile::segment(double u) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), u);
    std::size_t k = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
    return std::min(k, knots_.size() - 2);
}

double CurvatureProfile::lambda(double u) const {
    if (kind_ != ProfileKind::tabulated) {
        double acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * u + *it;
        return acc;
    }
    const std::size_t k = segment(u);
    const double h = knots_[k + 1] - knots_[k];
    const double t = (u - knots_[k]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    return h00 * values_[k] + h10 * h * slopes_[k] + h01 * values_[k + 1] + h11 * h * slopes_[k + 1];
}

double CurvatureProfile::dlambda(double u) const {
    if (kind_ != ProfileKind::tabulated) {
        double acc = 0.0;
        for (std::size_t k = coeffs_.size(); k-- > 1;) acc = acc * u + static_cast<double>(k) * coeffs_[k];
        return acc;
    }
    const std::size_t k = segment(u);
    const double h = knots_[k + 1] - knots_[k];
    const double t = (u - knots_[k]) / h;
    const double d00 = 6 * t * t - 6 * t;
    const double d10 = 3 * t * t - 4 * t + 1;
    const double d01 = -6 * t * t + 6 * t;
    const double d11 = 3 * t * t - 2 * t;
    return (d00 * values_[k] + d01 * values_[k + 1]) / h + d10 * slopes_[k] + d11 * slopes_[k + 1];
}

double CurvatureProfile::d2lambda(double u) const {
    if (kind_ != ProfileKind::tabulated) {
        double acc = 0.0;
        for (std::size_t k = coeffs_.size(); k-- > 2;)
            acc = acc * u + static_cast<double>(k * (k - 1)) * coeffs_[k];
        return acc;
    }
    const std::size_t k = segment(u);
    const double h = knots_[k + 1] - knots_[k];
    const double t = (u - knots_[k]) / h;
    const double e00 = 12 * t - 6;
    const double e10 = 6 * t - 4;
    const double e01 = -12 * t + 6;
    const double e11 = 6 * t - 2;
    return (e00 * values_[k] + e01 * values_[k + 1]) / (h * h) + (e10 * slopes_[k] + e11 * slopes_[k + 1]) / h;
}

double CurvatureProfile::slope_ratio(double u) const {
    if (u == 0.0) return dlambda(0.0);
    return lambda(u) / u;
}

CurvatureProfile make_profile(ProfileKind kind, std::span<const double> params, const ProfileOptions& options) {
    CurvatureProfile p;
    p.kind_ = kind;
    p.params_.assign(params.begin(), params.end());
    p.u_max_ = options.u_max;

    auto need = [&](bool ok, const char* msg) {
        if (!ok) throw Error(ErrorKind::invalid_argument, std::string(to_string(kind)) + " profile: " + msg);
    };
    for (double v : params) need(std::isfinite(v), "non-finite parameter");

    switch (kind) {
        case ProfileKind::constant:
            need(params.size() == 1, "expects [a]");
            p.coeffs_ = {params[0]};
            break;
        case ProfileKind::linear:
            need(params.size() == 1 || params.size() == 2, "expects [a] or [a, b]");
            p.coeffs_ = {params.size() == 2 ? params[1] : 0.0, params[0]};
            break;
        case ProfileKind::polynomial:
            need(!params.empty(), "expects [a1, a2, ...]");
            p.coeffs_.assign(1, 0.0);
            p.coeffs_.insert(p.coeffs_.end(), params.begin(), params.end());
            break;
        case ProfileKind::tabulated: {
            need(params.size() >= 6 && params.size() % 2 == 0, "expects at least three (u, lambda) pairs");
            for (std::size_t k = 0; k < params.size(); k += 2) {
                p.knots_.push_back(params[k]);
                p.values_.push_back(params[k + 1]);
            }
            for (std::size_t k = 1; k < p.knots_.size(); ++k)
                need(p.knots_[k] > p.knots_[k - 1], "samples must be strictly increasing in u");
            p.slopes_ = monotone_slopes(p.knots_, p.values_);
            p.u_max_ = p.knots_.back();
            break;
        }
    }
    need(p.u_max_ > 0.0, "u_max must be positive");

    if (options.semi_infinite) {
        if (std::abs(p.lambda(0.0)) > 1e-14)
            throw Error(ErrorKind::hypothesis, "semi-infinite path requires lambda(0) = 0");
        if (!(p.dlambda(0.0) > 0.0))
            throw Error(ErrorKind::hypothesis, "semi-infinite path requires lambda'(0) > 0");
    }
    for (int k = 1; k <= kContractionSamples; ++k) {
        const double u = p.u_max_ * k / kContractionSamples;
        if (!(p.lambda(u) > 0.0))
            throw Error(ErrorKind::hypothesis, "lambda must be positive on (0, u_max]; fails at u = " + std::to_string(u));
    }
    return p;
}

ContractionBounds contraction_bounds(const CurvatureProfile& profile, double U) {
    if (!(U > 0.0)) throw Error(ErrorKind::invalid_argument, "contraction_bounds: U must be positive");
    if (std::abs(profile.lambda(0.0)) > 1e-14)
        throw Error(ErrorKind::hypothesis, "contraction_bounds: requires lambda(0) = 0");
    ContractionBounds b;
    b.m0 = b.M = profile.slope_ratio(0.0);
    for (int k = 1; k <= kContractionSamples; ++k) {
        const double u = U * k / kContractionSamples;
        if (!(profile.dlambda(u) > 0.0))
            throw Error(ErrorKind::hypothesis, "contraction_bounds: lambda' must be positive on [0, U]");
        const double g = profile.slope_ratio(u);
        b.m0 = std::min(b.m0, g);
        b.M = std::max(b.M, g);
    }
    if (!(b.m0 > 0.0)) throw Error(ErrorKind::hypothesis, "contraction_bounds: lambda(u)/u must be positive");
    b.certificate = 1.0 - b.m0 / (2.0 * b.M);
    return b;
}

double y_of_u(const CurvatureProfile& profile, double u, double u_ref, double y_ref, double tol) {
    if (!(u > 0.0) || !(u_ref > 0.0))
        throw Error(ErrorKind::invalid_argument, "y_of_u: u must be positive (the y-integral diverges at u = 0)");
    if (u == u_ref) return y_ref;
    return y_ref + quad::integrate([&](double eta) { return 1.0 / profile.lambda(eta); }, u, u_ref, tol);
}

double u_of_y(const CurvatureProfile& profile, double y, double u_ref, double y_ref, double u_lo, double u_hi,
              double tol) {
    if (!(u_lo > 0.0) || !(u_hi > u_lo)) throw Error(ErrorKind::invalid_argument, "u_of_y: bad bracket");
    auto f = [&](double u) { return y_of_u(profile, u, u_ref, y_ref, tol) - y; };
    const double flo = f(u_lo);
    const double fhi = f(u_hi);
    if (flo == 0.0) return u_lo;
    if (fhi == 0.0) return u_hi;
    if (flo * fhi > 0.0) throw Error(ErrorKind::invalid_argument, "u_of_y: y outside the bracketed range");
    std::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(
        f, u_lo, u_hi, flo, fhi, [&](double lo, double hi) { return std::abs(hi - lo) <= tol * 1e-2 * std::max(1.0, hi); },
        iters);
    return 0.5 * (a + b);
}

}  // namespace hma
