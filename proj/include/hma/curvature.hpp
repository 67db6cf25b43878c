#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace hma {

enum class ProfileKind { constant, linear, polynomial, tabulated };

ProfileKind parse_profile_kind(std::string_view name);
std::string_view to_string(ProfileKind kind);

struct ProfileOptions {
    double u_max = 8.0;
    /// Require lambda(0) = 0 and lambda'(0) > 0 (the parametrix/corrector path).
    bool semi_infinite = false;
};

/// Curvature function lambda as a function of the hodograph time u.
///
/// Parameter conventions:
///   constant   [a]           lambda = a
///   linear     [a] or [a, b] lambda = a*u (+ b)
///   polynomial [a1, a2, ...] lambda = a1*u + a2*u^2 + ...
///   tabulated  [u0, l0, u1, l1, ...] monotone piecewise-cubic (Fritsch-Carlson)
class CurvatureProfile {
public:
    CurvatureProfile() = default;

    double lambda(double u) const;
    double dlambda(double u) const;
    double d2lambda(double u) const;

    /// lambda(u)/u, continuously extended by lambda'(0) at u = 0.
    double slope_ratio(double u) const;

    ProfileKind kind() const noexcept { return kind_; }
    std::span<const double> params() const noexcept { return params_; }
    double u_max() const noexcept { return u_max_; }

private:
    friend CurvatureProfile make_profile(ProfileKind, std::span<const double>, const ProfileOptions&);

    ProfileKind kind_ = ProfileKind::linear;
    std::vector<double> params_;
    double u_max_ = 8.0;

    // constant/linear/polynomial: lambda = sum coeffs_[k] u^k
    std::vector<double> coeffs_{0.0, 1.0};

    // tabulated
    std::vector<double> knots_;
    std::vector<double> values_;
    std::vector<double> slopes_;

    std::size_t segment(double u) const;
};

CurvatureProfile make_profile(ProfileKind kind, std::span<const double> params,
                              const ProfileOptions& options = {});

/// Infimum/supremum of g(u) = lambda(u)/u over [0, U]; certificate = 1 - m0/(2M)
/// bounds the sup-norm of the corrector's Volterra operator.
struct ContractionBounds {
    double m0 = 0.0;
    double M = 0.0;
    double certificate = 1.0;
};

inline constexpr int kContractionSamples = 4096;

ContractionBounds contraction_bounds(const CurvatureProfile& profile, double U);

inline constexpr double kDefaultQuadratureTol = 1e-10;

/// y(u) = y_ref + int_u^{u_ref} d eta / lambda(eta)   (from du = -lambda dy)
double y_of_u(const CurvatureProfile& profile, double u, double u_ref, double y_ref,
              double tol = kDefaultQuadratureTol);

/// Inverse of y_of_u on the bracket [u_lo, u_hi].
double u_of_y(const CurvatureProfile& profile, double y, double u_ref, double y_ref,
              double u_lo, double u_hi, double tol = kDefaultQuadratureTol);

}  // namespace hma
