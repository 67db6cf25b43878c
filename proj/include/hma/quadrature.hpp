#pragma once

#include <functional>
#include <span>
#include <vector>

namespace hma::quad {

using Fn = std::function<double(double)>;

/// Adaptive Gauss-Kronrod on [a, b]; b < a gives the signed integral.
double integrate(const Fn& f, double a, double b, double tol = 1e-12);

/// int_a^b f for a, b in [0, c] through sigma = c sin^2(theta), which clusters
/// nodes as square roots toward both endpoints and removes inverse-square-root
/// endpoint singularities.
double graded_integral(const Fn& f, double a, double b, double c, double tol = 1e-12);

/// Same substitution applied to |f|.
double graded_l1(const Fn& f, double a, double b, double c, double tol = 1e-12);

/// Running trapezoid: out[k] = int_{x_0}^{x_k} for samples at uniform spacing h.
void cumulative_trapezoid(std::span<const double> samples, double h, std::span<double> out);

double trapezoid(std::span<const double> samples, double h);

/// First-cell weights for integrands that behave like a + b sqrt(distance to an
/// axis). For nodes b..b+n (b cells from the axis), weight(b, n) is chosen so that
///   h * trapezoid + weight(b, n) * h * (phi_{b+1} - phi_b)
/// is exact for a + b sqrt(tau); for smooth integrands the adjustment is O(h^2).
class SqrtEndpointWeights {
public:
    explicit SqrtEndpointWeights(int max_node = 0);
    double weight(int b, int n) const;
    int max_node() const noexcept { return static_cast<int>(root_sum_.size()) - 1; }

private:
    std::vector<double> root_sum_;  // sum_{q <= k} sqrt(q)
};

/// Running corrected trapezoid over samples at nodes b, b+1, ...: out[k] integrates nodes b..b+k.
void cumulative_trapezoid_sqrt(std::span<const double> samples, int b, double h, const SqrtEndpointWeights& w,
                               std::span<double> out);

}  // namespace hma::quad
