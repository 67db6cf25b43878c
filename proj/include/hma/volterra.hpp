#pragma once

#include "hma/boundary.hpp"
#include "hma/curvature.hpp"
#include "hma/grid.hpp"
#include "hma/parallel.hpp"
#include "hma/quadrature.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace hma {

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 500;
    int min_iter = 3;
    /// Endpoint-corrected weights on integrals starting at an axis (see VolterraOperator).
    bool axis_correction = true;
    Execution exec;
};

struct NormalProbe {
    double xi = 0.0;
    double measured = 0.0;  // discrete D_n
    double expected = 0.0;  // n(xi)
};

struct AttainmentReport {
    double gamma1 = 0.0;  // max |x - g| on t = 0
    double gamma2 = 0.0;  // max |x - h| on s = 0
    double cauchy = 0.0;  // max |x - f| on s + t = c
    double normal = 0.0;  // max |D_n x - n| over the probes
    std::vector<NormalProbe> probes;
};

struct AttainmentOptions {
    /// Endpoint exclusion for the D_n probes, as a fraction of c.
    double exclusion = 0.1;
    int probe_count = 9;
    /// Probe points; when empty, probe_count points are spread over [delta, c - delta].
    std::vector<double> xi;
};

enum class ContourCase { I, II, III, IV, unified };

struct ContourProbe {
    double s = 0.0;
    double t = 0.0;
    ContourCase which = ContourCase::unified;
    double residual = 0.0;
};

struct SolveReport {
    int iterations = 0;
    double final_increment = 0.0;
    std::vector<double> increments;
    double certificate = std::numeric_limits<double>::quiet_NaN();
    AttainmentReport attainment;
    std::vector<ContourProbe> contour;

    /// Largest increment_k / increment_{k-1} over iterations whose increments
    /// stay above `floor` (ratios below it are roundoff).
    double max_ratio(double floor = 0.0) const;
};

struct SolveResult {
    Field x;
    SolveReport report;
};

/// Discretized operator x -> F + [row + column integrals of lambda' x] / (2 lambda(s+t)).
///
/// The row integral at (s,t) runs over [(c-t)^+, s], the column integral over
/// [(c-s)^+, t], both by composite trapezoid on the grid. When lambda(0) = 0
/// (rectangle grids on the semi-infinite path) the origin value is pinned to 0.
///
/// Solutions with Goursat data jumping at the corners carry a sqrt cusp along
/// the axes, which caps the plain trapezoid at O(h^1.5). With axis_correction,
/// the first-cell weight of every line integral is adjusted so the rule is exact
/// for a + b sqrt(distance to the axis); smooth integrands stay O(h^2).
class VolterraOperator {
public:
    VolterraOperator(const HodographGrid& grid, const CurvatureProfile& profile, Field forcing,
                     bool axis_correction = true);

    Field apply(const Field& x, const Execution& exec = {}) const;
    /// Same, writing into `out`; out must live on the same grid.
    void apply_into(const Field& x, Field& out, const Execution& exec = {}) const;

    const Field& forcing() const noexcept { return forcing_; }
    const HodographGrid& grid() const noexcept { return grid_; }

private:
    HodographGrid grid_;
    Field forcing_;
    std::vector<double> lam_;   // lambda(k h), k = i + j
    std::vector<double> dlam_;  // lambda'(k h)
    std::optional<quad::SqrtEndpointWeights> weights_;  // unset when the correction is off
};

/// Convenience wrapper over quad::SqrtEndpointWeights.
double sqrt_endpoint_weight(int b, int n);

/// Boundary forcing G at every node. The Goursat integral int_c^s g lambda' uses
/// the grid trapezoid so that the axis traces are reproduced by the discrete
/// operator; the normal-derivative integral uses N when given.
Field boundary_forcing(const HodographGrid& grid, const CauchyGoursatData& data, const CurvatureProfile& profile);

/// int int over D(s,t) = [0,s]x[0,t] intersected with {sigma + tau >= c} of g,
/// by nested trapezoids; zero on the axes and on the Cauchy segment.
Field area_integral(const Field& g);

/// Transfinite blend of {g, h, f} matching the Dirichlet traces at every boundary node.
Field transfinite_blend(const HodographGrid& grid, const CauchyGoursatData& data);

/// One application of the unified operator A to x.
Field apply_A(const Field& x, const CauchyGoursatData& data, const CurvatureProfile& profile,
              const Execution& exec = {});

/// Successive approximation x_{k+1} = A x_k on the truncated cone; `source`
/// (when given) is the right side g of L[x] = g. Throws ConvergenceError.
SolveResult solve_picard(const CauchyGoursatData& data, const CurvatureProfile& profile, const HodographGrid& grid,
                         const SolveOptions& options = {}, const Field* source = nullptr);

/// Forcing-only Picard solve for L[x] = source with zero Cauchy-Goursat data.
SolveResult solve_homogeneous_data(const CurvatureProfile& profile, const HodographGrid& grid, const Field& source,
                                   const SolveOptions& options = {});

/// Fixed-point loop shared by the cone and corrector solvers.
SolveResult iterate_fixed_point(const VolterraOperator& op, Field x0, const SolveOptions& options);

AttainmentReport check_attainment(const Field& x, const CauchyGoursatData& data,
                                  const AttainmentOptions& options = {});

using Evaluator = std::function<double(double, double)>;

/// |LHS - RHS| of the contour relation at (s,t). For a Field, (s,t) must be a node
/// and line integrals use the grid trapezoid; for an Evaluator, adaptive quadrature.
double verify_contour_identity(const Field& x, const CauchyGoursatData& data, const CurvatureProfile& profile,
                               double s, double t, ContourCase which);
double verify_contour_identity(const Evaluator& x, const CauchyGoursatData& data,
                               const CurvatureProfile& profile, double s, double t, ContourCase which);

ContourCase parse_contour_case(std::string_view name);
std::string_view to_string(ContourCase which);

}  // namespace hma
