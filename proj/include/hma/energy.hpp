#pragma once

#include "hma/boundary.hpp"
#include "hma/curvature.hpp"
#include "hma/grid.hpp"
#include "hma/volterra.hpp"

#include <functional>
#include <span>
#include <vector>

namespace hma {

/// E(u) = int lambda(u)(x_s^2 + x_t^2) ds along s + t = u, trapezoid in s with
/// stencil derivatives. u must be a grid diagonal inside the field's domain.
double line_energy(const Field& x, const CurvatureProfile& profile, double u);
/// Same with precomputed derivative fields.
double line_energy(const Field& x_s, const Field& x_t, const CurvatureProfile& profile, double u);

struct EnergyTrace {
    std::vector<double> u;
    std::vector<double> E;
};

/// E on every diagonal u in [c, min(S, T)] (the diagonals the grid covers entirely).
EnergyTrace energy_trace(const Field& x, const CurvatureProfile& profile);

/// Verdict on E(u) at one u across successive refinements (coarse to fine).
struct RefinementVerdict {
    std::vector<double> values;
    bool divergent = false;
};

/// Divergent when a value at least doubles under one refinement, or when
/// three or more values fail to show contracting differences (|d_k| > 0.6 |d_{k-1}|),
/// which catches logarithmic growth.
RefinementVerdict assess_refinement(std::span<const double> values, double rel_floor = 1e-9);

/// |E(u) - E(c) - int int (g (x_s + x_t) - 2 lambda' x_s x_t) ds dv| over the slab
/// c <= s + t <= u. Requires x = 0 on both axes and u <= min(S, T).
double energy_identity_residual(const Field& x, const Field& g, const CurvatureProfile& profile, double c, double u);

/// [lambda(u) e^{u-c}/lambda(c)] (E_c + |g|^2_{L2(slab)}/2); requires lambda' > 0 on [c, u].
double gronwall_bound(double E_c, const Field& g, const CurvatureProfile& profile, double c, double u);

/// int int over c <= s + t <= u of F, by trapezoid along each diagonal then across diagonals.
double slab_integral(const Field& F, double c, double u);

/// First-order change of log lambda: delta log lambda and its u-derivative.
struct Perturbation {
    std::function<double(double)> dloglam;
    std::function<double(double)> dloglam_prime;
    double c = 1.0;
    double C = 2.0;

    /// delta lambda = eps * lambda0: delta log lambda = eps, derivative identically 0.
    static Perturbation scaling(double eps, double c, double C);
    /// From delta lambda and its derivative over lambda0.
    static Perturbation from_delta_lambda(const CurvatureProfile& lambda0, std::function<double(double)> dl,
                                          std::function<double(double)> dl_prime, double c, double C);
    /// Average of delta log lambda over [c, C].
    double mean() const;
    /// delta log lambda minus its mean; same derivative.
    Perturbation mean_free() const;
    /// int_c^C (d/du delta log lambda)^2 lambda0 du.
    double weighted_norm2(const CurvatureProfile& lambda0) const;
};

/// g = -2 lambda0(u) (delta log lambda)'(u) (x0)_u with (x0)_u = (x_s + x_t)/2.
Field linearized_forcing(const Field& x0, const CurvatureProfile& lambda0, const Perturbation& pert);

struct StabilityReport {
    double sup_E1 = 0.0;
    double sup_E0 = 0.0;
    double weighted_norm2 = 0.0;
    double ratio = 0.0;
    SolveReport base;
    SolveReport linearized;
};

struct StabilityResult {
    Field x0;
    Field x1;
    StabilityReport report;
};

/// Solves the base problem, then L[x1] = g with zero data, and compares energies
/// over the diagonals in [c, min(S, T)].
StabilityResult stability_experiment(const CauchyGoursatData& base, const CurvatureProfile& lambda0,
                                     const Perturbation& pert, const HodographGrid& grid,
                                     const SolveOptions& options = {});

}  // namespace hma
