#pragma once

#include "hma/curvature.hpp"
#include "hma/grid.hpp"
#include "hma/volterra.hpp"

namespace hma {

/// x_p = arcsin((lambda(t) - lambda(s))/(lambda(t) + lambda(s))); 0 at the origin.
double eval_parametrix(const CurvatureProfile& profile, double s, double t);

/// H = L[x_p]. Closed form when min(s,t) >= h_switch, axis expansion otherwise;
/// H(0,0) = 0.
double eval_residual(const CurvatureProfile& profile, double s, double t, double h_switch = 0.0);

Field parametrix_field(const CurvatureProfile& profile, const HodographGrid& grid);
/// H on the grid with h_switch = 2h.
Field residual_field(const CurvatureProfile& profile, const HodographGrid& grid);

/// f = -(1/(2 lambda(s+t))) int_0^s int_0^t H, by cumulative 2-D trapezoid.
/// Exactly zero on both axes.
Field integrated_forcing(const CurvatureProfile& profile, const HodographGrid& grid);

struct CorrectorProblem {
    CurvatureProfile profile;
    Field forcing;
    ContractionBounds bounds;
};

/// Builds the problem on a rectangle grid; bounds use U = S + T.
CorrectorProblem make_corrector_problem(const CurvatureProfile& profile, const HodographGrid& grid);
CorrectorProblem make_corrector_problem(const CurvatureProfile& profile, Field forcing);

/// Fixed point of x = f + int_0^s K1 x + int_0^t K2 x. Refuses to run unless the
/// certificate is below 1 and the forcing vanishes on the axes.
SolveResult solve_corrector(const CorrectorProblem& problem, const SolveOptions& options = {});

/// x_p + x_corr node by node.
Field assemble_base(const Evaluator& x_p, const Field& x_corr);
Field assemble_base(const CurvatureProfile& profile, const Field& x_corr);

/// Stencil residual 2 lambda x_st + lambda'(x_s + x_t) at interior nodes; zero elsewhere.
Field discrete_pde_residual(const Field& x, const CurvatureProfile& profile);

}  // namespace hma
