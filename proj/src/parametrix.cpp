#include "hma/parametrix.hpp"

#include "hma/error.hpp"

#include <algorithm>
#include <cmath>

namespace hma {

double eval_parametrix(const CurvatureProfile& profile, double s, double t) {
    if (s == 0.0 && t == 0.0) return 0.0;
    const double a = profile.lambda(s), b = profile.lambda(t);
    return std::asin(std::clamp((b - a) / (b + a), -1.0, 1.0));
}

namespace {

// Leading term of H as s -> 0 with t fixed:
//   -sqrt(lambda'(0) s) [lambda lambda'' - 2 lambda'^2 + 2 lambda'(0) lambda'](t) / lambda(t)^{3/2}
double axis_expansion(const CurvatureProfile& profile, double s, double t) {
    const double a0 = profile.dlambda(0.0);
    const double b = profile.lambda(t), b1 = profile.dlambda(t), b2 = profile.d2lambda(t);
    return -std::sqrt(a0 * s) * (b * b2 - 2.0 * b1 * b1 + 2.0 * a0 * b1) / (b * std::sqrt(b));
}

}  // namespace

double eval_residual(const CurvatureProfile& profile, double s, double t, double h_switch) {
    if (s == 0.0 && t == 0.0) return 0.0;
    if (std::min(s, t) < h_switch || s == 0.0 || t == 0.0) {
        // H is antisymmetric under s <-> t
        return s <= t ? axis_expansion(profile, s, t) : -axis_expansion(profile, t, s);
    }
    const double a = profile.lambda(s), b = profile.lambda(t);
    const double a1 = profile.dlambda(s), b1 = profile.dlambda(t);
    const double L = profile.lambda(s + t), L1 = profile.dlambda(s + t);
    const double ab = a + b;
    return (L * a1 * b1 * (b - a) + L1 * ab * (a * b1 - a1 * b)) / (std::sqrt(a * b) * ab * ab);
}

Field parametrix_field(const CurvatureProfile& profile, const HodographGrid& grid) {
    return Field::sample(grid, [&](double s, double t) { return eval_parametrix(profile, s, t); }, "x_p");
}

Field residual_field(const CurvatureProfile& profile, const HodographGrid& grid) {
    const double hs = 2.0 * grid.h();
    return Field::sample(grid, [&](double s, double t) { return eval_residual(profile, s, t, hs); }, "H");
}

Field integrated_forcing(const CurvatureProfile& profile, const HodographGrid& grid) {
    if (!grid.is_rectangle()) throw Error(ErrorKind::invalid_argument, "integrated forcing needs a rectangle grid");
    const Field H = residual_field(profile, grid);
    const double hh = 0.5 * grid.h();
    Field rows(grid);
    for (int j = 0; j <= grid.nt(); ++j)
        for (int i = 1; i <= grid.ns(); ++i) rows(i, j) = rows(i - 1, j) + hh * (H(i - 1, j) + H(i, j));
    Field f(grid, "f");
    for (int i = 1; i <= grid.ns(); ++i) {
        double acc = 0.0;
        for (int j = 1; j <= grid.nt(); ++j) {
            acc += hh * (rows(i, j - 1) + rows(i, j));
            f(i, j) = acc == 0.0 ? 0.0 : -acc / (2.0 * profile.lambda(grid.s(i) + grid.t(j)));
        }
    }
    return f;
}

CorrectorProblem make_corrector_problem(const CurvatureProfile& profile, Field forcing) {
    const auto& g = forcing.grid();
    if (!g.is_rectangle()) throw Error(ErrorKind::invalid_argument, "corrector needs a rectangle grid");
    CorrectorProblem p{profile, std::move(forcing), contraction_bounds(profile, g.S() + g.T())};
    return p;
}

CorrectorProblem make_corrector_problem(const CurvatureProfile& profile, const HodographGrid& grid) {
    return make_corrector_problem(profile, integrated_forcing(profile, grid));
}

SolveResult solve_corrector(const CorrectorProblem& problem, const SolveOptions& options) {
    if (!(problem.bounds.certificate < 1.0))
        throw Error(ErrorKind::hypothesis, "contraction certificate is not below 1; corrector not run");
    const auto& g = problem.forcing.grid();
    for (int i = 0; i <= g.ns(); ++i)
        if (problem.forcing(i, 0) != 0.0) throw Error(ErrorKind::invalid_argument, "corrector forcing must vanish on t = 0");
    for (int j = 0; j <= g.nt(); ++j)
        if (problem.forcing(0, j) != 0.0) throw Error(ErrorKind::invalid_argument, "corrector forcing must vanish on s = 0");
    VolterraOperator op(g, problem.profile, problem.forcing, options.axis_correction);
    auto result = iterate_fixed_point(op, Field(g, "x_corr"), options);
    result.report.certificate = problem.bounds.certificate;
    return result;
}

Field assemble_base(const Evaluator& x_p, const Field& x_corr) {
    const auto& g = x_corr.grid();
    Field out(g, "x_base");
    for (int j = 0; j <= g.nt(); ++j)
        for (int i = g.row_start(j); i <= g.ns(); ++i) out(i, j) = x_p(g.s(i), g.t(j)) + x_corr(i, j);
    return out;
}

Field assemble_base(const CurvatureProfile& profile, const Field& x_corr) {
    return assemble_base([&](double s, double t) { return eval_parametrix(profile, s, t); }, x_corr);
}

Field discrete_pde_residual(const Field& x, const CurvatureProfile& profile) {
    const auto& g = x.grid();
    const double h = g.h();
    Field r(g, "L[x]");
    for (int j = 1; j < g.nt(); ++j) {
        for (int i = std::max(1, g.row_start(j) + 1); i < g.ns(); ++i) {
            if (!g.contains(i - 1, j - 1)) continue;
            const double xs = (x(i + 1, j) - x(i - 1, j)) / (2 * h);
            const double xt = (x(i, j + 1) - x(i, j - 1)) / (2 * h);
            const double xst = (x(i + 1, j + 1) - x(i + 1, j - 1) - x(i - 1, j + 1) + x(i - 1, j - 1)) / (4 * h * h);
            const double u = g.s(i) + g.t(j);
            r(i, j) = 2.0 * profile.lambda(u) * xst + profile.dlambda(u) * (xs + xt);
        }
    }
    return r;
}

}  // namespace hma
