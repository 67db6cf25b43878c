#include "hma/energy.hpp"

#include "hma/error.hpp"
#include "hma/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace hma {

namespace {

int diagonal_index(const HodographGrid& g, double u, const char* where) {
    const int k = static_cast<int>(std::lround(u / g.h()));
    if (std::abs(k * g.h() - u) > 1e-9 * std::max(1.0, u) || k < g.m() || k > g.ns() + g.nt())
        throw Error(ErrorKind::invalid_argument, std::string(where) + ": u is not a grid diagonal of the domain");
    return k;
}

// Trapezoid in s of fn(i, k - i) along diagonal k.
template <class Fn>
double along_diagonal(const HodographGrid& g, int k, Fn&& fn) {
    const int lo = std::max(0, k - g.nt());
    const int hi = std::min(k, g.ns());
    if (hi <= lo) return 0.0;
    double acc = 0.5 * (fn(lo, k - lo) + fn(hi, k - hi));
    for (int i = lo + 1; i < hi; ++i) acc += fn(i, k - i);
    return acc * g.h();
}

void require_full_diagonal(const HodographGrid& g, int k, const char* where) {
    if (k > std::min(g.ns(), g.nt()))
        throw Error(ErrorKind::invalid_argument, std::string(where) + ": diagonal leaves the grid through s = S or t = T");
}

}  // namespace

double line_energy(const Field& x_s, const Field& x_t, const CurvatureProfile& profile, double u) {
    require_same_grid(x_s, x_t, "line_energy");
    const auto& g = x_s.grid();
    const int k = diagonal_index(g, u, "line_energy");
    require_full_diagonal(g, k, "line_energy");
    const double l = profile.lambda(k * g.h());
    return l * along_diagonal(g, k, [&](int i, int j) { return x_s(i, j) * x_s(i, j) + x_t(i, j) * x_t(i, j); });
}

double line_energy(const Field& x, const CurvatureProfile& profile, double u) {
    return line_energy(derivative_s(x), derivative_t(x), profile, u);
}

EnergyTrace energy_trace(const Field& x, const CurvatureProfile& profile) {
    const auto& g = x.grid();
    const Field xs = derivative_s(x), xt = derivative_t(x);
    EnergyTrace tr;
    for (int k = g.m(); k <= std::min(g.ns(), g.nt()); ++k) {
        tr.u.push_back(k * g.h());
        tr.E.push_back(line_energy(xs, xt, profile, k * g.h()));
    }
    return tr;
}

RefinementVerdict assess_refinement(std::span<const double> values, double rel_floor) {
    RefinementVerdict v;
    v.values.assign(values.begin(), values.end());
    for (std::size_t k = 1; k < values.size(); ++k)
        if (values[k] >= 2.0 * values[k - 1] && values[k] > 0.0) v.divergent = true;
    for (std::size_t k = 2; k < values.size(); ++k) {
        const double d1 = std::abs(values[k - 1] - values[k - 2]);
        const double d2 = std::abs(values[k] - values[k - 1]);
        if (d2 > 0.6 * d1 && d2 > rel_floor * std::abs(values[k])) v.divergent = true;
    }
    return v;
}

double slab_integral(const Field& F, double c, double u) {
    const auto& g = F.grid();
    const int kc = diagonal_index(g, c, "slab_integral");
    const int ku = diagonal_index(g, u, "slab_integral");
    if (ku < kc) throw Error(ErrorKind::invalid_argument, "slab_integral: u < c");
    std::vector<double> lines;
    for (int k = kc; k <= ku; ++k) lines.push_back(along_diagonal(g, k, [&](int i, int j) { return F(i, j); }));
    return quad::trapezoid(lines, g.h());
}

double energy_identity_residual(const Field& x, const Field& g, const CurvatureProfile& profile, double c, double u) {
    require_same_grid(x, g, "energy_identity_residual");
    const auto& grid = x.grid();
    const int ku = diagonal_index(grid, u, "energy_identity_residual");
    diagonal_index(grid, c, "energy_identity_residual");
    require_full_diagonal(grid, ku, "energy_identity_residual");
    const double scale = std::max(1.0, x.sup_norm());
    for (int i = grid.m(); i <= grid.ns(); ++i)
        if (std::abs(x(i, 0)) > 1e-10 * scale)
            throw Error(ErrorKind::hypothesis, "energy identity needs x = 0 on t = 0");
    for (int j = grid.m(); j <= grid.nt(); ++j)
        if (std::abs(x(0, j)) > 1e-10 * scale)
            throw Error(ErrorKind::hypothesis, "energy identity needs x = 0 on s = 0");

    const Field xs = derivative_s(x), xt = derivative_t(x);
    Field integrand(grid);
    for (int j = 0; j <= grid.nt(); ++j)
        for (int i = grid.row_start(j); i <= grid.ns(); ++i) {
            const double v = grid.s(i) + grid.t(j);
            integrand(i, j) = g(i, j) * (xs(i, j) + xt(i, j)) - 2.0 * profile.dlambda(v) * xs(i, j) * xt(i, j);
        }
    const double lhs = line_energy(xs, xt, profile, u) - line_energy(xs, xt, profile, c);
    return std::abs(lhs - slab_integral(integrand, c, u));
}

double gronwall_bound(double E_c, const Field& g, const CurvatureProfile& profile, double c, double u) {
    for (int k = 0; k <= 256; ++k) {
        const double z = c + (u - c) * k / 256.0;
        if (!(profile.dlambda(z) > 0.0))
            throw Error(ErrorKind::hypothesis, "Gronwall bound needs lambda' > 0 on [c, u]");
    }
    Field g2(g.grid());
    const auto& grid = g.grid();
    for (int j = 0; j <= grid.nt(); ++j)
        for (int i = grid.row_start(j); i <= grid.ns(); ++i) g2(i, j) = g(i, j) * g(i, j);
    const double norm2 = u > c ? slab_integral(g2, c, u) : 0.0;
    return profile.lambda(u) * std::exp(u - c) / profile.lambda(c) * (E_c + 0.5 * norm2);
}

Perturbation Perturbation::scaling(double eps, double c, double C) {
    return Perturbation{[eps](double) { return eps; }, [](double) { return 0.0; }, c, C};
}

Perturbation Perturbation::from_delta_lambda(const CurvatureProfile& lambda0, std::function<double(double)> dl,
                                             std::function<double(double)> dl_prime, double c, double C) {
    Perturbation p;
    p.c = c;
    p.C = C;
    p.dloglam = [lambda0, dl](double u) { return dl(u) / lambda0.lambda(u); };
    p.dloglam_prime = [lambda0, dl, dl_prime](double u) {
        const double l = lambda0.lambda(u);
        return (dl_prime(u) - dl(u) * lambda0.dlambda(u) / l) / l;
    };
    return p;
}

double Perturbation::mean() const { return quad::integrate(dloglam, c, C) / (C - c); }

Perturbation Perturbation::mean_free() const {
    Perturbation p = *this;
    const double m = mean();
    auto base = dloglam;
    p.dloglam = [base, m](double u) { return base(u) - m; };
    return p;
}

double Perturbation::weighted_norm2(const CurvatureProfile& lambda0) const {
    return quad::integrate(
        [&](double u) {
            const double d = dloglam_prime(u);
            return d * d * lambda0.lambda(u);
        },
        c, C);
}

Field linearized_forcing(const Field& x0, const CurvatureProfile& lambda0, const Perturbation& pert) {
    const auto& g = x0.grid();
    const Field xs = derivative_s(x0), xt = derivative_t(x0);
    Field out(g, "g");
    for (int j = 0; j <= g.nt(); ++j)
        for (int i = g.row_start(j); i <= g.ns(); ++i) {
            const double u = g.s(i) + g.t(j);
            const double xu = 0.5 * (xs(i, j) + xt(i, j));
            out(i, j) = -2.0 * lambda0.lambda(u) * pert.dloglam_prime(u) * xu;
        }
    return out;
}

StabilityResult stability_experiment(const CauchyGoursatData& base, const CurvatureProfile& lambda0,
                                     const Perturbation& pert, const HodographGrid& grid,
                                     const SolveOptions& options) {
    auto r0 = solve_picard(base, lambda0, grid, options);
    const Field g = linearized_forcing(r0.x, lambda0, pert);
    auto r1 = solve_homogeneous_data(lambda0, grid, g, options);
    r1.x.label = "x1";

    StabilityResult out{r0.x, r1.x, {}};
    const auto e0 = energy_trace(r0.x, lambda0);
    const auto e1 = energy_trace(r1.x, lambda0);
    auto& rep = out.report;
    rep.sup_E0 = e0.E.empty() ? 0.0 : *std::max_element(e0.E.begin(), e0.E.end());
    rep.sup_E1 = e1.E.empty() ? 0.0 : *std::max_element(e1.E.begin(), e1.E.end());
    rep.weighted_norm2 = pert.weighted_norm2(lambda0);
    const double denom = rep.sup_E0 * rep.weighted_norm2;
    rep.ratio = rep.sup_E1 == 0.0 ? 0.0 : (denom > 0.0 ? rep.sup_E1 / denom : std::numeric_limits<double>::infinity());
    rep.base = std::move(r0.report);
    rep.linearized = std::move(r1.report);
    return out;
}

}  // namespace hma
