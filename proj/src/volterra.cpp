#include "hma/volterra.hpp"

#include "hma/error.hpp"
#include "hma/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hma {

double SolveReport::max_ratio(double floor) const {
    double r = 0.0;
    for (std::size_t k = 1; k < increments.size(); ++k)
        if (increments[k - 1] > floor && increments[k] > floor) r = std::max(r, increments[k] / increments[k - 1]);
    return r;
}

double sqrt_endpoint_weight(int b, int n) { return quad::SqrtEndpointWeights(b + n).weight(b, n); }

VolterraOperator::VolterraOperator(const HodographGrid& grid, const CurvatureProfile& profile, Field forcing,
                                   bool axis_correction)
    : grid_(grid), forcing_(std::move(forcing)) {
    if (axis_correction) weights_.emplace(std::max(grid_.ns(), grid_.nt()));
    require_same_grid(forcing_, Field(grid_), "VolterraOperator");
    const int kmax = grid_.ns() + grid_.nt();
    lam_.resize(static_cast<std::size_t>(kmax + 1));
    dlam_.resize(lam_.size());
    for (int k = 0; k <= kmax; ++k) {
        const double u = k * grid_.h();
        lam_[k] = profile.lambda(u);
        dlam_[k] = profile.dlambda(u);
        if (k >= std::max(grid_.m(), 1) && !(lam_[k] > 0.0))
            throw Error(ErrorKind::hypothesis, "lambda must be positive on the grid diagonals");
    }
}

void VolterraOperator::apply_into(const Field& x, Field& out, const Execution& exec) const {
    require_same_grid(x, forcing_, "apply");
    require_same_grid(out, forcing_, "apply");
    const auto& g = grid_;
    const double hh = 0.5 * g.h();

    // Row integrals int_{(c-t)^+}^s lambda'(sigma + t) x(sigma, t).
    parallel_for(g.nt() + 1, exec, [&](int lo, int hi) {
        for (int j = lo; j < hi; ++j) {
            const int a = g.row_start(j);
            double acc = 0.0;
            double prev = dlam_[a + j] * x(a, j);
            out(a, j) = 0.0;
            const double first = prev;
            const bool fix = weights_.has_value() && a < g.ns();
            const double jump = fix ? g.h() * (dlam_[a + 1 + j] * x(a + 1, j) - first) : 0.0;
            for (int i = a + 1; i <= g.ns(); ++i) {
                const double cur = dlam_[i + j] * x(i, j);
                acc += hh * (prev + cur);
                out(i, j) = fix ? acc + weights_->weight(a, i - a) * jump : acc;
                prev = cur;
            }
        }
    });
    // Column integrals, then assemble.
    parallel_for(g.ns() + 1, exec, [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            const int b = g.col_start(i);
            double acc = 0.0;
            double prev = dlam_[i + b] * x(i, b);
            const bool fix = weights_.has_value() && b < g.nt();
            const double jump = fix ? g.h() * (dlam_[i + b + 1] * x(i, b + 1) - prev) : 0.0;
            for (int j = b; j <= g.nt(); ++j) {
                if (j > b) {
                    const double cur = dlam_[i + j] * x(i, j);
                    acc += hh * (prev + cur);
                    prev = cur;
                }
                const double col = fix && j > b ? acc + weights_->weight(b, j - b) * jump : acc;
                const double l = lam_[i + j];
                out(i, j) = l > 0.0 ? forcing_(i, j) + (out(i, j) + col) / (2.0 * l) : 0.0;
            }
        }
    });
}

Field VolterraOperator::apply(const Field& x, const Execution& exec) const {
    Field out(grid_, x.label);
    out.generation = x.generation + 1;
    apply_into(x, out, exec);
    return out;
}

namespace {

void require_matching_c(const HodographGrid& grid, const CauchyGoursatData& data) {
    if (grid.is_rectangle() || std::abs(grid.c() - data.c) > 1e-12 * std::max(1.0, data.c))
        throw Error(ErrorKind::invalid_argument, "grid c does not match the boundary data c");
}

// One axis contribution to G at nodes k = 0..n along that axis:
// lambda(c) f(.) on the Cauchy side, 2 lambda d - lambda(c) d(c) - int_c d lambda' beyond it.
std::vector<double> axis_part(const HodographGrid& grid, const CauchyGoursatData& data,
                              const CurvatureProfile& profile, bool s_axis, int n) {
    const int m = grid.m();
    const double h = grid.h();
    const double c = data.c;
    const double lc = profile.lambda(c);
    const Sampler& d = s_axis ? data.g : data.h;
    std::vector<double> out(static_cast<std::size_t>(n + 1));
    for (int k = 0; k <= std::min(m, n); ++k) out[k] = lc * data.f(s_axis ? k * h : std::max(c - k * h, 0.0));
    const double dc = d(c);
    double acc = 0.0;
    double prev = dc * profile.dlambda(c);
    for (int k = m + 1; k <= n; ++k) {
        const double v = k * h;
        const double dv = d(v);
        const double cur = dv * profile.dlambda(v);
        acc += 0.5 * h * (prev + cur);
        prev = cur;
        out[k] = 2.0 * profile.lambda(v) * dv - lc * dc - acc;
    }
    return out;
}

}  // namespace

Field boundary_forcing(const HodographGrid& grid, const CauchyGoursatData& data, const CurvatureProfile& profile) {
    require_matching_c(grid, data);
    const int m = grid.m();
    const double h = grid.h();
    const auto A = axis_part(grid, data, profile, true, grid.ns());
    const auto B = axis_part(grid, data, profile, false, grid.nt());
    // Ncum[k] = int_0^{k h} n for k = 0..m
    std::vector<double> Ncum(static_cast<std::size_t>(m + 1), 0.0);
    if (data.N) {
        const double n0 = (*data.N)(0.0);
        for (int k = 1; k <= m; ++k) Ncum[k] = (*data.N)(k == m ? data.c : k * h) - n0;
    } else {
        for (int k = 1; k <= m; ++k)
            Ncum[k] = Ncum[k - 1] + integrate_normal(data, (k - 1) * h, k == m ? data.c : k * h);
    }
    const double lc = profile.lambda(data.c);
    Field G(grid, "G");
    for (int j = 0; j <= grid.nt(); ++j)
        for (int i = grid.row_start(j); i <= grid.ns(); ++i)
            G(i, j) = A[i] + B[j] + lc * (Ncum[std::min(i, m)] - Ncum[grid.row_start(j)]);
    return G;
}

Field area_integral(const Field& g) {
    const auto& grid = g.grid();
    const double hh = 0.5 * grid.h();
    // a(i, j) = int_{(c - t_j)^+}^{s_i} g(sigma, t_j) d sigma, zero left of the row start.
    Field a(grid);
    for (int j = 0; j <= grid.nt(); ++j) {
        const int lo = grid.row_start(j);
        double acc = 0.0;
        for (int i = lo + 1; i <= grid.ns(); ++i) {
            acc += hh * (g(i - 1, j) + g(i, j));
            a(i, j) = acc;
        }
    }
    auto row_value = [&](int i, int j) { return grid.contains(i, j) ? a(i, j) : 0.0; };
    Field out(grid, "area");
    for (int i = 0; i <= grid.ns(); ++i) {
        double acc = 0.0;
        for (int j = 1; j <= grid.nt(); ++j) {
            acc += hh * (row_value(i, j - 1) + row_value(i, j));
            if (grid.contains(i, j)) out(i, j) = acc;
        }
    }
    return out;
}

Field transfinite_blend(const HodographGrid& grid, const CauchyGoursatData& data) {
    require_matching_c(grid, data);
    const double c = data.c;
    auto G = [&](double s) { return s >= c ? data.g(s) : data.f(s); };
    auto H = [&](double t) { return t >= c ? data.h(t) : data.f(c - t); };
    Field x(grid, "x");
    for (int j = 0; j <= grid.nt(); ++j) {
        for (int i = grid.row_start(j); i <= grid.ns(); ++i) {
            const double s = grid.s(i), t = grid.t(j);
            // exact node values on the boundary, independent of roundoff in c s/(s+t)
            if (grid.on_cauchy(i, j)) x(i, j) = data.f(s);
            else if (grid.on_gamma1(i, j)) x(i, j) = data.g(s);
            else if (grid.on_gamma2(i, j)) x(i, j) = data.h(t);
            else x(i, j) = G(s) + H(t) - data.f(c * s / (s + t));
        }
    }
    return x;
}

namespace {

VolterraOperator cone_operator(const CauchyGoursatData& data, const CurvatureProfile& profile,
                               const HodographGrid& grid, const Field* source, bool axis_correction) {
    Field F = boundary_forcing(grid, data, profile);
    if (source) {
        require_same_grid(*source, F, "solve_picard source");
        const Field area = area_integral(*source);
        for (int j = 0; j <= grid.nt(); ++j)
            for (int i = grid.row_start(j); i <= grid.ns(); ++i) F(i, j) += area(i, j);
    }
    for (int j = 0; j <= grid.nt(); ++j)
        for (int i = grid.row_start(j); i <= grid.ns(); ++i) F(i, j) /= 2.0 * profile.lambda(grid.s(i) + grid.t(j));
    F.label = "F";
    return VolterraOperator(grid, profile, std::move(F), axis_correction);
}

}  // namespace

Field apply_A(const Field& x, const CauchyGoursatData& data, const CurvatureProfile& profile, const Execution& exec) {
    return cone_operator(data, profile, x.grid(), nullptr, true).apply(x, exec);
}

SolveResult iterate_fixed_point(const VolterraOperator& op, Field x0, const SolveOptions& options) {
    if (!(options.tol > 0.0) || options.max_iter < 1)
        throw Error(ErrorKind::invalid_argument, "solver needs tol > 0 and max_iter >= 1");
    SolveReport report;
    Field x = std::move(x0);
    Field next(op.grid(), x.label);
    for (int k = 1; k <= options.max_iter; ++k) {
        op.apply_into(x, next, options.exec);
        next.generation = k;
        const double inc = sup_distance(next, x);
        report.increments.push_back(inc);
        std::swap(x, next);
        report.iterations = k;
        report.final_increment = inc;
        if (inc == 0.0 || (inc < options.tol && k >= options.min_iter)) return {std::move(x), std::move(report)};
    }
    std::ostringstream msg;
    msg << "successive approximation did not reach tol " << options.tol << " in " << options.max_iter
        << " iterations (last increment " << report.final_increment << ")";
    throw ConvergenceError(msg.str(), std::move(report.increments));
}

SolveResult solve_picard(const CauchyGoursatData& data, const CurvatureProfile& profile, const HodographGrid& grid,
                         const SolveOptions& options, const Field* source) {
    const auto op = cone_operator(data, profile, grid, source, options.axis_correction);
    auto result = iterate_fixed_point(op, transfinite_blend(grid, data), options);
    result.report.attainment = check_attainment(result.x, data);
    return result;
}

SolveResult solve_homogeneous_data(const CurvatureProfile& profile, const HodographGrid& grid, const Field& source,
                                   const SolveOptions& options) {
    CauchyGoursatData zero;
    zero.c = grid.c();
    zero.g = zero.h = zero.f = zero.n = [](double) { return 0.0; };
    zero.N = Sampler([](double) { return 0.0; });
    zero.label = "zero";
    return solve_picard(zero, profile, grid, options, &source);
}

AttainmentReport check_attainment(const Field& x, const CauchyGoursatData& data, const AttainmentOptions& options) {
    const auto& grid = x.grid();
    require_matching_c(grid, data);
    AttainmentReport r;
    for (int i = grid.m(); i <= grid.ns(); ++i) r.gamma1 = std::max(r.gamma1, std::abs(x(i, 0) - data.g(grid.s(i))));
    for (int j = grid.m(); j <= grid.nt(); ++j) r.gamma2 = std::max(r.gamma2, std::abs(x(0, j) - data.h(grid.t(j))));
    for (int i = 0; i <= grid.m(); ++i)
        r.cauchy = std::max(r.cauchy, std::abs(x(i, grid.m() - i) - data.f(grid.s(i))));

    const double c = data.c;
    const double z = 2.0 * grid.h();
    std::vector<double> xi = options.xi;
    if (xi.empty()) {
        const double delta = options.exclusion * c;
        const int n = std::max(1, options.probe_count);
        for (int k = 0; k < n; ++k) xi.push_back(n == 1 ? 0.5 * c : delta + (c - 2 * delta) * k / (n - 1));
    }
    for (double p : xi) {
        if (!(p > 0.0 && p < c)) throw Error(ErrorKind::invalid_argument, "D_n probe must lie inside (0, c)");
        if (p + z > grid.S() || c - p + z > grid.T()) continue;
        NormalProbe probe;
        probe.xi = p;
        probe.measured = (x.interpolate(p + z, c - p + z) - x.interpolate(p, c - p)) / z;
        probe.expected = data.n(p);
        r.normal = std::max(r.normal, std::abs(probe.measured - probe.expected));
        r.probes.push_back(probe);
    }
    return r;
}

ContourCase parse_contour_case(std::string_view name) {
    if (name == "I") return ContourCase::I;
    if (name == "II") return ContourCase::II;
    if (name == "III") return ContourCase::III;
    if (name == "IV") return ContourCase::IV;
    if (name == "unified") return ContourCase::unified;
    throw Error(ErrorKind::invalid_argument, "unknown contour case: " + std::string(name));
}

std::string_view to_string(ContourCase which) {
    switch (which) {
        case ContourCase::I: return "I";
        case ContourCase::II: return "II";
        case ContourCase::III: return "III";
        case ContourCase::IV: return "IV";
        case ContourCase::unified: return "unified";
    }
    return "?";
}

namespace {

void require_case(double s, double t, double c, ContourCase which) {
    const double e = 1e-12 * std::max(1.0, c);
    bool ok = s >= -e && t >= -e && s + t >= c - e;
    switch (which) {
        case ContourCase::I: ok = ok && s > c && t > c; break;
        case ContourCase::II: ok = ok && s <= c + e && t > c; break;
        case ContourCase::III: ok = ok && s > c && t <= c + e; break;
        case ContourCase::IV: ok = ok && s <= c + e && t <= c + e; break;
        case ContourCase::unified: break;
    }
    if (!ok)
        throw Error(ErrorKind::invalid_argument,
                    "contour case " + std::string(to_string(which)) + " does not cover the requested point");
}

// Known side of the contour relation; Goursat integrals int lambda d' are
// taken by parts so no derivative of the data is needed.
double known_side(const CauchyGoursatData& data, const CurvatureProfile& profile, double s, double t,
                  ContourCase which) {
    const double c = data.c;
    const double lc = profile.lambda(c);
    auto goursat = [&](const Sampler& d, double v) {
        if (v <= c) return 0.0;
        const double tail = quad::integrate([&](double x) { return profile.dlambda(x) * d(x); }, c, v);
        return profile.lambda(v) * d(v) - lc * d(c) - tail;
    };
    auto nint = [&](double a, double b) { return a <= b ? integrate_normal(data, a, b) : -integrate_normal(data, b, a); };
    switch (which) {
        case ContourCase::I:  // -J1
            return goursat(data.g, s) + lc * nint(0.0, c) + goursat(data.h, t);
        case ContourCase::II:  // -J2
            return lc * nint(0.0, s) + goursat(data.h, t);
        case ContourCase::III:
            return lc * nint(c - t, c) + goursat(data.g, s);
        case ContourCase::IV:  // -J4
            return lc * nint(c - t, s);
        case ContourCase::unified:
            return lc * nint(std::max(c - t, 0.0), std::min(c, s)) + goursat(data.g, s) + goursat(data.h, t);
    }
    return 0.0;
}

}  // namespace

double verify_contour_identity(const Field& x, const CauchyGoursatData& data, const CurvatureProfile& profile,
                               double s, double t, ContourCase which) {
    const auto& grid = x.grid();
    require_matching_c(grid, data);
    require_case(s, t, data.c, which);
    const int i = static_cast<int>(std::lround(s / grid.h()));
    const int j = static_cast<int>(std::lround(t / grid.h()));
    if (!grid.contains(i, j) || std::abs(i * grid.h() - s) > 1e-9 || std::abs(j * grid.h() - t) > 1e-9)
        throw Error(ErrorKind::invalid_argument, "contour identity on a field needs a grid node");
    const double h = grid.h();
    auto lam = [&](int k) { return profile.lambda(k * h); };
    auto dlam = [&](int k) { return profile.dlambda(k * h); };

    const int a = grid.row_start(j);
    std::vector<double> row;
    for (int q = a; q <= i; ++q) row.push_back(dlam(q + j) * x(q, j));
    const double row_part = lam(i + j) * x(i, j) - lam(a + j) * x(a, j) - quad::trapezoid(row, h);

    const int b = grid.col_start(i);
    std::vector<double> col;
    for (int q = b; q <= j; ++q) col.push_back(dlam(i + q) * x(i, q));
    const double col_part = lam(i + j) * x(i, j) - lam(i + b) * x(i, b) - quad::trapezoid(col, h);

    return std::abs(row_part + col_part - known_side(data, profile, s, t, which));
}

double verify_contour_identity(const Evaluator& x, const CauchyGoursatData& data, const CurvatureProfile& profile,
                               double s, double t, ContourCase which) {
    require_case(s, t, data.c, which);
    const double c = data.c;
    const double a = std::max(c - t, 0.0);
    const double b = std::max(c - s, 0.0);
    const double lst = profile.lambda(s + t);
    const double row_part = lst * x(s, t) - profile.lambda(a + t) * x(a, t) -
                            quad::integrate([&](double q) { return profile.dlambda(q + t) * x(q, t); }, a, s);
    const double col_part = lst * x(s, t) - profile.lambda(s + b) * x(s, b) -
                            quad::integrate([&](double q) { return profile.dlambda(s + q) * x(s, q); }, b, t);
    return std::abs(row_part + col_part - known_side(data, profile, s, t, which));
}

}  // namespace hma
