#include "hma/reconstruct.hpp"

#include "hma/error.hpp"
#include "hma/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace hma {

Anchor product_anchor(double s, double t) {
    const double r = 2.0 * std::sqrt(s * t);
    return Anchor{s, t, -r, r, -std::log(s + t)};
}

namespace {

// Corrected running integrals of a nodal integrand along every row and every column,
// started at the first node of each line.
struct LinePrefix {
    Field row;
    Field col;
};

LinePrefix line_prefix(const Field& phi, const quad::SqrtEndpointWeights& w) {
    const auto& g = phi.grid();
    LinePrefix p{Field(g), Field(g)};
    std::vector<double> buf, out;
    for (int j = 0; j <= g.nt(); ++j) {
        const int a = g.row_start(j);
        buf.clear();
        for (int i = a; i <= g.ns(); ++i) buf.push_back(phi(i, j));
        out.assign(buf.size(), 0.0);
        quad::cumulative_trapezoid_sqrt(buf, a, g.h(), w, out);
        for (int i = a; i <= g.ns(); ++i) p.row(i, j) = out[i - a];
    }
    for (int i = 0; i <= g.ns(); ++i) {
        const int b = g.col_start(i);
        buf.clear();
        for (int j = b; j <= g.nt(); ++j) buf.push_back(phi(i, j));
        out.assign(buf.size(), 0.0);
        quad::cumulative_trapezoid_sqrt(buf, b, g.h(), w, out);
        for (int j = b; j <= g.nt(); ++j) p.col(i, j) = out[j - b];
    }
    return p;
}

std::pair<int, int> anchor_node(const HodographGrid& g, const Anchor& a) {
    const int i = static_cast<int>(std::lround(a.s / g.h()));
    const int j = static_cast<int>(std::lround(a.t / g.h()));
    if (std::abs(i * g.h() - a.s) > 1e-9 || std::abs(j * g.h() - a.t) > 1e-9 || !g.contains(i, j))
        throw Error(ErrorKind::invalid_argument, "anchor must be a grid node");
    if (i < g.m() || j < g.m()) throw Error(ErrorKind::invalid_argument, "anchor needs s >= c and t >= c");
    return {i, j};
}

using Increment = std::function<double(int, int, int)>;  // (line, from, to)

// Row-first and column-first path integration plus per-cell loop sums.
PathIntegral integrate_paths(const HodographGrid& g, int ia, int ja, double ref, const Increment& d_row,
                             const Increment& d_col, const char* label) {
    PathIntegral r{Field(g, label), Field(g, std::string(label) + "_loop"), 0.0, 0.0};
    for (int j = 0; j <= g.nt(); ++j)
        for (int i = g.row_start(j); i <= g.ns(); ++i) {
            const double row_first = ref + d_row(ja, ia, i) + d_col(i, ja, j);
            const double col_first = ref + d_col(ia, ja, j) + d_row(j, ia, i);
            r.value(i, j) = row_first;
            r.path_gap = std::max(r.path_gap, std::abs(row_first - col_first));
        }
    for (int j = 0; j < g.nt(); ++j)
        for (int i = g.row_start(j); i < g.ns(); ++i) {
            if (!g.contains(i, j) || !g.contains(i, j + 1)) continue;
            const double loop = d_row(j, i, i + 1) + d_col(i + 1, j, j + 1) - d_row(j + 1, i, i + 1) - d_col(i, j, j + 1);
            r.loop(i, j) = std::abs(loop);
            r.max_loop = std::max(r.max_loop, std::abs(loop));
        }
    return r;
}

}  // namespace

PathIntegral compute_q(const Field& x, const CurvatureProfile& profile, const Anchor& anchor) {
    const auto& g = x.grid();
    const auto [ia, ja] = anchor_node(g, anchor);
    const quad::SqrtEndpointWeights w(std::max(g.ns(), g.nt()));
    Field lx(g), dlx(g);
    for (int j = 0; j <= g.nt(); ++j)
        for (int i = g.row_start(j); i <= g.ns(); ++i) {
            const double u = g.s(i) + g.t(j);
            lx(i, j) = profile.lambda(u) * x(i, j);
            dlx(i, j) = profile.dlambda(u) * x(i, j);
        }
    const LinePrefix P = line_prefix(dlx, w);
    // int lambda x_sigma = [lambda x] - int lambda' x ; -int lambda x_tau = -[lambda x] + int lambda' x
    Increment d_row = [&](int j, int i0, int i1) { return lx(i1, j) - lx(i0, j) - (P.row(i1, j) - P.row(i0, j)); };
    Increment d_col = [&](int i, int j0, int j1) { return -(lx(i, j1) - lx(i, j0)) + (P.col(i, j1) - P.col(i, j0)); };
    return integrate_paths(g, ia, ja, anchor.q_ref, d_row, d_col, "q");
}

FoldMask detect_folds(const Field& x, std::optional<double> fold_tol) {
    const auto& g = x.grid();
    const Field xs = derivative_s(x), xt = derivative_t(x);
    FoldMask m{Field(g, "x_p"), 0.0, {}, {}, {}, 0};
    double peak = 0.0;
    for (int j = 0; j <= g.nt(); ++j)
        for (int i = g.row_start(j); i <= g.ns(); ++i) {
            m.x_p(i, j) = 0.5 * (xs(i, j) - xt(i, j));
            if (std::isfinite(m.x_p(i, j))) peak = std::max(peak, std::abs(m.x_p(i, j)));
        }
    m.tol = fold_tol ? *fold_tol : 1e-6 * peak;
    const std::size_t n = g.storage_size();
    m.node.assign(n, 0);
    m.edge_s.assign(n, 0);
    m.edge_t.assign(n, 0);
    for (int j = 0; j <= g.nt(); ++j)
        for (int i = g.row_start(j); i <= g.ns(); ++i) {
            const double v = m.x_p(i, j);
            const auto k = g.index(i, j);
            if (std::abs(v) < m.tol) m.node[k] = 1;
            if (i < g.ns() && v * m.x_p(i + 1, j) < 0.0) {
                m.edge_s[k] = 1;
                m.node[k] = m.node[g.index(i + 1, j)] = 1;
                ++m.folded_edges;
            }
            if (j < g.nt() && v * m.x_p(i, j + 1) < 0.0) {
                m.edge_t[k] = 1;
                m.node[k] = m.node[g.index(i, j + 1)] = 1;
                ++m.folded_edges;
            }
        }
    return m;
}

PhysicalSurface compute_surface(const Field& x, const PathIntegral& q, const CurvatureProfile& profile,
                                const Anchor& anchor) {
    const auto& g = x.grid();
    require_same_grid(x, q.value, "compute_surface");
    const auto [ia, ja] = anchor_node(g, anchor);
    const double u_ref = anchor.s + anchor.t;

    std::vector<double> y_diag(static_cast<std::size_t>(g.ns() + g.nt() + 1), 0.0);
    for (int k = g.m(); k <= g.ns() + g.nt(); ++k) {
        if (k == 0) throw Error(ErrorKind::invalid_argument, "compute_surface: u = 0 on the grid (y diverges)");
        y_diag[k] = y_of_u(profile, k * g.h(), u_ref, anchor.y_ref);
    }

    const quad::SqrtEndpointWeights w(std::max(g.ns(), g.nt()));
    Field px(g), ql(g);
    for (int j = 0; j <= g.nt(); ++j)
        for (int i = g.row_start(j); i <= g.ns(); ++i) {
            px(i, j) = (g.s(i) - g.t(j)) * x(i, j);
            ql(i, j) = q.value(i, j) / profile.lambda(g.s(i) + g.t(j));
        }
    const LinePrefix X = line_prefix(x, w);
    const LinePrefix Q = line_prefix(ql, w);
    // p = sigma - t: int p x_sigma = [p x] - int x ; along a column p_tau = -1
    Increment d_row = [&](int j, int i0, int i1) {
        return px(i1, j) - px(i0, j) - (X.row(i1, j) - X.row(i0, j)) - (Q.row(i1, j) - Q.row(i0, j));
    };
    Increment d_col = [&](int i, int j0, int j1) {
        return px(i, j1) - px(i, j0) + (X.col(i, j1) - X.col(i, j0)) - (Q.col(i, j1) - Q.col(i, j0));
    };
    PathIntegral wi = integrate_paths(g, ia, ja, anchor.w_ref, d_row, d_col, "w");

    PhysicalSurface out{x, Field(g, "y"), q.value, std::move(wi.value), detect_folds(x), anchor,
                        q.max_loop, wi.max_loop, q.path_gap, wi.path_gap, std::move(wi.loop)};
    for (int j = 0; j <= g.nt(); ++j)
        for (int i = g.row_start(j); i <= g.ns(); ++i) out.y(i, j) = y_diag[i + j];
    return out;
}

PhysicalSurface reconstruct(const Field& x, const CurvatureProfile& profile, const Anchor& anchor) {
    return compute_surface(x, compute_q(x, profile, anchor), profile, anchor);
}

double MAResidual::sup(double margin) const {
    const auto& g = residual.grid();
    double m = 0.0;
    for (int j = 0; j <= g.nt(); ++j)
        for (int i = g.row_start(j); i <= g.ns(); ++i) {
            const double s = g.s(i), t = g.t(j);
            if (excluded[g.index(i, j)] != Exclusion::none) continue;
            if (std::min({s, t, s + t - g.c(), g.S() - s, g.T() - t}) < margin) continue;
            m = std::max(m, std::abs(residual(i, j)));
        }
    return m;
}

MAResidual ma_residual(const PhysicalSurface& surface, const CurvatureProfile& profile) {
    const auto& g = surface.grid();
    const Field xs = derivative_s(surface.x), xt = derivative_t(surface.x);
    const Field qs = derivative_s(surface.q), qt = derivative_t(surface.q);
    MAResidual r{Field(g, "ma_residual"), Field(g, "w_xx"), std::vector<Exclusion>(g.storage_size(), Exclusion::none), 0};
    for (int j = 0; j <= g.nt(); ++j)
        for (int i = g.row_start(j); i <= g.ns(); ++i) {
            const auto k = g.index(i, j);
            if (surface.folds.node[k]) {
                r.excluded[k] = Exclusion::fold;
                ++r.excluded_count;
                continue;
            }
            const double u = g.s(i) + g.t(j);
            const double lam = profile.lambda(u);
            const double yu = -1.0 / lam;
            const double D = xs(i, j) - xt(i, j);
            // inverse Jacobian of (s,t) -> (x,y): F_x = (F_s - F_t)/D, F_y = (F_t x_s - F_s x_t)/(y_u D)
            const double p_x = 2.0 / D;
            const double p_y = -(xs(i, j) + xt(i, j)) / (yu * D);
            const double q_x = (qs(i, j) - qt(i, j)) / D;
            const double q_y = (qt(i, j) * xs(i, j) - qs(i, j) * xt(i, j)) / (yu * D);
            const double w_xy = 0.5 * (p_y + q_x);
            const double res = p_x * q_y - w_xy * w_xy + lam * lam;
            if (!std::isfinite(res)) {
                r.excluded[k] = Exclusion::boundary;
                ++r.excluded_count;
                continue;
            }
            r.residual(i, j) = res;
            r.w_xx(i, j) = p_x;
        }
    return r;
}

PeriodicExtension extend_periodic(const PhysicalSurface& surface, const MAResidual& derivatives, double x_plus,
                                  double tol) {
    const auto& g = surface.grid();
    PeriodicExtension e;
    e.x_plus = x_plus;
    for (int k = std::max(g.m(), 1); k <= std::min(g.ns(), g.nt()); ++k) {
        const double xl = surface.x(k, 0), xr = surface.x(0, k);
        if (std::abs(xl + x_plus) > tol || std::abs(xr - x_plus) > tol) continue;
        ++e.seam_pairs;
        e.seam_jump_w = std::max(e.seam_jump_w, std::abs(surface.w(0, k) + surface.w(k, 0)));
        // w_x = p = s - t on both sides
        e.seam_jump_wx = std::max(e.seam_jump_wx, std::abs((0.0 - g.t(k)) + (g.s(k) - 0.0)));
        for (auto node : {g.index(k, 0), g.index(0, k)})
            if (derivatives.excluded[node] == Exclusion::none)
                e.seam_wxx = std::max(e.seam_wxx, std::abs(derivatives.w_xx.values()[node]));
    }
    if (e.seam_pairs == 0) throw Error(ErrorKind::invalid_argument, "patch does not reach the inflection lines x = +/- x_plus");
    for (int j = 0; j <= g.nt(); ++j)
        for (int i = g.row_start(j); i <= g.ns(); ++i) {
            const SurfacePoint p{surface.x(i, j), surface.y(i, j), surface.w(i, j)};
            e.points.push_back(p);
            if (p.x < x_plus - tol) e.points.push_back({p.x + 2.0 * x_plus, p.y, -p.w});
        }
    return e;
}

PeriodicExtension extend_periodic(const PhysicalPatch& patch, double tol) {
    if (patch.nx < 2 || patch.w.size() != patch.ys.size() * static_cast<std::size_t>(patch.nx + 1))
        throw Error(ErrorKind::invalid_argument, "physical patch is malformed");
    if (std::abs(patch.x(patch.nx) - patch.x_plus) > tol)
        throw Error(ErrorKind::invalid_argument, "patch does not reach x_plus");
    PeriodicExtension e;
    e.x_plus = patch.x_plus;
    const double dx = 2.0 * patch.x_plus / patch.nx;
    const int n = patch.nx;
    for (std::size_t j = 0; j < patch.ys.size(); ++j) {
        const int jj = static_cast<int>(j);
        ++e.seam_pairs;
        e.seam_jump_w = std::max(e.seam_jump_w, std::abs(patch.at(n, jj) + patch.at(0, jj)));
        const double wx_right = (3 * patch.at(n, jj) - 4 * patch.at(n - 1, jj) + patch.at(n - 2, jj)) / (2 * dx);
        const double wx_left = (-3 * patch.at(0, jj) + 4 * patch.at(1, jj) - patch.at(2, jj)) / (2 * dx);
        e.seam_jump_wx = std::max(e.seam_jump_wx, std::abs(wx_right + wx_left));
        // centered second difference across x_plus, right neighbour from the extension
        const double wxx = (-patch.at(1, jj) - 2 * patch.at(n, jj) + patch.at(n - 1, jj)) / (dx * dx);
        e.seam_wxx = std::max(e.seam_wxx, std::abs(wxx));
        for (int i = 0; i <= n; ++i) e.points.push_back({patch.x(i), patch.ys[j], patch.at(i, jj)});
        for (int i = 1; i < n; ++i) e.points.push_back({patch.x(i) + 2 * patch.x_plus, patch.ys[j], -patch.at(i, jj)});
    }
    return e;
}

ConvexityVerdict check_partial_convexity(const PhysicalSurface& surface) {
    const auto& g = surface.grid();
    ConvexityVerdict v;
    auto interior = [&](int i, int j) { return i > 0 && j > 0 && i < g.ns() && j < g.nt() && i + j > g.m(); };
    for (int j = 0; j <= g.nt(); ++j)
        for (int i = g.row_start(j); i <= g.ns(); ++i)
            if (interior(i, j) && surface.folds.node[g.index(i, j)]) {
                v.applicable = false;
                v.constant = false;
                v.first_i = i;
                v.first_j = j;
                v.reason = "fold at node (" + std::to_string(i) + "," + std::to_string(j) + ")";
                return v;
            }
    for (int j = 0; j <= g.nt(); ++j)
        for (int i = g.row_start(j); i <= g.ns(); ++i) {
            if (!interior(i, j)) continue;
            const int sg = surface.folds.x_p(i, j) > 0 ? 1 : -1;  // sign of w_xx = 1/x_p
            if (v.sign == 0) v.sign = sg;
            else if (sg != v.sign && v.constant) {
                v.constant = false;
                v.first_i = i;
                v.first_j = j;
                v.reason = "w_xx changes sign";
            }
        }
    return v;
}

ConvexityVerdict check_partial_convexity(const PhysicalPatch& patch) {
    ConvexityVerdict v;
    const double dx = 2.0 * patch.x_plus / patch.nx;
    for (std::size_t j = 0; j < patch.ys.size(); ++j)
        for (int i = 1; i < patch.nx; ++i) {
            const int jj = static_cast<int>(j);
            const double wxx = (patch.at(i + 1, jj) - 2 * patch.at(i, jj) + patch.at(i - 1, jj)) / (dx * dx);
            if (wxx == 0.0) continue;
            const int sg = wxx > 0 ? 1 : -1;
            if (v.sign == 0) v.sign = sg;
            else if (sg != v.sign && v.constant) {
                v.constant = false;
                v.first_i = i;
                v.first_j = jj;
                v.reason = "w_xx changes sign";
            }
        }
    return v;
}

}  // namespace hma
