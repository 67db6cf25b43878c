#pragma once

#include "hma/curvature.hpp"
#include "hma/grid.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hma {

/// Integration constants for q and w at a node with s, t >= c.
struct Anchor {
    double s = 1.0;
    double t = 1.0;
    double q_ref = 0.0;
    double w_ref = 0.0;
    double y_ref = 0.0;
};

/// Anchor matching w = e^{-y} cos x (the lambda(u) = u surface with A = 1).
Anchor product_anchor(double s, double t);

struct PathIntegral {
    Field value;
    /// Per full cell (stored at its lower-left node), |closed loop integral|.
    Field loop;
    double max_loop = 0.0;
    /// max |row-first - column-first| over the nodes.
    double path_gap = 0.0;
};

/// q from dq = lambda(u)(x_s ds - x_t dt), integrated by parts along grid lines
/// from the anchor (row first, then column).
PathIntegral compute_q(const Field& x, const CurvatureProfile& profile, const Anchor& anchor);

struct FoldMask {
    Field x_p;  // (x_s - x_t)/2
    double tol = 0.0;
    std::vector<std::uint8_t> node;    // |x_p| < tol, or touches a folded edge
    std::vector<std::uint8_t> edge_s;  // (i,j)-(i+1,j) changes sign
    std::vector<std::uint8_t> edge_t;  // (i,j)-(i,j+1) changes sign
    std::size_t folded_edges = 0;
    bool empty() const noexcept { return folded_edges == 0; }
};

/// fold_tol defaults to 1e-6 * max |x_p|.
FoldMask detect_folds(const Field& x, std::optional<double> fold_tol = std::nullopt);

struct PhysicalSurface {
    Field x;
    Field y;
    Field q;
    Field w;
    FoldMask folds;
    Anchor anchor;
    double q_loop_max = 0.0;
    double w_loop_max = 0.0;
    double q_path_gap = 0.0;
    double w_path_gap = 0.0;
    Field w_loop;

    const HodographGrid& grid() const noexcept { return x.grid(); }
};

/// w from dw = p dx + q dy with dx = x_s ds + x_t dt, dy = -(ds + dt)/lambda,
/// y from y_of_u anchored at (u_ref, y_ref).
PhysicalSurface compute_surface(const Field& x, const PathIntegral& q, const CurvatureProfile& profile,
                                const Anchor& anchor);

/// compute_q + compute_surface + detect_folds.
PhysicalSurface reconstruct(const Field& x, const CurvatureProfile& profile, const Anchor& anchor);

enum class Exclusion : std::uint8_t { none = 0, fold = 1, boundary = 2 };

struct MAResidual {
    Field residual;  // w_xx w_yy - w_xy^2 + lambda^2; 0 at excluded nodes
    Field w_xx;
    std::vector<Exclusion> excluded;
    std::size_t excluded_count = 0;
    /// sup |residual| over non-excluded nodes with min(s, t, s + t - c) >= margin.
    double sup(double margin) const;
};

MAResidual ma_residual(const PhysicalSurface& surface, const CurvatureProfile& profile);

/// Tabulated physical surface (x, y, w) with optional sign of w_xx per point.
struct SurfacePoint {
    double x = 0, y = 0, w = 0;
};

struct PeriodicExtension {
    double x_plus = 0.0;
    std::vector<SurfacePoint> points;  // one period, x in [-x_plus, 3 x_plus)
    std::size_t seam_pairs = 0;
    double seam_jump_w = 0.0;   // max |w(x_plus, y) + w(-x_plus, y)|
    double seam_jump_wx = 0.0;  // max |w_x(x_plus, y) + w_x(-x_plus, y)|
    double seam_wxx = 0.0;      // max |w_xx| at seam nodes
};

/// Antisymmetric extension w(x + 2 x_plus, y) = -w(x, y) of a reconstructed
/// patch whose Goursat axes are the inflection lines x = -x_plus (t = 0) and
/// x = +x_plus (s = 0).
PeriodicExtension extend_periodic(const PhysicalSurface& surface, const MAResidual& derivatives,
                                  double x_plus, double tol = 1e-9);

/// Rectangular physical patch tabulated on x in [-x_plus, x_plus] (nx + 1 nodes) and ys.
struct PhysicalPatch {
    double x_plus = 0.0;
    int nx = 0;
    std::vector<double> ys;
    std::vector<double> w;  // row-major, w[j * (nx + 1) + i]
    double x(int i) const { return -x_plus + 2.0 * x_plus * i / nx; }
    double at(int i, int j) const { return w[static_cast<std::size_t>(j) * (nx + 1) + i]; }
};

PeriodicExtension extend_periodic(const PhysicalPatch& patch, double tol = 1e-9);

struct ConvexityVerdict {
    bool applicable = true;
    int sign = 0;  // sign of w_xx across the patch interior
    bool constant = true;
    int first_i = -1, first_j = -1;  // first violating node
    std::string reason;
};

/// Sign of w_xx = 1/x_p over the patch interior.
ConvexityVerdict check_partial_convexity(const PhysicalSurface& surface);
/// Sign of the centered second difference in x over the interior of a physical patch.
ConvexityVerdict check_partial_convexity(const PhysicalPatch& patch);

}  // namespace hma
