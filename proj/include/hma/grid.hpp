#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace hma {

/// Uniform hodograph grid {(i h, j h) : 0 <= i <= ns, 0 <= j <= nt, i + j >= m}.
/// A truncated cone has m = c/h > 0; a rectangle [0,S]x[0,T] is the case m = 0.
class HodographGrid {
public:
    static HodographGrid cone(double c, double S, double T, double h);
    static HodographGrid rectangle(double S, double T, double h);

    double c() const noexcept { return m_ * h_; }
    double S() const noexcept { return ns_ * h_; }
    double T() const noexcept { return nt_ * h_; }
    double h() const noexcept { return h_; }
    int ns() const noexcept { return ns_; }
    int nt() const noexcept { return nt_; }
    int m() const noexcept { return m_; }
    bool is_rectangle() const noexcept { return m_ == 0; }

    bool contains(int i, int j) const noexcept { return i >= 0 && j >= 0 && i <= ns_ && j <= nt_ && i + j >= m_; }
    /// First node index of row j (the lower limit (c - t)^+ / h).
    int row_start(int j) const noexcept { return m_ > j ? m_ - j : 0; }
    /// First node index of column i.
    int col_start(int i) const noexcept { return m_ > i ? m_ - i : 0; }

    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(ns_ + 1) + static_cast<std::size_t>(i);
    }
    std::size_t storage_size() const noexcept {
        return static_cast<std::size_t>(ns_ + 1) * static_cast<std::size_t>(nt_ + 1);
    }
    std::size_t node_count() const noexcept;

    double s(int i) const noexcept { return i * h_; }
    double t(int j) const noexcept { return j * h_; }

    bool on_gamma1(int i, int j) const noexcept { return j == 0 && i >= m_; }
    bool on_gamma2(int i, int j) const noexcept { return i == 0 && j >= m_; }
    bool on_cauchy(int i, int j) const noexcept { return m_ > 0 && i + j == m_; }
    bool on_boundary(int i, int j) const noexcept { return on_gamma1(i, j) || on_gamma2(i, j) || on_cauchy(i, j); }

    /// Grid-parameter header fragment, e.g. "grid=cone c=1 S=3 T=3 h=0.0078125".
    std::string describe() const;

    bool operator==(const HodographGrid&) const = default;

private:
    HodographGrid(int ns, int nt, int m, double h) : ns_(ns), nt_(nt), m_(m), h_(h) {}

    int ns_ = 0;
    int nt_ = 0;
    int m_ = 0;
    double h_ = 1.0;
};

/// Scalar grid function. Storage is dense over the bounding rectangle; nodes
/// outside the grid hold NaN and are never read by the solvers.
class Field {
public:
    explicit Field(HodographGrid grid, std::string label = {});

    template <class Fn>
    static Field sample(const HodographGrid& grid, Fn&& fn, std::string label = {}) {
        Field out(grid, std::move(label));
        for (int j = 0; j <= grid.nt(); ++j)
            for (int i = grid.row_start(j); i <= grid.ns(); ++i) out(i, j) = fn(grid.s(i), grid.t(j));
        return out;
    }

    double& operator()(int i, int j) noexcept { return values_[grid_.index(i, j)]; }
    double operator()(int i, int j) const noexcept { return values_[grid_.index(i, j)]; }

    const HodographGrid& grid() const noexcept { return grid_; }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    /// Bilinear interpolation; falls back to the nearest valid corners on cells cut by s + t = c.
    double interpolate(double s, double t) const;

    double sup_norm() const;

    std::string label;
    int generation = 0;

private:
    HodographGrid grid_;
    std::vector<double> values_;
};

/// max |a - b| over the grid nodes; grids must match.
double sup_distance(const Field& a, const Field& b);

void require_same_grid(const Field& a, const Field& b, const char* where);

/// d/ds and d/dt: centered differences inside, second-order one-sided at the
/// ends of each row/column.
Field derivative_s(const Field& x);
Field derivative_t(const Field& x);

/// Plain text field format: a '#' header with columns and grid parameters,
/// then one "s<TAB>t<TAB>x" line per node in row-major order (t outer).
void write_field(std::ostream& os, const Field& field);
void write_field(const std::string& path, const Field& field);
Field read_field(std::istream& is);
Field read_field(const std::string& path);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace hma
