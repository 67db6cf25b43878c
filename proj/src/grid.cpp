#include "hma/grid.hpp"

#include "hma/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace hma {

namespace {

int steps(double length, double h, const char* what) {
    const double r = length / h;
    const double k = std::round(r);
    if (!(std::abs(r - k) <= 1e-9 * std::max(1.0, k)))
        throw Error(ErrorKind::invalid_argument, std::string(what) + " must be an integer multiple of h");
    return static_cast<int>(k);
}

}  // namespace

HodographGrid HodographGrid::cone(double c, double S, double T, double h) {
    if (!(h > 0.0) || !(c > 0.0)) throw Error(ErrorKind::invalid_argument, "cone grid needs c > 0 and h > 0");
    if (S < c || T < c) throw Error(ErrorKind::invalid_argument, "cone grid needs S >= c and T >= c");
    return HodographGrid(steps(S, h, "S"), steps(T, h, "T"), steps(c, h, "c"), h);
}

HodographGrid HodographGrid::rectangle(double S, double T, double h) {
    if (!(h > 0.0) || !(S > 0.0) || !(T > 0.0))
        throw Error(ErrorKind::invalid_argument, "rectangle grid needs S, T, h > 0");
    return HodographGrid(steps(S, h, "S"), steps(T, h, "T"), 0, h);
}

std::size_t HodographGrid::node_count() const noexcept {
    std::size_t n = 0;
    for (int j = 0; j <= nt_; ++j) n += static_cast<std::size_t>(ns_ - row_start(j) + 1);
    return n;
}

std::string HodographGrid::describe() const {
    std::string out = is_rectangle() ? "grid=rectangle" : "grid=cone c=" + format_double(c());
    out += " S=" + format_double(S()) + " T=" + format_double(T()) + " h=" + format_double(h_);
    return out;
}

Field::Field(HodographGrid grid, std::string label_)
    : label(std::move(label_)), grid_(grid), values_(grid.storage_size(), std::numeric_limits<double>::quiet_NaN()) {
    for (int j = 0; j <= grid_.nt(); ++j)
        for (int i = grid_.row_start(j); i <= grid_.ns(); ++i) (*this)(i, j) = 0.0;
}

double Field::interpolate(double s, double t) const {
    const double h = grid_.h();
    const double eps = 1e-12;
    if (s < -eps || t < -eps || s > grid_.S() + eps || t > grid_.T() + eps || s + t < grid_.c() - eps)
        throw Error(ErrorKind::invalid_argument, "interpolation point outside the grid");
    int i = std::clamp(static_cast<int>(std::floor(s / h)), 0, std::max(0, grid_.ns() - 1));
    int j = std::clamp(static_cast<int>(std::floor(t / h)), 0, std::max(0, grid_.nt() - 1));
    const double a = std::clamp(s / h - i, 0.0, 1.0);
    const double b = std::clamp(t / h - j, 0.0, 1.0);
    if (grid_.contains(i, j)) {
        return (1 - a) * (1 - b) * (*this)(i, j) + a * (1 - b) * (*this)(i + 1, j) + (1 - a) * b * (*this)(i, j + 1) +
               a * b * (*this)(i + 1, j + 1);
    }
    // Cell cut by the Cauchy diagonal: linear on the triangle above it.
    const double x10 = (*this)(i + 1, j), x01 = (*this)(i, j + 1), x11 = (*this)(i + 1, j + 1);
    const double w11 = std::max(0.0, a + b - 1.0);
    const double w10 = std::max(0.0, a - w11);
    const double w01 = std::max(0.0, 1.0 - w11 - w10);
    return w10 * x10 + w01 * x01 + w11 * x11;
}

double Field::sup_norm() const {
    double m = 0.0;
    for (int j = 0; j <= grid_.nt(); ++j)
        for (int i = grid_.row_start(j); i <= grid_.ns(); ++i) m = std::max(m, std::abs((*this)(i, j)));
    return m;
}

void require_same_grid(const Field& a, const Field& b, const char* where) {
    if (!(a.grid() == b.grid())) throw Error(ErrorKind::invalid_argument, std::string(where) + ": grid mismatch");
}

double sup_distance(const Field& a, const Field& b) {
    require_same_grid(a, b, "sup_distance");
    const auto& g = a.grid();
    double m = 0.0;
    for (int j = 0; j <= g.nt(); ++j)
        for (int i = g.row_start(j); i <= g.ns(); ++i) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

namespace {

// Derivative of v[lo..hi] at index k, spacing h.
double line_derivative(const double* v, std::ptrdiff_t stride, int lo, int hi, int k, double h) {
    auto at = [&](int q) { return v[q * stride]; };
    const int n = hi - lo + 1;
    if (n >= 3) {
        if (k == lo) return (-3.0 * at(k) + 4.0 * at(k + 1) - at(k + 2)) / (2.0 * h);
        if (k == hi) return (3.0 * at(k) - 4.0 * at(k - 1) + at(k - 2)) / (2.0 * h);
        return (at(k + 1) - at(k - 1)) / (2.0 * h);
    }
    if (n == 2) return (at(hi) - at(lo)) / h;
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

Field derivative_s(const Field& x) {
    const auto& g = x.grid();
    Field out(g, x.label + "_s");
    const auto base = x.values().data();
    for (int j = 0; j <= g.nt(); ++j) {
        const int lo = g.row_start(j);
        const double* row = base + g.index(0, j);
        for (int i = lo; i <= g.ns(); ++i) out(i, j) = line_derivative(row, 1, lo, g.ns(), i, g.h());
    }
    // Lone corner node (S = c): recover d/ds from d/dt and the Cauchy diagonal.
    for (int j = 0; j <= g.nt(); ++j) {
        const int i = g.ns();
        if (g.row_start(j) == i && g.contains(i - 1, j + 1) && g.contains(i, j + 1)) {
            const double xt = (x(i, j + 1) - x(i, j)) / g.h();
            out(i, j) = xt - (x(i - 1, j + 1) - x(i, j)) / g.h();
        }
    }
    return out;
}

Field derivative_t(const Field& x) {
    const auto& g = x.grid();
    Field out(g, x.label + "_t");
    const auto base = x.values().data();
    const auto stride = static_cast<std::ptrdiff_t>(g.ns() + 1);
    for (int i = 0; i <= g.ns(); ++i) {
        const int lo = g.col_start(i);
        const double* col = base + i;
        for (int j = lo; j <= g.nt(); ++j) out(i, j) = line_derivative(col, stride, lo, g.nt(), j, g.h());
    }
    for (int i = 0; i <= g.ns(); ++i) {
        const int j = g.nt();
        if (g.col_start(i) == j && g.contains(i + 1, j - 1) && g.contains(i + 1, j)) {
            const double xs = (x(i + 1, j) - x(i, j)) / g.h();
            out(i, j) = xs - (x(i + 1, j - 1) - x(i, j)) / g.h();
        }
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_field(std::ostream& os, const Field& field) {
    const auto& g = field.grid();
    os << "# s\tt\t" << (field.label.empty() ? "x" : field.label) << "\t" << g.describe()
       << " generation=" << field.generation << "\n";
    for (int j = 0; j <= g.nt(); ++j)
        for (int i = g.row_start(j); i <= g.ns(); ++i)
            os << format_double(g.s(i)) << '\t' << format_double(g.t(j)) << '\t' << format_double(field(i, j)) << '\n';
}

void write_field(const std::string& path, const Field& field) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::io, "cannot open " + path + " for writing");
    write_field(os, field);
    if (!os) throw Error(ErrorKind::io, "write failed: " + path);
}

Field read_field(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header.empty() || header[0] != '#')
        throw Error(ErrorKind::io, "field file: missing '#' header");
    std::map<std::string, std::string> kv;
    std::istringstream hs(header.substr(1));
    std::string tok, label;
    int col = 0;
    while (hs >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) {
            if (col++ == 2) label = tok;
            continue;
        }
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    auto num = [&](const char* key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw Error(ErrorKind::io, std::string("field file: header lacks ") + key);
        return std::stod(it->second);
    };
    const bool rect = kv["grid"] == "rectangle";
    HodographGrid g = rect ? HodographGrid::rectangle(num("S"), num("T"), num("h"))
                           : HodographGrid::cone(num("c"), num("S"), num("T"), num("h"));
    Field out(g, label);
    if (kv.count("generation")) out.generation = std::stoi(kv["generation"]);
    std::string line;
    std::size_t seen = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        double s, t, v;
        if (!(ls >> s >> t >> v)) throw Error(ErrorKind::io, "field file: malformed row: " + line);
        const int i = static_cast<int>(std::lround(s / g.h()));
        const int j = static_cast<int>(std::lround(t / g.h()));
        if (!g.contains(i, j)) throw Error(ErrorKind::io, "field file: node outside grid: " + line);
        out(i, j) = v;
        ++seen;
    }
    if (seen != g.node_count()) throw Error(ErrorKind::io, "field file: node count mismatch");
    return out;
}

Field read_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::io, "cannot open " + path);
    return read_field(is);
}

}  // namespace hma
