#include "hma/commands.hpp"

#include "hma/boundary.hpp"
#include "hma/energy.hpp"
#include "hma/error.hpp"
#include "hma/exact_solutions.hpp"
#include "hma/parametrix.hpp"
#include "hma/reconstruct.hpp"
#include "hma/volterra.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <unistd.h>

namespace hma::cli {

namespace fs = std::filesystem;

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"solve-cg", "solve-goursat", "energy", "stability",
                                                "reconstruct", "validate", "oracle-check"};
    return names;
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx, md, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error(ErrorKind::io, "SHA-256 computation failed");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < len; ++k) {
        out.push_back(hex[md[k] >> 4]);
        out.push_back(hex[md[k] & 15]);
    }
    return out;
}

void write_atomic(const fs::path& path, std::string_view bytes) {
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error(ErrorKind::io, "cannot open " + tmp.string() + " for writing");
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        os.flush();
        if (!os) throw Error(ErrorKind::io, "write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorKind::io, "cannot move " + tmp.string() + " into place");
    }
}

namespace {

/// Ordered key/value report.
class KvReport {
public:
    void put(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
    void put(const std::string& key, double value) { put(key, format_double(value)); }
    void put(const std::string& key, int value) { put(key, std::to_string(value)); }
    void put(const std::string& key, std::size_t value) { put(key, std::to_string(value)); }
    void put(const std::string& key, bool value) { put(key, std::string(value ? "true" : "false")); }
    void put(const std::string& key, const char* value) { put(key, std::string(value)); }
    void put_list(const std::string& key, const std::vector<double>& values) {
        std::string s;
        for (std::size_t k = 0; k < values.size(); ++k) s += (k ? "," : "") + format_double(values[k]);
        put(key, s);
    }
    std::string text() const {
        std::string s;
        for (const auto& [k, v] : entries_) s += k + " = " + v + "\n";
        return s;
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Tab-separated table with a single '#' header naming columns and parameters.
class Table {
public:
    Table(std::vector<std::string> columns, std::string params) : columns_(std::move(columns)), params_(std::move(params)) {}
    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            body_ += first ? "" : "\t";
            body_ += format_double(v);
            first = false;
        }
        body_ += '\n';
    }
    std::string text() const {
        std::string s = "#";
        for (std::size_t k = 0; k < columns_.size(); ++k) s += (k ? "\t" : " ") + columns_[k];
        if (!params_.empty()) s += "\t" + params_;
        return s + "\n" + body_;
    }

private:
    std::vector<std::string> columns_;
    std::string params_;
    std::string body_;
};

struct Context {
    const RunConfig& cfg;
    const RunOptions& opts;
    std::ostream& log;
    KvReport report;
    std::vector<std::pair<std::string, std::string>> outputs;  // name, sha256
    std::vector<std::size_t> sizes;

    void emit(const std::string& name, const std::string& bytes) {
        write_atomic(opts.out / name, bytes);
        outputs.emplace_back(name, sha256_hex(bytes));
        sizes.push_back(bytes.size());
    }
    SolveOptions solve_options() const {
        SolveOptions o;
        o.tol = cfg.number("solver.tol", 1e-10);
        o.max_iter = cfg.integer("solver.max_iter", 500);
        o.min_iter = cfg.integer("solver.min_iter", 3);
        o.axis_correction = cfg.flag("solver.axis_correction", true);
        o.exec.workers = opts.deterministic ? 1 : std::max(1, opts.workers);
        if (!(o.tol > 0.0) || o.max_iter < 1) throw Error(ErrorKind::invalid_argument, "solver.tol and solver.max_iter must be positive");
        return o;
    }
    ValidationOptions validation_options() const {
        ValidationOptions v;
        v.corner_tol = cfg.number("validate.corner_tol", v.corner_tol);
        v.endpoint_exclusion = cfg.number("validate.endpoint_exclusion", v.endpoint_exclusion);
        v.l1_rel_tol = cfg.number("validate.l1_rel_tol", v.l1_rel_tol);
        if (!(v.corner_tol > 0.0) || !(v.endpoint_exclusion > 0.0) || !(v.l1_rel_tol > 0.0))
            throw Error(ErrorKind::invalid_argument, "validation tolerances must be positive");
        return v;
    }
};

/// Raised to stop a command with a given exit code after its report is filled.
struct Stop {
    int code;
    std::string reason;
};

bool is_identity_profile(const CurvatureProfile& p) {
    for (double u : {0.5, 1.0, 2.0, 3.0})
        if (std::abs(p.lambda(u) - u) > 1e-14 * u || std::abs(p.dlambda(u) - 1.0) > 1e-14) return false;
    return true;
}

std::function<double(double, double)> oracle_for(const RunConfig& cfg, const CurvatureProfile& profile) {
    if (!is_identity_profile(profile) || !cfg.has("boundary.name")) return {};
    const std::string name = cfg.get("boundary.name", "");
    const double c = cfg.number("grid.c", 1.0);
    if (name == "arcsine") return [a = ArcsineSolution(c)](double s, double t) { return a.x(s, t); };
    if (name == "polynomial" || name == "polynomial-diamond")
        return [](double s, double t) { return PolynomialSolution().x(s, t); };
    return {};
}

void put_validation(KvReport& r, const ValidationReport& v) {
    r.put("validation.corner_gap_c0", v.corner_gap_c0);
    r.put("validation.corner_gap_0c", v.corner_gap_0c);
    r.put("validation.corner_ok", v.corner_ok);
    r.put("validation.n_l1", v.n_l1);
    r.put("validation.n_integrable", v.n_integrable);
    r.put("validation.fprime_l1", v.fprime_l1);
    r.put("validation.fprime_integrable", v.fprime_integrable);
    r.put("validation.pass", v.pass);
}

void put_solve(KvReport& r, const std::string& prefix, const SolveReport& s) {
    r.put(prefix + ".iterations", s.iterations);
    r.put(prefix + ".final_increment", s.final_increment);
    r.put_list(prefix + ".increments", s.increments);
}

CauchyGoursatData validated_data(Context& ctx) {
    CauchyGoursatData data = boundary_from_config(ctx.cfg);
    const ValidationReport v = validate_weak_compatibility(data, ctx.validation_options());
    put_validation(ctx.report, v);
    if (!v.pass) throw Stop{exit_validation, "boundary data are not weakly compatible"};
    return data;
}

SolveResult solve_or_stop(Context& ctx, const CauchyGoursatData& data, const CurvatureProfile& profile,
                          const HodographGrid& grid, const std::string& prefix, const Field* source = nullptr) {
    try {
        return solve_picard(data, profile, grid, ctx.solve_options(), source);
    } catch (const ConvergenceError& e) {
        ctx.report.put(prefix + ".iterations", static_cast<int>(e.increments().size()));
        ctx.report.put_list(prefix + ".increments", e.increments());
        throw Stop{exit_convergence, e.what()};
    }
}

std::string field_table(const Field& x, const std::function<double(double, double)>& oracle) {
    const auto& g = x.grid();
    const std::string params = g.describe() + " generation=" + std::to_string(x.generation);
    Table t(oracle ? std::vector<std::string>{"s", "t", x.label, "exact", "error"} : std::vector<std::string>{"s", "t", x.label},
            params);
    for (int j = 0; j <= g.nt(); ++j)
        for (int i = g.row_start(j); i <= g.ns(); ++i) {
            if (oracle) {
                const double e = oracle(g.s(i), g.t(j));
                t.row({g.s(i), g.t(j), x(i, j), e, x(i, j) - e});
            } else {
                t.row({g.s(i), g.t(j), x(i, j)});
            }
        }
    return t.text();
}

void contour_probes(Context& ctx, const Field& x, const CauchyGoursatData& data, const CurvatureProfile& profile) {
    const auto& g = x.grid();
    const std::vector<std::pair<int, int>> nodes{
        {g.ns(), g.nt()}, {(g.ns() + g.m()) / 2, (g.nt() + g.m()) / 2}, {g.ns(), g.m() / 2}, {(3 * g.m()) / 5, (3 * g.m()) / 5}};
    int k = 0;
    for (auto [i, j] : nodes) {
        if (!g.contains(i, j)) continue;
        const double r = verify_contour_identity(x, data, profile, g.s(i), g.t(j), ContourCase::unified);
        const std::string key = "contour." + std::to_string(k++);
        ctx.report.put(key + ".s", g.s(i));
        ctx.report.put(key + ".t", g.t(j));
        ctx.report.put(key + ".residual", r);
    }
}

int cmd_validate(Context& ctx) {
    validated_data(ctx);
    return exit_ok;
}

int cmd_solve_cg(Context& ctx) {
    const auto data = validated_data(ctx);
    const auto grid = cone_from_config(ctx.cfg);
    const auto profile = profile_from_config(ctx.cfg, std::max(8.0, grid.S() + grid.T()), false);
    auto result = solve_or_stop(ctx, data, profile, grid, "solve");
    result.x.label = "x";
    put_solve(ctx.report, "solve", result.report);
    const auto& a = result.report.attainment;
    ctx.report.put("attainment.gamma1", a.gamma1);
    ctx.report.put("attainment.gamma2", a.gamma2);
    ctx.report.put("attainment.cauchy", a.cauchy);
    ctx.report.put("attainment.normal", a.normal);
    for (std::size_t k = 0; k < a.probes.size(); ++k) {
        const std::string key = "attainment.probe." + std::to_string(k);
        ctx.report.put(key + ".xi", a.probes[k].xi);
        ctx.report.put(key + ".measured", a.probes[k].measured);
        ctx.report.put(key + ".expected", a.probes[k].expected);
    }
    contour_probes(ctx, result.x, data, profile);
    ctx.report.put("folds.edges", detect_folds(result.x).folded_edges);

    const auto oracle = oracle_for(ctx.cfg, profile);
    if (oracle) {
        double err = 0.0, interior = 0.0;
        const double c = grid.c();
        for (int j = 0; j <= grid.nt(); ++j)
            for (int i = grid.row_start(j); i <= grid.ns(); ++i) {
                const double s = grid.s(i), t = grid.t(j);
                const double e = std::abs(result.x(i, j) - oracle(s, t));
                err = std::max(err, e);
                if (std::min(std::hypot(s - c, t), std::hypot(s, t - c)) >= 0.25 * c) interior = std::max(interior, e);
            }
        ctx.report.put("oracle.max_error", err);
        ctx.report.put("oracle.interior_error", interior);
    }
    ctx.emit("field.tsv", field_table(result.x, oracle));
    return exit_ok;
}

int cmd_solve_goursat(Context& ctx) {
    const auto grid = rectangle_from_config(ctx.cfg);
    const auto profile = profile_from_config(ctx.cfg, std::max(8.0, grid.S() + grid.T()), true);
    auto problem = make_corrector_problem(profile, grid);
    ctx.report.put("certificate", problem.bounds.certificate);
    ctx.report.put("m0", problem.bounds.m0);
    ctx.report.put("M", problem.bounds.M);

    const Field xp = parametrix_field(profile, grid);
    const Field H = residual_field(profile, grid);
    double bound = 0.0, supH = 0.0;
    for (int j = 0; j <= grid.nt(); ++j)
        for (int i = 0; i <= grid.ns(); ++i) {
            const double s = grid.s(i), t = grid.t(j);
            supH = std::max(supH, std::abs(H(i, j)));
            if (s > 0 && t > 0) bound = std::max(bound, std::abs(H(i, j)) * (s + t) / std::sqrt(s * t));
        }
    ctx.report.put("residual.sup", supH);
    ctx.report.put("residual.weighted_sup", bound);

    SolveResult r{Field(grid), {}};
    try {
        r = solve_corrector(problem, ctx.solve_options());
    } catch (const ConvergenceError& e) {
        ctx.report.put_list("corrector.increments", e.increments());
        throw Stop{exit_convergence, e.what()};
    }
    put_solve(ctx.report, "corrector", r.report);
    ctx.report.put("corrector.max_ratio", r.report.max_ratio(1e3 * std::numeric_limits<double>::epsilon()));
    ctx.report.put("corrector.sup", r.x.sup_norm());
    const Field base = assemble_base(profile, r.x);
    const Field pde = discrete_pde_residual(base, profile);
    double interior = 0.0;
    for (int j = 0; j <= grid.nt(); ++j)
        for (int i = 0; i <= grid.ns(); ++i)
            if (grid.s(i) >= 0.25 * grid.S() && grid.t(j) >= 0.25 * grid.T()) interior = std::max(interior, std::abs(pde(i, j)));
    ctx.report.put("base.pde_residual_interior", interior);

    ctx.emit("x_p.tsv", field_table(xp, {}));
    ctx.emit("residual.tsv", field_table(H, {}));
    ctx.emit("forcing.tsv", field_table(problem.forcing, {}));
    ctx.emit("corrector.tsv", field_table(r.x, {}));
    ctx.emit("base.tsv", field_table(base, {}));
    return exit_ok;
}

int cmd_energy(Context& ctx) {
    const auto data = validated_data(ctx);
    const auto grid = cone_from_config(ctx.cfg);
    const auto profile = profile_from_config(ctx.cfg, std::max(8.0, grid.S() + grid.T()), false);
    const auto r = solve_or_stop(ctx, data, profile, grid, "solve");
    put_solve(ctx.report, "solve", r.report);
    const auto trace = energy_trace(r.x, profile);
    if (trace.E.empty()) throw Error(ErrorKind::invalid_argument, "energy: no full diagonal between c and min(S, T)");
    const Field zero(grid);
    Table t({"u", "E", "gronwall"}, grid.describe());
    bool dominated = true;
    for (std::size_t k = 0; k < trace.u.size(); ++k) {
        const double b = gronwall_bound(trace.E.front(), zero, profile, grid.c(), trace.u[k]);
        dominated = dominated && trace.E[k] <= b * (1 + 1e-12);
        t.row({trace.u[k], trace.E[k], b});
    }
    ctx.report.put("energy.diagonals", trace.u.size());
    ctx.report.put("energy.E_c", trace.E.front());
    ctx.report.put("energy.sup", *std::max_element(trace.E.begin(), trace.E.end()));
    ctx.report.put("energy.gronwall_dominated", dominated);

    if (ctx.cfg.flag("energy.refine", true)) {
        // same diagonal on grids 4h, 2h, h
        const double u = ctx.cfg.number("energy.u", trace.u.back());
        std::vector<double> values;
        for (int f : {4, 2, 1}) {
            const auto g2 = HodographGrid::cone(grid.c(), grid.S(), grid.T(), grid.h() * f);
            const auto r2 = f == 1 ? r : solve_or_stop(ctx, data, profile, g2, "refine");
            values.push_back(line_energy(r2.x, profile, u));
        }
        const auto verdict = assess_refinement(values);
        ctx.report.put("energy.refine.u", u);
        ctx.report.put_list("energy.refine.values", values);
        ctx.report.put("energy.refine.divergent", verdict.divergent);
    }
    ctx.emit("energy.tsv", t.text());
    return exit_ok;
}

Perturbation perturbation_from_config(const RunConfig& cfg, const CurvatureProfile& lambda0, double c, double C) {
    const std::string kind = cfg.get("stability.kind", "cosine");
    const double eps = cfg.number("stability.eps", 1e-3);
    const double k = cfg.number("stability.k", 1.0);
    Perturbation p;
    if (kind == "scaling") {
        p = Perturbation::scaling(eps, c, C);
    } else if (kind == "cosine") {
        const double w = std::numbers::pi * k / (C - c);
        p.c = c;
        p.C = C;
        p.dloglam = [eps, w, c](double u) { return eps * std::cos(w * (u - c)); };
        p.dloglam_prime = [eps, w, c](double u) { return -eps * w * std::sin(w * (u - c)); };
    } else if (kind == "power") {
        // delta lambda = eps u^k
        p = Perturbation::from_delta_lambda(
            lambda0, [eps, k](double u) { return eps * std::pow(u, k); },
            [eps, k](double u) { return eps * k * std::pow(u, k - 1); }, c, C);
    } else {
        throw Error(ErrorKind::invalid_argument, "stability.kind must be scaling, cosine or power");
    }
    return cfg.flag("stability.mean_free", false) ? p.mean_free() : p;
}

int cmd_stability(Context& ctx) {
    const auto data = validated_data(ctx);
    const auto grid = cone_from_config(ctx.cfg);
    const auto profile = profile_from_config(ctx.cfg, std::max(8.0, grid.S() + grid.T()), false);
    const double C = ctx.cfg.number("stability.C", std::min(grid.S(), grid.T()));
    const auto pert = perturbation_from_config(ctx.cfg, profile, grid.c(), C);
    StabilityResult res{Field(grid), Field(grid), {}};
    try {
        res = stability_experiment(data, profile, pert, grid, ctx.solve_options());
    } catch (const ConvergenceError& e) {
        ctx.report.put_list("stability.increments", e.increments());
        throw Stop{exit_convergence, e.what()};
    }
    const auto& rep = res.report;
    put_solve(ctx.report, "base", rep.base);
    put_solve(ctx.report, "linearized", rep.linearized);
    ctx.report.put("stability.mean", pert.mean());
    ctx.report.put("stability.sup_E1", rep.sup_E1);
    ctx.report.put("stability.sup_E0", rep.sup_E0);
    ctx.report.put("stability.weighted_norm2", rep.weighted_norm2);
    ctx.report.put("stability.ratio", rep.ratio);
    ctx.emit("x1.tsv", field_table(res.x1, {}));
    return exit_ok;
}

int cmd_reconstruct(Context& ctx) {
    const auto data = validated_data(ctx);
    const auto grid = cone_from_config(ctx.cfg);
    const auto profile = profile_from_config(ctx.cfg, std::max(8.0, grid.S() + grid.T()), false);
    const auto r = solve_or_stop(ctx, data, profile, grid, "solve");
    put_solve(ctx.report, "solve", r.report);

    const bool product = is_identity_profile(profile);
    const double as = ctx.cfg.number("reconstruct.anchor.s", grid.c());
    const double at = ctx.cfg.number("reconstruct.anchor.t", grid.c());
    Anchor anchor = product ? product_anchor(as, at) : Anchor{as, at, 0.0, 0.0, 0.0};
    anchor.q_ref = ctx.cfg.number("reconstruct.anchor.q_ref", anchor.q_ref);
    anchor.w_ref = ctx.cfg.number("reconstruct.anchor.w_ref", anchor.w_ref);
    anchor.y_ref = ctx.cfg.number("reconstruct.anchor.y_ref", anchor.y_ref);
    const auto q = compute_q(r.x, profile, anchor);
    auto surface = compute_surface(r.x, q, profile, anchor);
    if (ctx.cfg.has("reconstruct.fold_tol")) surface.folds = detect_folds(r.x, ctx.cfg.number("reconstruct.fold_tol"));
    const auto ma = ma_residual(surface, profile);
    const double margin = ctx.cfg.number("reconstruct.margin", 0.25 * grid.c());

    ctx.report.put("anchor.s", anchor.s);
    ctx.report.put("anchor.t", anchor.t);
    ctx.report.put("anchor.q_ref", anchor.q_ref);
    ctx.report.put("anchor.w_ref", anchor.w_ref);
    ctx.report.put("anchor.y_ref", anchor.y_ref);
    ctx.report.put("loops.q_max", surface.q_loop_max);
    ctx.report.put("loops.w_max", surface.w_loop_max);
    ctx.report.put("paths.q_gap", surface.q_path_gap);
    ctx.report.put("paths.w_gap", surface.w_path_gap);
    ctx.report.put("folds.tol", surface.folds.tol);
    ctx.report.put("folds.edges", surface.folds.folded_edges);
    ctx.report.put("ma.margin", margin);
    ctx.report.put("ma.sup_interior", ma.sup(margin));
    ctx.report.put("ma.excluded", ma.excluded_count);
    const auto conv = check_partial_convexity(surface);
    ctx.report.put("convexity.applicable", conv.applicable);
    ctx.report.put("convexity.sign", conv.sign);
    ctx.report.put("convexity.constant", conv.constant);
    if (!conv.reason.empty()) ctx.report.put("convexity.reason", conv.reason);

    if (product && data.label == "arcsine") {
        const ProductSolution P;
        double ew = 0.0;
        for (int j = 0; j <= grid.nt(); ++j)
            for (int i = grid.row_start(j); i <= grid.ns(); ++i)
                ew = std::max(ew, std::abs(surface.w(i, j) - P.w(surface.x(i, j), surface.y(i, j))));
        ctx.report.put("oracle.w_error", ew);
    }

    Table t({"s", "t", "u", "p", "x", "y", "q", "w", "fold"}, grid.describe());
    for (int j = 0; j <= grid.nt(); ++j)
        for (int i = grid.row_start(j); i <= grid.ns(); ++i) {
            const double s = grid.s(i), tt = grid.t(j);
            t.row({s, tt, s + tt, s - tt, surface.x(i, j), surface.y(i, j), surface.q(i, j), surface.w(i, j),
                   surface.folds.node[grid.index(i, j)] ? 1.0 : 0.0});
        }
    ctx.emit("surface.tsv", t.text());

    try {
        const auto ext = extend_periodic(surface, ma, std::numbers::pi / 2);
        ctx.report.put("periodic.seam_pairs", ext.seam_pairs);
        ctx.report.put("periodic.seam_jump_w", ext.seam_jump_w);
        ctx.report.put("periodic.seam_jump_wx", ext.seam_jump_wx);
        ctx.report.put("periodic.seam_wxx", ext.seam_wxx);
        Table pt({"x", "y", "w"}, "x_plus=" + format_double(ext.x_plus));
        for (const auto& p : ext.points) pt.row({p.x, p.y, p.w});
        ctx.emit("periodic.tsv", pt.text());
    } catch (const Error& e) {
        ctx.report.put("periodic.skipped", std::string(e.what()));
    }
    return exit_ok;
}

int cmd_oracle_check(Context& ctx) {
    const double tol = ctx.cfg.number("oracle.tol", 1e-12);
    const int probes = ctx.cfg.integer("oracle.probes", 100);
    std::mt19937_64 rng(static_cast<std::uint64_t>(ctx.cfg.integer("oracle.seed", 20240611)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    bool ok = true;
    auto check = [&](const std::string& key, double value, double limit) {
        const bool pass = value <= limit;
        ctx.report.put(key, value);
        ctx.report.put(key + ".pass", pass);
        ok = ok && pass;
    };

    const ArcsineSolution A(1.0);
    const PolynomialSolution P;
    const ProductSolution W(1.0);
    const auto lin = ArcsineSolution::profile();

    std::vector<std::pair<double, double>> st, up_arc, up_poly, xy;
    for (int k = 0; k < probes; ++k) {
        const double s = 0.05 + 2.95 * unit(rng), t = 0.05 + 2.95 * unit(rng);
        st.emplace_back(s, t);
        up_arc.emplace_back(s + t, s - t);
        // diamond: u in [1, 2], |p| <= 2 - u
        const double u = 1.0 + unit(rng);
        up_poly.emplace_back(u, (2.0 * unit(rng) - 1.0) * (2.0 - u));
        xy.emplace_back(-1.5 + 3.0 * unit(rng), -2.0 + 4.0 * unit(rng));
    }
    check("arcsine.epd_residual", epd_residual([&](double u, double p) { return A.jet_up(u, p); }, up_arc), tol);
    check("arcsine.pde_residual", hodograph_residual([&](double s, double t) { return A.jet(s, t); }, lin, st), tol);
    check("polynomial.epd_residual", epd_residual([&](double u, double p) { return P.jet_up(u, p); }, up_poly), tol);
    check("product.ma_residual", ma_residual_exact(W, xy), tol);

    const double pi = std::numbers::pi;
    check("polynomial.x_1_1", std::abs(P.x_up(1.0, 1.0) + pi / 2), 4 * std::numeric_limits<double>::epsilon());
    check("polynomial.xp_3/2_0", std::abs(P.jet_up(1.5, 0.0).x_p - 145.0 * pi / 416.0),
          4 * std::numeric_limits<double>::epsilon());
    double gdev = 0.0;
    for (double s : {1.0, 1.5, 2.0, 3.0, 10.0}) gdev = std::max(gdev, std::abs(A.g(s) + pi / 2));
    check("arcsine.g_deviation", gdev, 0.0);
    const auto v = validate_weak_compatibility(A.data());
    ctx.report.put("arcsine.n_l1", v.n_l1);
    ctx.report.put("arcsine.n_integrable", v.n_integrable);
    ctx.report.put("arcsine.validation_pass", v.pass);
    ok = ok && v.pass && v.n_integrable;
    ctx.report.put("oracle.pass", ok);
    if (!ok) throw Stop{exit_validation, "oracle suite failed"};
    return exit_ok;
}

int dispatch(std::string_view command, Context& ctx) {
    if (command == "validate") return cmd_validate(ctx);
    if (command == "solve-cg") return cmd_solve_cg(ctx);
    if (command == "solve-goursat") return cmd_solve_goursat(ctx);
    if (command == "energy") return cmd_energy(ctx);
    if (command == "stability") return cmd_stability(ctx);
    if (command == "reconstruct") return cmd_reconstruct(ctx);
    if (command == "oracle-check") return cmd_oracle_check(ctx);
    throw Stop{exit_usage, "unknown command: " + std::string(command)};
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::validation: return exit_validation;
        case ErrorKind::convergence: return exit_convergence;
        case ErrorKind::io: return exit_io;
        case ErrorKind::hypothesis: return exit_hypothesis;
        case ErrorKind::invalid_argument: return exit_usage;
    }
    return exit_usage;
}

}  // namespace

int run(std::string_view command, const RunConfig& config, const RunOptions& options, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    Context ctx{config, options, log, {}, {}, {}};
    int code = exit_ok;
    std::string failure;
    try {
        std::error_code ec;
        fs::create_directories(options.out, ec);
        if (ec) throw Error(ErrorKind::io, "cannot create output directory " + options.out.string());
        code = dispatch(command, ctx);
    } catch (const Stop& s) {
        code = s.code;
        failure = s.reason;
    } catch (const Error& e) {
        code = exit_code_for(e.kind());
        failure = e.what();
    } catch (const std::exception& e) {
        code = exit_usage;
        failure = e.what();
    }
    ctx.report.put("status", std::string(code == exit_ok ? "ok" : "failed"));
    ctx.report.put("exit_code", code);
    if (!failure.empty()) {
        ctx.report.put("failure", failure);
        log << "hma " << command << ": " << failure << "\n";
    }

    try {
        if (fs::is_directory(options.out)) ctx.emit("report.kv", ctx.report.text());
        KvReport manifest;
        manifest.put("artifact", "hma");
        manifest.put("version", "1.0.0");
        manifest.put("command", std::string(command));
        manifest.put("status", std::string(code == exit_ok ? "ok" : "failed"));
        manifest.put("exit_code", code);
        if (!failure.empty()) manifest.put("failure", failure);
        manifest.put("workers", options.deterministic ? 1 : options.workers);
        manifest.put("deterministic", options.deterministic);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        manifest.put("wall_time_s", wall);
        for (const auto& [k, v] : config.values()) manifest.put("config." + k, v);
        for (std::size_t k = 0; k < ctx.outputs.size(); ++k) {
            manifest.put("output." + ctx.outputs[k].first + ".sha256", ctx.outputs[k].second);
            manifest.put("output." + ctx.outputs[k].first + ".bytes", ctx.sizes[k]);
        }
        if (fs::is_directory(options.out)) write_atomic(options.out / "manifest.kv", manifest.text());
    } catch (const Error& e) {
        log << "hma " << command << ": " << e.what() << "\n";
        if (code == exit_ok) code = exit_io;
    }
    return code;
}

}  // namespace hma::cli
