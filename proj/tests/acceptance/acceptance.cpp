// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
// here; exit status is the number of failing criteria.

#include "hma/commands.hpp"
#include "hma/energy.hpp"
#include "hma/error.hpp"
#include "hma/exact_solutions.hpp"
#include "hma/parametrix.hpp"
#include "hma/reconstruct.hpp"
#include "hma/volterra.hpp"

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

using namespace hma;
namespace fs = std::filesystem;

namespace {

const double pi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!out.pass) ++failures;
    fmt::print("[{}] {:>2} {}: {} ({:.2f}s)\n", out.pass ? "PASS" : "FAIL", id, name, out.detail, dt);
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> read_kv(const fs::path& p) {
    std::map<std::string, std::string> kv;
    std::istringstream is(slurp(p));
    std::string line;
    while (std::getline(is, line))
        if (auto eq = line.find(" = "); eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
    return kv;
}

fs::path workdir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "hma_acceptance" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

CurvatureProfile linear_profile(bool semi_infinite) {
    return make_profile(ProfileKind::linear, std::vector<double>{1.0}, {8.0, semi_infinite});
}

CurvatureProfile quadratic_profile() {
    return make_profile(ProfileKind::polynomial, std::vector<double>{1.0, 0.5}, {8.0, true});
}

// ---------------------------------------------------------------------------

Outcome oracle_suite() {
    const auto dir = workdir("oracle");
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream log;
    cli::RunOptions opts;
    opts.out = dir;
    opts.deterministic = true;
    const int code = cli::run("oracle-check", RunConfig::parse("oracle.probes = 100\noracle.tol = 1e-12\n"), opts, log);
    const double dt = seconds_since(t0);
    const auto r = read_kv(dir / "report.kv");
    const bool pass = code == 0 && r.at("oracle.pass") == "true" && dt < 5.0;
    return {pass, fmt::format("exit={} arcsine={} polynomial={} product={} runtime={:.2f}s<5s", code,
                              r.at("arcsine.pde_residual"), r.at("polynomial.epd_residual"),
                              r.at("product.ma_residual"), dt)};
}

Outcome cauchy_goursat() {
    const auto t0 = std::chrono::steady_clock::now();
    const ArcsineSolution a(1.0);
    const auto lam = linear_profile(false);
    auto interior_error = [&](int n) {
        const auto g = HodographGrid::cone(1.0, 3.0, 3.0, 1.0 / n);
        const auto r = solve_picard(a.data(), lam, g);
        double e = 0.0;
        for (int j = 0; j <= g.nt(); ++j)
            for (int i = g.row_start(j); i <= g.ns(); ++i) {
                const double s = g.s(i), t = g.t(j);
                if (std::min(std::hypot(s - 1.0, t), std::hypot(s, t - 1.0)) < 0.25) continue;
                e = std::max(e, std::abs(r.x(i, j) - a.x(s, t)));
            }
        return e;
    };
    const double e128 = interior_error(128), e256 = interior_error(256);
    const double order = std::log2(e128 / e256);
    const double dt = seconds_since(t0);
    return {e128 <= 1e-2 && order >= 1.5 && dt < 60.0,
            fmt::format("err(1/128)={:.3e}<=1e-2 err(1/256)={:.3e} order={:.3f}>=1.5 runtime={:.1f}s<60s", e128, e256,
                        order, dt)};
}

Outcome polynomial_diamond() {
    const PolynomialSolution P;
    const auto g = HodographGrid::cone(1.0, 1.0, 1.0, 1.0 / 256);
    const auto r = solve_picard(P.diamond_data(), PolynomialSolution::profile(), g);
    double err = 0.0;
    for (int j = 0; j <= g.nt(); ++j)
        for (int i = g.row_start(j); i <= g.ns(); ++i)
            if (!g.on_boundary(i, j)) err = std::max(err, std::abs(r.x(i, j) - P.x(g.s(i), g.t(j))));

    const auto folds = detect_folds(r.x);
    // a flagged edge touching p = 0 with 1 <= u <= 3/2
    bool fold_on_axis = false;
    for (int k = g.m() / 2; 2 * k <= 3 * g.ns() / 2; ++k) {
        const std::size_t n = g.index(k, k);
        const bool ds = (k < g.ns() && folds.edge_s[n]) || (k > 0 && folds.edge_s[g.index(k - 1, k)]);
        const bool dt = (k < g.nt() && folds.edge_t[n]) || (k > 0 && folds.edge_t[g.index(k, k - 1)]);
        fold_on_axis = fold_on_axis || ds || dt;
    }
    const int c = g.ns() * 3 / 4;  // (s, t) = (3/4, 3/4): u = 3/2, p = 0
    const double xp = folds.x_p(c, c);
    const double target = 145.0 * pi / 416.0;
    return {err <= 1e-2 && fold_on_axis && std::abs(xp - target) <= 1e-2,
            fmt::format("interior err={:.3e}<=1e-2 fold on p=0 in [1,3/2]={} x_p(3/2,0)={:.6f} vs {:.6f} (|d|={:.2e}<=1e-2)",
                        err, fold_on_axis ? "yes" : "no", xp, target, std::abs(xp - target))};
}

Outcome parametrix_degeneracy() {
    const auto lam = linear_profile(true);
    const auto g = HodographGrid::rectangle(1.0, 1.0, 1.0 / 128);
    const Field H = residual_field(lam, g);
    const auto problem = make_corrector_problem(lam, g);
    const auto r = solve_corrector(problem);
    const Field base = assemble_base(lam, r.x);
    const ArcsineSolution a(1.0);
    double gap = 0.0;
    for (int j = 0; j <= g.nt(); ++j)
        for (int i = 0; i <= g.ns(); ++i)
            if (i + j > 0) gap = std::max(gap, std::abs(base(i, j) - a.x(g.s(i), g.t(j))));
    const double tol = 1e-10;
    return {H.sup_norm() <= 1e-10 && r.x.sup_norm() <= tol && gap <= tol,
            fmt::format("sup|H|={:.2e}<=1e-10 sup|x_corr|={:.2e}<=1e-10 sup|base-x_a|={:.2e}", H.sup_norm(),
                        r.x.sup_norm(), gap)};
}

Outcome residual_structure() {
    const auto lam = quadratic_profile();
    auto weighted_sup = [&](int n) {
        const auto g = HodographGrid::rectangle(1.0, 1.0, 1.0 / n);
        const Field H = residual_field(lam, g);
        double sup = 0.0;
        for (int j = 1; j <= g.nt(); ++j)
            for (int i = 1; i <= g.ns(); ++i) {
                const double s = g.s(i), t = g.t(j);
                sup = std::max(sup, std::abs(H(i, j)) * (s + t) / std::sqrt(s * t));
            }
        return sup;
    };
    const double w128 = weighted_sup(128), w256 = weighted_sup(256);
    const double drift = std::abs(w256 - w128) / w128;
    const double s = 1e-4, t = 1e-2;
    const double limit = (s + t) * eval_residual(lam, s, t) / std::sqrt(s * t);
    const double expected = -lam.d2lambda(0.0);
    const bool stable = std::isfinite(w256) && drift < 0.05;
    const bool matches = std::abs(limit - expected) <= 0.05 * std::abs(expected);
    return {stable && matches,
            fmt::format("sup(1/128)={:.5f} sup(1/256)={:.5f} drift={:.2e}<0.05 [{}]; "
                        "(s+t)H/sqrt(st) at (1e-4,1e-2)={:.5f} vs -lambda''(0)={:.1f} within 5% [{}]",
                        w128, w256, drift, stable ? "ok" : "fail", limit, expected, matches ? "ok" : "fail")};
}

Outcome contraction_certificate() {
    auto measure = [](const CurvatureProfile& lam, double side, int n) {
        const auto g = HodographGrid::rectangle(side, side, side / n);
        const auto problem = make_corrector_problem(lam, g);
        const auto r = solve_corrector(problem);
        const double floor = 1e3 * std::numeric_limits<double>::epsilon();
        return std::pair{problem.bounds.certificate, r.report.max_ratio(floor)};
    };
    const auto [c_lin, r_lin] = measure(linear_profile(true), 1.0, 128);
    // u = s + t ranges over [0, 1] on [0, 1/2]^2
    const auto [c_quad, r_quad] = measure(quadratic_profile(), 0.5, 128);
    const auto [c_wide, r_wide] = measure(quadratic_profile(), 1.0, 128);
    const bool pass = std::abs(c_lin - 0.5) < 1e-12 && std::abs(c_quad - 2.0 / 3.0) < 1e-6 && r_lin <= c_lin + 0.05 &&
                      r_quad <= c_quad + 0.05 && r_wide <= c_wide + 0.05;
    return {pass, fmt::format("lambda=u: cert={:.4f} ratio={:.4f}; lambda=u+u^2/2 u<=1: cert={:.4f} ratio={:.4f}; "
                              "u<=2: cert={:.4f} ratio={:.4f} (ratio <= cert+0.05)",
                              c_lin, r_lin, c_quad, r_quad, c_wide, r_wide)};
}

Outcome energy_gronwall() {
    // x = sin(s) sin(t) e^{s-t}, zero on both axes, lambda = u + 1/2, c = 1/2
    const auto lam = make_profile(ProfileKind::linear, std::vector<double>{1.0, 0.5});
    auto x = [](double s, double t) { return std::sin(s) * std::sin(t) * std::exp(s - t); };
    auto source = [&](double s, double t) {
        const double e = std::exp(s - t);
        const double xs = (std::cos(s) + std::sin(s)) * std::sin(t) * e;
        const double xt = std::sin(s) * (std::cos(t) - std::sin(t)) * e;
        const double xst = (std::cos(s) + std::sin(s)) * (std::cos(t) - std::sin(t)) * e;
        return 2 * lam.lambda(s + t) * xst + lam.dlambda(s + t) * (xs + xt);
    };
    std::vector<double> res;
    bool dominated = true;
    for (int n : {32, 64, 128}) {
        const auto g = HodographGrid::cone(0.5, 1.5, 1.5, 1.0 / n);
        const Field X = Field::sample(g, x), G = Field::sample(g, source);
        res.push_back(energy_identity_residual(X, G, lam, 0.5, 1.5));
        const auto tr = energy_trace(X, lam);
        for (std::size_t k = 0; k < tr.u.size(); ++k)
            dominated = dominated && tr.E[k] <= gronwall_bound(tr.E.front(), G, lam, 0.5, tr.u[k]);
    }
    const double o1 = std::log2(res[0] / res[1]), o2 = std::log2(res[1] / res[2]);
    const auto g = HodographGrid::cone(1.0, 2.0, 2.0, 1.0 / 8);
    const double b = gronwall_bound(1.0, Field(g), linear_profile(false), 1.0, 2.0);
    const double bgap = std::abs(b - 2.0 * std::exp(1.0));
    return {o1 >= 1.5 && o2 >= 1.5 && dominated && bgap <= 1e-10,
            fmt::format("identity residual {:.2e},{:.2e},{:.2e} orders {:.2f},{:.2f}>=1.5; E<=bound at every diagonal={}; "
                        "bound(lambda=u,c=1,u=2)-2e={:.1e}",
                        res[0], res[1], res[2], o1, o2, dominated ? "yes" : "no", bgap)};
}

Outcome stability() {
    const ArcsineSolution a(1.0);
    const auto lam = linear_profile(false);
    const auto g = HodographGrid::cone(1.0, 2.0, 2.0, 1.0 / 64);
    const auto sc = stability_experiment(a.data(), lam, Perturbation::scaling(1e-3, 1.0, 2.0), g);
    const bool scaling_ok = sc.report.sup_E1 <= 1e-10 * sc.report.sup_E0;
    std::string detail = fmt::format("scaling sup E1/sup E0={:.1e}<=1e-10", sc.report.sup_E1 / sc.report.sup_E0);

    std::vector<std::pair<std::string, Perturbation>> family;
    for (int k : {1, 2}) {
        Perturbation p;
        p.c = 1.0;
        p.C = 2.0;
        const double w = pi * k;
        p.dloglam = [w](double u) { return 1e-3 * std::cos(w * (u - 1.0)); };
        p.dloglam_prime = [w](double u) { return -1e-3 * w * std::sin(w * (u - 1.0)); };
        family.emplace_back(fmt::format("cos{}", k), p);
    }
    family.emplace_back("u^2", Perturbation::from_delta_lambda(
                                    lam, [](double u) { return 1e-3 * u * u; }, [](double u) { return 2e-3 * u; }, 1.0, 2.0));
    bool ok = scaling_ok;
    for (const auto& [name, p] : family) {
        const auto mf = p.mean_free();
        const auto full = stability_experiment(a.data(), lam, p, g);
        const auto centred = stability_experiment(a.data(), lam, mf, g);
        const double agree = sup_distance(full.x1, centred.x1);
        const bool finite = std::isfinite(centred.report.ratio) && centred.report.ratio > 0.0;
        ok = ok && finite && agree <= 1e-10 && std::abs(mf.mean()) < 1e-12;
        detail += fmt::format("; {} ratio={:.4f} |x1-x1_mf|={:.1e}", name, centred.report.ratio, agree);
    }
    return {ok, detail};
}

Outcome reconstruction() {
    const ArcsineSolution a(1.0);
    const ProductSolution P;
    const auto lam = linear_profile(false);
    struct Level {
        double h, w_err, ma, q_loop, w_loop, seam_w, seam_wxx;
    };
    std::vector<Level> levels;
    for (int n : {64, 128, 256}) {
        const auto g = HodographGrid::cone(1.0, 2.0, 2.0, 1.0 / n);
        const auto sol = solve_picard(a.data(), lam, g);
        const auto surf = reconstruct(sol.x, lam, product_anchor(1.0, 1.0));
        const auto ma = ma_residual(surf, lam);
        const auto ext = extend_periodic(surf, ma, pi / 2);
        double ew = 0.0;
        for (int j = 0; j <= g.nt(); ++j)
            for (int i = g.row_start(j); i <= g.ns(); ++i)
                ew = std::max(ew, std::abs(surf.w(i, j) - P.w(surf.x(i, j), surf.y(i, j))));
        levels.push_back({g.h(), ew, ma.sup(0.25), surf.q_loop_max, surf.w_loop_max, ext.seam_jump_w, ext.seam_wxx});
    }
    const auto& f = levels.back();
    PhysicalPatch patch;
    patch.x_plus = pi / 2;
    patch.nx = 256;
    for (int j = 0; j <= 32; ++j) patch.ys.push_back(-1.0 + j / 16.0);
    for (double y : patch.ys)
        for (int i = 0; i <= patch.nx; ++i) patch.w.push_back(P.w(patch.x(i), y));
    const auto exact = extend_periodic(patch);
    const bool wxx_decreasing = levels[1].seam_wxx < levels[0].seam_wxx && levels[2].seam_wxx < levels[1].seam_wxx;
    const bool pass = f.w_err <= 5e-3 && f.ma <= 1.0 * f.h && f.q_loop <= 10 * std::pow(f.h, 3) &&
                      f.w_loop <= 10 * std::pow(f.h, 3) && f.seam_w <= 5e-3 && exact.seam_jump_w <= 1e-15 &&
                      wxx_decreasing;
    return {pass, fmt::format("h=1/256: w err={:.2e}<=5e-3 MA sup={:.2e}<=h loops q={:.1e} w={:.1e}<=10h^3={:.1e} "
                              "seam jump={:.1e} (exact patch {:.1e}); seam w_xx {:.2e}>{:.2e}>{:.2e}",
                              f.w_err, f.ma, f.q_loop, f.w_loop, 10 * std::pow(f.h, 3), f.seam_w, exact.seam_jump_w,
                              levels[0].seam_wxx, levels[1].seam_wxx, levels[2].seam_wxx)};
}

Outcome determinism() {
    const auto dir = workdir("determinism");
    const std::string arcsine =
        "profile.kind = linear\nprofile.params = 1\nboundary.name = arcsine\ngrid.c = 1\ngrid.S = 2\ngrid.T = 2\n"
        "grid.h = 1/32\nrun.workers = 2\n";
    const std::map<std::string, std::string> configs{
        {"validate", arcsine},
        {"solve-cg", arcsine},
        {"solve-goursat", "profile.kind = polynomial\nprofile.params = 1, 0.5\ngrid.S = 0.5\ngrid.T = 0.5\ngrid.h = 1/64\n"},
        {"energy", arcsine},
        {"stability", arcsine + "stability.kind = cosine\nstability.k = 2\nstability.mean_free = true\n"},
        {"reconstruct", arcsine},
        {"oracle-check", ""},
    };
    std::size_t compared = 0;
    std::string mismatch;
    for (const auto& [cmd, text] : configs) {
        const fs::path cfg = dir / (cmd + ".cfg");
        std::ofstream(cfg) << text;
        for (int run : {0, 1}) {
            const std::string line = fmt::format("{} {} {} --out {} --deterministic > /dev/null 2>&1", HMA_CLI_PATH, cmd,
                                                 cfg.string(), (dir / fmt::format("{}.{}", cmd, run)).string());
            if (std::system(line.c_str()) != 0) return {false, cmd + " failed"};
        }
        for (const auto& e : fs::directory_iterator(dir / (cmd + ".0"))) {
            const auto name = e.path().filename().string();
            if (name == "manifest.kv") continue;
            ++compared;
            if (slurp(e.path()) != slurp(dir / (cmd + ".1") / name)) mismatch += " " + cmd + "/" + name;
        }
    }
    return {mismatch.empty() && compared > 0,
            fmt::format("{} files byte-compared across 7 commands{}", compared,
                        mismatch.empty() ? "" : "; differ:" + mismatch)};
}

}  // namespace

int main() {
    criterion(1, "oracle suite", oracle_suite);
    criterion(2, "Cauchy-Goursat reproduction", cauchy_goursat);
    criterion(3, "polynomial diamond", polynomial_diamond);
    criterion(4, "parametrix degeneracy", parametrix_degeneracy);
    criterion(5, "residual structure", residual_structure);
    criterion(6, "contraction certificate", contraction_certificate);
    criterion(7, "energy identity and Gronwall", energy_gronwall);
    criterion(8, "stability", stability);
    criterion(9, "reconstruction", reconstruction);
    criterion(10, "determinism", determinism);
    fmt::print("{} of 10 criteria passed\n", 10 - failures);
    return failures;
}
