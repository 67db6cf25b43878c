#include <doctest.h>

#include "hma/commands.hpp"
#include "hma/config.hpp"
#include "hma/error.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace hma;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hma_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
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
    while (std::getline(is, line)) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return kv;
}

const char* arcsine_cfg =
    "# arcsine run\n"
    "profile.kind = linear\n"
    "profile.params = 1\n"
    "boundary.name = arcsine\n"
    "grid.c = 1\n"
    "grid.S = 2\n"
    "grid.T = 2\n"
    "grid.h = 1/16\n";

int run_text(const std::string& cmd, const std::string& text, const fs::path& out) {
    std::ostringstream log;
    cli::RunOptions o;
    o.out = out;
    o.deterministic = true;
    return cli::run(cmd, RunConfig::parse(text), o, log);
}

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = RunConfig::parse("a.b = 1/128  # spacing\n\nflag = yes\nlist = 1, 2 3\nname = x y\n");
    CHECK(cfg.number("a.b") == 1.0 / 128);
    CHECK(cfg.flag("flag", false));
    CHECK(cfg.numbers("list") == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(cfg.get("name", "") == "x y");
    CHECK(cfg.number("missing", 2.5) == 2.5);
    CHECK_THROWS_AS(cfg.require("missing"), Error);
    CHECK_THROWS_AS(cfg.number("name"), Error);
    CHECK_THROWS_AS(RunConfig::parse("no equals sign\n"), Error);
    CHECK_THROWS_AS(RunConfig::load("/nonexistent/hma.cfg"), Error);
}

TEST_CASE("typed config views") {
    const auto cfg = RunConfig::parse(arcsine_cfg);
    const auto g = cone_from_config(cfg);
    CHECK(g.m() == 16);
    CHECK(g.ns() == 32);
    CHECK(profile_from_config(cfg, 8.0, false).lambda(2.0) == 2.0);
    CHECK(boundary_from_config(cfg).c == 1.0);
    const auto rect = rectangle_from_config(RunConfig::parse("grid.n = 8\n"));
    CHECK(rect.is_rectangle());
    CHECK(rect.ns() == 8);
}

TEST_CASE("tables") {
    const auto dir = scratch("tables");
    std::ofstream(dir / "g.tsv") << "# s g\n0 1\n1 3\n2 3\n";
    const auto g = table_sampler(dir / "g.tsv");
    CHECK(g(0.5) == doctest::Approx(2.0));
    CHECK(g(1.5) == doctest::Approx(3.0));
    CHECK_THROWS_AS(g(2.5), Error);
    std::ofstream(dir / "bad.tsv") << "0 1\n0 2\n";
    CHECK_THROWS_AS(table_sampler(dir / "bad.tsv"), Error);
}

TEST_CASE("sha256 and atomic writes") {
    CHECK(cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(cli::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    const auto dir = scratch("atomic");
    cli::write_atomic(dir / "a.txt", "hello");
    CHECK(slurp(dir / "a.txt") == "hello");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
    CHECK(files == 1);
}

TEST_CASE("manifest lists every output with its checksum") {
    const auto dir = scratch("manifest");
    REQUIRE(run_text("solve-cg", arcsine_cfg, dir) == cli::exit_ok);
    const auto m = read_kv(dir / "manifest.kv");
    CHECK(m.at("status") == "ok");
    CHECK(m.at("config.grid.h") == "1/16");
    CHECK(m.count("wall_time_s") == 1);
    std::size_t listed = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (name == "manifest.kv") continue;
        ++listed;
        REQUIRE(m.count("output." + name + ".sha256") == 1);
        const std::string bytes = slurp(e.path());
        CHECK(m.at("output." + name + ".sha256") == cli::sha256_hex(bytes));
        CHECK(m.at("output." + name + ".bytes") == std::to_string(bytes.size()));
    }
    CHECK(listed == 2);  // field.tsv, report.kv
    const std::string field = slurp(dir / "field.tsv");
    CHECK(field.rfind("# s\tt\tx\texact\terror\tgrid=cone c=1 S=2 T=2 h=0.0625", 0) == 0);
}

TEST_CASE("exit codes") {
    SUBCASE("config error") {
        const auto dir = scratch("usage");
        CHECK(run_text("solve-cg", std::string(arcsine_cfg) + "grid.S = many\n", dir) == cli::exit_usage);
        CHECK(read_kv(dir / "manifest.kv").at("status") == "failed");
        CHECK(run_text("launch", arcsine_cfg, dir) == cli::exit_usage);
    }
    SUBCASE("validation") {
        const auto dir = scratch("validation");
        std::ofstream(dir / "f.tsv") << "0 0\n1 1\n";
        std::ofstream(dir / "g.tsv") << "1 5\n4 5\n";
        std::ofstream(dir / "h.tsv") << "1 0\n4 0\n";
        std::ofstream(dir / "n.tsv") << "0 1\n1 1\n";
        const std::string cfg = "grid.c = 1\nboundary.g = " + (dir / "g.tsv").string() + "\nboundary.h = " +
                                (dir / "h.tsv").string() + "\nboundary.f = " + (dir / "f.tsv").string() +
                                "\nboundary.n = " + (dir / "n.tsv").string() + "\n";
        const auto out = dir / "out";
        CHECK(run_text("validate", cfg, out) == cli::exit_validation);
        CHECK(read_kv(out / "report.kv").at("validation.corner_ok") == "false");
    }
    SUBCASE("convergence") {
        const auto dir = scratch("convergence");
        CHECK(run_text("solve-cg", std::string(arcsine_cfg) + "solver.max_iter = 2\n", dir) == cli::exit_convergence);
        const auto r = read_kv(dir / "report.kv");
        CHECK(r.at("solve.iterations") == "2");
        CHECK(r.count("solve.increments") == 1);
    }
    SUBCASE("hypothesis") {
        const auto dir = scratch("hypothesis");
        CHECK(run_text("solve-goursat", "profile.kind = linear\nprofile.params = 1, 1\ngrid.n = 8\n", dir) ==
              cli::exit_hypothesis);
    }
    SUBCASE("io") {
        const auto dir = scratch("io");
        std::ofstream(dir / "file") << "x";
        CHECK(run_text("validate", arcsine_cfg, dir / "file" / "out") == cli::exit_io);
    }
}

TEST_CASE("oracle-check passes") {
    const auto dir = scratch("oracle");
    CHECK(run_text("oracle-check", "", dir) == cli::exit_ok);
    CHECK(read_kv(dir / "report.kv").at("oracle.pass") == "true");
}

TEST_CASE("command-line front end") {
    const auto dir = scratch("binary");
    std::ofstream(dir / "run.cfg") << arcsine_cfg;
    const std::string exe = HMA_CLI_PATH;
    const std::string ok = exe + " validate " + (dir / "run.cfg").string() + " --out " + (dir / "o").string() +
                           " --deterministic > /dev/null 2>&1";
    CHECK(std::system(ok.c_str()) == 0);
    CHECK(fs::exists(dir / "o" / "manifest.kv"));
    const std::string bad = exe + " frobnicate " + (dir / "run.cfg").string() + " > /dev/null 2>&1";
    const int status = std::system(bad.c_str());
    CHECK(WEXITSTATUS(status) == cli::exit_usage);
    const std::string missing = exe + " validate /nonexistent.cfg > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(missing.c_str())) == cli::exit_io);
}
