#include "hma/config.hpp"

#include "hma/error.hpp"
#include "hma/exact_solutions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace hma {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& text) {
    const std::string v = trim(text);
    // "1/128" is accepted for grid spacings
    if (auto slash = v.find('/'); slash != std::string::npos)
        return parse_number(key, v.substr(0, slash)) / parse_number(key, v.substr(slash + 1));
    double out = 0.0;
    const auto* first = v.data();
    const auto* last = v.data() + v.size();
    auto res = std::from_chars(first, last, out);
    if (v.empty() || res.ec != std::errc() || res.ptr != last)
        throw Error(ErrorKind::invalid_argument, "config key '" + key + "': not a number: '" + text + "'");
    return out;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text, std::filesystem::path base_dir) {
    RunConfig cfg;
    cfg.base_dir_ = std::move(base_dir);
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::invalid_argument, "config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw Error(ErrorKind::invalid_argument, "config line " + std::to_string(lineno) + ": empty key");
        cfg.values_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::io, "cannot read config " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse(ss.str(), path.parent_path());
}

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::string RunConfig::require(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorKind::invalid_argument, "config key '" + key + "' is required");
    return it->second;
}

double RunConfig::number(const std::string& key, double fallback) const {
    return has(key) ? parse_number(key, values_.at(key)) : fallback;
}

double RunConfig::number(const std::string& key) const { return parse_number(key, require(key)); }

int RunConfig::integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw Error(ErrorKind::invalid_argument, "config key '" + key + "': not an integer");
    return static_cast<int>(v);
}

bool RunConfig::flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = values_.at(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error(ErrorKind::invalid_argument, "config key '" + key + "': expected a boolean");
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
    std::string v = require(key);
    std::replace(v.begin(), v.end(), ',', ' ');
    std::istringstream is(v);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) out.push_back(parse_number(key, tok));
    return out;
}

std::filesystem::path RunConfig::path(const std::string& key) const {
    std::filesystem::path p = require(key);
    return p.is_absolute() || base_dir_.empty() ? p : base_dir_ / p;
}

namespace {

std::vector<std::pair<double, double>> read_table(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::io, "cannot read table " + path.string());
    std::vector<std::pair<double, double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        std::istringstream ls(line);
        double a, b;
        if (!(ls >> a >> b)) throw Error(ErrorKind::invalid_argument, "malformed table row in " + path.string() + ": " + line);
        rows.emplace_back(a, b);
    }
    if (rows.size() < 2) throw Error(ErrorKind::invalid_argument, "table " + path.string() + " needs at least two rows");
    for (std::size_t k = 1; k < rows.size(); ++k)
        if (!(rows[k].first > rows[k - 1].first))
            throw Error(ErrorKind::invalid_argument, "table " + path.string() + ": abscissae must increase");
    return rows;
}

}  // namespace

Sampler table_sampler(const std::filesystem::path& path) {
    auto rows = std::make_shared<const std::vector<std::pair<double, double>>>(read_table(path));
    return [rows](double x) {
        const auto& r = *rows;
        const double span = r.back().first - r.front().first;
        const double slack = 1e-12 * std::max(1.0, span);
        if (x < r.front().first - slack || x > r.back().first + slack)
            throw Error(ErrorKind::invalid_argument, "table sampler evaluated outside its range");
        auto it = std::upper_bound(r.begin(), r.end(), x, [](double v, const auto& row) { return v < row.first; });
        if (it == r.begin()) return r.front().second;
        if (it == r.end()) return r.back().second;
        const auto& [x1, y1] = *it;
        const auto& [x0, y0] = *(it - 1);
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    };
}

CurvatureProfile profile_from_config(const RunConfig& cfg, double u_max, bool semi_infinite) {
    ProfileOptions opt;
    opt.u_max = cfg.number("profile.u_max", u_max);
    opt.semi_infinite = semi_infinite;
    const ProfileKind kind = parse_profile_kind(cfg.get("profile.kind", "linear"));
    std::vector<double> params;
    if (kind == ProfileKind::tabulated) {
        for (auto [u, l] : read_table(cfg.path("profile.table"))) {
            params.push_back(u);
            params.push_back(l);
        }
    } else {
        params = cfg.has("profile.params") ? cfg.numbers("profile.params") : std::vector<double>{1.0};
    }
    return make_profile(kind, params, opt);
}

CauchyGoursatData boundary_from_config(const RunConfig& cfg) {
    const double c = cfg.number("grid.c", 1.0);
    if (cfg.has("boundary.name")) return builtin_data(cfg.get("boundary.name", ""), c);
    CauchyGoursatData d;
    d.c = c;
    d.g = table_sampler(cfg.path("boundary.g"));
    d.h = table_sampler(cfg.path("boundary.h"));
    d.f = table_sampler(cfg.path("boundary.f"));
    d.n = table_sampler(cfg.path("boundary.n"));
    d.label = "tables";
    return d;
}

namespace {

double spacing(const RunConfig& cfg) {
    if (cfg.has("grid.n")) {
        const int n = cfg.integer("grid.n", 0);
        if (n <= 0) throw Error(ErrorKind::invalid_argument, "grid.n must be positive");
        return 1.0 / n;
    }
    return cfg.number("grid.h");
}

}  // namespace

HodographGrid cone_from_config(const RunConfig& cfg) {
    const double c = cfg.number("grid.c", 1.0);
    return HodographGrid::cone(c, cfg.number("grid.S", 3.0 * c), cfg.number("grid.T", 3.0 * c), spacing(cfg));
}

HodographGrid rectangle_from_config(const RunConfig& cfg) {
    return HodographGrid::rectangle(cfg.number("grid.S", 1.0), cfg.number("grid.T", 1.0), spacing(cfg));
}

}  // namespace hma
