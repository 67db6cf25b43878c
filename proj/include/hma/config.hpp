#pragma once

#include "hma/boundary.hpp"
#include "hma/curvature.hpp"
#include "hma/grid.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hma {

/// Flat "key = value" configuration. '#' starts a comment; sections are
/// expressed through dotted keys (grid.h, solver.tol, ...).
class RunConfig {
public:
    static RunConfig parse(const std::string& text, std::filesystem::path base_dir = {});
    static RunConfig load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    std::string require(const std::string& key) const;
    double number(const std::string& key, double fallback) const;
    double number(const std::string& key) const;
    int integer(const std::string& key, int fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    std::vector<double> numbers(const std::string& key) const;
    /// Relative paths resolve against the config file's directory.
    std::filesystem::path path(const std::string& key) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
    std::filesystem::path base_dir_;
};

/// Typed views of the config. All throw Error(invalid_argument) on bad input.
CurvatureProfile profile_from_config(const RunConfig& cfg, double u_max, bool semi_infinite);
CauchyGoursatData boundary_from_config(const RunConfig& cfg);
HodographGrid cone_from_config(const RunConfig& cfg);
HodographGrid rectangle_from_config(const RunConfig& cfg);

/// Piecewise-linear sampler over a two-column (x, value) text table.
Sampler table_sampler(const std::filesystem::path& path);

}  // namespace hma
