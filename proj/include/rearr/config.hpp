#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rearr/builder.hpp"
#include "rearr/permutation.hpp"
#include "rearr/series.hpp"
#include "rearr/targets.hpp"

namespace rearr {

struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string field_path, const std::string& what)
        : std::runtime_error(field_path + ": " + what), field(std::move(field_path)) {}
};

struct TargetSpec {
    enum class Kind { Constant, Linear, List, Extended };
    Kind kind = Kind::Constant;
    double value = 0.0;
    std::vector<double> values;
    bool infinite = false;
    int inf_sign = +1;

    TargetSeq to_sequence() const;
};

struct RunConfig {
    int dimension = 2;
    std::string series_name = "alternating_rsqrt";
    std::optional<std::vector<double>> series_inline;

    std::map<std::uint32_t, std::pair<Permutation, TargetSpec>> targets;
    std::optional<TargetSpec> default_target;

    TruncationBudget budget;
    double tolerance = 0.05;
    std::uint64_t witness_horizon = 100000;
    double witness_bound = 3.0;
    std::uint64_t split_horizon = 10000;
    double visit_gain = 1.0;

    double quad_tol = 1e-6;
    std::uint32_t box_prefixes = 0;  // 0: use budget.depth
    std::vector<std::vector<double>> boxes;  // explicit box schedule (optional)
    bool unit_cube = false;

    SeriesSource make_source() const;
    PermTargets make_targets() const;          // sequences for build/verify
    TargetSpec target_for(const Permutation& sigma) const;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

} // namespace rearr
