// SPDX-License-Identifier: Apache-2.0

#ifndef BLOCKMERGE_CONFIG_HPP
#define BLOCKMERGE_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "blockmerge/io.hpp"
#include "blockmerge/merge_v1.hpp"
#include "blockmerge/merge_v2.hpp"

namespace blockmerge {

enum class Algorithm { V1, V2 };

Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(Algorithm algo);

// "inf" (any case) maps to kInfiniteTau; otherwise a non-negative integer.
std::int64_t parse_tau(std::string_view text);
std::string format_tau(std::int64_t tau);

struct RunConfig {
    int grid_res = kDefaultGridRes;
    double block_side = 1.0;
    double stride = 0.5;
    std::int64_t tau1 = kDefaultTau1;
    std::optional<std::int64_t> tau2;  // unset: default_tau2(grid_res)
    Algorithm algorithm = Algorithm::V2;
    std::uint64_t seed = 0;
    int workers = 1;
    CloudFormat format = CloudFormat::Ply;
    std::string in;
    std::string preds;
    std::string gt;
    std::string out;

    std::int64_t effective_tau2() const noexcept { return tau2 ? *tau2 : default_tau2(grid_res); }
    MergeParams v1_params() const noexcept { return {tau1, grid_res}; }
    MergeParamsV2 v2_params() const noexcept { return {tau1, effective_tau2(), grid_res}; }

    // Throws InvalidArgument when a field violates its module's constraints.
    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// JSON representation; every field is optional on input and unknown keys are
// rejected.
std::string config_to_json(const RunConfig& config);
RunConfig config_from_json(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const RunConfig& config);

}  // namespace blockmerge

#endif  // BLOCKMERGE_CONFIG_HPP
