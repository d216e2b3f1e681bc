// SPDX-License-Identifier: Apache-2.0

#include "blockmerge/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "blockmerge/error.hpp"

namespace blockmerge {

using nlohmann::json;

Algorithm parse_algorithm(std::string_view name) {
    if (name == "v1") return Algorithm::V1;
    if (name == "v2") return Algorithm::V2;
    throw Error(ErrorCode::InvalidArgument, "unknown algorithm '" + std::string(name) + "' (expected v1 or v2)");
}

std::string_view to_string(Algorithm algo) {
    return algo == Algorithm::V1 ? "v1" : "v2";
}

std::int64_t parse_tau(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "inf" || lower == "infinite" || lower == "infinity") {
        return kInfiniteTau;
    }
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || v < 0) {
        throw Error(ErrorCode::InvalidArgument, "threshold must be a non-negative integer or 'inf', got '" +
                                                    std::string(text) + "'");
    }
    return v;
}

std::string format_tau(std::int64_t tau) {
    return tau == kInfiniteTau ? "inf" : std::to_string(tau);
}

void RunConfig::validate() const {
    if (grid_res < 1) {
        throw Error(ErrorCode::InvalidArgument, "grid resolution must be >= 1");
    }
    if (!(block_side > 0.0) || !(stride > 0.0) || stride > block_side) {
        throw Error(ErrorCode::InvalidArgument, "block geometry requires 0 < stride <= block side");
    }
    if (tau1 < 0 || (tau2 && *tau2 < 0)) {
        throw Error(ErrorCode::InvalidArgument, "thresholds must be non-negative");
    }
    if (workers < 1) {
        throw Error(ErrorCode::InvalidArgument, "workers must be >= 1");
    }
}

std::string config_to_json(const RunConfig& c) {
    json j;
    j["grid_res"] = c.grid_res;
    j["block_side"] = c.block_side;
    j["stride"] = c.stride;
    j["tau1"] = c.tau1;
    if (c.tau2) {
        if (*c.tau2 == kInfiniteTau) {
            j["tau2"] = "inf";
        } else {
            j["tau2"] = *c.tau2;
        }
    }
    j["algorithm"] = std::string(to_string(c.algorithm));
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["format"] = std::string(to_string(c.format));
    j["paths"] = {{"in", c.in}, {"preds", c.preds}, {"gt", c.gt}, {"out", c.out}};
    return j.dump(2) + "\n";
}

RunConfig config_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw Error(ErrorCode::ParseError, "config must be a JSON object");
    }
    RunConfig c;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "grid_res") {
                c.grid_res = value.get<int>();
            } else if (key == "block_side") {
                c.block_side = value.get<double>();
            } else if (key == "stride") {
                c.stride = value.get<double>();
            } else if (key == "tau1") {
                c.tau1 = value.get<std::int64_t>();
            } else if (key == "tau2") {
                c.tau2 = value.is_string() ? parse_tau(value.get<std::string>()) : value.get<std::int64_t>();
            } else if (key == "algorithm") {
                c.algorithm = parse_algorithm(value.get<std::string>());
            } else if (key == "seed") {
                c.seed = value.get<std::uint64_t>();
            } else if (key == "workers") {
                c.workers = value.get<int>();
            } else if (key == "format") {
                c.format = parse_cloud_format(value.get<std::string>());
            } else if (key == "paths") {
                for (const auto& [pkey, pval] : value.items()) {
                    auto& dst = pkey == "in"      ? c.in
                                : pkey == "preds" ? c.preds
                                : pkey == "gt"    ? c.gt
                                : pkey == "out"   ? c.out
                                                  : throw Error(ErrorCode::ParseError, "unknown path key '" + pkey + "'");
                    dst = pval.get<std::string>();
                }
            } else {
                throw Error(ErrorCode::ParseError, "unknown config key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("config has a field of the wrong type: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return config_from_json(buf.str());
}

void save_config(const std::filesystem::path& path, const RunConfig& config) {
    atomic_write(path, config_to_json(config));
}

}  // namespace blockmerge
