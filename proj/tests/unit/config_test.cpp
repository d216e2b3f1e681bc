// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>

#include "blockmerge/config.hpp"
#include "blockmerge/error.hpp"

namespace blockmerge {
namespace {

TEST(ParseTau, IntegersAndInfinity) {
    EXPECT_EQ(parse_tau("110"), 110);
    EXPECT_EQ(parse_tau("0"), 0);
    EXPECT_EQ(parse_tau("inf"), kInfiniteTau);
    EXPECT_EQ(parse_tau("INF"), kInfiniteTau);
    EXPECT_EQ(format_tau(kInfiniteTau), "inf");
    EXPECT_EQ(format_tau(50), "50");
    EXPECT_THROW(parse_tau("-1"), Error);
    EXPECT_THROW(parse_tau("1.5"), Error);
    EXPECT_THROW(parse_tau(""), Error);
}

TEST(RunConfig, DefaultsFollowGridResolution) {
    RunConfig c;
    EXPECT_EQ(c.grid_res, 400);
    EXPECT_EQ(c.block_side, 1.0);
    EXPECT_EQ(c.stride, 0.5);
    EXPECT_EQ(c.effective_tau2(), 110);
    c.grid_res = 500;
    EXPECT_EQ(c.effective_tau2(), 50);
    c.tau2 = 7;
    EXPECT_EQ(c.v2_params().tau2, 7);
}

TEST(RunConfig, ValidateRejectsBadFields) {
    auto bad = [](auto mutate) {
        RunConfig c;
        mutate(c);
        EXPECT_THROW(c.validate(), Error);
    };
    bad([](RunConfig& c) { c.grid_res = 0; });
    bad([](RunConfig& c) { c.block_side = 0; });
    bad([](RunConfig& c) { c.stride = 2.0; });
    bad([](RunConfig& c) { c.tau1 = -1; });
    bad([](RunConfig& c) { c.tau2 = -1; });
    bad([](RunConfig& c) { c.workers = 0; });
    EXPECT_NO_THROW(RunConfig{}.validate());
}

TEST(ConfigJson, RoundTrip) {
    RunConfig c;
    c.grid_res = 500;
    c.block_side = 1.5;
    c.stride = 0.75;
    c.tau1 = 10;
    c.tau2 = kInfiniteTau;
    c.algorithm = Algorithm::V1;
    c.seed = 123456789012345ULL;
    c.workers = 4;
    c.format = CloudFormat::Tsv;
    c.in = "a.tsv";
    c.preds = "b.txt";
    c.gt = "c.txt";
    c.out = "d.csv";
    EXPECT_EQ(config_from_json(config_to_json(c)), c);
    EXPECT_EQ(config_from_json(config_to_json(RunConfig{})), RunConfig{});
}

TEST(ConfigJson, PartialAndInvalidInput) {
    const auto c = config_from_json(R"({"grid_res": 500, "tau2": "inf", "algorithm": "v1"})");
    EXPECT_EQ(c.grid_res, 500);
    EXPECT_EQ(c.tau2, kInfiniteTau);
    EXPECT_EQ(c.algorithm, Algorithm::V1);
    EXPECT_EQ(c.stride, 0.5);
    EXPECT_THROW(config_from_json(R"({"grid": 500})"), Error);
    EXPECT_THROW(config_from_json("{"), Error);
    EXPECT_THROW(config_from_json(R"({"grid_res": "big"})"), Error);
    EXPECT_THROW(config_from_json(R"({"grid_res": 0})"), Error);
}

TEST(ConfigJson, SaveAndLoad) {
    const auto path = std::filesystem::temp_directory_path() / "blockmerge_config_test.json";
    RunConfig c;
    c.tau2 = 50;
    c.out = "labels.txt";
    save_config(path, c);
    EXPECT_EQ(load_config(path), c);
    std::filesystem::remove(path);
    EXPECT_THROW(load_config(path), Error);
}

}  // namespace
}  // namespace blockmerge
