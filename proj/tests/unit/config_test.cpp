// Copyright 2026 The gossipsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gossip/config.hpp"

namespace gossip {
namespace {

nlohmann::json bundled(const std::string& name)
{
    return read_json_file(std::string(GOSSIP_CONFIG_DIR) + "/" + name);
}

ErrorCode parse_error(const nlohmann::json& j)
{
    try {
        parse_config(j);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorCode::Io;
}

TEST(Config, BundledReferenceConfigs)
{
    for (const auto& [name, s] : {std::pair{"reference_low.json", testing::kLowS},
                                  std::pair{"reference_crit.json", testing::kCriticalS},
                                  std::pair{"reference_high.json", testing::kHighS}}) {
        const auto cfg = parse_config(bundled(name));
        EXPECT_EQ(cfg.model.a, testing::reference_matrix());
        EXPECT_TRUE(cfg.model.mode.symmetric);
        EXPECT_DOUBLE_EQ(cfg.model.s_schedule(0), s);
        EXPECT_EQ(cfg.model.t_schedule(0), 0.25);
        EXPECT_EQ(cfg.trials, 100000u);
        EXPECT_EQ(cfg.checkpoints.front(), 0u);
        EXPECT_EQ(cfg.checkpoints.back(), 200u);
        EXPECT_EQ(cfg.checkpoints.size(), 21u);
    }
}

TEST(Config, DefaultsAndGeometricCheckpoints)
{
    nlohmann::json j = {{"graph", {{"generator", {{"kind", "ring"}, {"n", 5}}}}}, {"steps", 20}, {"k0", 3}};
    const auto cfg = parse_config(j);
    EXPECT_EQ(cfg.checkpoints, (std::vector<std::uint64_t>{3, 4, 5, 7, 11, 19, 23}));
    EXPECT_EQ(cfg.eps_agree, 1e-6);
    EXPECT_EQ(cfg.big_m, 4e6);  // 1e6 times the ramp's spread
    EXPECT_EQ(cfg.model.probs.alpha, 1.0);
}

TEST(Config, Overrides)
{
    auto j = bundled("reference.json");
    apply_override(j, "schedules.T.value=0.3");
    apply_override(j, "mode=asymmetric");
    apply_override(j, "graph.matrix.0.1=0.5");
    const auto cfg = parse_config(j);
    EXPECT_EQ(cfg.model.t_schedule(0), 0.3);
    EXPECT_FALSE(cfg.model.mode.symmetric);
    EXPECT_THROW(apply_override(j, "novalue"), Error);
}

TEST(Config, SetAxisRequiresExistingNumber)
{
    auto j = bundled("reference.json");
    set_axis(j, "schedules.S.value", 0.2);
    EXPECT_EQ(j["schedules"]["S"]["value"], 0.2);
    for (const char* bad : {"schedules.S.missing", "mode", "", "a..b"}) {
        try {
            set_axis(j, bad, 1.0);
            FAIL() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::BadAxis);
        }
    }
}

TEST(Config, RejectsInvalidInput)
{
    auto j = bundled("reference.json");
    j["trials"] = 0;
    EXPECT_EQ(parse_error(j), ErrorCode::BadConfig);

    j = bundled("reference.json");
    j["graph"]["matrix"][1][2] = 0.15;
    EXPECT_EQ(parse_error(j), ErrorCode::NotStochastic);

    j = bundled("reference.json");
    j["graph"]["matrix"] = {{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
    try {
        parse_config(j);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Disconnected);
        EXPECT_NE(std::string(e.what()).find("weakly connected"), std::string::npos);
    }

    j = bundled("reference.json");
    j["checkpoints"] = {0, 500};
    EXPECT_EQ(parse_error(j), ErrorCode::BadConfig);

    j = bundled("reference.json");
    j["probs"]["alpha"] = 0.9;
    EXPECT_EQ(parse_error(j), ErrorCode::BadParameter);

    j = bundled("reference.json");
    j["schedules"]["T"]["hi"] = 2.0;
    EXPECT_EQ(parse_error(j), ErrorCode::BadParameter);

    j = bundled("reference.json");
    j["initial"] = {{"kind", "explicit"}, {"values", {1, 2}}};
    EXPECT_EQ(parse_error(j), ErrorCode::BadConfig);

    j = bundled("reference.json");
    j["theory"] = {{"horizon", 2}};
    EXPECT_EQ(parse_error(j), ErrorCode::BadHorizon);
}

TEST(Config, HashIsCanonical)
{
    const nlohmann::json a = nlohmann::json::parse(R"({"b": 1, "a": [1, 2]})");
    const nlohmann::json b = nlohmann::json::parse(R"({"a": [1, 2], "b": 1})");
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_NE(config_hash(a), config_hash(nlohmann::json::parse(R"({"a": [2, 1], "b": 1})")));
    // FNV-1a 64 reference values.
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Config, ManifestReplaysItsConfig)
{
    const auto j = bundled("reference.json");
    const nlohmann::json manifest = {{"config", j}, {"tool_version", "1.0.0"}};
    EXPECT_EQ(parse_config(manifest).source, parse_config(j).source);
}

TEST(InitialSpec, Kinds)
{
    Xoshiro256 rng(1);
    EXPECT_EQ(InitialSpec{}.materialize(4, rng), (std::vector<double>{1, 2, 3, 4}));
    InitialSpec u{InitialSpec::Kind::Uniform, {}, -2.0, 3.0};
    for (double v : u.materialize(100, rng)) {
        EXPECT_GE(v, -2.0);
        EXPECT_LT(v, 3.0);
    }
}

}  // namespace
}  // namespace gossip
