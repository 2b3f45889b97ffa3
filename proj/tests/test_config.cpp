// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "logicqa/config.hpp"
#include "logicqa/error.hpp"
#include "support.hpp"

using namespace logicqa;
using nlohmann::json;

namespace {

json minimal() {
    return {{"dataset", {{"root", "data"}, {"category", "breakfast_box"}}},
            {"profile", "profiles/breakfast_box.json"},
            {"backend", {{"kind", "mock"}, {"fixture", "fixture.json"}}}};
}

ErrorKind kind_of(const json& j) {
    try {
        config_from_json(j, "/base");
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::io;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults and relative path resolution") {
    auto c = config_from_json(minimal(), "/base");
    CHECK(c.dataset_root == "/base/data");
    CHECK(c.profile == "/base/profiles/breakfast_box.json");
    CHECK(c.backend.fixture == "/base/fixture.json");
    CHECK(c.out_dir == "out");
    CHECK(c.runs == 3);
    CHECK(c.parallelism == 1);
    CHECK(c.filter.enabled);
    CHECK(c.filter.threshold == doctest::Approx(0.80));
    CHECK(c.filter.pool_size == 50);
    CHECK(c.filter.mode == FilterMode::direct);
    CHECK(c.seed_policy == SeedPolicy::per_run);
    CHECK(!c.cache_dir);
    CHECK(!c.preprocess_manifest);
    CHECK(c.backend.sampling.temperature == 1.0);
    CHECK(!c.backend.sampling.top_p);
}

TEST_CASE("absolute paths are kept") {
    auto j = minimal();
    j["dataset"]["root"] = "/data/loco";
    j["cache_dir"] = "/var/cache/lq";
    j["preprocess_manifest"] = "crops/manifest.json";
    auto c = config_from_json(j, "/base");
    CHECK(c.dataset_root == "/data/loco");
    CHECK(c.cache_dir == std::filesystem::path("/var/cache/lq"));
    CHECK(c.preprocess_manifest == std::filesystem::path("/base/crops/manifest.json"));
}

TEST_CASE("credentials in the config are rejected") {
    for (const char* k : {"api_key", "apiKey", "authorization", "token"}) {
        CAPTURE(k);
        auto j = minimal();
        j["backend"][k] = "sk-secret";
        try {
            config_from_json(j, "/base");
            FAIL("accepted a credential");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::config);
            CHECK(std::string(e.what()).find("sk-secret") == std::string::npos);
        }
    }
}

TEST_CASE("range validation") {
    auto j = minimal();
    j["filter"] = {{"threshold", 0.0}};
    CHECK(kind_of(j) == ErrorKind::config);
    j["filter"] = {{"threshold", 1.01}};
    CHECK(kind_of(j) == ErrorKind::config);
    j["filter"] = {{"threshold", 1.0}};
    CHECK_NOTHROW(config_from_json(j, "/base"));

    j = minimal();
    j["runs"] = 0;
    CHECK(kind_of(j) == ErrorKind::config);
    j = minimal();
    j["parallelism"] = 0;
    CHECK(kind_of(j) == ErrorKind::config);
    j = minimal();
    j["seed_policy"] = "sometimes";
    CHECK(kind_of(j) == ErrorKind::config);
    j = minimal();
    j["backend"]["kind"] = "remote";
    CHECK(kind_of(j) == ErrorKind::config);
    j = minimal();
    j["backend"].erase("fixture");
    CHECK(kind_of(j) == ErrorKind::config);
    j = minimal();
    j.erase("dataset");
    CHECK(kind_of(j) == ErrorKind::config);
    j = minimal();
    j["filter"] = {{"mode", "loose"}};
    CHECK_THROWS(config_from_json(j, "/base"));
}

TEST_CASE("sampling defaults follow the model family") {
    auto g = default_sampling_for("gpt-4o");
    CHECK(g.temperature == 1.0);
    CHECK(!g.top_p);
    auto iv = default_sampling_for("InternVL2.5-8B");
    CHECK(iv.temperature == doctest::Approx(0.2));
    REQUIRE(iv.top_p);
    CHECK(*iv.top_p == doctest::Approx(0.7));

    auto j = minimal();
    j["backend"]["model"] = "internvl-26b";
    j["backend"]["temperature"] = 0.5;
    auto c = config_from_json(j, "/base");
    CHECK(c.backend.sampling.model == "internvl-26b");
    CHECK(c.backend.sampling.temperature == doctest::Approx(0.5));
    CHECK(c.backend.sampling.top_p == doctest::Approx(0.7));
}

TEST_CASE("seed per run") {
    auto j = minimal();
    j["seed"] = 7;
    auto c = config_from_json(j, "/base");
    CHECK(c.seed_for_run(1) == 7);
    CHECK(c.seed_for_run(3) == 9);
    j["seed_policy"] = "fixed";
    c = config_from_json(j, "/base");
    CHECK(c.seed_for_run(1) == 7);
    CHECK(c.seed_for_run(3) == 7);
}

TEST_CASE("load_config resolves against the file's directory") {
    testing::TempDir tmp("config");
    testing::write_file(tmp / "sub/cfg.json", minimal().dump());
    auto c = load_config(tmp / "sub/cfg.json");
    CHECK(c.dataset_root == tmp / "sub/data");

    testing::write_file(tmp / "bad.json", "{");
    CHECK_THROWS_AS(load_config(tmp / "bad.json"), Error);
    try {
        load_config(tmp / "missing.json");
        FAIL("loaded a missing file");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
    }
}

TEST_CASE("bundled mock config parses") {
    auto c = load_config(testing::mock_fixture_dir() / "config.json");
    CHECK(c.category == "breakfast_box");
    CHECK(c.backend.kind == BackendKind::mock);
    CHECK(c.runs == 3);
    CHECK(std::filesystem::exists(c.profile));
    CHECK(std::filesystem::exists(c.backend.fixture));
}

}  // TEST_SUITE
