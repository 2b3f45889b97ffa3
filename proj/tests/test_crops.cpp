// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "logicqa/crops.hpp"
#include "logicqa/error.hpp"
#include "support.hpp"

using namespace logicqa;
using nlohmann::json;

namespace {

json entry(const std::string& role, std::vector<int> box, const std::string& out) {
    return {{"role", role}, {"bounding_box", box}, {"output_path", out}, {"method", "heuristic"}, {"clamped", false}};
}

json manifest(const std::string& src, json entries) {
    return {{"source_image", src}, {"width", 100}, {"height", 80}, {"entries", std::move(entries)}};
}

}  // namespace

TEST_SUITE("crops") {

TEST_CASE("manifest round-trips through JSON") {
    auto j = manifest("test/good/000", json::array({entry("object_crop", {0, 0, 50, 40}, "/c/a.png"),
                                                    entry("object_crop", {50, 40, 50, 40}, "/c/b.png"),
                                                    entry("masked_full", {0, 0, 100, 80}, "/c/m.png")}));
    auto m = crop_manifest_from_json(j);
    CHECK(m.entries.size() == 3);
    CHECK(m.entries[1].box == BoundingBox{50, 40, 50, 40});
    CHECK(to_json(crop_manifest_from_json(to_json(m))) == to_json(m));
}

TEST_CASE("views prefer object crops") {
    auto m = crop_manifest_from_json(manifest(
        "img", json::array({entry("masked_full", {0, 0, 100, 80}, "/m.png"), entry("object_crop", {0, 0, 10, 10}, "/a.png"),
                            entry("object_crop", {10, 10, 10, 10}, "/b.png")})));
    auto v = m.views();
    REQUIRE(v.size() == 2);
    CHECK(v[0].first == "img#crop1");
    CHECK(v[0].second == "/a.png");
    CHECK(v[1].first == "img#crop2");
}

TEST_CASE("views fall back to the masked image") {
    auto m = crop_manifest_from_json(manifest("img", json::array({entry("masked_full", {0, 0, 100, 80}, "/m.png")})));
    auto v = m.views();
    REQUIRE(v.size() == 1);
    CHECK(v[0].first == "img#masked");
}

TEST_CASE("validation rejects malformed manifests") {
    CHECK_THROWS_AS(crop_manifest_from_json(manifest("img", json::array())), Error);
    CHECK_THROWS_AS(crop_manifest_from_json(manifest("img", json::array({entry("object_crop", {90, 0, 20, 10}, "a")}))),
                    Error);
    CHECK_THROWS_AS(crop_manifest_from_json(manifest("img", json::array({entry("object_crop", {0, 0, 0, 10}, "a")}))),
                    Error);
    CHECK_THROWS_AS(crop_manifest_from_json(manifest("img", json::array({entry("masked_full", {0, 0, 10, 10}, "a"),
                                                                         entry("masked_full", {0, 0, 10, 10}, "b")}))),
                    Error);
    CHECK_THROWS_AS(crop_manifest_from_json(manifest("img", json::array({entry("sticker", {0, 0, 10, 10}, "a")}))), Error);
    CHECK_THROWS_AS(crop_manifest_from_json(manifest("img", json::array({entry("object_crop", {0, 0, 10}, "a")}))), Error);
    CHECK_THROWS_AS(crop_manifest_from_json(json{{"entries", json::array()}}), Error);
}

TEST_CASE("a box touching the edge is inside the bounds") {
    CHECK_NOTHROW(crop_manifest_from_json(manifest("img", json::array({entry("object_crop", {60, 40, 40, 40}, "a")}))));
}

TEST_CASE("unknown bounds skip the bounds check") {
    json j = {{"source_image", "img"}, {"entries", json::array({entry("object_crop", {500, 500, 10, 10}, "a")})}};
    CHECK_NOTHROW(crop_manifest_from_json(j));
}

TEST_CASE("load accepts an object, an array and a wrapper") {
    testing::TempDir tmp("crops");
    auto one = manifest("a", json::array({entry("object_crop", {0, 0, 10, 10}, "crops/a0.png")}));
    auto two = manifest("b", json::array({entry("masked_full", {0, 0, 10, 10}, "crops/b.png")}));

    testing::write_file(tmp / "single.json", one.dump());
    auto s = load_crop_manifests(tmp / "single.json");
    REQUIRE(s.size() == 1);
    CHECK(s.at("a").entries[0].output_path == tmp.path() / "crops/a0.png");

    testing::write_file(tmp / "array.json", json::array({one, two}).dump());
    CHECK(load_crop_manifests(tmp / "array.json").size() == 2);

    testing::write_file(tmp / "wrapped.json", json{{"manifests", {one, two}}}.dump());
    auto w = load_crop_manifests(tmp / "wrapped.json");
    CHECK(w.size() == 2);
    CHECK(w.count("b") == 1);

    testing::write_file(tmp / "dup.json", json::array({one, one}).dump());
    CHECK_THROWS_AS(load_crop_manifests(tmp / "dup.json"), Error);

    testing::write_file(tmp / "bad.json", "{not json");
    CHECK_THROWS_AS(load_crop_manifests(tmp / "bad.json"), Error);
}

}  // TEST_SUITE
