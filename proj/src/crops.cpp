// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "logicqa/crops.hpp"

#include "logicqa/error.hpp"
#include "logicqa/hash.hpp"

namespace logicqa {

namespace {

const char* to_string(CropRole r) { return r == CropRole::masked_full ? "masked_full" : "object_crop"; }

const char* to_string(CropMethod m) {
    switch (m) {
        case CropMethod::heuristic: return "heuristic";
        case CropMethod::external_model: return "external_model";
        case CropMethod::provided_mask: return "provided_mask";
    }
    return "?";
}

CropRole role_from(const std::string& s) {
    if (s == "masked_full") return CropRole::masked_full;
    if (s == "object_crop") return CropRole::object_crop;
    throw Error(ErrorKind::validation, "unknown crop role: " + s);
}

CropMethod method_from(const std::string& s) {
    if (s == "heuristic") return CropMethod::heuristic;
    if (s == "external_model") return CropMethod::external_model;
    if (s == "provided_mask") return CropMethod::provided_mask;
    throw Error(ErrorKind::validation, "unknown crop method: " + s);
}

}  // namespace

void CropManifest::validate() const {
    if (entries.empty()) throw Error(ErrorKind::validation, "crop manifest for " + source_image + " has no entries");
    int masked = 0;
    for (const auto& e : entries) {
        if (e.role == CropRole::masked_full) ++masked;
        if (e.box.w <= 0 || e.box.h <= 0 || e.box.x < 0 || e.box.y < 0)
            throw Error(ErrorKind::validation, "crop manifest for " + source_image + " has a degenerate box");
        if (width && height && (e.box.x + e.box.w > *width || e.box.y + e.box.h > *height))
            throw Error(ErrorKind::validation, "crop box outside the bounds of " + source_image);
    }
    if (masked > 1) throw Error(ErrorKind::validation, "crop manifest for " + source_image + " has two masked_full entries");
}

std::vector<std::pair<std::string, std::filesystem::path>> CropManifest::views() const {
    std::vector<std::pair<std::string, std::filesystem::path>> out;
    int k = 0;
    for (const auto& e : entries)
        if (e.role == CropRole::object_crop) out.emplace_back(source_image + "#crop" + std::to_string(++k), e.output_path);
    if (out.empty())
        for (const auto& e : entries)
            if (e.role == CropRole::masked_full) out.emplace_back(source_image + "#masked", e.output_path);
    return out;
}

nlohmann::json to_json(const CropManifest& m) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : m.entries) {
        entries.push_back({{"role", to_string(e.role)},
                           {"bounding_box", {e.box.x, e.box.y, e.box.w, e.box.h}},
                           {"output_path", e.output_path.generic_string()},
                           {"method", to_string(e.method)},
                           {"clamped", e.clamped}});
    }
    nlohmann::json j = {{"source_image", m.source_image}, {"entries", std::move(entries)}};
    if (m.width) j["width"] = *m.width;
    if (m.height) j["height"] = *m.height;
    return j;
}

CropManifest crop_manifest_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    CropManifest m;
    try {
        m.source_image = j.at("source_image").get<std::string>();
        if (j.contains("width")) m.width = j["width"].get<int>();
        if (j.contains("height")) m.height = j["height"].get<int>();
        for (const auto& e : j.at("entries")) {
            CropEntry c;
            c.role = role_from(e.at("role").get<std::string>());
            auto box = e.at("bounding_box").get<std::vector<int>>();
            if (box.size() != 4) throw Error(ErrorKind::validation, "bounding_box must be [x, y, w, h]");
            c.box = {box[0], box[1], box[2], box[3]};
            std::filesystem::path p = e.at("output_path").get<std::string>();
            c.output_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
            c.method = method_from(e.value("method", std::string("heuristic")));
            c.clamped = e.value("clamped", false);
            m.entries.push_back(std::move(c));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::validation, std::string("malformed crop manifest: ") + e.what());
    }
    m.validate();
    return m;
}

std::map<std::string, CropManifest> load_crop_manifests(const std::filesystem::path& path) {
    auto j = nlohmann::json::parse(read_text_file(path), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorKind::validation, "crop manifest is not valid JSON: " + path.string());
    const auto base = path.parent_path();
    nlohmann::json list = j.is_array() ? j : (j.contains("manifests") ? j["manifests"] : nlohmann::json::array({j}));
    std::map<std::string, CropManifest> out;
    for (const auto& item : list) {
        auto m = crop_manifest_from_json(item, base);
        auto key = m.source_image;
        if (!out.emplace(key, std::move(m)).second)
            throw Error(ErrorKind::validation, "two crop manifests for " + key);
    }
    return out;
}

}  // namespace logicqa
