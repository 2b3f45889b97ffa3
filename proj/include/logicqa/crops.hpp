// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace logicqa {

enum class CropRole { masked_full, object_crop };
enum class CropMethod { heuristic, external_model, provided_mask };

struct BoundingBox {
    int x = 0, y = 0, w = 0, h = 0;
    bool operator==(const BoundingBox&) const = default;
};

struct CropEntry {
    CropRole role = CropRole::object_crop;
    BoundingBox box;
    std::filesystem::path output_path;
    CropMethod method = CropMethod::heuristic;
    bool clamped = false;
};

/// Preprocessor output for one source image.
struct CropManifest {
    /// Record id (or path) of the source image.
    std::string source_image;
    std::optional<int> width, height;
    std::vector<CropEntry> entries;

    /// >= 1 entry, at most one masked_full, positive box sizes, and boxes
    /// inside the source bounds when those are known.
    void validate() const;

    /// What the model is shown instead of the source: every object crop when
    /// present, else the masked image. Ids are "<source>#crop<k>" / "<source>#masked".
    std::vector<std::pair<std::string, std::filesystem::path>> views() const;
};

nlohmann::json to_json(const CropManifest& m);
/// Relative output paths resolve against `base_dir`.
CropManifest crop_manifest_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

/// Accepts a single manifest object, an array of them, or {"manifests": [...]}.
/// Keyed by source_image.
std::map<std::string, CropManifest> load_crop_manifests(const std::filesystem::path& path);

}  // namespace logicqa
