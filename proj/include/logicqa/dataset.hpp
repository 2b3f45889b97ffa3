// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace logicqa {

enum class Split { train_normal, test_normal, test_anomaly };
enum class Label { normal = 0, anomaly = 1 };
enum class Layout { loco, sem, flat };

const char* to_string(Split s);
const char* to_string(Label l);
const char* to_string(Layout l);
Split split_from_string(const std::string& s);
Label label_from_string(const std::string& s);
Layout layout_from_string(const std::string& s);

inline Label label_for(Split s) { return s == Split::test_anomaly ? Label::anomaly : Label::normal; }

struct ImageRecord {
    /// Path relative to the category root without extension, e.g. "train/good/000".
    std::string id;
    std::filesystem::path path;
    Split split = Split::train_normal;
    Label label = Label::normal;
    std::optional<std::string> subclass;

    bool operator==(const ImageRecord&) const = default;
};

struct DatasetManifest {
    std::string category;
    Layout layout = Layout::loco;
    std::vector<ImageRecord> records;

    std::size_t count(Split s) const;
    std::vector<const ImageRecord*> by_split(Split s) const;
    const ImageRecord& at(const std::string& id) const;
    const ImageRecord* find(const std::string& id) const;
    /// Distinct subclasses among records, sorted. Empty when none are assigned.
    std::vector<std::string> subclasses() const;
};

/// How subclasses (cable color, juice fruit) get attached to records.
/// Sidecar entries win over rules; a rule assigns its subclass to every
/// record whose id contains the rule's key.
struct SubclassSource {
    std::optional<std::filesystem::path> sidecar;
    std::vector<std::pair<std::string, std::string>> rules;
};

/// Scans `<root>/<category>` for the split directories of `layout`.
/// loco: train/good, test/good, test/logical_anomalies
/// sem:  train/{good|normal}, test/{good|normal}, every other test/* directory as anomalies
/// flat: normal/, anomaly/; the lexicographically first ceil(n/2) normals become train_normal
/// Records are ordered lexicographically by path.
DatasetManifest load_layout(const std::filesystem::path& root, const std::string& category,
                            Layout layout, const SubclassSource& subclasses = {});

nlohmann::json to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);

struct FewShotSelection {
    std::vector<std::string> reference_ids;
    std::vector<std::string> validation_ids;
    std::uint64_t seed = 0;
};

inline constexpr std::size_t kReferenceCount = 3;

/// Seeded Fisher-Yates over the train_normal ids (optionally restricted to one
/// subclass). The first three become references; up to `validation_cap` of the
/// remainder become the filtering pool.
FewShotSelection sample_few_shot(const DatasetManifest& manifest, std::uint64_t seed,
                                 std::size_t validation_cap = 50,
                                 const std::optional<std::string>& subclass = std::nullopt);

nlohmann::json to_json(const FewShotSelection& s);

}  // namespace logicqa
