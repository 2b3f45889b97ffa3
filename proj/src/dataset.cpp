// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "logicqa/dataset.hpp"

#include <algorithm>
#include <set>

#include "logicqa/error.hpp"
#include "logicqa/hash.hpp"

namespace fs = std::filesystem;

namespace logicqa {

const char* to_string(Split s) {
    switch (s) {
        case Split::train_normal: return "train_normal";
        case Split::test_normal: return "test_normal";
        case Split::test_anomaly: return "test_anomaly";
    }
    return "?";
}

const char* to_string(Label l) { return l == Label::anomaly ? "anomaly" : "normal"; }

const char* to_string(Layout l) {
    switch (l) {
        case Layout::loco: return "loco";
        case Layout::sem: return "sem";
        case Layout::flat: return "flat";
    }
    return "?";
}

Split split_from_string(const std::string& s) {
    if (s == "train_normal") return Split::train_normal;
    if (s == "test_normal") return Split::test_normal;
    if (s == "test_anomaly") return Split::test_anomaly;
    throw Error(ErrorKind::dataset, "unknown split: " + s);
}

Label label_from_string(const std::string& s) {
    if (s == "normal") return Label::normal;
    if (s == "anomaly") return Label::anomaly;
    throw Error(ErrorKind::dataset, "unknown label: " + s);
}

Layout layout_from_string(const std::string& s) {
    if (s == "loco") return Layout::loco;
    if (s == "sem") return Layout::sem;
    if (s == "flat") return Layout::flat;
    throw Error(ErrorKind::config, "unknown layout: " + s + " (expected loco, sem or flat)");
}

std::size_t DatasetManifest::count(Split s) const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [s](const ImageRecord& r) { return r.split == s; }));
}

std::vector<const ImageRecord*> DatasetManifest::by_split(Split s) const {
    std::vector<const ImageRecord*> out;
    for (const auto& r : records)
        if (r.split == s) out.push_back(&r);
    return out;
}

const ImageRecord* DatasetManifest::find(const std::string& id) const {
    auto it = std::find_if(records.begin(), records.end(), [&](const ImageRecord& r) { return r.id == id; });
    return it == records.end() ? nullptr : &*it;
}

const ImageRecord& DatasetManifest::at(const std::string& id) const {
    if (const auto* r = find(id)) return *r;
    throw Error(ErrorKind::dataset, "no image with id '" + id + "' in category " + category);
}

std::vector<std::string> DatasetManifest::subclasses() const {
    std::set<std::string> s;
    for (const auto& r : records)
        if (r.subclass) s.insert(*r.subclass);
    return {s.begin(), s.end()};
}

namespace {

bool is_image(const fs::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" || ext == ".tif" || ext == ".tiff";
}

std::vector<fs::path> list_images(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && is_image(e.path())) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

std::string make_id(const fs::path& category_root, const fs::path& file) {
    auto rel = fs::relative(file, category_root);
    rel.replace_extension();
    return rel.generic_string();
}

void add_dir(std::vector<ImageRecord>& out, const fs::path& category_root, const fs::path& dir, Split split) {
    for (const auto& f : list_images(dir))
        out.push_back({make_id(category_root, f), f, split, label_for(split), std::nullopt});
}

void apply_subclasses(std::vector<ImageRecord>& records, const SubclassSource& src) {
    std::map<std::string, std::string> sidecar;
    if (src.sidecar) {
        auto j = nlohmann::json::parse(read_text_file(*src.sidecar), nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw Error(ErrorKind::dataset, "subclass sidecar is not a JSON object: " + src.sidecar->string());
        for (auto& [k, v] : j.items()) sidecar[k] = v.get<std::string>();
    }
    for (auto& r : records) {
        if (auto it = sidecar.find(r.id); it != sidecar.end()) {
            r.subclass = it->second;
            continue;
        }
        for (const auto& [key, sub] : src.rules) {
            if (r.id.find(key) != std::string::npos) {
                r.subclass = sub;
                break;
            }
        }
    }
}

}  // namespace

DatasetManifest load_layout(const fs::path& root, const std::string& category, Layout layout,
                            const SubclassSource& subclasses) {
    if (!fs::is_directory(root)) throw Error(ErrorKind::dataset, "dataset root does not exist: " + root.string());
    const fs::path base = root / category;
    if (!fs::is_directory(base))
        throw Error(ErrorKind::dataset, "category directory does not exist: " + base.string());

    DatasetManifest m;
    m.category = category;
    m.layout = layout;
    bool recognized = false;

    auto first_dir = [&](std::initializer_list<const char*> names) -> std::optional<fs::path> {
        for (const char* n : names)
            if (fs::is_directory(base / n)) return base / n;
        return std::nullopt;
    };

    switch (layout) {
        case Layout::loco: {
            const std::pair<const char*, Split> dirs[] = {
                {"train/good", Split::train_normal},
                {"test/good", Split::test_normal},
                {"test/logical_anomalies", Split::test_anomaly},
            };
            for (const auto& [d, split] : dirs) {
                if (!fs::is_directory(base / d)) continue;
                recognized = true;
                add_dir(m.records, base, base / d, split);
            }
            break;
        }
        case Layout::sem: {
            auto train = first_dir({"train/good", "train/normal"});
            auto test_ok = first_dir({"test/good", "test/normal"});
            if (train) add_dir(m.records, base, *train, Split::train_normal);
            if (test_ok) add_dir(m.records, base, *test_ok, Split::test_normal);
            recognized = train || test_ok;
            if (fs::is_directory(base / "test")) {
                std::vector<fs::path> defect_dirs;
                for (const auto& e : fs::directory_iterator(base / "test")) {
                    auto name = e.path().filename().string();
                    if (e.is_directory() && name != "good" && name != "normal") defect_dirs.push_back(e.path());
                }
                std::sort(defect_dirs.begin(), defect_dirs.end());
                for (const auto& d : defect_dirs) {
                    recognized = true;
                    add_dir(m.records, base, d, Split::test_anomaly);
                }
            }
            break;
        }
        case Layout::flat: {
            if (fs::is_directory(base / "normal")) {
                recognized = true;
                auto files = list_images(base / "normal");
                const std::size_t n_train = (files.size() + 1) / 2;
                for (std::size_t i = 0; i < files.size(); ++i) {
                    Split s = i < n_train ? Split::train_normal : Split::test_normal;
                    m.records.push_back({make_id(base, files[i]), files[i], s, label_for(s), std::nullopt});
                }
            }
            if (fs::is_directory(base / "anomaly")) {
                recognized = true;
                add_dir(m.records, base, base / "anomaly", Split::test_anomaly);
            }
            break;
        }
    }

    if (!recognized)
        throw Error(ErrorKind::dataset, "no recognizable " + std::string(to_string(layout)) +
                                            " split directories under " + base.string());
    if (m.records.empty()) throw Error(ErrorKind::dataset, "empty dataset: no images under " + base.string());

    std::sort(m.records.begin(), m.records.end(),
              [](const ImageRecord& a, const ImageRecord& b) { return a.path < b.path; });
    apply_subclasses(m.records, subclasses);
    return m;
}

nlohmann::json to_json(const DatasetManifest& m) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : m.records) {
        nlohmann::json j = {{"id", r.id}, {"path", r.path.generic_string()}, {"split", to_string(r.split)},
                            {"label", to_string(r.label)}};
        if (r.subclass) j["subclass"] = *r.subclass;
        records.push_back(std::move(j));
    }
    return {{"category", m.category}, {"layout", to_string(m.layout)}, {"records", std::move(records)}};
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
    DatasetManifest m;
    m.category = j.at("category").get<std::string>();
    m.layout = layout_from_string(j.at("layout").get<std::string>());
    std::set<std::string> seen;
    for (const auto& r : j.at("records")) {
        ImageRecord rec;
        rec.id = r.at("id").get<std::string>();
        rec.path = r.at("path").get<std::string>();
        rec.split = split_from_string(r.at("split").get<std::string>());
        rec.label = label_from_string(r.at("label").get<std::string>());
        if (r.contains("subclass")) rec.subclass = r["subclass"].get<std::string>();
        if (rec.label != label_for(rec.split))
            throw Error(ErrorKind::dataset, "record " + rec.id + ": label contradicts split");
        if (!seen.insert(rec.id).second) throw Error(ErrorKind::dataset, "duplicate record id: " + rec.id);
        m.records.push_back(std::move(rec));
    }
    return m;
}

FewShotSelection sample_few_shot(const DatasetManifest& manifest, std::uint64_t seed, std::size_t validation_cap,
                                 const std::optional<std::string>& subclass) {
    std::vector<std::string> ids;
    for (const auto* r : manifest.by_split(Split::train_normal))
        if (!subclass || r->subclass == subclass) ids.push_back(r->id);
    if (ids.size() < kReferenceCount)
        throw Error(ErrorKind::dataset, "insufficient normals: need " + std::to_string(kReferenceCount) +
                                            " train_normal images" + (subclass ? " of subclass " + *subclass : "") +
                                            ", found " + std::to_string(ids.size()));

    SplitMix64 rng(seed);
    for (std::size_t i = ids.size() - 1; i > 0; --i) std::swap(ids[i], ids[rng.below(i + 1)]);

    FewShotSelection sel;
    sel.seed = seed;
    sel.reference_ids.assign(ids.begin(), ids.begin() + kReferenceCount);
    const std::size_t n_val = std::min(validation_cap, ids.size() - kReferenceCount);
    sel.validation_ids.assign(ids.begin() + kReferenceCount, ids.begin() + static_cast<std::ptrdiff_t>(kReferenceCount + n_val));
    return sel;
}

nlohmann::json to_json(const FewShotSelection& s) {
    return {{"reference_ids", s.reference_ids}, {"validation_ids", s.validation_ids}, {"seed", s.seed}};
}

}  // namespace logicqa
