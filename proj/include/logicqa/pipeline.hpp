// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "logicqa/backend.hpp"
#include "logicqa/cache.hpp"
#include "logicqa/config.hpp"
#include "logicqa/crops.hpp"
#include "logicqa/dataset.hpp"
#include "logicqa/inference.hpp"
#include "logicqa/metrics.hpp"
#include "logicqa/mock_backend.hpp"
#include "logicqa/prompts.hpp"
#include "logicqa/synthesis.hpp"

namespace logicqa {

/// Runs the stages and keeps every intermediate as a file under out_dir:
///
///   out/manifest.json
///   out/run_<k>/selection[_<sub>].json      references + validation pool
///   out/run_<k>/descriptions[_<sub>].json
///   out/run_<k>/summary[_<sub>].json
///   out/run_<k>/candidates[_<sub>].json
///   out/run_<k>/filter_report[_<sub>].{json,csv}
///   out/run_<k>/questions[_<sub>].json      the checklist
///   out/run_<k>/verdicts.json
///   out/run_<k>/report.json
///   out/report.{json,csv}                   mean over runs
///
/// `_<sub>` appears when the dataset carries subclasses; one checklist is
/// built per subclass.
class Pipeline {
public:
    /// Builds the backend stack from the config (mock or live, plus cache).
    explicit Pipeline(RunConfig config);
    /// Uses `upstream` instead of building one; the cache still applies.
    Pipeline(RunConfig config, std::shared_ptr<Backend> upstream);

    const RunConfig& config() const { return config_; }
    const DatasetManifest& manifest() const { return manifest_; }
    const ClassProfile& profile() const { return profile_; }
    std::filesystem::path run_dir(int run) const;

    std::vector<QuestionSet> synth(int run);
    std::vector<QuestionSet> filter(int run);
    std::vector<ImageVerdict> infer(int run);
    RunMetrics evaluate(int run);
    /// Evaluates every run and writes the aggregate report.
    EvalReport evaluate_all();
    /// synth + infer + evaluate for every run, then the aggregate.
    EvalReport run_all();

    /// Upstream backend calls so far (mock only; nullopt for live).
    std::optional<std::size_t> mock_calls() const;
    const CachingBackend* cache() const { return caching_.get(); }

private:
    struct Group {
        std::optional<std::string> subclass;
        std::string suffix;
    };

    void init();
    QueryContext context() const;
    std::vector<Group> groups() const;
    QuestionSet filter_and_augment(int run, const Group& g, const FewShotSelection& sel,
                                   const std::vector<std::string>& candidates);
    std::vector<InferenceTarget> targets(int run, std::vector<QuestionSet>& storage) const;
    void write_json(const std::filesystem::path& path, const nlohmann::json& j) const;

    RunConfig config_;
    DatasetManifest manifest_;
    ClassProfile profile_;
    PromptTemplates templates_;
    std::shared_ptr<Backend> upstream_;
    std::shared_ptr<MockBackend> mock_;
    std::shared_ptr<CachingBackend> caching_;
    Backend* backend_ = nullptr;
    std::map<std::string, CropManifest> crops_;
};

}  // namespace logicqa
