// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "logicqa/dataset.hpp"
#include "logicqa/filtering.hpp"
#include "logicqa/query.hpp"

namespace logicqa {

enum class BackendKind { live, mock };
BackendKind backend_kind_from_string(const std::string& s);

enum class SeedPolicy {
    per_run,  // run k uses seed + k - 1, so references are re-drawn each run
    fixed,    // every run reuses the same references
};

struct BackendConfig {
    BackendKind kind = BackendKind::mock;
    std::filesystem::path fixture;
    SamplingParams sampling;
    int max_retries = 3;
    int backoff_ms = 500;
    int timeout_s = 120;
    /// Mock only: answer without token logprobs.
    bool strip_logprobs = false;
};

struct FilterConfig {
    bool enabled = true;
    double threshold = kDefaultFilterThreshold;
    std::size_t pool_size = kDefaultValidationPool;
    FilterMode mode = FilterMode::direct;
};

struct RunConfig {
    std::filesystem::path dataset_root;
    std::string category;
    Layout layout = Layout::loco;
    SubclassSource subclasses;
    std::filesystem::path profile;
    std::optional<std::filesystem::path> templates_dir;

    BackendConfig backend;
    std::uint64_t seed = 0;
    SeedPolicy seed_policy = SeedPolicy::per_run;
    int parallelism = 1;
    FilterConfig filter;
    int runs = 3;
    bool retry_unparsed = true;

    /// Empty disables the response cache.
    std::optional<std::filesystem::path> cache_dir;
    std::filesystem::path out_dir = "out";
    std::optional<std::filesystem::path> preprocess_manifest;
    /// Human answers for the agreement statistic.
    std::optional<std::filesystem::path> annotations;

    /// threshold in (0, 1], runs >= 1, parallelism >= 1; throws Error(config).
    void validate() const;
    std::uint64_t seed_for_run(int run) const;
};

/// Temperature 0.2 / top_p 0.7 for InternVL-class model names, 1.0 otherwise.
SamplingParams default_sampling_for(const std::string& model);

/// Parses the JSON config. Relative paths resolve against `base_dir`.
/// Credentials are rejected: they come from the environment only.
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace logicqa
