// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "logicqa/config.hpp"

#include <algorithm>
#include <cctype>

#include "logicqa/error.hpp"
#include "logicqa/hash.hpp"

namespace fs = std::filesystem;

namespace logicqa {

BackendKind backend_kind_from_string(const std::string& s) {
    if (s == "live") return BackendKind::live;
    if (s == "mock") return BackendKind::mock;
    throw Error(ErrorKind::config, "unknown backend kind: " + s + " (expected live or mock)");
}

void RunConfig::validate() const {
    if (category.empty()) throw Error(ErrorKind::config, "config: dataset.category is required");
    if (dataset_root.empty()) throw Error(ErrorKind::config, "config: dataset.root is required");
    if (profile.empty()) throw Error(ErrorKind::config, "config: profile is required");
    if (!(filter.threshold > 0.0 && filter.threshold <= 1.0))
        throw Error(ErrorKind::config, "config: filter.threshold must lie in (0, 1]");
    if (runs < 1) throw Error(ErrorKind::config, "config: runs must be >= 1");
    if (parallelism < 1) throw Error(ErrorKind::config, "config: parallelism must be >= 1");
    if (backend.kind == BackendKind::mock && backend.fixture.empty())
        throw Error(ErrorKind::config, "config: mock backend needs backend.fixture");
    if (backend.sampling.max_tokens <= 0) throw Error(ErrorKind::config, "config: backend.max_tokens must be positive");
}

std::uint64_t RunConfig::seed_for_run(int run) const {
    return seed_policy == SeedPolicy::fixed ? seed : seed + static_cast<std::uint64_t>(run - 1);
}

SamplingParams default_sampling_for(const std::string& model) {
    SamplingParams p;
    p.model = model;
    std::string lc = model;
    std::transform(lc.begin(), lc.end(), lc.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lc.find("internvl") != std::string::npos) {
        p.temperature = 0.2;
        p.top_p = 0.7;
        p.max_tokens = 512;
    }
    return p;
}

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_relative() ? (base / path).lexically_normal() : path;
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j, const fs::path& base_dir) {
    RunConfig c;
    try {
        const auto& ds = j.at("dataset");
        c.dataset_root = resolve(base_dir, ds.at("root").get<std::string>());
        c.category = ds.at("category").get<std::string>();
        c.layout = layout_from_string(ds.value("layout", std::string("loco")));
        if (ds.contains("subclass_sidecar") && ds["subclass_sidecar"].is_string())
            c.subclasses.sidecar = resolve(base_dir, ds["subclass_sidecar"].get<std::string>());
        if (ds.contains("subclass_rules"))
            for (const auto& [k, v] : ds["subclass_rules"].items()) c.subclasses.rules.emplace_back(k, v.get<std::string>());

        c.profile = resolve(base_dir, j.at("profile").get<std::string>());
        if (j.contains("templates_dir") && j["templates_dir"].is_string())
            c.templates_dir = resolve(base_dir, j["templates_dir"].get<std::string>());

        if (j.contains("backend")) {
            const auto& b = j["backend"];
            for (const char* secret : {"api_key", "apiKey", "authorization", "token"})
                if (b.contains(secret))
                    throw Error(ErrorKind::config, std::string("config: backend.") + secret +
                                                       " is not allowed; pass credentials through LOGICQA_API_KEY");
            c.backend.kind = backend_kind_from_string(b.value("kind", std::string("mock")));
            if (b.contains("fixture") && b["fixture"].is_string())
                c.backend.fixture = resolve(base_dir, b["fixture"].get<std::string>());
            c.backend.sampling = default_sampling_for(b.value("model", std::string("gpt-4o")));
            auto& s = c.backend.sampling;
            s.temperature = b.value("temperature", s.temperature);
            if (b.contains("top_p")) s.top_p = b["top_p"].is_null() ? std::nullopt : std::optional<double>(b["top_p"].get<double>());
            s.max_tokens = b.value("max_tokens", s.max_tokens);
            s.logprobs = b.value("logprobs", s.logprobs);
            s.top_logprobs = b.value("top_logprobs", s.top_logprobs);
            c.backend.max_retries = b.value("max_retries", c.backend.max_retries);
            c.backend.backoff_ms = b.value("backoff_ms", c.backend.backoff_ms);
            c.backend.timeout_s = b.value("timeout_s", c.backend.timeout_s);
            c.backend.strip_logprobs = b.value("strip_logprobs", false);
        }

        c.seed = j.value("seed", std::uint64_t{0});
        const auto policy = j.value("seed_policy", std::string("per_run"));
        if (policy == "per_run")
            c.seed_policy = SeedPolicy::per_run;
        else if (policy == "fixed")
            c.seed_policy = SeedPolicy::fixed;
        else
            throw Error(ErrorKind::config, "config: seed_policy must be per_run or fixed");
        c.parallelism = j.value("parallelism", 1);
        c.runs = j.value("runs", 3);
        c.retry_unparsed = j.value("retry_unparsed", true);

        if (j.contains("filter")) {
            const auto& f = j["filter"];
            c.filter.enabled = f.value("enabled", true);
            c.filter.threshold = f.value("threshold", kDefaultFilterThreshold);
            c.filter.pool_size = f.value("pool_size", kDefaultValidationPool);
            c.filter.mode = filter_mode_from_string(f.value("mode", std::string("direct")));
        }

        if (j.contains("cache_dir") && j["cache_dir"].is_string())
            c.cache_dir = resolve(base_dir, j["cache_dir"].get<std::string>());
        if (j.contains("out_dir") && j["out_dir"].is_string()) c.out_dir = resolve(base_dir, j["out_dir"].get<std::string>());
        if (j.contains("preprocess_manifest") && j["preprocess_manifest"].is_string())
            c.preprocess_manifest = resolve(base_dir, j["preprocess_manifest"].get<std::string>());
        if (j.contains("annotations") && j["annotations"].is_string())
            c.annotations = resolve(base_dir, j["annotations"].get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::config, std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig load_config(const fs::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const Error& e) {
        throw Error(ErrorKind::config, e.what());
    }
    auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorKind::config, "config is not valid JSON: " + path.string());
    return config_from_json(j, fs::absolute(path).parent_path());
}

}  // namespace logicqa
