// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "logicqa/backend.hpp"
#include "logicqa/prompts.hpp"

namespace logicqa {

/// Sampling parameters copied into every request.
/// Defaults follow the GPT-4o-class setting (temperature 1.0, others default).
struct SamplingParams {
    std::string model = "gpt-4o";
    double temperature = 1.0;
    std::optional<double> top_p;
    int max_tokens = 1024;
    bool logprobs = true;
    int top_logprobs = 0;
};

/// What every pipeline stage needs to talk to the backend.
struct QueryContext {
    Backend& backend;
    SamplingParams sampling;
    const PromptTemplates& templates = PromptTemplates::builtin();
    int parallelism = 1;
    /// Re-query an unparseable answer once before giving up on it.
    bool retry_unparsed = true;

    ChatRequest make_request(std::string text, const std::optional<std::filesystem::path>& image, RequestTag tag,
                             int attempt = 0) const {
        ChatRequest r;
        r.model = sampling.model;
        r.temperature = sampling.temperature;
        r.top_p = sampling.top_p;
        r.max_tokens = sampling.max_tokens;
        r.want_logprobs = sampling.logprobs;
        r.top_logprobs = sampling.top_logprobs;
        r.attempt = attempt;
        r.tag = std::move(tag);
        r.parts.push_back(MessagePart::text_part(std::move(text)));
        if (image) r.parts.push_back(MessagePart::image_part(*image));
        return r;
    }
};

}  // namespace logicqa
