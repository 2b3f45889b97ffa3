// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <string>

#include "logicqa/backend.hpp"

namespace logicqa {

struct OpenAIOptions {
    /// Base URL ("https://api.openai.com") or a full ".../chat/completions" URL.
    std::string endpoint;
    std::string api_key;
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500};
    std::chrono::seconds timeout{120};

    /// Reads LOGICQA_ENDPOINT and LOGICQA_API_KEY (falls back to OPENAI_API_KEY).
    static OpenAIOptions from_env();
};

/// Request body for POST /v1/chat/completions. Images go in as base64 data URLs.
nlohmann::json build_chat_body(const ChatRequest& request);

/// Reads choices[0].message.content and choices[0].logprobs.content[].
/// Missing logprobs leave `tokens` empty.
ChatResponse parse_chat_body(const nlohmann::json& body, const std::string& backend_id);

/// Client for an OpenAI-compatible chat-completions endpoint.
/// Transport failures, 5xx and 429 are retried with exponential backoff;
/// any other 4xx throws BackendError immediately.
class OpenAIBackend : public Backend {
public:
    explicit OpenAIBackend(OpenAIOptions options);

    ChatResponse query(const ChatRequest& request) override;
    std::string id() const override { return "openai:" + host_; }

private:
    OpenAIOptions options_;
    std::string host_;
    std::string path_;
};

}  // namespace logicqa
