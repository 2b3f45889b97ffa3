// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "logicqa/backend.hpp"

#include "logicqa/error.hpp"
#include "logicqa/hash.hpp"

namespace logicqa {

MessagePart MessagePart::text_part(std::string text) {
    MessagePart p;
    p.kind = PartKind::text;
    p.text = std::move(text);
    return p;
}

MessagePart MessagePart::image_part(const std::filesystem::path& path) {
    MessagePart p;
    p.kind = PartKind::image;
    p.image_path = path;
    p.image_digest = sha256_file(path);
    return p;
}

void ChatRequest::validate() const {
    bool has_text = false;
    for (const auto& p : parts) {
        if (p.kind == PartKind::text) has_text = true;
        if (p.kind == PartKind::image && p.image_digest.size() != 64)
            throw Error(ErrorKind::validation, "image part without content digest: " + p.image_path.string());
    }
    if (!has_text) throw Error(ErrorKind::validation, "chat request has no text part");
    if (max_tokens <= 0) throw Error(ErrorKind::validation, "max_tokens must be positive");
    if (model.empty()) throw Error(ErrorKind::validation, "chat request has no model");
}

nlohmann::json canonical_request(const ChatRequest& r) {
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& p : r.parts) {
        if (p.kind == PartKind::text)
            parts.push_back({{"text", p.text}});
        else
            parts.push_back({{"image_sha256", p.image_digest}});
    }
    nlohmann::json j = {
        {"model", r.model},
        {"parts", std::move(parts)},
        {"temperature", r.temperature},
        {"top_p", r.top_p ? nlohmann::json(*r.top_p) : nlohmann::json(nullptr)},
        {"logprobs", r.want_logprobs},
        {"top_logprobs", r.top_logprobs},
        {"max_tokens", r.max_tokens},
        {"attempt", r.attempt},
    };
    return j;
}

CacheKey cache_key(const ChatRequest& request) {
    return {sha256_hex(canonical_request(request).dump())};
}

nlohmann::json to_json(const ChatResponse& r) {
    nlohmann::json tokens = nlohmann::json::array();
    for (const auto& t : r.tokens) tokens.push_back({{"token", t.text}, {"logprob", t.logprob}});
    return {{"content", r.content}, {"tokens", std::move(tokens)}, {"backend_id", r.backend_id}};
}

ChatResponse response_from_json(const nlohmann::json& j) {
    ChatResponse r;
    r.content = j.at("content").get<std::string>();
    if (j.contains("backend_id")) r.backend_id = j["backend_id"].get<std::string>();
    if (j.contains("tokens")) {
        for (const auto& t : j["tokens"]) {
            TokenLogprob tok;
            tok.text = t.contains("token") ? t["token"].get<std::string>() : t.at("text").get<std::string>();
            tok.logprob = t.at("logprob").get<double>();
            if (!(tok.logprob <= 0.0))
                throw Error(ErrorKind::validation, "token '" + tok.text + "' has logprob > 0");
            r.tokens.push_back(std::move(tok));
        }
    }
    return r;
}

}  // namespace logicqa
