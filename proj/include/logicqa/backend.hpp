// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace logicqa {

enum class PartKind { text, image };

struct MessagePart {
    PartKind kind = PartKind::text;
    std::string text;
    std::filesystem::path image_path;
    /// SHA-256 of the image bytes; stands in for the bytes in cache keys.
    std::string image_digest;

    static MessagePart text_part(std::string text);
    /// Reads the file once to compute its digest.
    static MessagePart image_part(const std::filesystem::path& path);
};

/// Routing metadata. Never sent upstream and not part of the cache key; the
/// mock oracle uses it to find fixture entries and reports use it for audit.
struct RequestTag {
    std::string role;       // describe | summarize | generate_main | augment_sub | test
    std::string class_key;  // class name, or "class:subclass"
    std::string image_id;   // empty for text-only requests
    std::string question;   // the question a test/augment request is about
};

struct ChatRequest {
    std::string model;
    std::vector<MessagePart> parts;
    double temperature = 1.0;
    std::optional<double> top_p;
    bool want_logprobs = true;
    int top_logprobs = 0;
    int max_tokens = 1024;
    /// Re-query ordinal. Part of the cache key so a retry is a distinct request.
    int attempt = 0;
    RequestTag tag;

    /// Throws Error(validation) when the request is malformed.
    void validate() const;
};

struct TokenLogprob {
    std::string text;
    double logprob = 0.0;

    bool operator==(const TokenLogprob&) const = default;
};

struct ChatResponse {
    std::string content;
    std::vector<TokenLogprob> tokens;
    std::string backend_id;
    bool cached = false;
};

struct CacheKey {
    std::string digest;  // 64 lowercase hex chars

    bool operator==(const CacheKey&) const = default;
};

/// Canonical form hashed into the cache key: sorted fields, image digests in
/// place of bytes, routing tag excluded.
nlohmann::json canonical_request(const ChatRequest& request);
CacheKey cache_key(const ChatRequest& request);

nlohmann::json to_json(const ChatResponse& r);
/// Validates logprob <= 0 for every token.
ChatResponse response_from_json(const nlohmann::json& j);

class Backend {
public:
    virtual ~Backend() = default;
    virtual ChatResponse query(const ChatRequest& request) = 0;
    virtual std::string id() const = 0;
};

}  // namespace logicqa
