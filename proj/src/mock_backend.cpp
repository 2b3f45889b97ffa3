// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "logicqa/mock_backend.hpp"

#include <thread>

#include "logicqa/error.hpp"
#include "logicqa/hash.hpp"

namespace logicqa {

std::string mock_fixture_key(const RequestTag& tag, int attempt) {
    std::string key = tag.role + "|" + tag.class_key + "|" + tag.image_id + "|" + sha256_hex(tag.question).substr(0, 16);
    if (attempt > 0) key += "#" + std::to_string(attempt);
    return key;
}

MockBackend::MockBackend(const std::filesystem::path& fixture_file) {
    auto j = nlohmann::json::parse(read_text_file(fixture_file), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorKind::validation, "mock fixture is not valid JSON: " + fixture_file.string());
    load(j);
}

void MockBackend::load(const nlohmann::json& fixtures) {
    const auto& entries = fixtures.contains("entries") ? fixtures["entries"] : fixtures;
    if (!entries.is_object()) throw Error(ErrorKind::validation, "mock fixture must be a JSON object");
    for (const auto& [key, value] : entries.items()) {
        try {
            add(key, response_from_json(value));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::validation, "mock fixture entry " + key + ": " + e.what());
        } catch (const Error& e) {
            throw Error(ErrorKind::validation, "mock fixture entry " + key + ": " + e.what());
        }
    }
}

void MockBackend::add(const std::string& key, ChatResponse response) {
    response.backend_id = "mock";
    response.cached = false;
    entries_[key] = std::move(response);
}

ChatResponse MockBackend::query(const ChatRequest& request) {
    request.validate();
    ++calls_;
    if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
    auto it = entries_.end();
    if (request.attempt > 0) it = entries_.find(mock_fixture_key(request.tag, request.attempt));
    if (it == entries_.end()) it = entries_.find(mock_fixture_key(request.tag));
    if (it == entries_.end())
        throw Error(ErrorKind::fixture_missing, "no mock fixture for key " + mock_fixture_key(request.tag, request.attempt));
    ChatResponse r = it->second;
    if (strip_logprobs_) r.tokens.clear();
    return r;
}

}  // namespace logicqa
