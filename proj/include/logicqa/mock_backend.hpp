// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>

#include "logicqa/backend.hpp"

namespace logicqa {

/// Fixture key: `role|class|image_id|q` where q is the first 16 hex chars of
/// SHA-256 over the tag's question text. Re-queries append `#<attempt>`.
std::string mock_fixture_key(const RequestTag& tag, int attempt = 0);

/// Deterministic oracle backed by a JSON map of fixture key -> {content, tokens[]}.
class MockBackend : public Backend {
public:
    MockBackend() = default;
    explicit MockBackend(const std::filesystem::path& fixture_file);

    /// Merges entries from a JSON object; validates every logprob <= 0.
    void load(const nlohmann::json& fixtures);
    void add(const std::string& key, ChatResponse response);

    /// Looks up `key#attempt` first and falls back to the base key.
    ChatResponse query(const ChatRequest& request) override;
    std::string id() const override { return "mock"; }

    std::size_t calls() const { return calls_.load(); }
    std::size_t size() const { return entries_.size(); }

    /// Drop token logprobs from every answer, emulating backends without them.
    void set_strip_logprobs(bool on) { strip_logprobs_ = on; }
    /// Per-call artificial latency; used by the benchmark.
    void set_latency(std::chrono::microseconds d) { latency_ = d; }

private:
    std::map<std::string, ChatResponse> entries_;
    std::atomic<std::size_t> calls_{0};
    bool strip_logprobs_ = false;
    std::chrono::microseconds latency_{0};
};

}  // namespace logicqa
