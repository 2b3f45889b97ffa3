// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "logicqa/backend.hpp"

namespace logicqa {

/// Append-only directory of response documents named `<hex digest>.json`.
/// No eviction. Concurrent writers race on link(2), so the first response
/// stored for a key is the one every later reader sees.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir);

    std::optional<ChatResponse> get(const CacheKey& key) const;

    /// Stores `response` unless the key is already present. Returns the
    /// response that ended up stored (the earlier one if we lost the race).
    ChatResponse put(const CacheKey& key, const ChatRequest& request, const ChatResponse& response);

    struct Stats {
        std::size_t entries = 0;
        std::uintmax_t bytes = 0;
    };
    Stats stats() const;
    /// Removes every cached document. Returns the number removed.
    std::size_t clear();

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path path_for(const CacheKey& key) const;

    std::filesystem::path dir_;
    mutable std::shared_mutex mu_;
    mutable std::unordered_map<std::string, ChatResponse> memo_;
};

/// Decorator that consults the cache before the upstream backend.
class CachingBackend : public Backend {
public:
    CachingBackend(std::shared_ptr<Backend> upstream, std::shared_ptr<ResponseCache> cache)
        : upstream_(std::move(upstream)), cache_(std::move(cache)) {}

    ChatResponse query(const ChatRequest& request) override;
    std::string id() const override { return upstream_->id(); }

    std::size_t hits() const { return hits_.load(); }
    std::size_t misses() const { return misses_.load(); }

private:
    std::shared_ptr<Backend> upstream_;
    std::shared_ptr<ResponseCache> cache_;
    std::atomic<std::size_t> hits_{0};
    std::atomic<std::size_t> misses_{0};
};

}  // namespace logicqa
