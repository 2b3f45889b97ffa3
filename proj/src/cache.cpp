// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "logicqa/cache.hpp"

#include <atomic>
#include <cerrno>
#include <fstream>

#include <unistd.h>

#include "logicqa/error.hpp"
#include "logicqa/hash.hpp"

namespace fs = std::filesystem;

namespace logicqa {

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create cache directory " + dir_.string() + ": " + ec.message());
}

fs::path ResponseCache::path_for(const CacheKey& key) const { return dir_ / (key.digest + ".json"); }

std::optional<ChatResponse> ResponseCache::get(const CacheKey& key) const {
    {
        std::shared_lock lock(mu_);
        if (auto it = memo_.find(key.digest); it != memo_.end()) return it->second;
    }
    const auto path = path_for(key);
    if (!fs::exists(path)) return std::nullopt;
    auto doc = nlohmann::json::parse(read_text_file(path), nullptr, false);
    if (doc.is_discarded() || !doc.contains("response"))
        throw Error(ErrorKind::io, "corrupt cache entry: " + path.string());
    auto response = response_from_json(doc["response"]);
    std::unique_lock lock(mu_);
    return memo_.try_emplace(key.digest, std::move(response)).first->second;
}

ChatResponse ResponseCache::put(const CacheKey& key, const ChatRequest& request, const ChatResponse& response) {
    static std::atomic<unsigned> counter{0};
    nlohmann::json doc = {
        {"key", key.digest},
        {"request", canonical_request(request)},
        {"tag", {{"role", request.tag.role}, {"class", request.tag.class_key}, {"image_id", request.tag.image_id}}},
        {"response", to_json(response)},
    };
    const auto target = path_for(key);
    auto tmp = target;
    tmp += ".tmp" + std::to_string(::getpid()) + "." + std::to_string(counter.fetch_add(1));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::io, "cannot write cache entry: " + tmp.string());
        out << doc.dump(2) << '\n';
    }
    const int rc = ::link(tmp.c_str(), target.c_str());
    const int err = errno;
    fs::remove(tmp);
    if (rc != 0 && err != EEXIST)
        throw Error(ErrorKind::io, "cannot publish cache entry: " + target.string());
    if (rc != 0) {
        std::unique_lock lock(mu_);
        memo_.erase(key.digest);
        lock.unlock();
        if (auto existing = get(key)) return *existing;
    }
    std::unique_lock lock(mu_);
    ChatResponse stored = response;
    stored.cached = false;
    return memo_.try_emplace(key.digest, std::move(stored)).first->second;
}

ResponseCache::Stats ResponseCache::stats() const {
    Stats s;
    for (const auto& e : fs::directory_iterator(dir_)) {
        if (!e.is_regular_file() || e.path().extension() != ".json") continue;
        ++s.entries;
        s.bytes += e.file_size();
    }
    return s;
}

std::size_t ResponseCache::clear() {
    std::unique_lock lock(mu_);
    memo_.clear();
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir_)) {
        if (e.is_regular_file() && e.path().extension() == ".json") {
            fs::remove(e.path());
            ++n;
        }
    }
    return n;
}

ChatResponse CachingBackend::query(const ChatRequest& request) {
    request.validate();
    const auto key = cache_key(request);
    if (auto hit = cache_->get(key)) {
        ++hits_;
        hit->cached = true;
        return *hit;
    }
    ++misses_;
    auto fresh = upstream_->query(request);
    auto stored = cache_->put(key, request, fresh);
    stored.cached = false;
    return stored;
}

}  // namespace logicqa
