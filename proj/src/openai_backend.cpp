// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "logicqa/openai_backend.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "logicqa/error.hpp"
#include "logicqa/hash.hpp"

namespace logicqa {

namespace {

std::string mime_for(const std::filesystem::path& p) {
    auto ext = p.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
    if (ext == ".bmp") return "image/bmp";
    if (ext == ".tif" || ext == ".tiff") return "image/tiff";
    return "image/png";
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

OpenAIOptions OpenAIOptions::from_env() {
    OpenAIOptions o;
    if (const char* e = std::getenv("LOGICQA_ENDPOINT")) o.endpoint = e;
    if (const char* k = std::getenv("LOGICQA_API_KEY"))
        o.api_key = k;
    else if (const char* k2 = std::getenv("OPENAI_API_KEY"))
        o.api_key = k2;
    return o;
}

nlohmann::json build_chat_body(const ChatRequest& request) {
    nlohmann::json content = nlohmann::json::array();
    for (const auto& p : request.parts) {
        if (p.kind == PartKind::text) {
            content.push_back({{"type", "text"}, {"text", p.text}});
        } else {
            auto bytes = read_file_bytes(p.image_path);
            std::string url = "data:" + mime_for(p.image_path) + ";base64," + base64_encode(bytes);
            content.push_back({{"type", "image_url"}, {"image_url", {{"url", std::move(url)}}}});
        }
    }
    nlohmann::json body = {
        {"model", request.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", std::move(content)}}})},
        {"temperature", request.temperature},
        {"logprobs", request.want_logprobs},
        {"max_tokens", request.max_tokens},
    };
    if (request.want_logprobs && request.top_logprobs > 0) body["top_logprobs"] = request.top_logprobs;
    if (request.top_p) body["top_p"] = *request.top_p;
    return body;
}

ChatResponse parse_chat_body(const nlohmann::json& body, const std::string& backend_id) {
    if (!body.contains("choices") || !body["choices"].is_array() || body["choices"].empty())
        throw Error(ErrorKind::backend, "chat response has no choices");
    const auto& choice = body["choices"][0];
    ChatResponse r;
    r.backend_id = backend_id;
    const auto& msg = choice.at("message");
    if (msg.contains("content") && msg["content"].is_string()) r.content = msg["content"].get<std::string>();
    if (choice.contains("logprobs") && choice["logprobs"].is_object() && choice["logprobs"].contains("content") &&
        choice["logprobs"]["content"].is_array()) {
        for (const auto& t : choice["logprobs"]["content"]) {
            double lp = t.at("logprob").get<double>();
            // Some servers emit tiny positive values from float rounding.
            if (lp > 0.0) lp = 0.0;
            r.tokens.push_back({t.at("token").get<std::string>(), lp});
        }
    }
    return r;
}

OpenAIBackend::OpenAIBackend(OpenAIOptions options) : options_(std::move(options)) {
    if (options_.endpoint.empty())
        throw Error(ErrorKind::config, "live backend needs an endpoint (set LOGICQA_ENDPOINT)");
    // Split "scheme://host[:port]/path" into the client base and request path.
    const auto scheme_end = options_.endpoint.find("://");
    const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = options_.endpoint.find('/', host_start);
    host_ = options_.endpoint.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "" : options_.endpoint.substr(path_start);
    while (!path.empty() && path.back() == '/') path.pop_back();
    if (ends_with(path, "/chat/completions"))
        path_ = path;
    else if (ends_with(path, "/v1"))
        path_ = path + "/chat/completions";
    else
        path_ = path + "/v1/chat/completions";
}

ChatResponse OpenAIBackend::query(const ChatRequest& request) {
    request.validate();
    const std::string payload = build_chat_body(request).dump();

    httplib::Client client(host_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    httplib::Headers headers;
    if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

    std::string last_error;
    auto backoff = options_.initial_backoff;
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        auto res = client.Post(path_, headers, payload, "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200) {
            auto body = nlohmann::json::parse(res->body, nullptr, false);
            if (body.is_discarded()) throw Error(ErrorKind::backend, "upstream returned invalid JSON");
            return parse_chat_body(body, id());
        }
        if (res->status >= 500 || res->status == 429) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        throw BackendError(res->status, "upstream rejected request with HTTP " + std::to_string(res->status) + ": " +
                                            res->body.substr(0, 512));
    }
    throw Error(ErrorKind::transport, "retries exhausted after " + std::to_string(options_.max_retries + 1) +
                                          " attempts (" + last_error + ")");
}

}  // namespace logicqa
