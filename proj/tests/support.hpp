// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "logicqa/backend.hpp"
#include "logicqa/hash.hpp"
#include "logicqa/inference.hpp"

namespace testing {

namespace fs = std::filesystem;

inline fs::path source_dir() { return LOGICQA_SOURCE_DIR; }
inline fs::path mock_fixture_dir() { return source_dir() / "fixtures" / "mock_loco"; }

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "t") {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("logicqa_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    fs::path path_;
};

inline void write_file(const fs::path& p, const std::string& contents) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << contents;
}

/// A response whose tokens are the whitespace-led words of `content`.
inline logicqa::ChatResponse tokenized(const std::string& content, double answer_logprob, double other = -0.1) {
    logicqa::ChatResponse r;
    r.content = content;
    std::size_t i = 0;
    while (i < content.size()) {
        std::size_t j = i;
        while (j < content.size() && std::isspace(static_cast<unsigned char>(content[j]))) ++j;
        while (j < content.size() && !std::isspace(static_cast<unsigned char>(content[j]))) ++j;
        r.tokens.push_back({content.substr(i, j - i), other});
        i = j;
    }
    if (!r.tokens.empty()) r.tokens.back().logprob = answer_logprob;
    return r;
}

inline logicqa::SubAnswer answer(int i, int j, logicqa::Answer a, std::optional<double> lp = std::nullopt) {
    logicqa::SubAnswer s;
    s.main_index = i;
    s.sub_index = j;
    s.parsed = a;
    if (a != logicqa::Answer::unparsed) s.logprob = lp.value_or(-0.1);
    return s;
}

}  // namespace testing
