// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "logicqa/synthesis.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>
#include <sstream>

#include "logicqa/error.hpp"
#include "logicqa/parallel.hpp"

namespace logicqa {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

// Markdown emphasis around markers ("**Q1:**") is common in model output.
std::string strip_emphasis(std::string s) {
    s.erase(std::remove(s.begin(), s.end(), '*'), s.end());
    return s;
}

bool only_dots(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c == '.' || c == ' '; });
}

Error tagged(const Error& e, const std::string& prefix) { return Error(e.kind(), prefix + e.what()); }

}  // namespace

void QuestionSet::validate() const {
    if (main_questions.empty())
        throw Error(ErrorKind::empty_question_set, "question set for " + class_name + " has no Main-Qs");
    for (std::size_t i = 0; i < main_questions.size(); ++i) {
        const auto& q = main_questions[i];
        if (q.index != static_cast<int>(i + 1))
            throw Error(ErrorKind::validation, "Main-Q indices must run 1..m without gaps (found " +
                                                   std::to_string(q.index) + " at position " + std::to_string(i + 1) + ")");
        if (q.text.empty()) throw Error(ErrorKind::validation, "Main-Q " + std::to_string(q.index) + " has no text");
        if (q.sub_questions.size() != kSubQuestionCount)
            throw Error(ErrorKind::validation, "Main-Q " + std::to_string(q.index) + " has " +
                                                   std::to_string(q.sub_questions.size()) + " Sub-Qs, expected 5");
        for (const auto& s : q.sub_questions)
            if (s.empty()) throw Error(ErrorKind::validation, "Main-Q " + std::to_string(q.index) + " has an empty Sub-Q");
    }
}

nlohmann::json to_json(const QuestionSet& qs) {
    nlohmann::json mains = nlohmann::json::array();
    for (const auto& q : qs.main_questions) {
        nlohmann::json j = {{"index", q.index}, {"text", q.text}, {"sub_questions", q.sub_questions}};
        j["filter_accuracy"] = q.filter_accuracy ? nlohmann::json(*q.filter_accuracy) : nlohmann::json(nullptr);
        if (q.augmentation_fallback) j["augmentation_fallback"] = true;
        mains.push_back(std::move(j));
    }
    return {
        {"class", qs.class_name},
        {"subclass", qs.subclass ? nlohmann::json(*qs.subclass) : nlohmann::json(nullptr)},
        {"provenance",
         {{"reference_ids", qs.reference_ids}, {"backend_id", qs.backend_id}, {"seed", qs.seed},
          {"candidate_count", qs.candidate_count}, {"filtered", qs.filtered}}},
        {"main_questions", std::move(mains)},
    };
}

QuestionSet question_set_from_json(const nlohmann::json& j) {
    QuestionSet qs;
    try {
        qs.class_name = j.at("class").get<std::string>();
        if (j.contains("subclass") && j["subclass"].is_string()) qs.subclass = j["subclass"].get<std::string>();
        if (j.contains("provenance")) {
            const auto& p = j["provenance"];
            qs.reference_ids = p.value("reference_ids", std::vector<std::string>{});
            qs.backend_id = p.value("backend_id", std::string{});
            qs.seed = p.value("seed", std::uint64_t{0});
            qs.candidate_count = p.value("candidate_count", std::size_t{0});
            qs.filtered = p.value("filtered", true);
        }
        for (const auto& m : j.at("main_questions")) {
            MainQuestion q;
            q.index = m.at("index").get<int>();
            q.text = m.at("text").get<std::string>();
            q.sub_questions = m.at("sub_questions").get<std::vector<std::string>>();
            if (m.contains("filter_accuracy") && m["filter_accuracy"].is_number())
                q.filter_accuracy = m["filter_accuracy"].get<double>();
            q.augmentation_fallback = m.value("augmentation_fallback", false);
            qs.main_questions.push_back(std::move(q));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::validation, std::string("malformed question set: ") + e.what());
    }
    qs.validate();
    return qs;
}

std::vector<Description> describe_normals(const QueryContext& ctx, const ClassProfile& profile,
                                          const std::optional<std::string>& subclass, const DatasetManifest& manifest,
                                          const FewShotSelection& selection) {
    if (selection.reference_ids.size() != kReferenceCount)
        throw Error(ErrorKind::validation, "describe needs exactly 3 reference images");
    const std::string prompt = render_describe(profile, subclass, ctx.templates);
    const std::string class_key = profile.class_key(subclass);
    return parallel_map(selection.reference_ids.size(), ctx.parallelism, [&](std::size_t k) {
        const auto& id = selection.reference_ids[k];
        try {
            const auto& rec = manifest.at(id);
            auto req = ctx.make_request(prompt, rec.path, {"describe", class_key, id, ""});
            auto resp = ctx.backend.query(req);
            if (resp.content.empty()) throw Error(ErrorKind::backend, "empty description");
            return Description{id, resp.content};
        } catch (const Error& e) {
            throw tagged(e, "image " + id + ": ");
        }
    });
}

NormalSummary summarize(const QueryContext& ctx, const ClassProfile& profile,
                        const std::optional<std::string>& subclass, const std::vector<Description>& descriptions) {
    if (descriptions.size() != kReferenceCount)
        throw Error(ErrorKind::validation,
                    "summarize needs exactly 3 descriptions, got " + std::to_string(descriptions.size()));
    std::vector<std::string> texts;
    NormalSummary out;
    for (const auto& d : descriptions) {
        texts.push_back(d.text);
        out.source_ids.push_back(d.image_id);
    }
    const auto prompt = render_summarize(texts, profile.class_name, ctx.templates);
    auto resp = ctx.backend.query(ctx.make_request(prompt, std::nullopt, {"summarize", profile.class_key(subclass), "", ""}));
    if (resp.content.empty()) throw Error(ErrorKind::backend, "empty summary");
    out.text = resp.content;
    return out;
}

std::vector<std::string> parse_question_list(const std::string& text) {
    // (Q1) : text | Q1 : text | Q1. text | 1. text | 1) text
    static const std::regex marker(R"(^\s*(?:[-#>]\s*)?(?:\(\s*Q\s*\d+\s*\)|Q\s*\d+|\d+\s*[.)])\s*[:.)\-]?\s*(.*)$)",
                                   std::regex::icase);
    std::vector<std::string> out;
    for (const auto& raw : split_lines(text)) {
        std::smatch m;
        const auto line = strip_emphasis(raw);
        if (!std::regex_match(line, m, marker)) continue;
        auto q = trim(m[1].str());
        if (q.empty() || only_dots(q)) continue;
        out.push_back(std::move(q));
    }
    return out;
}

std::string normalize_question(const std::string& q) {
    std::string out;
    bool space = false;
    for (unsigned char c : q) {
        if (std::isspace(c)) {
            space = !out.empty();
            continue;
        }
        if (space) out += ' ';
        space = false;
        out += static_cast<char>(std::tolower(c));
    }
    return out;
}

std::vector<std::string> generate_main_candidates(const QueryContext& ctx, const NormalSummary& summary,
                                                  const ClassProfile& profile,
                                                  const std::optional<std::string>& subclass) {
    if (summary.text.empty()) throw Error(ErrorKind::template_error, "cannot generate questions from an empty summary");
    const auto prompt = render_generate(summary.text, profile, subclass, ctx.templates);
    auto resp = ctx.backend.query(ctx.make_request(prompt, std::nullopt, {"generate_main", profile.class_key(subclass), "", ""}));
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (auto& q : parse_question_list(resp.content))
        if (seen.insert(normalize_question(q)).second) out.push_back(std::move(q));
    if (out.empty()) throw Error(ErrorKind::parse, "empty candidates: no questions found in the generation response");
    return out;
}

std::vector<std::string> parse_augment_outputs(const std::string& text) {
    static const std::regex marker(R"(^\s*(?:[-#>]\s*)?Output\s*(\d+)\s*:\s*(.*)$)", std::regex::icase);
    const auto lines = split_lines(text);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::smatch m;
        const auto line = strip_emphasis(lines[i]);
        if (!std::regex_match(line, m, marker)) continue;
        auto q = trim(m[2].str());
        // The paraphrase may sit on the line after a bare marker.
        if (q.empty() && i + 1 < lines.size()) {
            std::smatch next;
            const auto following = strip_emphasis(lines[i + 1]);
            if (!std::regex_match(following, next, marker)) q = trim(following);
        }
        if (!q.empty()) out.push_back(std::move(q));
    }
    return out;
}

std::vector<std::string> augment_subquestions(const QueryContext& ctx, const std::string& question,
                                              const std::string& class_key, int attempt) {
    const auto prompt = render_augment(question, ctx.templates);
    auto resp = ctx.backend.query(ctx.make_request(prompt, std::nullopt, {"augment_sub", class_key, "", question}, attempt));
    auto outs = parse_augment_outputs(resp.content);
    if (outs.size() != kSubQuestionCount)
        throw Error(ErrorKind::parse, "augmentation count: expected 5 Sub-Qs for \"" + question + "\", parsed " +
                                          std::to_string(outs.size()));
    return outs;
}

MainQuestion augment_with_fallback(const QueryContext& ctx, MainQuestion q, const std::string& class_key) {
    for (int attempt = 0; attempt < 2; ++attempt) {
        try {
            q.sub_questions = augment_subquestions(ctx, q.text, class_key, attempt);
            q.augmentation_fallback = false;
            return q;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::parse) throw;
        }
    }
    // Second failure: keep what parsed on the retry, pad with the Main-Q itself.
    const auto prompt = render_augment(q.text, ctx.templates);
    auto resp = ctx.backend.query(ctx.make_request(prompt, std::nullopt, {"augment_sub", class_key, "", q.text}, 1));
    auto outs = parse_augment_outputs(resp.content);
    outs.resize(std::min(outs.size(), kSubQuestionCount));
    while (outs.size() < kSubQuestionCount) outs.push_back(q.text);
    q.sub_questions = std::move(outs);
    q.augmentation_fallback = true;
    return q;
}

}  // namespace logicqa
