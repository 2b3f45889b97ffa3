// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "logicqa/prompts.hpp"

#include <cctype>
#include <set>

#include "logicqa/embedded_templates.hpp"
#include "logicqa/error.hpp"
#include "logicqa/hash.hpp"

namespace logicqa {

void ClassProfile::validate() const {
    if (class_name.empty()) throw Error(ErrorKind::validation, "class profile has no class_name");
    if (normality_definition.empty())
        throw Error(ErrorKind::validation, "class profile '" + class_name + "' has an empty normality definition");
    for (const auto& [k, lines] : subclass_variants)
        if (lines.empty())
            throw Error(ErrorKind::validation, "subclass variant '" + k + "' of '" + class_name + "' is empty");
}

const std::vector<std::string>& ClassProfile::normality_for(const std::optional<std::string>& subclass) const {
    if (subclass) {
        if (auto it = subclass_variants.find(*subclass); it != subclass_variants.end()) return it->second;
    }
    return normality_definition;
}

std::string ClassProfile::class_key(const std::optional<std::string>& subclass) const {
    return subclass ? class_name + ":" + *subclass : class_name;
}

ClassProfile profile_from_json(const nlohmann::json& j) {
    ClassProfile p;
    try {
        p.class_name = j.at("class_name").get<std::string>();
        p.normality_definition = j.at("normality_definition").get<std::vector<std::string>>();
        if (j.contains("subclass_variants")) {
            for (const auto& [k, v] : j["subclass_variants"].items())
                p.subclass_variants[k] = v.get<std::vector<std::string>>();
        }
        if (j.contains("segmentation_prompt") && j["segmentation_prompt"].is_string())
            p.segmentation_prompt = j["segmentation_prompt"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::validation, std::string("malformed class profile: ") + e.what());
    }
    p.validate();
    return p;
}

ClassProfile load_profile(const std::filesystem::path& path) {
    auto j = nlohmann::json::parse(read_text_file(path), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorKind::validation, "class profile is not valid JSON: " + path.string());
    return profile_from_json(j);
}

const char* to_string(PromptRole r) {
    switch (r) {
        case PromptRole::describe: return "describe";
        case PromptRole::summarize: return "summarize";
        case PromptRole::generate_main: return "generate_main";
        case PromptRole::augment_sub: return "augment_sub";
        case PromptRole::test: return "test";
    }
    return "?";
}

namespace {

std::string strip_final_newline(std::string_view s) {
    if (!s.empty() && s.back() == '\n') s.remove_suffix(1);
    return std::string(s);
}

bool is_placeholder_name(std::string_view name) {
    if (name.empty() || !std::isalpha(static_cast<unsigned char>(name.front()))) return false;
    for (char c : name)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != ' ') return false;
    return true;
}

// "breakfast box" -> "Breakfast Box", as in the summarize section headers.
std::string title_case(const std::string& s) {
    std::string out = s;
    bool start = true;
    for (char& c : out) {
        const auto u = static_cast<unsigned char>(c);
        if (start && std::isalpha(u)) c = static_cast<char>(std::toupper(u));
        start = std::isspace(u) || c == '-';
    }
    return out;
}

}  // namespace

const PromptTemplates& PromptTemplates::builtin() {
    static const PromptTemplates t = [] {
        PromptTemplates x;
        x.describe.body = strip_final_newline(embedded::describe);
        x.summarize.body = strip_final_newline(embedded::summarize);
        x.generate_main.body = strip_final_newline(embedded::generate_main);
        x.augment_sub.body = strip_final_newline(embedded::augment_sub);
        x.test.body = strip_final_newline(embedded::test);
        return x;
    }();
    return t;
}

PromptTemplates PromptTemplates::load_dir(const std::filesystem::path& dir) {
    PromptTemplates x;
    x.describe.body = strip_final_newline(read_text_file(dir / "describe.txt"));
    x.summarize.body = strip_final_newline(read_text_file(dir / "summarize.txt"));
    x.generate_main.body = strip_final_newline(read_text_file(dir / "generate_main.txt"));
    x.augment_sub.body = strip_final_newline(read_text_file(dir / "augment_sub.txt"));
    x.test.body = strip_final_newline(read_text_file(dir / "test.txt"));
    return x;
}

std::string render_template(const PromptTemplate& tmpl, const std::map<std::string, std::string>& bindings) {
    const std::string& body = tmpl.body;
    std::string out;
    out.reserve(body.size() * 2);
    std::size_t pos = 0;
    while (pos < body.size()) {
        const auto open = body.find('{', pos);
        if (open == std::string::npos) {
            out.append(body, pos);
            break;
        }
        const auto close = body.find('}', open + 1);
        if (close == std::string::npos) {
            out.append(body, pos);
            break;
        }
        std::string_view name(body.data() + open + 1, close - open - 1);
        if (!is_placeholder_name(name)) {
            out.append(body, pos, close + 1 - pos);
            pos = close + 1;
            continue;
        }
        auto it = bindings.find(std::string(name));
        if (it == bindings.end())
            throw Error(ErrorKind::template_error,
                        std::string("unbound placeholder {") + std::string(name) + "} in " + to_string(tmpl.role) + " template");
        if (it->second.empty())
            throw Error(ErrorKind::template_error,
                        std::string("empty value for {") + std::string(name) + "} in " + to_string(tmpl.role) + " template");
        out.append(body, pos, open - pos);
        out += it->second;
        pos = close + 1;
    }
    return out;
}

std::string normality_block(const std::vector<std::string>& lines) {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += '\n';
        out += "- " + lines[i];
    }
    return out;
}

std::string render_describe(const ClassProfile& profile, const std::optional<std::string>& subclass,
                            const PromptTemplates& t) {
    return render_template(t.describe, {{"Class", profile.class_name},
                                        {"Normal Definition", normality_block(profile.normality_for(subclass))}});
}

std::string render_summarize(std::span<const std::string> descriptions, const std::string& class_name,
                             const PromptTemplates& t) {
    if (descriptions.size() != 3)
        throw Error(ErrorKind::validation,
                    "summarize needs exactly 3 descriptions, got " + std::to_string(descriptions.size()));
    return render_template(t.summarize, {{"Class", title_case(class_name)},
                                         {"Description 1", descriptions[0]},
                                         {"Description 2", descriptions[1]},
                                         {"Description 3", descriptions[2]}});
}

std::string render_generate(const std::string& summary, const ClassProfile& profile,
                            const std::optional<std::string>& subclass, const PromptTemplates& t) {
    return render_template(t.generate_main, {{"Class", profile.class_name},
                                             {"Summary Description", summary},
                                             {"Normal Definition", normality_block(profile.normality_for(subclass))}});
}

std::string render_augment(const std::string& question, const PromptTemplates& t) {
    return render_template(t.augment_sub, {{"Question", question}});
}

std::string render_test(const std::string& question, const std::string& class_name, const PromptTemplates& t) {
    return render_template(t.test, {{"Question", question}, {"Class", class_name}});
}

std::optional<std::string> extract_test_question(const std::string& rendered, const PromptTemplates& t) {
    const auto& body = t.test.body;
    const auto marker = body.find("{Question}");
    if (marker == std::string::npos) return std::nullopt;
    const std::string prefix = body.substr(0, marker);
    // The literal text after {Question} up to the next placeholder ends the question.
    const auto after = marker + std::string("{Question}").size();
    const auto next_ph = body.find('{', after);
    const std::string suffix = body.substr(after, next_ph == std::string::npos ? std::string::npos : next_ph - after);
    if (rendered.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
    if (suffix.empty()) return rendered.substr(prefix.size());
    const auto end = rendered.rfind(suffix);
    if (end == std::string::npos || end < prefix.size()) return std::nullopt;
    return rendered.substr(prefix.size(), end - prefix.size());
}

}  // namespace logicqa
