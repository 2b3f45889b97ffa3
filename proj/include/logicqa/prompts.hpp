// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace logicqa {

/// Per-class normality knowledge fed into the describe and generate prompts.
struct ClassProfile {
    std::string class_name;
    std::vector<std::string> normality_definition;
    /// subclass -> replacement normality lines (e.g. cable color, juice fruit).
    std::map<std::string, std::vector<std::string>> subclass_variants;
    std::optional<std::string> segmentation_prompt;

    /// Throws Error(validation) on an empty class name or normality list.
    void validate() const;
    /// Variant lines when `subclass` has one, base lines otherwise.
    const std::vector<std::string>& normality_for(const std::optional<std::string>& subclass) const;
    /// "class" or "class:subclass"; used to route fixtures and name question sets.
    std::string class_key(const std::optional<std::string>& subclass) const;
};

ClassProfile profile_from_json(const nlohmann::json& j);
ClassProfile load_profile(const std::filesystem::path& path);

enum class PromptRole { describe, summarize, generate_main, augment_sub, test };
const char* to_string(PromptRole r);

struct PromptTemplate {
    PromptRole role;
    std::string body;
};

/// The five prompt bodies. `builtin()` returns the copies embedded from
/// templates/*.txt at build time; `load_dir` reads replacements at runtime.
struct PromptTemplates {
    PromptTemplate describe{PromptRole::describe, {}};
    PromptTemplate summarize{PromptRole::summarize, {}};
    PromptTemplate generate_main{PromptRole::generate_main, {}};
    PromptTemplate augment_sub{PromptRole::augment_sub, {}};
    PromptTemplate test{PromptRole::test, {}};

    static const PromptTemplates& builtin();
    static PromptTemplates load_dir(const std::filesystem::path& dir);
};

/// Single-pass substitution of `{Name}` markers. Values are inserted verbatim
/// and never rescanned. Unbound or empty bindings throw Error(template_error).
std::string render_template(const PromptTemplate& tmpl, const std::map<std::string, std::string>& bindings);

/// "- line" per constraint, newline-separated.
std::string normality_block(const std::vector<std::string>& lines);

std::string render_describe(const ClassProfile& profile, const std::optional<std::string>& subclass = std::nullopt,
                            const PromptTemplates& t = PromptTemplates::builtin());
/// The class name is title-cased in the section headers.
std::string render_summarize(std::span<const std::string> descriptions, const std::string& class_name,
                             const PromptTemplates& t = PromptTemplates::builtin());
std::string render_generate(const std::string& summary, const ClassProfile& profile,
                            const std::optional<std::string>& subclass = std::nullopt,
                            const PromptTemplates& t = PromptTemplates::builtin());
std::string render_augment(const std::string& question, const PromptTemplates& t = PromptTemplates::builtin());
std::string render_test(const std::string& question, const std::string& class_name,
                        const PromptTemplates& t = PromptTemplates::builtin());

/// Recovers the question from a prompt produced by render_test with the same templates.
std::optional<std::string> extract_test_question(const std::string& rendered,
                                                 const PromptTemplates& t = PromptTemplates::builtin());

}  // namespace logicqa
