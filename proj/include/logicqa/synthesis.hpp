// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "logicqa/dataset.hpp"
#include "logicqa/prompts.hpp"
#include "logicqa/query.hpp"

namespace logicqa {

inline constexpr std::size_t kSubQuestionCount = 5;

struct Description {
    std::string image_id;
    std::string text;
};

struct NormalSummary {
    std::string text;
    std::vector<std::string> source_ids;
};

struct MainQuestion {
    int index = 0;  // 1-based
    std::string text;
    std::vector<std::string> sub_questions;
    std::optional<double> filter_accuracy;
    /// Sub-question slots were filled with the Main-Q text after augmentation failed twice.
    bool augmentation_fallback = false;
};

/// The per-class checklist: m Main-Qs, each with exactly five Sub-Qs.
struct QuestionSet {
    std::string class_name;
    std::optional<std::string> subclass;
    std::vector<MainQuestion> main_questions;
    std::vector<std::string> reference_ids;
    std::string backend_id;
    std::uint64_t seed = 0;
    std::size_t candidate_count = 0;
    bool filtered = true;

    /// Indices 1..m without gaps, m >= 1, five non-empty Sub-Qs each.
    void validate() const;
};

nlohmann::json to_json(const QuestionSet& qs);
QuestionSet question_set_from_json(const nlohmann::json& j);

/// One describe query per reference image, run concurrently; output order
/// follows `selection.reference_ids`.
std::vector<Description> describe_normals(const QueryContext& ctx, const ClassProfile& profile,
                                          const std::optional<std::string>& subclass, const DatasetManifest& manifest,
                                          const FewShotSelection& selection);

NormalSummary summarize(const QueryContext& ctx, const ClassProfile& profile,
                        const std::optional<std::string>& subclass, const std::vector<Description>& descriptions);

/// Recognizes "(Q1) : ...", "Q1 : ...", "Q1. ..." and "1. ..." lines, strips the
/// markers, and keeps order. Scaffold lines whose text is only dots are dropped.
std::vector<std::string> parse_question_list(const std::string& text);

/// Casefolded, whitespace-collapsed form used for de-duplication.
std::string normalize_question(const std::string& q);

/// Parsed, ordered, de-duplicated (first occurrence wins) candidate Main-Qs.
std::vector<std::string> generate_main_candidates(const QueryContext& ctx, const NormalSummary& summary,
                                                  const ClassProfile& profile,
                                                  const std::optional<std::string>& subclass);

/// Every "OutputN:" paraphrase found in `text`, in order of appearance.
std::vector<std::string> parse_augment_outputs(const std::string& text);

/// Exactly five paraphrases of `question`; any other count throws Error(parse).
std::vector<std::string> augment_subquestions(const QueryContext& ctx, const std::string& question,
                                              const std::string& class_key, int attempt = 0);

/// augment_subquestions with one retry. After a second failure the slots are
/// filled from whatever parsed, padded with the Main-Q text, and flagged.
MainQuestion augment_with_fallback(const QueryContext& ctx, MainQuestion q, const std::string& class_key);

}  // namespace logicqa
