// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "logicqa/dataset.hpp"
#include "logicqa/query.hpp"
#include "logicqa/synthesis.hpp"

namespace logicqa {

inline constexpr double kDefaultFilterThreshold = 0.80;
inline constexpr std::size_t kDefaultValidationPool = 50;

enum class FilterMode {
    direct,  // one Main-Q query per validation image
    voted,   // full five-Sub-Q vote per validation image
};
const char* to_string(FilterMode m);
FilterMode filter_mode_from_string(const std::string& s);

struct FilterReport {
    std::string question_text;
    std::size_t asked = 0;    // parseable answers
    std::size_t correct = 0;  // answered Yes (votes 0 in voted mode)
    double accuracy = 0.0;
    bool kept = false;
    /// Every answer was unparseable; the question was dropped without evidence.
    bool no_signal = false;
};

/// Only strictly-below-threshold accuracies are rejected.
inline bool passes_filter(double accuracy, double threshold) { return accuracy >= threshold; }

/// Asks `question` (or, in voted mode, its Sub-Qs) about every validation
/// image. Unparseable answers are left out of the denominator. Throws
/// Error(undefined) when nothing parsed.
FilterReport score_question_on_normals(const QueryContext& ctx, const MainQuestion& question,
                                       const ClassProfile& profile, const std::optional<std::string>& subclass,
                                       const DatasetManifest& manifest, std::span<const std::string> validation_ids,
                                       FilterMode mode, double threshold = kDefaultFilterThreshold);

/// Builds a report from raw counts; the arithmetic half of the operation above.
FilterReport make_filter_report(std::string question, std::size_t asked, std::size_t correct, double threshold);

/// Scores every candidate, one parallel fan-out over (candidate, image).
/// A candidate with no parseable answer gets a no_signal report and is dropped.
std::vector<FilterReport> score_candidates(const QueryContext& ctx, std::span<const MainQuestion> candidates,
                                           const ClassProfile& profile, const std::optional<std::string>& subclass,
                                           const DatasetManifest& manifest, std::span<const std::string> validation_ids,
                                           FilterMode mode, double threshold = kDefaultFilterThreshold);

/// Keeps candidates whose report says kept, re-indexed 1..m in original order,
/// with filter_accuracy recorded. With `enabled` false every candidate passes
/// verbatim. Throws Error(empty_question_set) when nothing survives.
std::vector<MainQuestion> filter_questions(std::span<const MainQuestion> candidates,
                                           std::span<const FilterReport> reports, bool enabled = true);

/// question,asked,correct,accuracy,kept
std::string filter_reports_csv(std::span<const FilterReport> reports);

}  // namespace logicqa
