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

#include "logicqa/backend.hpp"
#include "logicqa/dataset.hpp"
#include "logicqa/query.hpp"
#include "logicqa/synthesis.hpp"

namespace logicqa {

/// Yes = 0 and No = 1 so an answer doubles as the q_ij indicator.
enum class Answer { yes = 0, no = 1, unparsed = 2 };
const char* to_string(Answer a);

enum class Verdict { normal, anomaly };
const char* to_string(Verdict v);

/// Finds the last "- Result:" marker and reads the word after it.
Answer parse_result(const std::string& text);

struct AnswerLogprob {
    double value = 0.0;
    /// No per-token logprobs were available; value is the 0 stand-in.
    bool degraded = false;
};

/// Sum of logprobs over the token(s) spelling the decision word after the
/// last "- Result:" marker. Empty token lists yield {0, degraded}. Throws
/// Error(parse) when tokens exist but the decision word cannot be located.
AnswerLogprob answer_logprob(const ChatResponse& response, Answer parsed);

struct SubAnswer {
    int main_index = 0;  // i, 1-based
    int sub_index = 0;   // j, 1-based
    Answer parsed = Answer::unparsed;
    std::optional<double> logprob;  // set iff parsed != unparsed
    bool degraded = false;
    int attempts = 1;
    std::string raw_text;
};

struct MainVote {
    int main_index = 0;
    int vote = 1;  // Q_i: 0 = satisfied, 1 = violated
    int yes_count = 0;
    int no_count = 0;
    int unparsed_count = 0;
    double s = 0.0;  // max logprob among answers agreeing with the vote
    std::vector<int> contributing;
};

/// Q_i = 0 iff #No < #Yes over parsed answers; ties fall to 1.
/// Throws Error(undefined) when no answer parsed.
MainVote vote_main(std::span<const SubAnswer> answers);

/// Normal iff every Q_i is 0.
Verdict decide(std::span<const MainVote> votes);

/// Median with the mean of the middle pair for even sizes. Input non-empty.
double median(std::vector<double> values);

/// 1 - Median(S) for Normal, Median(S) for Anomaly, with S = {exp(s_i)}.
double anomaly_score(std::span<const MainVote> votes, Verdict verdict);

struct ImageVerdict {
    std::string image_id;
    std::optional<Label> label;
    std::string question_set;  // class key of the checklist used
    Verdict verdict = Verdict::normal;
    std::vector<MainVote> votes;
    std::vector<SubAnswer> answers;
    std::vector<double> score_components;  // S
    std::optional<double> anomaly_score;   // empty when indeterminate
    std::vector<std::string> rationale;    // failed Main-Q texts, index order
    bool degraded = false;
    bool indeterminate = false;
    std::vector<std::string> warnings;
    /// Per-crop verdicts when the image was replaced by preprocessing crops.
    std::vector<ImageVerdict> crops;
};

nlohmann::json to_json(const ImageVerdict& v);
ImageVerdict verdict_from_json(const nlohmann::json& j);

/// Asks one question about one image with the test prompt; re-queries once
/// when the answer is unparseable and the context allows it.
SubAnswer ask_question(const QueryContext& ctx, const std::string& question, const std::string& class_name,
                       const std::string& class_key, const std::string& image_id,
                       const std::filesystem::path& image_path);

/// Votes, decides and scores one image from its m x 5 answers.
ImageVerdict assemble_verdict(const QuestionSet& qs, const std::string& class_key, std::string image_id,
                              std::vector<SubAnswer> answers);

/// Any crop anomalous makes the image anomalous; the score is the largest
/// crop score and the rationale is the union in crop order.
ImageVerdict combine_crop_verdicts(std::string image_id, std::vector<ImageVerdict> crops);

struct InferenceTarget {
    std::string image_id;
    std::optional<Label> label;
    const QuestionSet* questions = nullptr;
    std::string class_key;
    /// The images actually shown to the model: the source image, or its crops.
    std::vector<std::pair<std::string, std::filesystem::path>> views;
};

/// All Sub-Q queries of every target in one flat parallel fan-out over
/// (target, view, i, j); aggregation is keyed by index, not completion order.
std::vector<ImageVerdict> infer_images(const QueryContext& ctx, const std::string& class_name,
                                       std::span<const InferenceTarget> targets);

ImageVerdict infer_image(const QueryContext& ctx, const QuestionSet& qs, const ClassProfile& profile,
                         const ImageRecord& image);

}  // namespace logicqa
