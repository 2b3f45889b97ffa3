// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "logicqa/filtering.hpp"

#include <cstdio>

#include "logicqa/error.hpp"
#include "logicqa/inference.hpp"
#include "logicqa/parallel.hpp"

namespace logicqa {

const char* to_string(FilterMode m) { return m == FilterMode::voted ? "voted" : "direct"; }

FilterMode filter_mode_from_string(const std::string& s) {
    if (s == "direct") return FilterMode::direct;
    if (s == "voted") return FilterMode::voted;
    throw Error(ErrorKind::config, "unknown filter mode: " + s + " (expected direct or voted)");
}

FilterReport make_filter_report(std::string question, std::size_t asked, std::size_t correct, double threshold) {
    FilterReport r;
    r.question_text = std::move(question);
    r.asked = asked;
    r.correct = correct;
    if (asked == 0) {
        r.no_signal = true;
        return r;
    }
    r.accuracy = static_cast<double>(correct) / static_cast<double>(asked);
    r.kept = passes_filter(r.accuracy, threshold);
    return r;
}

namespace {

std::vector<FilterReport> score_all(const QueryContext& ctx, std::span<const MainQuestion> candidates,
                                    const ClassProfile& profile, const std::optional<std::string>& subclass,
                                    const DatasetManifest& manifest, std::span<const std::string> validation_ids,
                                    FilterMode mode, double threshold) {
    if (validation_ids.empty()) throw Error(ErrorKind::validation, "filtering needs at least one validation image");
    const std::string class_key = profile.class_key(subclass);
    const std::size_t n_img = validation_ids.size();
    const std::size_t per_image = mode == FilterMode::voted ? kSubQuestionCount : 1;
    if (mode == FilterMode::voted)
        for (const auto& c : candidates)
            if (c.sub_questions.size() != kSubQuestionCount)
                throw Error(ErrorKind::validation, "voted filtering needs five Sub-Qs for \"" + c.text + "\"");

    const std::size_t total = candidates.size() * n_img * per_image;
    auto answers = parallel_map(total, ctx.parallelism, [&](std::size_t k) {
        const std::size_t c = k / (n_img * per_image);
        const std::size_t v = (k / per_image) % n_img;
        const std::size_t j = k % per_image;
        const auto& cand = candidates[c];
        const auto& rec = manifest.at(validation_ids[v]);
        const auto& text = mode == FilterMode::voted ? cand.sub_questions[j] : cand.text;
        auto a = ask_question(ctx, text, profile.class_name, class_key, rec.id, rec.path);
        a.main_index = cand.index;
        a.sub_index = static_cast<int>(j + 1);
        return a;
    });

    std::vector<FilterReport> reports;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        std::size_t asked = 0, correct = 0;
        for (std::size_t v = 0; v < n_img; ++v) {
            const auto first = answers.begin() + static_cast<std::ptrdiff_t>((c * n_img + v) * per_image);
            std::span<const SubAnswer> mine(&*first, per_image);
            if (mode == FilterMode::direct) {
                if (mine[0].parsed == Answer::unparsed) continue;
                ++asked;
                if (mine[0].parsed == Answer::yes) ++correct;
            } else {
                try {
                    auto vote = vote_main(mine);
                    ++asked;
                    if (vote.vote == 0) ++correct;
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::undefined) throw;
                }
            }
        }
        reports.push_back(make_filter_report(candidates[c].text, asked, correct, threshold));
    }
    return reports;
}

}  // namespace

FilterReport score_question_on_normals(const QueryContext& ctx, const MainQuestion& question,
                                       const ClassProfile& profile, const std::optional<std::string>& subclass,
                                       const DatasetManifest& manifest, std::span<const std::string> validation_ids,
                                       FilterMode mode, double threshold) {
    auto reports = score_all(ctx, std::span<const MainQuestion>(&question, 1), profile, subclass, manifest,
                             validation_ids, mode, threshold);
    if (reports.front().no_signal)
        throw Error(ErrorKind::undefined, "no signal: every validation answer to \"" + question.text + "\" was unparseable");
    return reports.front();
}

std::vector<FilterReport> score_candidates(const QueryContext& ctx, std::span<const MainQuestion> candidates,
                                           const ClassProfile& profile, const std::optional<std::string>& subclass,
                                           const DatasetManifest& manifest, std::span<const std::string> validation_ids,
                                           FilterMode mode, double threshold) {
    return score_all(ctx, candidates, profile, subclass, manifest, validation_ids, mode, threshold);
}

std::vector<MainQuestion> filter_questions(std::span<const MainQuestion> candidates,
                                           std::span<const FilterReport> reports, bool enabled) {
    std::vector<MainQuestion> kept;
    if (!enabled) {
        kept.assign(candidates.begin(), candidates.end());
    } else {
        if (reports.size() != candidates.size())
            throw Error(ErrorKind::validation, "filter_questions needs one report per candidate");
        for (std::size_t k = 0; k < candidates.size(); ++k) {
            if (!reports[k].kept) continue;
            auto q = candidates[k];
            q.filter_accuracy = reports[k].accuracy;
            kept.push_back(std::move(q));
        }
    }
    if (kept.empty()) throw Error(ErrorKind::empty_question_set, "no Main-Q survived filtering");
    for (std::size_t k = 0; k < kept.size(); ++k) kept[k].index = static_cast<int>(k + 1);
    return kept;
}

std::string filter_reports_csv(std::span<const FilterReport> reports) {
    std::string out = "question,asked,correct,accuracy,kept\n";
    for (const auto& r : reports) {
        std::string q = r.question_text;
        std::string escaped = "\"";
        for (char c : q) {
            if (c == '"') escaped += '"';
            escaped += c;
        }
        escaped += '"';
        char buf[96];
        std::snprintf(buf, sizeof buf, ",%zu,%zu,%.6f,%s\n", r.asked, r.correct, r.accuracy, r.kept ? "true" : "false");
        out += escaped + buf;
    }
    return out;
}

}  // namespace logicqa
