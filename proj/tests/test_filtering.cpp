// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "logicqa/error.hpp"
#include "logicqa/filtering.hpp"
#include "logicqa/mock_backend.hpp"
#include "support.hpp"

using namespace logicqa;
using testing::TempDir;

namespace {

const std::string kClass = "breakfast box";

MainQuestion candidate(int index, const std::string& text) { return {index, text, {}, std::nullopt, false}; }

std::vector<MainQuestion> candidates(std::size_t n) {
    std::vector<MainQuestion> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(candidate(static_cast<int>(i + 1), "Q" + std::to_string(i + 1) + "?"));
    return out;
}

FilterReport report_at(double accuracy, double threshold = kDefaultFilterThreshold) {
    // Accuracies in these tests are multiples of 0.01.
    const auto correct = static_cast<std::size_t>(std::lround(accuracy * 100));
    return make_filter_report("q", 100, correct, threshold);
}

/// `n` validation images answering each question from a per-image script.
struct World {
    TempDir dir{"flt"};
    DatasetManifest manifest;
    std::vector<std::string> ids;
    MockBackend mock;

    explicit World(std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            const std::string id = "train/good/" + std::to_string(100 + k);
            testing::write_file(dir / (id + ".png"), id);
            manifest.records.push_back({id, dir / (id + ".png"), Split::train_normal, Label::normal, std::nullopt});
            ids.push_back(id);
        }
    }
    void answer(const std::string& id, const std::string& question, const std::string& reply) {
        mock.add(mock_fixture_key({"test", kClass, id, question}), testing::tokenized("Looking.\n- Result: " + reply, -0.1));
    }
    void unparsed(const std::string& id, const std::string& question) {
        ChatResponse r;
        r.content = "I cannot tell.";
        mock.add(mock_fixture_key({"test", kClass, id, question}), r);
    }
    QueryContext ctx(int par = 1) { return QueryContext{mock, {}, PromptTemplates::builtin(), par}; }
    ClassProfile profile() const { return load_profile(testing::source_dir() / "profiles" / "breakfast_box.json"); }
};

}  // namespace

TEST_SUITE("filtering") {

TEST_CASE("boundary: below 0.80 is dropped, 0.80 and above kept") {
    CHECK_FALSE(report_at(0.78).kept);
    CHECK_FALSE(report_at(0.79).kept);
    CHECK(report_at(0.80).kept);
    CHECK(report_at(0.81).kept);
}

TEST_CASE("39 of 50 normals is 0.78 and dropped, 40 of 50 is 0.80 and kept") {
    auto a = make_filter_report("q", 50, 39, 0.80);
    CHECK(a.accuracy == doctest::Approx(0.78));
    CHECK_FALSE(a.kept);
    auto b = make_filter_report("q", 50, 40, 0.80);
    CHECK(b.accuracy == 0.8);
    CHECK(b.kept);
}

TEST_CASE("kept matches accuracy >= threshold on every small report") {
    for (std::size_t asked = 1; asked <= 20; ++asked)
        for (std::size_t correct = 0; correct <= asked; ++correct)
            for (double thr : {0.5, 0.8, 0.95, 1.0}) {
                auto r = make_filter_report("q", asked, correct, thr);
                CHECK(r.kept == (static_cast<double>(correct) / static_cast<double>(asked) >= thr));
            }
}

TEST_CASE("lowering the threshold never removes a kept question") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t asked = 1 + rng() % 60;
        const std::size_t correct = rng() % (asked + 1);
        const double hi = 0.01 * (1 + rng() % 100);
        const double lo = hi * 0.01 * (rng() % 101);
        if (make_filter_report("q", asked, correct, hi).kept) CHECK(make_filter_report("q", asked, correct, lo).kept);
    }
}

TEST_CASE("accuracies 0.95, 0.78, 0.80 keep questions 1 and 3, re-indexed") {
    auto c = candidates(3);
    std::vector<FilterReport> r = {report_at(0.95), report_at(0.78), report_at(0.80)};
    auto kept = filter_questions(c, r);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].text == "Q1?");
    CHECK(kept[0].index == 1);
    CHECK(kept[1].text == "Q3?");
    CHECK(kept[1].index == 2);
    CHECK(kept[1].filter_accuracy == std::optional<double>(0.8));
}

TEST_CASE("nothing above threshold is an empty-question-set error") {
    auto c = candidates(2);
    std::vector<FilterReport> r = {report_at(0.10), report_at(0.79)};
    try {
        filter_questions(c, r);
        FAIL("expected empty_question_set");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::empty_question_set);
    }
}

TEST_CASE("disabled filtering keeps every candidate verbatim") {
    auto c = candidates(4);
    auto kept = filter_questions(c, {}, false);
    REQUIRE(kept.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(kept[i].text == c[i].text);
        CHECK(kept[i].index == c[i].index);
    }
}

TEST_CASE("direct mode counts Yes answers over parseable responses") {
    World w(10);
    const std::string q = "Is there exactly one nectarine?";
    for (std::size_t k = 0; k < 10; ++k) {
        if (k == 9)
            w.unparsed(w.ids[k], q);
        else
            w.answer(w.ids[k], q, k < 7 ? "Yes" : "No");
    }
    for (int par : {1, 4}) {
        auto r = score_question_on_normals(w.ctx(par), candidate(1, q), w.profile(), std::nullopt, w.manifest, w.ids,
                                           FilterMode::direct);
        CHECK(r.asked == 9);
        CHECK(r.correct == 7);
        CHECK(r.accuracy == doctest::Approx(7.0 / 9.0));
        CHECK_FALSE(r.kept);
    }
}

TEST_CASE("all-unparseable validation answers are a no-signal error") {
    World w(3);
    for (const auto& id : w.ids) w.unparsed(id, "Q?");
    CHECK_THROWS_WITH_AS(score_question_on_normals(w.ctx(), candidate(1, "Q?"), w.profile(), std::nullopt, w.manifest,
                                                   w.ids, FilterMode::direct),
                         doctest::Contains("no signal"), Error);
    auto reports = score_candidates(w.ctx(), candidates(0), w.profile(), std::nullopt, w.manifest, w.ids,
                                    FilterMode::direct);
    CHECK(reports.empty());
}

TEST_CASE("voted mode scores each image by the Sub-Q vote") {
    World w(2);
    MainQuestion q{1, "Main?", {"s1", "s2", "s3", "s4", "s5"}, std::nullopt, false};
    // image 0: 3 Yes 2 No -> satisfied; image 1: 2 Yes 3 No -> violated.
    for (int j = 0; j < 5; ++j) {
        w.answer(w.ids[0], q.sub_questions[j], j < 3 ? "Yes" : "No");
        w.answer(w.ids[1], q.sub_questions[j], j < 2 ? "Yes" : "No");
    }
    auto r = score_question_on_normals(w.ctx(), q, w.profile(), std::nullopt, w.manifest, w.ids, FilterMode::voted);
    CHECK(r.asked == 2);
    CHECK(r.correct == 1);
    CHECK(r.accuracy == 0.5);
}

TEST_CASE("CSV export quotes question text") {
    std::vector<FilterReport> r = {make_filter_report("Is it \"ok\", really?", 4, 3, 0.8)};
    CHECK(filter_reports_csv(r) == "question,asked,correct,accuracy,kept\n\"Is it \"\"ok\"\", really?\",4,3,0.750000,false\n");
}

TEST_CASE("filter mode strings") {
    CHECK(filter_mode_from_string("direct") == FilterMode::direct);
    CHECK(filter_mode_from_string("voted") == FilterMode::voted);
    CHECK_THROWS_AS(filter_mode_from_string("both"), Error);
}

}
