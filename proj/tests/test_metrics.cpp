// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "logicqa/error.hpp"
#include "logicqa/metrics.hpp"
#include "oracles.hpp"

using namespace logicqa;

namespace {

std::vector<ScoredSample> samples(const std::vector<double>& anomalies, const std::vector<double>& normals) {
    std::vector<ScoredSample> out;
    int k = 0;
    for (double s : anomalies) out.push_back({"a" + std::to_string(k++), s, Label::anomaly, false});
    for (double s : normals) out.push_back({"n" + std::to_string(k++), s, Label::normal, false});
    return out;
}

std::vector<ScoredSample> from_vectors(const std::vector<double>& scores, const std::vector<int>& labels) {
    std::vector<ScoredSample> out;
    for (std::size_t i = 0; i < scores.size(); ++i)
        out.push_back({std::to_string(i), scores[i], labels[i] ? Label::anomaly : Label::normal, false});
    return out;
}

RunMetrics run_with(const std::string& category, double auroc, double f1 = 1.0) {
    RunMetrics r;
    r.category = category;
    r.auroc = auroc;
    r.f1_max = f1;
    return r;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("auroc examples") {
    CHECK(auroc(samples({0.9, 0.8}, {0.3, 0.2})) == 1.0);
    CHECK(auroc(samples({0.5, 0.5}, {0.5, 0.5, 0.5})) == 0.5);
    CHECK(auroc(samples({0.9, 0.4}, {0.6, 0.2})) == 0.75);
}

TEST_CASE("auroc needs both classes") {
    CHECK_THROWS_AS(auroc(samples({0.9}, {})), Error);
    CHECK_THROWS_AS(auroc(samples({}, {0.1})), Error);
}

TEST_CASE("indeterminate samples are excluded") {
    auto s = samples({0.9}, {0.1});
    s.push_back({"x", 5.0, Label::normal, true});
    CHECK(auroc(s) == 1.0);
    CHECK(f1_max(s).value == 1.0);
}

TEST_CASE("auroc equals pair counting on every labelling of up to 6 samples over a 5-value grid") {
    const double grid[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    std::size_t checked = 0;
    for (int n = 2; n <= 6; ++n) {
        int combos = 1;
        for (int i = 0; i < n; ++i) combos *= 5;
        for (int labels_bits = 1; labels_bits < (1 << n) - 1; ++labels_bits) {
            std::vector<int> labels;
            for (int i = 0; i < n; ++i) labels.push_back((labels_bits >> i) & 1);
            for (int code = 0; code < combos; ++code) {
                std::vector<double> scores;
                int c = code;
                for (int i = 0; i < n; ++i, c /= 5) scores.push_back(grid[c % 5]);
                const auto s = from_vectors(scores, labels);
                const double expected = oracle::auroc(scores, labels);
                if (auroc(s) != expected || auroc_pairwise(s) != expected) {
                    FAIL_CHECK("mismatch at n=" << n << " labels=" << labels_bits << " code=" << code);
                }
                ++checked;
            }
        }
    }
    CHECK(checked > 100000);
}

TEST_CASE("parallel pair counting matches the serial one") {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> scores;
        std::vector<int> labels;
        for (int i = 0; i < 300; ++i) {
            scores.push_back(static_cast<double>(rng() % 50) / 50.0);
            labels.push_back(i % 3 == 0);
        }
        auto s = from_vectors(scores, labels);
        CHECK(auroc_pairwise(s, 4) == auroc_pairwise(s, 1));
        CHECK(auroc_pairwise(s, 4) == auroc(s));
    }
}

TEST_CASE("auroc is invariant under increasing transforms and flips with labels") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 30);
        std::vector<double> scores;
        std::vector<int> labels;
        for (int i = 0; i < n; ++i) {
            scores.push_back(std::round(u(rng) * 20.0) / 20.0);
            labels.push_back(i < 2 ? i : static_cast<int>(rng() % 2));
        }
        std::vector<double> warped, flipped_scores = scores;
        for (double s : scores) warped.push_back(std::exp(3.0 * s) + 7.0);
        std::vector<int> flipped;
        for (int l : labels) flipped.push_back(1 - l);
        const double base = auroc(from_vectors(scores, labels));
        CHECK(auroc(from_vectors(warped, labels)) == base);
        CHECK(auroc(from_vectors(scores, flipped)) == doctest::Approx(1.0 - base).epsilon(1e-12));
        CHECK(f1_max(from_vectors(warped, labels)).value == f1_max(from_vectors(scores, labels)).value);
    }
}

TEST_CASE("f1_max examples") {
    auto r = f1_max(samples({0.9}, {0.8, 0.1}));
    CHECK(r.value == 1.0);
    CHECK(r.threshold == 0.9);
    CHECK(f1_max(samples({0.9, 0.7}, {0.3, 0.2})).value == 1.0);
    // One anomaly below all n normals: best is all-positive, p = 1/(n+1), r = 1.
    const double p = 1.0 / 4.0;
    CHECK(f1_max(samples({0.1}, {0.5, 0.6, 0.7})).value == doctest::Approx(2 * p / (p + 1)));
    CHECK(f1_max(samples({0.1}, {0.5, 0.6, 0.7})).threshold == 0.1);
    CHECK_THROWS_AS(f1_max(samples({}, {0.2})), Error);
}

TEST_CASE("f1_max matches the full threshold scan") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 12);
        std::vector<double> scores;
        std::vector<int> labels;
        for (int i = 0; i < n; ++i) {
            scores.push_back(static_cast<double>(rng() % 6) / 5.0);
            labels.push_back(i == 0 ? 1 : static_cast<int>(rng() % 2));
        }
        const auto got = f1_max(from_vectors(scores, labels));
        const auto want = oracle::f1_max(scores, labels);
        CHECK(got.value == want.value);
        CHECK(got.threshold == want.threshold);
        for (double t : scores) CHECK(got.value >= oracle::f1_at(scores, labels, t));
    }
}

TEST_CASE("agreement") {
    std::vector<int> a(50, 0), b(50, 0);
    b[7] = 1;
    CHECK(agreement(a, b) == 0.98);
    CHECK(agreement(a, a) == 1.0);
    std::vector<int> ones(50, 1);
    CHECK(agreement(a, ones) == 0.0);
    CHECK(agreement(a, b) == agreement(b, a));
    std::vector<int> short_list(49, 0);
    CHECK_THROWS_AS(agreement(a, short_list), Error);
}

TEST_CASE("aggregate_runs means") {
    std::vector<RunMetrics> runs = {run_with("c", 0.9), run_with("c", 0.8), run_with("c", 0.7)};
    CHECK(aggregate_runs(runs).mean_auroc == doctest::Approx(0.8));
    CHECK(aggregate_runs(std::span<const RunMetrics>(runs.data(), 1)).mean_auroc == 0.9);
    runs.push_back(run_with("other", 0.5));
    CHECK_THROWS_AS(aggregate_runs(runs), Error);
}

TEST_CASE("aggregate means are exactly permutation invariant") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<RunMetrics> runs;
        for (int k = 0; k < 5; ++k) runs.push_back(run_with("c", u(rng), u(rng)));
        const auto base = aggregate_runs(runs);
        std::shuffle(runs.begin(), runs.end(), rng);
        const auto again = aggregate_runs(runs);
        CHECK(again.mean_auroc == base.mean_auroc);
        CHECK(again.mean_f1_max == base.mean_f1_max);
    }
}

TEST_CASE("report CSV row shape") {
    std::vector<RunMetrics> runs = {run_with("breakfast_box", 1.0, 1.0), run_with("breakfast_box", 0.5, 0.75)};
    CHECK(report_csv(aggregate_runs(runs)) == "category,auroc,f1_max,runs\nbreakfast_box,0.750000,0.875000,2\n");
}

TEST_CASE("infinite F1 threshold is written as a string") {
    RunMetrics r = run_with("c", 0.5);
    r.f1_max_threshold = std::numeric_limits<double>::infinity();
    CHECK(to_json(r)["f1_max_threshold"] == "inf");
}

}
