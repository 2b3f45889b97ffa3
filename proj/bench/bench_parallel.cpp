// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference vs OpenMP fan-out for the two parallel kernels: the Sub-Q
// query fan-out of inference (against a mock backend with per-call latency)
// and pairwise AUROC counting. Rank-based AUROC is the serial reference.

#include <memory>
#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "logicqa/hash.hpp"
#include "logicqa/inference.hpp"
#include "logicqa/metrics.hpp"
#include "logicqa/mock_backend.hpp"
#include "logicqa/prompts.hpp"

using namespace logicqa;

namespace {

constexpr int kImages = 8;
constexpr int kMains = 4;

struct InferenceFixture {
    std::shared_ptr<MockBackend> mock = std::make_shared<MockBackend>();
    QuestionSet questions;
    std::vector<InferenceTarget> targets;

    InferenceFixture() {
        const std::filesystem::path image = std::filesystem::path(LOGICQA_SOURCE_DIR) /
                                            "fixtures/mock_loco/breakfast_box/test/good/000.png";
        questions.class_name = "breakfast box";
        for (int i = 1; i <= kMains; ++i) {
            std::vector<std::string> subs;
            for (int j = 1; j <= 5; ++j) subs.push_back("Sub-Q " + std::to_string(i) + "." + std::to_string(j) + "?");
            questions.main_questions.push_back({i, "Main-Q " + std::to_string(i) + "?", subs, std::nullopt, false});
        }
        for (int k = 0; k < kImages; ++k) {
            InferenceTarget t;
            t.image_id = "img" + std::to_string(k);
            t.label = Label::normal;
            t.questions = &questions;
            t.class_key = "breakfast box";
            t.views = {{t.image_id, image}};
            targets.push_back(t);
            for (const auto& q : questions.main_questions)
                for (const auto& s : q.sub_questions) {
                    ChatResponse r;
                    r.content = "Looks fine.\n- Result: Yes";
                    r.tokens = {{"Looks fine.\n- Result:", -0.2}, {" Yes", -0.05}};
                    mock->add(mock_fixture_key({"test", "breakfast box", t.image_id, s}), r);
                }
        }
        mock->set_latency(std::chrono::microseconds(200));
    }
};

InferenceFixture& inference_fixture() {
    static InferenceFixture f;
    return f;
}

void BM_Infer(benchmark::State& state) {
    auto& f = inference_fixture();
    const QueryContext ctx{*f.mock, SamplingParams{}, PromptTemplates::builtin(), static_cast<int>(state.range(0)), true};
    for (auto _ : state) benchmark::DoNotOptimize(infer_images(ctx, "breakfast box", f.targets));
    state.SetItemsProcessed(state.iterations() * kImages * kMains * 5);
}
BENCHMARK(BM_Infer)->Arg(1)->Arg(4)->Arg(16)->UseRealTime()->Unit(benchmark::kMillisecond);

std::vector<ScoredSample> random_samples(std::size_t n) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<ScoredSample> out;
    for (std::size_t k = 0; k < n; ++k)
        out.push_back({"s" + std::to_string(k), u(rng), k % 3 == 0 ? Label::anomaly : Label::normal, false});
    return out;
}

void BM_AurocRank(benchmark::State& state) {
    const auto s = random_samples(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(auroc(s));
}
BENCHMARK(BM_AurocRank)->Arg(1000)->Arg(10000);

void BM_AurocPairwise(benchmark::State& state) {
    const auto s = random_samples(static_cast<std::size_t>(state.range(0)));
    const int threads = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(auroc_pairwise(s, threads));
}
BENCHMARK(BM_AurocPairwise)->Args({1000, 1})->Args({1000, 8})->Args({10000, 1})->Args({10000, 8})->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
