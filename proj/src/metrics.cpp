// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "logicqa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "logicqa/error.hpp"

namespace logicqa {

namespace {

void count_classes(std::span<const ScoredSample> samples, std::size_t& n_a, std::size_t& n_n) {
    n_a = n_n = 0;
    for (const auto& s : samples) {
        if (s.indeterminate) continue;
        (s.label == Label::anomaly ? n_a : n_n)++;
    }
}

// Summing in sorted order makes the mean independent of run order, bit for bit.
double order_free_mean(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

}  // namespace

double auroc(std::span<const ScoredSample> samples) {
    std::size_t n_a = 0, n_n = 0;
    count_classes(samples, n_a, n_n);
    if (n_a == 0 || n_n == 0) throw Error(ErrorKind::metric, "AUROC undefined: needs both normal and anomaly samples");

    std::vector<std::pair<double, Label>> xs;
    xs.reserve(n_a + n_n);
    for (const auto& s : samples)
        if (!s.indeterminate) xs.emplace_back(s.score, s.label);
    std::sort(xs.begin(), xs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    // Mid-ranks are multiples of 0.5, so the rank sum is exact in double.
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < xs.size();) {
        std::size_t j = i;
        while (j < xs.size() && xs[j].first == xs[i].first) ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (xs[k].second == Label::anomaly) rank_sum += mid;
        i = j;
    }
    const double na = static_cast<double>(n_a);
    const double u = rank_sum - na * (na + 1.0) / 2.0;
    return u / (na * static_cast<double>(n_n));
}

double auroc_pairwise(std::span<const ScoredSample> samples, int threads) {
    std::vector<double> pos, neg;
    for (const auto& s : samples) {
        if (s.indeterminate) continue;
        (s.label == Label::anomaly ? pos : neg).push_back(s.score);
    }
    if (pos.empty() || neg.empty())
        throw Error(ErrorKind::metric, "AUROC undefined: needs both normal and anomaly samples");
    // Doubled credits keep the reduction in integers: win = 2, tie = 1.
    unsigned long long credit = 0;
    const long n_pos = static_cast<long>(pos.size());
#pragma omp parallel for reduction(+ : credit) num_threads(std::max(threads, 1)) if (threads > 1)
    for (long i = 0; i < n_pos; ++i) {
        const double a = pos[static_cast<std::size_t>(i)];
        for (double n : neg) credit += a > n ? 2u : (a == n ? 1u : 0u);
    }
    return static_cast<double>(credit) / 2.0 / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

F1Max f1_max(std::span<const ScoredSample> samples) {
    std::vector<std::pair<double, Label>> xs;
    std::size_t n_pos = 0;
    for (const auto& s : samples) {
        if (s.indeterminate) continue;
        xs.emplace_back(s.score, s.label);
        if (s.label == Label::anomaly) ++n_pos;
    }
    if (n_pos == 0) throw Error(ErrorKind::metric, "F1-max undefined: no anomaly samples");
    std::sort(xs.begin(), xs.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    F1Max best{0.0, std::numeric_limits<double>::infinity()};
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < xs.size();) {
        const double tau = xs[i].first;
        while (i < xs.size() && xs[i].first == tau) {
            (xs[i].second == Label::anomaly ? tp : fp)++;
            ++i;
        }
        const std::size_t fn = n_pos - tp;
        const double f1 = 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
        // Descending scan: >= hands ties to the smaller threshold.
        if (f1 >= best.value && f1 > 0.0) best = {f1, tau};
    }
    return best;
}

double agreement(std::span<const int> model_answers, std::span<const int> annotator_answers) {
    if (model_answers.size() != annotator_answers.size())
        throw Error(ErrorKind::metric, "alignment error: " + std::to_string(model_answers.size()) + " model answers vs " +
                                           std::to_string(annotator_answers.size()) + " annotator answers");
    if (model_answers.empty()) throw Error(ErrorKind::metric, "agreement undefined on empty answer lists");
    std::size_t same = 0;
    for (std::size_t i = 0; i < model_answers.size(); ++i) same += model_answers[i] == annotator_answers[i];
    return static_cast<double>(same) / static_cast<double>(model_answers.size());
}

std::vector<ScoredSample> scored_samples(std::span<const ImageVerdict> verdicts) {
    std::vector<ScoredSample> out;
    out.reserve(verdicts.size());
    for (const auto& v : verdicts) {
        if (!v.label) throw Error(ErrorKind::metric, "verdict for " + v.image_id + " has no ground-truth label");
        ScoredSample s;
        s.image_id = v.image_id;
        s.label = *v.label;
        s.indeterminate = v.indeterminate || !v.anomaly_score;
        s.score = v.anomaly_score.value_or(0.0);
        out.push_back(std::move(s));
    }
    return out;
}

RunMetrics evaluate_run(const std::string& category, int run, std::uint64_t seed,
                        std::span<const ImageVerdict> verdicts) {
    RunMetrics m;
    m.category = category;
    m.run = run;
    m.seed = seed;
    auto samples = scored_samples(verdicts);
    for (const auto& s : samples) {
        if (s.indeterminate)
            ++m.n_indeterminate;
        else
            (s.label == Label::anomaly ? m.n_anomaly : m.n_normal)++;
    }
    for (const auto& v : verdicts) m.degraded = m.degraded || v.degraded;
    m.auroc = auroc(samples);
    auto f1 = f1_max(samples);
    m.f1_max = f1.value;
    m.f1_max_threshold = f1.threshold;
    return m;
}

EvalReport aggregate_runs(std::span<const RunMetrics> runs) {
    if (runs.empty()) throw Error(ErrorKind::metric, "aggregate_runs needs at least one run");
    EvalReport r;
    r.category = runs.front().category;
    std::vector<double> aurocs, f1s;
    for (const auto& run : runs) {
        if (run.category != r.category)
            throw Error(ErrorKind::metric, "aggregation error: runs mix categories " + r.category + " and " + run.category);
        aurocs.push_back(run.auroc);
        f1s.push_back(run.f1_max);
        r.degraded = r.degraded || run.degraded;
    }
    r.mean_auroc = order_free_mean(std::move(aurocs));
    r.mean_f1_max = order_free_mean(std::move(f1s));
    r.n_normal = runs.front().n_normal;
    r.n_anomaly = runs.front().n_anomaly;
    r.runs.assign(runs.begin(), runs.end());
    return r;
}

nlohmann::json to_json(const RunMetrics& r) {
    nlohmann::json j = {
        {"category", r.category},
        {"run", r.run},
        {"seed", r.seed},
        {"n_normal", r.n_normal},
        {"n_anomaly", r.n_anomaly},
        {"n_indeterminate", r.n_indeterminate},
        {"auroc", r.auroc},
        {"f1_max", r.f1_max},
        {"f1_max_threshold", std::isinf(r.f1_max_threshold) ? nlohmann::json("inf") : nlohmann::json(r.f1_max_threshold)},
        {"degraded", r.degraded},
    };
    if (r.agreement) {
        auto opt = [](const std::optional<double>& x) { return x ? nlohmann::json(*x) : nlohmann::json(nullptr); };
        j["agreement"] = {{"normal", opt(r.agreement->normal)},
                          {"anomaly", opt(r.agreement->anomaly)},
                          {"n_normal_pairs", r.agreement->n_normal_pairs},
                          {"n_anomaly_pairs", r.agreement->n_anomaly_pairs}};
    }
    return j;
}

nlohmann::json to_json(const EvalReport& r) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& run : r.runs) runs.push_back(to_json(run));
    return {
        {"category", r.category},
        {"n_normal", r.n_normal},
        {"n_anomaly", r.n_anomaly},
        {"mean", {{"auroc", r.mean_auroc}, {"f1_max", r.mean_f1_max}}},
        {"runs", std::move(runs)},
        {"confidence_degraded", r.degraded},
    };
}

std::string report_csv(const EvalReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%zu\n", r.category.c_str(), r.mean_auroc, r.mean_f1_max, r.runs.size());
    return std::string("category,auroc,f1_max,runs\n") + buf;
}

}  // namespace logicqa
