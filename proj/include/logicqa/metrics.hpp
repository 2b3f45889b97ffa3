// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "logicqa/dataset.hpp"
#include "logicqa/inference.hpp"

namespace logicqa {

struct ScoredSample {
    std::string image_id;
    double score = 0.0;
    Label label = Label::normal;
    bool indeterminate = false;
};

/// Mann-Whitney AUROC via mid-ranks: the fraction of (anomaly, normal) pairs
/// where the anomaly scores higher, ties counted half. Indeterminate samples
/// are skipped. Throws Error(metric) unless both classes are present.
double auroc(std::span<const ScoredSample> samples);

/// The same statistic by explicit pair counting, OpenMP-parallel over
/// anomalies. O(n_a * n_n); kept for cross-checks and benchmarking.
double auroc_pairwise(std::span<const ScoredSample> samples, int threads = 1);

struct F1Max {
    double value = 0.0;
    double threshold = 0.0;  // +inf when nothing beats predicting all-negative
};

/// Anomaly is the positive class, predicted when score >= threshold.
/// Scans every distinct score plus +inf; ties go to the smallest threshold.
F1Max f1_max(std::span<const ScoredSample> samples);

/// Fraction of positions where the two answer lists agree.
/// Throws Error(metric) on length mismatch or empty input.
double agreement(std::span<const int> model_answers, std::span<const int> annotator_answers);

struct AgreementStats {
    std::optional<double> normal;
    std::optional<double> anomaly;
    std::size_t n_normal_pairs = 0;
    std::size_t n_anomaly_pairs = 0;
};

struct RunMetrics {
    std::string category;
    int run = 1;
    std::uint64_t seed = 0;
    std::size_t n_normal = 0;
    std::size_t n_anomaly = 0;
    std::size_t n_indeterminate = 0;
    double auroc = 0.0;
    double f1_max = 0.0;
    double f1_max_threshold = 0.0;
    /// Scores came from a backend without log-probs; not comparable to scored runs.
    bool degraded = false;
    std::optional<AgreementStats> agreement;
};

struct EvalReport {
    std::string category;
    std::vector<RunMetrics> runs;
    double mean_auroc = 0.0;
    double mean_f1_max = 0.0;
    std::size_t n_normal = 0;
    std::size_t n_anomaly = 0;
    bool degraded = false;
};

std::vector<ScoredSample> scored_samples(std::span<const ImageVerdict> verdicts);

/// AUROC and F1-max for one run's verdicts. Every verdict must carry a label.
RunMetrics evaluate_run(const std::string& category, int run, std::uint64_t seed,
                        std::span<const ImageVerdict> verdicts);

/// Arithmetic means over runs. Throws Error(metric) on mixed categories.
EvalReport aggregate_runs(std::span<const RunMetrics> runs);

nlohmann::json to_json(const RunMetrics& r);
nlohmann::json to_json(const EvalReport& r);
/// category,auroc,f1_max,runs
std::string report_csv(const EvalReport& r);

}  // namespace logicqa
