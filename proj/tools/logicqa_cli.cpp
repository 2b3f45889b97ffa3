// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

// logicqa: command-line front end for the checklist pipeline.
//
//   logicqa synth  --config cfg.json      describe, summarize, generate, filter, augment
//   logicqa filter --config cfg.json      re-run filtering on existing candidates
//   logicqa infer  --config cfg.json      answer the checklist for every test image
//   logicqa eval   --config cfg.json      per-run and mean metrics
//   logicqa report --config cfg.json      print the stored report
//   logicqa run    --config cfg.json      synth + infer + eval
//   logicqa cache stats|clear --config cfg.json

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "logicqa/cache.hpp"
#include "logicqa/config.hpp"
#include "logicqa/error.hpp"
#include "logicqa/hash.hpp"
#include "logicqa/pipeline.hpp"

namespace {

using namespace logicqa;

enum ExitCode {
    kOk = 0,
    kOther = 1,
    kConfig = 2,
    kDataset = 3,
    kBackend = 4,
    kEmptyQuestions = 5,
};

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config:
        case ErrorKind::template_error:
            return kConfig;
        case ErrorKind::dataset:
            return kDataset;
        case ErrorKind::backend:
        case ErrorKind::transport:
        case ErrorKind::fixture_missing:
            return kBackend;
        case ErrorKind::empty_question_set:
            return kEmptyQuestions;
        default:
            return kOther;
    }
}

struct Overrides {
    std::string config;
    std::optional<std::string> category;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> backend;
    std::optional<int> runs;
    std::optional<int> run;
    bool no_filter = false;
    std::optional<int> parallelism;
    std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "Run configuration (JSON)")->required();
    cmd->add_option("--category", o.category, "Dataset category to process");
    cmd->add_option("--seed", o.seed, "Base sampling seed");
    cmd->add_option("--backend", o.backend, "live or mock")->check(CLI::IsMember({"live", "mock"}));
    cmd->add_option("--runs", o.runs, "Number of seeded runs");
    cmd->add_option("--run", o.run, "Only process this run (1-based)");
    cmd->add_flag("--no-filter", o.no_filter, "Keep every generated Main-Q");
    cmd->add_option("--parallelism", o.parallelism, "Concurrent backend requests");
    cmd->add_option("--out", o.out, "Output directory");
}

RunConfig resolve(const Overrides& o) {
    auto cfg = load_config(o.config);
    if (o.category) cfg.category = *o.category;
    if (o.seed) cfg.seed = *o.seed;
    if (o.backend) cfg.backend.kind = backend_kind_from_string(*o.backend);
    if (o.runs) cfg.runs = *o.runs;
    if (o.no_filter) cfg.filter.enabled = false;
    if (o.parallelism) cfg.parallelism = *o.parallelism;
    if (o.out) cfg.out_dir = *o.out;
    cfg.validate();
    if (o.run && (*o.run < 1 || *o.run > cfg.runs))
        throw Error(ErrorKind::config, "--run must be in [1, " + std::to_string(cfg.runs) + "]");
    return cfg;
}

template <class F>
void for_runs(const Overrides& o, const RunConfig& cfg, F&& f) {
    if (o.run) {
        f(*o.run);
        return;
    }
    for (int r = 1; r <= cfg.runs; ++r) f(r);
}

void print_report(const EvalReport& report) {
    for (const auto& r : report.runs) {
        std::printf("%s run %d (seed %llu): AUROC %.4f  F1-max %.4f  normal %zu  anomaly %zu  indeterminate %zu\n",
                    r.category.c_str(), r.run, static_cast<unsigned long long>(r.seed), r.auroc, r.f1_max,
                    r.n_normal, r.n_anomaly, r.n_indeterminate);
    }
    std::printf("%s mean over %zu runs: AUROC %.4f  F1-max %.4f\n", report.category.c_str(), report.runs.size(),
                report.mean_auroc, report.mean_f1_max);
}

void print_backend_stats(const Pipeline& p) {
    if (const auto* c = p.cache())
        std::fprintf(stderr, "cache: %zu hits, %zu misses\n", c->hits(), c->misses());
    if (auto calls = p.mock_calls()) std::fprintf(stderr, "mock backend calls: %zu\n", *calls);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Checklist-based logical anomaly detection with a vision-language backend"};
    app.require_subcommand(1);

    Overrides o;
    auto* synth = app.add_subcommand("synth", "Build the Main-Q/Sub-Q checklist");
    auto* filter = app.add_subcommand("filter", "Re-filter existing Main-Q candidates");
    auto* infer = app.add_subcommand("infer", "Answer the checklist for every test image");
    auto* eval = app.add_subcommand("eval", "Compute per-run and mean metrics");
    auto* report = app.add_subcommand("report", "Print the stored evaluation report");
    auto* run = app.add_subcommand("run", "synth, infer and eval in one go");
    for (auto* cmd : {synth, filter, infer, eval, report, run}) add_common(cmd, o);

    auto* cache = app.add_subcommand("cache", "Inspect or clear the response cache");
    cache->require_subcommand(1);
    auto* cache_stats = cache->add_subcommand("stats", "Entry count and size");
    auto* cache_clear = cache->add_subcommand("clear", "Remove every cached response");
    for (auto* cmd : {cache_stats, cache_clear}) cmd->add_option("--config", o.config)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (cache->parsed()) {
            const auto cfg = load_config(o.config);
            if (!cfg.cache_dir) throw Error(ErrorKind::config, "config has no cache_dir");
            ResponseCache rc(*cfg.cache_dir);
            if (cache_stats->parsed()) {
                const auto s = rc.stats();
                std::printf("%s: %zu entries, %ju bytes\n", rc.dir().c_str(), s.entries, s.bytes);
            } else {
                std::printf("removed %zu entries\n", rc.clear());
            }
            return kOk;
        }

        const auto cfg = resolve(o);
        if (report->parsed()) {
            const auto path = cfg.out_dir / "report.csv";
            if (!std::filesystem::exists(path)) throw Error(ErrorKind::io, "no report at " + path.string() + "; run eval first");
            std::cout << read_text_file(path);
            return kOk;
        }

        Pipeline p(cfg);
        if (synth->parsed()) {
            for_runs(o, cfg, [&](int r) { p.synth(r); });
        } else if (filter->parsed()) {
            for_runs(o, cfg, [&](int r) { p.filter(r); });
        } else if (infer->parsed()) {
            for_runs(o, cfg, [&](int r) { p.infer(r); });
        } else if (eval->parsed()) {
            if (o.run) {
                p.evaluate(*o.run);
            } else {
                print_report(p.evaluate_all());
            }
        } else if (run->parsed()) {
            print_report(p.run_all());
        }
        print_backend_stats(p);
        return kOk;
    } catch (const Error& e) {
        std::fprintf(stderr, "error (%s): %s\n", to_string(e.kind()), e.what());
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kOther;
    }
}
