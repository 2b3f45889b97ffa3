// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "logicqa/pipeline.hpp"

#include <iostream>
#include <set>

#include "logicqa/error.hpp"
#include "logicqa/filtering.hpp"
#include "logicqa/hash.hpp"
#include "logicqa/openai_backend.hpp"
#include "logicqa/parallel.hpp"

namespace fs = std::filesystem;

namespace logicqa {

namespace {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(name, e);
    }
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

nlohmann::json read_json(const fs::path& p) {
    auto j = nlohmann::json::parse(read_text_file(p), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorKind::io, "not valid JSON: " + p.string());
    return j;
}

}  // namespace

Pipeline::Pipeline(RunConfig config) : config_(std::move(config)) {
    config_.validate();
    if (config_.backend.kind == BackendKind::mock) {
        mock_ = std::make_shared<MockBackend>(config_.backend.fixture);
        mock_->set_strip_logprobs(config_.backend.strip_logprobs);
        upstream_ = mock_;
    } else {
        auto opts = OpenAIOptions::from_env();
        opts.max_retries = config_.backend.max_retries;
        opts.initial_backoff = std::chrono::milliseconds(config_.backend.backoff_ms);
        opts.timeout = std::chrono::seconds(config_.backend.timeout_s);
        upstream_ = std::make_shared<OpenAIBackend>(std::move(opts));
    }
    init();
}

Pipeline::Pipeline(RunConfig config, std::shared_ptr<Backend> upstream)
    : config_(std::move(config)), upstream_(std::move(upstream)) {
    config_.validate();
    mock_ = std::dynamic_pointer_cast<MockBackend>(upstream_);
    init();
}

void Pipeline::init() {
    if (config_.cache_dir) {
        caching_ = std::make_shared<CachingBackend>(upstream_, std::make_shared<ResponseCache>(*config_.cache_dir));
        backend_ = caching_.get();
    } else {
        backend_ = upstream_.get();
    }
    profile_ = load_profile(config_.profile);
    templates_ = config_.templates_dir ? PromptTemplates::load_dir(*config_.templates_dir) : PromptTemplates::builtin();
    manifest_ = load_layout(config_.dataset_root, config_.category, config_.layout, config_.subclasses);
    if (config_.preprocess_manifest) crops_ = load_crop_manifests(*config_.preprocess_manifest);
    write_json(config_.out_dir / "manifest.json", to_json(manifest_));
}

fs::path Pipeline::run_dir(int run) const { return config_.out_dir / ("run_" + std::to_string(run)); }

std::optional<std::size_t> Pipeline::mock_calls() const {
    if (!mock_) return std::nullopt;
    return mock_->calls();
}

QueryContext Pipeline::context() const {
    return QueryContext{*backend_, config_.backend.sampling, templates_, config_.parallelism, config_.retry_unparsed};
}

std::vector<Pipeline::Group> Pipeline::groups() const {
    std::vector<Group> out;
    std::set<std::string> subs;
    for (const auto* r : manifest_.by_split(Split::train_normal))
        if (r->subclass) subs.insert(*r->subclass);
    if (subs.empty()) return {Group{std::nullopt, ""}};
    for (const auto& s : subs) out.push_back({s, "_" + s});
    return out;
}

void Pipeline::write_json(const fs::path& path, const nlohmann::json& j) const {
    write_file_atomic(path, j.dump(2) + "\n");
}

std::vector<QuestionSet> Pipeline::synth(int run) {
    const auto ctx = context();
    const auto dir = run_dir(run);
    std::vector<QuestionSet> out;
    for (const auto& g : groups()) {
        auto sel = stage("select", [&] {
            return sample_few_shot(manifest_, config_.seed_for_run(run), config_.filter.pool_size, g.subclass);
        });
        write_json(dir / ("selection" + g.suffix + ".json"), to_json(sel));

        auto descriptions = stage("describe", [&] { return describe_normals(ctx, profile_, g.subclass, manifest_, sel); });
        nlohmann::json dj = nlohmann::json::array();
        for (const auto& d : descriptions) dj.push_back({{"image_id", d.image_id}, {"text", d.text}});
        write_json(dir / ("descriptions" + g.suffix + ".json"), dj);

        auto summary = stage("summarize", [&] { return summarize(ctx, profile_, g.subclass, descriptions); });
        write_json(dir / ("summary" + g.suffix + ".json"), {{"text", summary.text}, {"source_ids", summary.source_ids}});

        auto candidates =
            stage("generate", [&] { return generate_main_candidates(ctx, summary, profile_, g.subclass); });
        write_json(dir / ("candidates" + g.suffix + ".json"), candidates);

        out.push_back(filter_and_augment(run, g, sel, candidates));
    }
    return out;
}

std::vector<QuestionSet> Pipeline::filter(int run) {
    const auto dir = run_dir(run);
    std::vector<QuestionSet> out;
    for (const auto& g : groups()) {
        const auto sel_path = dir / ("selection" + g.suffix + ".json");
        const auto cand_path = dir / ("candidates" + g.suffix + ".json");
        if (!fs::exists(sel_path) || !fs::exists(cand_path))
            throw Error(ErrorKind::io, "run " + std::to_string(run) + " has no candidates yet; run synth first");
        auto sj = read_json(sel_path);
        FewShotSelection sel;
        sel.reference_ids = sj.at("reference_ids").get<std::vector<std::string>>();
        sel.validation_ids = sj.at("validation_ids").get<std::vector<std::string>>();
        sel.seed = sj.at("seed").get<std::uint64_t>();
        out.push_back(filter_and_augment(run, g, sel, read_json(cand_path).get<std::vector<std::string>>()));
    }
    return out;
}

QuestionSet Pipeline::filter_and_augment(int run, const Group& g, const FewShotSelection& sel,
                                         const std::vector<std::string>& candidate_texts) {
    const auto ctx = context();
    const auto dir = run_dir(run);
    const auto class_key = profile_.class_key(g.subclass);

    std::vector<MainQuestion> candidates;
    for (std::size_t k = 0; k < candidate_texts.size(); ++k)
        candidates.push_back({static_cast<int>(k + 1), candidate_texts[k], {}, std::nullopt, false});

    auto augment_all = [&](std::vector<MainQuestion> qs) {
        return stage("augment", [&] {
            return parallel_map(qs.size(), ctx.parallelism,
                                [&](std::size_t k) { return augment_with_fallback(ctx, qs[k], class_key); });
        });
    };

    bool filtered = config_.filter.enabled;
    if (filtered && sel.validation_ids.empty()) {
        warn("no validation images left after choosing references; skipping Main-Q filtering for " + class_key);
        filtered = false;
    }

    std::vector<MainQuestion> kept;
    if (!filtered) {
        kept = augment_all(stage("filter", [&] { return filter_questions(candidates, {}, false); }));
    } else {
        const bool voted = config_.filter.mode == FilterMode::voted;
        if (voted) candidates = augment_all(std::move(candidates));
        auto reports = stage("filter", [&] {
            return score_candidates(ctx, candidates, profile_, g.subclass, manifest_, sel.validation_ids,
                                    config_.filter.mode, config_.filter.threshold);
        });
        nlohmann::json rj = nlohmann::json::array();
        for (const auto& r : reports) {
            if (r.no_signal) warn("no parseable validation answers for \"" + r.question_text + "\"; dropped");
            rj.push_back({{"question", r.question_text}, {"asked", r.asked}, {"correct", r.correct},
                          {"accuracy", r.accuracy}, {"kept", r.kept}, {"no_signal", r.no_signal}});
        }
        write_json(dir / ("filter_report" + g.suffix + ".json"), rj);
        write_file_atomic(dir / ("filter_report" + g.suffix + ".csv"), filter_reports_csv(reports));
        kept = stage("filter", [&] { return filter_questions(candidates, reports, true); });
        if (!voted) kept = augment_all(std::move(kept));
    }

    QuestionSet qs;
    qs.class_name = profile_.class_name;
    qs.subclass = g.subclass;
    qs.main_questions = std::move(kept);
    qs.reference_ids = sel.reference_ids;
    qs.backend_id = upstream_->id();
    qs.seed = sel.seed;
    qs.candidate_count = candidates.size();
    qs.filtered = filtered;
    stage("augment", [&] { qs.validate(); return 0; });
    for (const auto& q : qs.main_questions)
        if (q.augmentation_fallback) warn("Main-Q " + std::to_string(q.index) + " uses fallback Sub-Qs");
    write_json(dir / ("questions" + g.suffix + ".json"), to_json(qs));
    return qs;
}

std::vector<InferenceTarget> Pipeline::targets(int run, std::vector<QuestionSet>& storage) const {
    const auto dir = run_dir(run);
    const auto gs = groups();
    storage.clear();
    storage.reserve(gs.size());
    for (const auto& g : gs) {
        const auto p = dir / ("questions" + g.suffix + ".json");
        if (!fs::exists(p)) throw Error(ErrorKind::io, "missing question set " + p.string() + "; run synth first");
        storage.push_back(question_set_from_json(read_json(p)));
    }

    std::vector<InferenceTarget> out;
    for (const auto& rec : manifest_.records) {
        if (rec.split == Split::train_normal) continue;
        InferenceTarget t;
        t.image_id = rec.id;
        t.label = rec.label;
        std::optional<std::string> sub;
        for (std::size_t k = 0; k < gs.size(); ++k) {
            if (gs[k].subclass == rec.subclass) {
                t.questions = &storage[k];
                sub = gs[k].subclass;
            }
        }
        if (!t.questions) {
            if (gs.size() == 1 && !gs.front().subclass) {
                t.questions = &storage.front();
            } else {
                throw Error(ErrorKind::dataset, "test image " + rec.id + " has no matching subclass question set");
            }
        }
        t.class_key = profile_.class_key(sub);
        auto crop = crops_.find(rec.id);
        if (crop == crops_.end()) crop = crops_.find(rec.path.generic_string());
        if (crop != crops_.end())
            t.views = crop->second.views();
        else
            t.views = {{rec.id, rec.path}};
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<ImageVerdict> Pipeline::infer(int run) {
    std::vector<QuestionSet> storage;
    auto ts = stage("infer", [&] { return targets(run, storage); });
    if (ts.empty()) warn("no test images in " + config_.category + "; writing an empty verdict file");
    auto ctx = context();
    auto verdicts = stage("infer", [&] { return infer_images(ctx, profile_.class_name, ts); });
    nlohmann::json j = nlohmann::json::array();
    for (const auto& v : verdicts) {
        if (v.indeterminate) warn("image " + v.image_id + " is indeterminate and will be excluded from metrics");
        j.push_back(to_json(v));
    }
    write_json(run_dir(run) / "verdicts.json", j);
    return verdicts;
}

RunMetrics Pipeline::evaluate(int run) {
    const auto p = run_dir(run) / "verdicts.json";
    if (!fs::exists(p)) throw Error(ErrorKind::io, "missing " + p.string() + "; run infer first");
    std::vector<ImageVerdict> verdicts;
    for (const auto& v : read_json(p)) verdicts.push_back(verdict_from_json(v));
    auto m = stage("eval", [&] { return evaluate_run(config_.category, run, config_.seed_for_run(run), verdicts); });

    if (config_.annotations) {
        // Model answer for (image, Main-Q) is Yes when the vote passed.
        std::map<std::pair<std::string, int>, std::pair<int, Label>> model;
        for (const auto& v : verdicts)
            for (const auto& vote : v.votes) model[{v.image_id, vote.main_index}] = {vote.vote, v.label.value_or(Label::normal)};
        std::vector<int> mn, an, ma, aa;
        for (const auto& a : read_json(*config_.annotations)) {
            auto it = model.find({a.at("image_id").get<std::string>(), a.at("main_index").get<int>()});
            if (it == model.end()) continue;
            const int human = a.at("answer").get<std::string>() == "Yes" ? 0 : 1;
            if (it->second.second == Label::anomaly) {
                ma.push_back(it->second.first);
                aa.push_back(human);
            } else {
                mn.push_back(it->second.first);
                an.push_back(human);
            }
        }
        AgreementStats st;
        st.n_normal_pairs = mn.size();
        st.n_anomaly_pairs = ma.size();
        if (!mn.empty()) st.normal = agreement(mn, an);
        if (!ma.empty()) st.anomaly = agreement(ma, aa);
        m.agreement = st;
    }
    write_json(run_dir(run) / "report.json", to_json(m));
    return m;
}

EvalReport Pipeline::evaluate_all() {
    std::vector<RunMetrics> runs;
    for (int r = 1; r <= config_.runs; ++r) runs.push_back(evaluate(r));
    auto report = aggregate_runs(runs);
    write_json(config_.out_dir / "report.json", to_json(report));
    write_file_atomic(config_.out_dir / "report.csv", report_csv(report));
    return report;
}

EvalReport Pipeline::run_all() {
    for (int r = 1; r <= config_.runs; ++r) {
        synth(r);
        infer(r);
    }
    return evaluate_all();
}

}  // namespace logicqa
