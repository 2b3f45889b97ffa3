// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "logicqa/inference.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "logicqa/error.hpp"
#include "logicqa/parallel.hpp"

namespace logicqa {

const char* to_string(Answer a) {
    switch (a) {
        case Answer::yes: return "Yes";
        case Answer::no: return "No";
        case Answer::unparsed: return "Unparsed";
    }
    return "?";
}

const char* to_string(Verdict v) { return v == Verdict::anomaly ? "Anomaly" : "Normal"; }

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

/// Character range of the decision word after the last "- Result:" marker.
std::optional<std::pair<std::size_t, std::size_t>> locate_decision(const std::string& text) {
    static constexpr std::string_view kw = "result:";
    const auto lc = lower(text);
    auto pos = lc.rfind(kw);
    while (pos != std::string::npos) {
        std::size_t k = pos;
        while (k > 0 && (lc[k - 1] == ' ' || lc[k - 1] == '\t' || lc[k - 1] == '*' || lc[k - 1] == '`')) --k;
        if (k > 0 && lc[k - 1] == '-') break;
        if (pos == 0) return std::nullopt;
        pos = lc.rfind(kw, pos - 1);
    }
    if (pos == std::string::npos) return std::nullopt;
    std::size_t a = pos + kw.size();
    while (a < text.size() && !is_alpha(text[a])) ++a;
    std::size_t b = a;
    while (b < text.size() && is_alpha(text[b])) ++b;
    if (a == b) return std::nullopt;
    return std::make_pair(a, b);
}

Answer word_to_answer(std::string_view w) {
    const auto lw = lower(w);
    if (lw == "yes") return Answer::yes;
    if (lw == "no") return Answer::no;
    return Answer::unparsed;
}

}  // namespace

Answer parse_result(const std::string& text) {
    auto range = locate_decision(text);
    if (!range) return Answer::unparsed;
    return word_to_answer(std::string_view(text).substr(range->first, range->second - range->first));
}

AnswerLogprob answer_logprob(const ChatResponse& response, Answer parsed) {
    if (parsed == Answer::unparsed) throw Error(ErrorKind::validation, "answer_logprob needs a Yes/No answer");
    if (response.tokens.empty()) return {0.0, true};

    std::string joined;
    std::vector<std::size_t> starts;
    starts.reserve(response.tokens.size());
    for (const auto& t : response.tokens) {
        starts.push_back(joined.size());
        joined += t.text;
    }
    auto range = locate_decision(joined);
    if (!range || word_to_answer(std::string_view(joined).substr(range->first, range->second - range->first)) != parsed)
        throw Error(ErrorKind::parse, "logprob missing: decision tokens not found after the final '- Result:' marker");

    double sum = 0.0;
    for (std::size_t k = 0; k < response.tokens.size(); ++k) {
        const std::size_t a = starts[k];
        const std::size_t b = a + response.tokens[k].text.size();
        if (a < range->second && b > range->first) sum += response.tokens[k].logprob;
    }
    return {sum, false};
}

MainVote vote_main(std::span<const SubAnswer> answers) {
    MainVote v;
    if (!answers.empty()) v.main_index = answers.front().main_index;
    for (const auto& a : answers) {
        if (a.main_index != v.main_index)
            throw Error(ErrorKind::validation, "vote_main: answers belong to different Main-Qs");
        switch (a.parsed) {
            case Answer::yes: ++v.yes_count; break;
            case Answer::no: ++v.no_count; break;
            case Answer::unparsed: ++v.unparsed_count; break;
        }
    }
    if (v.yes_count + v.no_count == 0)
        throw Error(ErrorKind::undefined, "vote undefined: no parseable answer for Main-Q " + std::to_string(v.main_index));

    v.vote = v.no_count < v.yes_count ? 0 : 1;
    const Answer agreeing = v.vote == 0 ? Answer::yes : Answer::no;
    bool have_s = false;
    for (const auto& a : answers) {
        if (a.parsed != agreeing) continue;
        v.contributing.push_back(a.sub_index);
        if (!a.logprob) continue;
        if (!have_s || *a.logprob > v.s) v.s = *a.logprob;
        have_s = true;
    }
    if (!have_s) v.s = std::numeric_limits<double>::quiet_NaN();
    return v;
}

Verdict decide(std::span<const MainVote> votes) {
    if (votes.empty()) throw Error(ErrorKind::undefined, "decide needs at least one Main-Q vote");
    int total = 0;
    for (const auto& v : votes) total += v.vote;
    return total == 0 ? Verdict::normal : Verdict::anomaly;
}

double median(std::vector<double> values) {
    if (values.empty()) throw Error(ErrorKind::undefined, "median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

double anomaly_score(std::span<const MainVote> votes, Verdict verdict) {
    if (votes.empty()) throw Error(ErrorKind::undefined, "score undefined: no votes");
    std::vector<double> s;
    s.reserve(votes.size());
    for (const auto& v : votes) {
        if (std::isnan(v.s) || v.s > 0.0)
            throw Error(ErrorKind::undefined, "score undefined: Main-Q " + std::to_string(v.main_index) +
                                                  " has no valid log-probability");
        s.push_back(std::exp(v.s));
    }
    const double m = median(std::move(s));
    return verdict == Verdict::normal ? 1.0 - m : m;
}

SubAnswer ask_question(const QueryContext& ctx, const std::string& question, const std::string& class_name,
                       const std::string& class_key, const std::string& image_id,
                       const std::filesystem::path& image_path) {
    const auto prompt = render_test(question, class_name, ctx.templates);
    SubAnswer out;
    const int max_attempts = ctx.retry_unparsed ? 2 : 1;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        auto resp = ctx.backend.query(ctx.make_request(prompt, image_path, {"test", class_key, image_id, question}, attempt));
        out.attempts = attempt + 1;
        out.raw_text = resp.content;
        out.parsed = parse_result(resp.content);
        if (out.parsed == Answer::unparsed) continue;
        try {
            auto lp = answer_logprob(resp, out.parsed);
            out.logprob = lp.value;
            out.degraded = lp.degraded;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::parse) throw;
            out.logprob = 0.0;
            out.degraded = true;
        }
        break;
    }
    return out;
}

ImageVerdict assemble_verdict(const QuestionSet& qs, const std::string& class_key, std::string image_id,
                              std::vector<SubAnswer> answers) {
    ImageVerdict v;
    v.image_id = std::move(image_id);
    v.question_set = class_key;
    std::sort(answers.begin(), answers.end(), [](const SubAnswer& a, const SubAnswer& b) {
        return std::tie(a.main_index, a.sub_index) < std::tie(b.main_index, b.sub_index);
    });
    for (const auto& a : answers) v.degraded = v.degraded || a.degraded;

    for (const auto& q : qs.main_questions) {
        std::vector<SubAnswer> mine;
        for (const auto& a : answers)
            if (a.main_index == q.index) mine.push_back(a);
        try {
            v.votes.push_back(vote_main(mine));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::undefined) throw;
            v.indeterminate = true;
            v.warnings.push_back(e.what());
        }
    }
    v.answers = std::move(answers);

    v.verdict = v.votes.empty() ? Verdict::normal : decide(v.votes);
    for (const auto& vote : v.votes) {
        if (vote.vote == 1) v.rationale.push_back(qs.main_questions[static_cast<std::size_t>(vote.main_index - 1)].text);
        v.score_components.push_back(std::isnan(vote.s) ? 0.0 : std::exp(vote.s));
    }
    if (v.indeterminate) return v;
    if (v.degraded) {
        v.anomaly_score = v.verdict == Verdict::anomaly ? 1.0 : 0.0;
        v.warnings.push_back("confidence-degraded: backend returned no usable log-probabilities");
    } else {
        v.anomaly_score = anomaly_score(v.votes, v.verdict);
    }
    return v;
}

ImageVerdict combine_crop_verdicts(std::string image_id, std::vector<ImageVerdict> crops) {
    ImageVerdict v;
    v.image_id = std::move(image_id);
    if (crops.empty()) throw Error(ErrorKind::validation, "no crop verdicts for " + v.image_id);
    v.question_set = crops.front().question_set;
    std::optional<double> best;
    for (const auto& c : crops) {
        if (c.verdict == Verdict::anomaly) v.verdict = Verdict::anomaly;
        v.degraded = v.degraded || c.degraded;
        v.indeterminate = v.indeterminate || c.indeterminate;
        for (const auto& r : c.rationale)
            if (std::find(v.rationale.begin(), v.rationale.end(), r) == v.rationale.end()) v.rationale.push_back(r);
        for (const auto& w : c.warnings) v.warnings.push_back(c.image_id + ": " + w);
        if (c.anomaly_score && (!best || *c.anomaly_score > *best)) best = c.anomaly_score;
    }
    if (!v.indeterminate) v.anomaly_score = best;
    v.crops = std::move(crops);
    return v;
}

std::vector<ImageVerdict> infer_images(const QueryContext& ctx, const std::string& class_name,
                                       std::span<const InferenceTarget> targets) {
    struct Task {
        std::size_t target;
        std::size_t view;
        const MainQuestion* main;
        int sub;
    };
    std::vector<Task> tasks;
    for (std::size_t t = 0; t < targets.size(); ++t) {
        if (!targets[t].questions) throw Error(ErrorKind::validation, "no question set for " + targets[t].image_id);
        targets[t].questions->validate();
        for (std::size_t v = 0; v < targets[t].views.size(); ++v)
            for (const auto& q : targets[t].questions->main_questions)
                for (int j = 1; j <= static_cast<int>(kSubQuestionCount); ++j) tasks.push_back({t, v, &q, j});
    }

    auto answers = parallel_map(tasks.size(), ctx.parallelism, [&](std::size_t k) {
        const auto& task = tasks[k];
        const auto& target = targets[task.target];
        const auto& [view_id, view_path] = target.views[task.view];
        auto a = ask_question(ctx, task.main->sub_questions[static_cast<std::size_t>(task.sub - 1)], class_name,
                              target.class_key, view_id, view_path);
        a.main_index = task.main->index;
        a.sub_index = task.sub;
        return a;
    });

    std::vector<ImageVerdict> out;
    out.reserve(targets.size());
    std::size_t cursor = 0;
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const auto& target = targets[t];
        const std::size_t per_view = target.questions->main_questions.size() * kSubQuestionCount;
        std::vector<ImageVerdict> views;
        for (std::size_t v = 0; v < target.views.size(); ++v) {
            std::vector<SubAnswer> mine(answers.begin() + static_cast<std::ptrdiff_t>(cursor),
                                        answers.begin() + static_cast<std::ptrdiff_t>(cursor + per_view));
            cursor += per_view;
            views.push_back(assemble_verdict(*target.questions, target.class_key, target.views[v].first, std::move(mine)));
        }
        ImageVerdict verdict;
        if (views.size() == 1 && target.views.front().first == target.image_id)
            verdict = std::move(views.front());
        else
            verdict = combine_crop_verdicts(target.image_id, std::move(views));
        verdict.label = target.label;
        out.push_back(std::move(verdict));
    }
    return out;
}

ImageVerdict infer_image(const QueryContext& ctx, const QuestionSet& qs, const ClassProfile& profile,
                         const ImageRecord& image) {
    InferenceTarget t;
    t.image_id = image.id;
    t.label = image.label;
    t.questions = &qs;
    t.class_key = profile.class_key(qs.subclass);
    t.views = {{image.id, image.path}};
    auto out = infer_images(ctx, profile.class_name, std::span<const InferenceTarget>(&t, 1));
    return std::move(out.front());
}

nlohmann::json to_json(const ImageVerdict& v) {
    nlohmann::json votes = nlohmann::json::array();
    for (const auto& m : v.votes) {
        votes.push_back({{"index", m.main_index},
                         {"vote", m.vote},
                         {"yes", m.yes_count},
                         {"no", m.no_count},
                         {"unparsed", m.unparsed_count},
                         {"s", std::isnan(m.s) ? nlohmann::json(nullptr) : nlohmann::json(m.s)},
                         {"contributing", m.contributing}});
    }
    nlohmann::json answers = nlohmann::json::array();
    for (const auto& a : v.answers) {
        answers.push_back({{"i", a.main_index},
                           {"j", a.sub_index},
                           {"answer", to_string(a.parsed)},
                           {"logprob", a.logprob ? nlohmann::json(*a.logprob) : nlohmann::json(nullptr)},
                           {"attempts", a.attempts},
                           {"degraded", a.degraded}});
    }
    nlohmann::json j = {
        {"image_id", v.image_id},
        {"label", v.label ? nlohmann::json(to_string(*v.label)) : nlohmann::json(nullptr)},
        {"question_set", v.question_set},
        {"verdict", to_string(v.verdict)},
        {"votes", std::move(votes)},
        {"answers", std::move(answers)},
        {"S", v.score_components},
        {"anomaly_score", v.anomaly_score ? nlohmann::json(*v.anomaly_score) : nlohmann::json(nullptr)},
        {"rationale", v.rationale},
        {"degraded", v.degraded},
        {"indeterminate", v.indeterminate},
        {"warnings", v.warnings},
    };
    if (!v.crops.empty()) {
        nlohmann::json crops = nlohmann::json::array();
        for (const auto& c : v.crops) crops.push_back(to_json(c));
        j["crops"] = std::move(crops);
    }
    return j;
}

ImageVerdict verdict_from_json(const nlohmann::json& j) {
    ImageVerdict v;
    try {
        v.image_id = j.at("image_id").get<std::string>();
        if (j.contains("label") && j["label"].is_string()) v.label = label_from_string(j["label"].get<std::string>());
        v.question_set = j.value("question_set", std::string{});
        v.verdict = j.at("verdict").get<std::string>() == "Anomaly" ? Verdict::anomaly : Verdict::normal;
        for (const auto& m : j.value("votes", nlohmann::json::array())) {
            MainVote mv;
            mv.main_index = m.at("index").get<int>();
            mv.vote = m.at("vote").get<int>();
            mv.yes_count = m.value("yes", 0);
            mv.no_count = m.value("no", 0);
            mv.unparsed_count = m.value("unparsed", 0);
            mv.s = m.contains("s") && m["s"].is_number() ? m["s"].get<double>()
                                                         : std::numeric_limits<double>::quiet_NaN();
            mv.contributing = m.value("contributing", std::vector<int>{});
            v.votes.push_back(std::move(mv));
        }
        for (const auto& a : j.value("answers", nlohmann::json::array())) {
            SubAnswer sa;
            sa.main_index = a.at("i").get<int>();
            sa.sub_index = a.at("j").get<int>();
            const auto word = a.at("answer").get<std::string>();
            sa.parsed = word == "Yes" ? Answer::yes : word == "No" ? Answer::no : Answer::unparsed;
            if (a.contains("logprob") && a["logprob"].is_number()) sa.logprob = a["logprob"].get<double>();
            sa.attempts = a.value("attempts", 1);
            sa.degraded = a.value("degraded", false);
            v.answers.push_back(std::move(sa));
        }
        v.score_components = j.value("S", std::vector<double>{});
        if (j.contains("anomaly_score") && j["anomaly_score"].is_number())
            v.anomaly_score = j["anomaly_score"].get<double>();
        v.rationale = j.value("rationale", std::vector<std::string>{});
        v.degraded = j.value("degraded", false);
        v.indeterminate = j.value("indeterminate", false);
        v.warnings = j.value("warnings", std::vector<std::string>{});
        if (j.contains("crops"))
            for (const auto& c : j["crops"]) v.crops.push_back(verdict_from_json(c));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::validation, std::string("malformed verdict record: ") + e.what());
    }
    return v;
}

}  // namespace logicqa
