// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdlib>
#include <map>
#include <mutex>
#include <set>
#include <sys/wait.h>

#include "logicqa/error.hpp"
#include "logicqa/pipeline.hpp"
#include "support.hpp"

using namespace logicqa;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

RunConfig mock_config(const fs::path& out, int parallelism = 1) {
    auto c = load_config(testing::mock_fixture_dir() / "config.json");
    c.out_dir = out;
    c.parallelism = parallelism;
    return c;
}

/// Every regular file under `dir`, keyed by relative path.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).generic_string()] = read_text_file(e.path());
    return out;
}

/// Answers a crop view exactly as the mock answers its source image.
class CropForwarder : public Backend {
public:
    explicit CropForwarder(std::shared_ptr<MockBackend> mock) : mock_(std::move(mock)) {}
    ChatResponse query(const ChatRequest& request) override {
        auto r = request;
        const auto hash = r.tag.image_id.find('#');
        if (hash != std::string::npos) {
            std::lock_guard lock(mu_);
            seen_.insert(r.tag.image_id);
            r.tag.image_id.resize(hash);
        }
        return mock_->query(r);
    }
    std::string id() const override { return "crop-forwarder"; }
    std::set<std::string> seen() const {
        std::lock_guard lock(mu_);
        return seen_;
    }

private:
    std::shared_ptr<MockBackend> mock_;
    mutable std::mutex mu_;
    std::set<std::string> seen_;
};

/// The bundled fixture with every filtering answer flipped to No.
json all_no_fixture() {
    auto j = json::parse(read_text_file(testing::mock_fixture_dir() / "fixture.json"));
    for (auto& [k, v] : j["entries"].items()) {
        if (k.rfind("test|breakfast box|train/", 0) != 0) continue;
        auto content = v["content"].get<std::string>();
        if (content.rfind("Yes") == std::string::npos) continue;
        content.replace(content.rfind("Yes"), 3, "No");
        v["content"] = content;
        v["tokens"].back()["token"] = " No";
    }
    return j;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(LOGICQA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("mock run separates the bundled fixture perfectly") {
    testing::TempDir tmp("pipe");
    Pipeline p(mock_config(tmp / "out"));
    auto report = p.run_all();
    REQUIRE(report.runs.size() == 3);
    for (const auto& r : report.runs) {
        CHECK(r.auroc == 1.0);
        CHECK(r.f1_max == 1.0);
        CHECK(r.n_normal == 10);
        CHECK(r.n_anomaly == 10);
        CHECK(r.n_indeterminate == 0);
    }
    CHECK(report.mean_auroc == 1.0);
    CHECK(report.mean_f1_max == 1.0);

    const auto run1 = tmp / "out/run_1";
    for (const char* f : {"selection.json", "descriptions.json", "summary.json", "candidates.json",
                          "filter_report.json", "filter_report.csv", "questions.json", "verdicts.json", "report.json"})
        CHECK_MESSAGE(fs::exists(run1 / f), f);
    CHECK(fs::exists(tmp / "out/report.csv"));
    CHECK(fs::exists(tmp / "out/manifest.json"));

    auto verdicts = json::parse(read_text_file(run1 / "verdicts.json"));
    CHECK(verdicts.size() == 20);
    auto questions = json::parse(read_text_file(run1 / "questions.json"));
    CHECK(questions.at("main_questions").size() == 4);
    for (const auto& v : verdicts) {
        const bool anomalous = v.at("verdict") == "Anomaly";
        CHECK(anomalous == (v.at("label") == "anomaly"));
        CHECK(anomalous == !v.at("rationale").empty());
    }
}

TEST_CASE("outputs are identical across repeats and parallelism") {
    testing::TempDir tmp("pipe_det");
    Pipeline(mock_config(tmp / "a", 1)).run_all();
    Pipeline(mock_config(tmp / "b", 1)).run_all();
    Pipeline(mock_config(tmp / "c", 8)).run_all();
    auto a = snapshot(tmp / "a");
    CHECK(a.size() > 10);
    CHECK(a == snapshot(tmp / "b"));
    CHECK(a == snapshot(tmp / "c"));
}

TEST_CASE("a warm cache answers everything and changes nothing") {
    testing::TempDir tmp("pipe_cache");
    auto cold_cfg = mock_config(tmp / "cold");
    cold_cfg.cache_dir = tmp / "cache";
    Pipeline cold(cold_cfg);
    cold.run_all();
    CHECK(*cold.mock_calls() > 0);

    auto warm_cfg = mock_config(tmp / "warm", 4);
    warm_cfg.cache_dir = tmp / "cache";
    Pipeline warm(warm_cfg);
    warm.run_all();
    CHECK(*warm.mock_calls() == 0);
    CHECK(warm.cache()->misses() == 0);
    CHECK(snapshot(tmp / "cold") == snapshot(tmp / "warm"));
}

TEST_CASE("disabling the filter keeps every candidate") {
    testing::TempDir tmp("pipe_nofilter");
    auto cfg = mock_config(tmp / "out");
    cfg.filter.enabled = false;
    cfg.runs = 1;
    Pipeline p(cfg);
    auto qs = p.synth(1);
    REQUIRE(qs.size() == 1);
    CHECK(qs[0].main_questions.size() == 5);
}

TEST_CASE("a missing fixture entry names the stage") {
    testing::TempDir tmp("pipe_missing");
    Pipeline p(mock_config(tmp / "out"), std::make_shared<MockBackend>());
    try {
        p.synth(1);
        FAIL("synth succeeded without fixtures");
    } catch (const StageError& e) {
        CHECK(e.stage() == "describe");
        CHECK(e.kind() == ErrorKind::fixture_missing);
        CHECK(std::string(e.what()).rfind("[describe]", 0) == 0);
    }
}

TEST_CASE("an empty test split gives an empty verdict file") {
    testing::TempDir tmp("pipe_empty");
    const auto src = testing::mock_fixture_dir() / "breakfast_box/train/good";
    fs::create_directories(tmp / "data/breakfast_box/train/good");
    for (const auto& e : fs::directory_iterator(src)) fs::copy_file(e.path(), tmp / "data/breakfast_box/train/good" / e.path().filename());
    auto cfg = mock_config(tmp / "out");
    cfg.dataset_root = tmp / "data";
    Pipeline p(cfg);
    p.synth(1);
    CHECK(p.infer(1).empty());
    CHECK(json::parse(read_text_file(tmp / "out/run_1/verdicts.json")).empty());
}

TEST_CASE("crop manifests replace the source image with its crops") {
    testing::TempDir tmp("pipe_crops");
    auto base = load_config(testing::mock_fixture_dir() / "config.json");
    json manifests = json::array();
    for (const auto* dir : {"test/good", "test/logical_anomalies"}) {
        for (int k = 0; k < 10; ++k) {
            char id[64];
            std::snprintf(id, sizeof id, "%s/%03d", dir, k);
            const auto img = (base.dataset_root / "breakfast_box" / (std::string(id) + ".png")).string();
            manifests.push_back({{"source_image", id},
                                 {"width", 8},
                                 {"height", 8},
                                 {"entries",
                                  {{{"role", "object_crop"}, {"bounding_box", {0, 0, 4, 8}}, {"output_path", img}},
                                   {{"role", "object_crop"}, {"bounding_box", {4, 0, 4, 8}}, {"output_path", img}},
                                   {{"role", "masked_full"}, {"bounding_box", {0, 0, 8, 8}}, {"output_path", img}}}}});
        }
    }
    testing::write_file(tmp / "crops.json", json{{"manifests", manifests}}.dump());

    auto cfg = mock_config(tmp / "out", 4);
    cfg.runs = 1;
    cfg.preprocess_manifest = tmp / "crops.json";
    auto forwarder = std::make_shared<CropForwarder>(std::make_shared<MockBackend>(cfg.backend.fixture));
    Pipeline p(cfg, forwarder);
    p.synth(1);
    auto verdicts = p.infer(1);
    REQUIRE(verdicts.size() == 20);
    for (const auto& v : verdicts) {
        CHECK(v.crops.size() == 2);
        CHECK(v.verdict == (v.label == Label::anomaly ? Verdict::anomaly : Verdict::normal));
    }
    CHECK(forwarder->seen().count("test/good/000#crop1") == 1);
    CHECK(forwarder->seen().count("test/good/000#crop2") == 1);
    CHECK(forwarder->seen().count("test/good/000#masked") == 0);
    auto m = p.evaluate(1);
    CHECK(m.auroc == 1.0);
}

TEST_CASE("annotation agreement is reported when annotations are given") {
    testing::TempDir tmp("pipe_ann");
    json ann = json::array({{{"image_id", "test/good/000"}, {"main_index", 1}, {"answer", "Yes"}},
                            {{"image_id", "test/good/001"}, {"main_index", 1}, {"answer", "No"}},
                            {{"image_id", "test/logical_anomalies/000"}, {"main_index", 1}, {"answer", "No"}}});
    testing::write_file(tmp / "ann.json", ann.dump());
    auto cfg = mock_config(tmp / "out");
    cfg.runs = 1;
    cfg.annotations = tmp / "ann.json";
    Pipeline p(cfg);
    p.synth(1);
    p.infer(1);
    auto m = p.evaluate(1);
    REQUIRE(m.agreement);
    CHECK(m.agreement->n_normal_pairs == 2);
    CHECK(m.agreement->n_anomaly_pairs == 1);
}

TEST_CASE("CLI exit codes") {
    testing::TempDir tmp("cli");
    const auto fixture_cfg = json::parse(read_text_file(testing::mock_fixture_dir() / "config.json"));
    auto write_cfg = [&](const std::string& name, json j) {
        j["dataset"]["root"] = testing::mock_fixture_dir().string();
        j["profile"] = (testing::source_dir() / "profiles/breakfast_box.json").string();
        if (j["backend"]["fixture"] == "fixture.json")
            j["backend"]["fixture"] = (testing::mock_fixture_dir() / "fixture.json").string();
        j["out_dir"] = (tmp / (name + "_out")).string();
        j["runs"] = 1;
        testing::write_file(tmp / (name + ".json"), j.dump());
        return "--config " + (tmp / (name + ".json")).string();
    };

    CHECK(run_cli("run " + write_cfg("ok", fixture_cfg)) == 0);
    CHECK(run_cli("report " + write_cfg("ok", fixture_cfg)) == 0);
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("frobnicate") == 2);

    auto secret = fixture_cfg;
    secret["backend"]["api_key"] = "sk-test";
    CHECK(run_cli("run " + write_cfg("secret", secret)) == 2);

    auto bad_run = write_cfg("bad_run", fixture_cfg);
    CHECK(run_cli("infer --run 9 " + bad_run) == 2);

    auto no_dataset = fixture_cfg;
    auto no_dataset_arg = write_cfg("no_dataset", no_dataset);
    auto j = json::parse(read_text_file(tmp / "no_dataset.json"));
    j["dataset"]["root"] = (tmp / "nowhere").string();
    testing::write_file(tmp / "no_dataset.json", j.dump());
    CHECK(run_cli("run " + no_dataset_arg) == 3);

    testing::write_file(tmp / "empty_fixture.json", R"({"entries": {}})");
    auto missing = fixture_cfg;
    missing["backend"]["fixture"] = (tmp / "empty_fixture.json").string();
    CHECK(run_cli("synth " + write_cfg("missing", missing)) == 4);

    testing::write_file(tmp / "all_no_fixture.json", all_no_fixture().dump());
    auto all_no = fixture_cfg;
    all_no["backend"]["fixture"] = (tmp / "all_no_fixture.json").string();
    CHECK(run_cli("synth " + write_cfg("all_no", all_no)) == 5);
}

}  // TEST_SUITE
