#include <doctest.h>

#include "adaptcd/config.hpp"
#include "adaptcd/subprocess.hpp"
#include "support.hpp"

using namespace adaptcd;

namespace {

std::string error_of(std::string_view text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("empty document gives the defaults") {
    const PipelineConfig c = parse_config("{}");
    CHECK(c.ara_enabled);
    CHECK(c.ara.tau_max == 0.25);
    CHECK(c.act.w_g == 0.7);
    CHECK(c.act.theta_min == 90.0);
    CHECK(c.act.theta_max == 150.0);
    CHECK_FALSE(c.act.n_min);
    CHECK(c.acf.percentile == 25.0);
    CHECK(c.acf.lambda == 1.2);
    CHECK(c.acf.a_min == 64);
    CHECK(c.acf.softmax_temperature == 100.0);
    CHECK(c.fixed_percentile == 30.0);
    CHECK(std::get<providers::GridSegmentation>(c.segmentation).tile == 32);
}

TEST_CASE("fields are read") {
    const PipelineConfig c = parse_config(R"({
        "ara": {"enabled": false, "tau_max": 0.5},
        "act": {"theta_min": 100, "theta_max": 170, "n_min": 12},
        "acf": {"lambda": 2.0, "a_min": 10},
        "fixed_percentile": 40,
        "providers": {
            "segmentation": {"kind": "file", "path": "seg_{phase}.masks.json"},
            "features": {"kind": "subprocess", "command": "adapter --fast", "timeout_ms": 1500},
            "embedding": {"kind": "synthetic-color", "anchors": {"roofs": [1, 0, 0], "soil": [0.5, 0.5, 0.5]}}
        },
        "prototypes": {"target": "roofs", "background": "soil"}
    })", "/data");
    CHECK_FALSE(c.ara_enabled);
    CHECK(c.ara.tau_max == 0.5);
    CHECK(*c.act.n_min == 12);
    CHECK(c.acf.lambda == 2.0);
    CHECK(c.fixed_percentile == 40.0);
    CHECK(std::get<providers::FileSegmentation>(c.segmentation).path_pattern == "/data/seg_{phase}.masks.json");
    const auto& sub = std::get<providers::SubprocessSpec>(c.features);
    CHECK(sub.command == "adapter --fast");
    CHECK(sub.timeout.count() == 1500);
    CHECK(std::get<providers::SyntheticColorEmbeddings>(c.embedding.kind).anchors.at("roofs")[0] == 1.0);
    CHECK(c.prototypes.background == "soil");
}

TEST_CASE("unknown keys and bad values are rejected") {
    CHECK(error_of(R"({"colour": 1})").find("colour") != std::string::npos);
    CHECK(error_of(R"({"acf": {"lamda": 1}})").find("lamda") != std::string::npos);
    CHECK(error_of(R"({"providers": {"segmentation": {"kind": "synthetic-grid", "tile": 32, "x": 1}}})").find("segmentation.x'") != std::string::npos);
    CHECK_FALSE(error_of(R"({"fixed_percentile": 100})").empty());
    CHECK_FALSE(error_of(R"({"ara": {"tau_max": 0}})").empty());
    CHECK_FALSE(error_of(R"({"act": {"w_g": 0.5}})").empty());
    CHECK_FALSE(error_of(R"({"providers": {"segmentation": {"kind": "synthetic-grid", "tile": 2}}})").empty());
    CHECK_FALSE(error_of(R"({"providers": {"features": {"kind": "magic"}}})").empty());
    CHECK_FALSE(error_of(R"({"acf": {"a_min": -3}})").empty());
    CHECK_FALSE(error_of(R"({"ara": {"enabled": "yes"}})").empty());
    CHECK_FALSE(error_of("[1, 2").empty());
}

TEST_CASE("serialize round trip") {
    PipelineConfig c;
    c.act_enabled = false;
    c.act.n_min = 77;
    c.acf.gamma = 0.25;
    c.embedding = {providers::SyntheticColorEmbeddings{{{"a", {0.1, 0.2, 0.3}}, {"b", {1, 1, 1}}}}, 3};
    c.prototypes = {"a", "b"};
    const std::string once = serialize_config(c);
    const PipelineConfig back = parse_config(once);
    CHECK(serialize_config(back) == once);
    CHECK_FALSE(back.act_enabled);
    CHECK(*back.act.n_min == 77);
}

TEST_CASE("provider flag") {
    TempDir dir;
    adaptcd::formats::write_file(dir.path() / "anchors.json", R"({"roofs": [0.9, 0.1, 0.1], "soil": [0.4, 0.4, 0.3]})");
    adaptcd::formats::write_file(dir.path() / "e.emb.json", R"({"dim": 5, "entries": {}})");

    PipelineConfig c;
    apply_provider_flag(c, "seg=synthetic-grid:16,feat=synthetic:3,emb=synthetic-color:" + (dir.path() / "anchors.json").string());
    CHECK(std::get<providers::GridSegmentation>(c.segmentation).tile == 16);
    CHECK(std::get<providers::SyntheticFeatures>(c.features).blur_radius == 3);
    CHECK(std::get<providers::SyntheticColorEmbeddings>(c.embedding.kind).anchors.size() == 2);

    apply_provider_flag(c, "emb=file:" + (dir.path() / "e.emb.json").string() + ",seg=file:m_{phase}.masks.json");
    CHECK(c.embedding.dim == 5);
    CHECK(std::get<providers::FileSegmentation>(c.segmentation).path_pattern == "m_{phase}.masks.json");
    apply_provider_flag(c, "feat=subprocess:run-model --gpu");
    CHECK(std::get<providers::SubprocessSpec>(c.features).command == "run-model --gpu");

    PipelineConfig d;
    CHECK_THROWS_AS(apply_provider_flag(d, "seg=synthetic-grid:2"), Error);
    CHECK_THROWS_AS(apply_provider_flag(d, "seg=grid"), Error);
    CHECK_THROWS_AS(apply_provider_flag(d, "depth=synthetic:1"), Error);
    CHECK_THROWS_AS(apply_provider_flag(d, "seg=synthetic-grid:8,seg=synthetic-grid:16"), Error);
    CHECK_THROWS_AS(apply_provider_flag(d, "feat=synthetic:x"), Error);
}

TEST_CASE("anchor files and pair placeholders") {
    TempDir dir;
    adaptcd::formats::write_file(dir.path() / "anchors.json", R"({"roofs": [0.9, 0.1]})");
    CHECK_THROWS_AS(load_anchor_table(dir.path() / "anchors.json"), Error);

    adaptcd::formats::write_file(dir.path() / "cfg.json",
        R"({"providers": {"segmentation": {"kind": "file", "path": "pairs/{pair}/seg_{phase}.masks.json"}}})");
    const PipelineConfig c = load_config(dir.path() / "cfg.json");
    const PipelineConfig p = with_pair_id(c, "p7");
    CHECK(std::get<providers::FileSegmentation>(p.segmentation).path_pattern ==
          (dir.path() / "pairs/p7/seg_{phase}.masks.json").string());
}
