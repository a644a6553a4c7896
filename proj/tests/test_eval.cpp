#include <doctest.h>

#include "adaptcd/eval.hpp"
#include "adaptcd/formats.hpp"
#include "adaptcd/subprocess.hpp"
#include "adaptcd/synth.hpp"
#include "support.hpp"

using namespace adaptcd;
using namespace adaptcd::eval;
namespace fs = std::filesystem;

TEST_CASE("confusion") {
    DenseMask m(4, 4);
    for (std::size_t i = 0; i < 10; ++i) m[i] = 1;
    CHECK(confusion(rle_encode(m), rle_encode(m)) == ConfusionCounts{10, 0, 0, 6});
    DenseMask gt(4, 4);
    for (std::size_t i = 0; i < 5; ++i) gt[i * 3] = 1;
    const ConfusionCounts c = confusion(BinaryMask::empty(4, 4), rle_encode(gt));
    CHECK(c.tp == 0);
    CHECK(c.fn == 5);
    CHECK_THROWS_AS(confusion(BinaryMask::empty(4, 4), BinaryMask::empty(4, 5)), Error);

    for (int i = 0; i < 50; ++i) {
        const DenseMask p = testing::random_grid(16, 16, 0.3), g = testing::random_grid(16, 16, 0.3);
        ConfusionCounts expect;
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (p[k] && g[k]) ++expect.tp;
            else if (p[k]) ++expect.fp;
            else if (g[k]) ++expect.fn;
            else ++expect.tn;
        }
        CHECK(confusion(rle_encode(p), rle_encode(g)) == expect);
        CHECK(expect.total() == 256);
    }
}

TEST_CASE("metrics") {
    CHECK(f1_score(0.6283, 0.7410) == doctest::Approx(0.6800).epsilon(1e-4));
    const Metrics m = metrics({50, 50, 50, 0});
    CHECK(m.precision == 0.5);
    CHECK(m.recall == 0.5);
    CHECK(m.f1 == 0.5);
    CHECK(m.iou == doctest::Approx(1.0 / 3.0));
    const Metrics empty = metrics({0, 0, 0, 16});
    CHECK(empty.precision == 0.0);
    CHECK(empty.f1 == 0.0);
    CHECK(empty.iou == 1.0);

    for (int i = 0; i < 100; ++i) {
        const ConfusionCounts c{testing::uniform(0, 50), testing::uniform(0, 50), testing::uniform(0, 50), 0};
        const Metrics a = metrics(c), b = metrics({c.tp, c.fn, c.fp, 0});
        CHECK(a.precision == b.recall);
        CHECK(a.f1 == doctest::Approx(b.f1));
        if (c.tp + c.fp + c.fn > 0) {
            CHECK(a.f1 >= a.iou - 1e-15);
            CHECK(a.iou == doctest::Approx(a.f1 / (2 - a.f1)));
        }
    }
    const DenseMask m2 = testing::random_grid(8, 8, 0.5);
    const Metrics same = metrics(confusion(rle_encode(m2), rle_encode(m2)));
    CHECK(same.f1 == 1.0);
    CHECK(same.iou == 1.0);
}

TEST_CASE("manifest parsing") {
    const DatasetManifest m = parse_manifest(R"([{"image_a":"a.png","image_b":"b.png","gt":"g.png"}])", "/d");
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.pairs[0].id == "pair-000");
    CHECK(m.pairs[0].image_a == fs::path("/d/a.png"));
    CHECK_FALSE(m.prompts);

    const DatasetManifest o = parse_manifest(R"({"prompts":"p.json","pairs":[{"id":"x","image_a":"a","image_b":"b","gt":"/g"}]})", "/d");
    CHECK(*o.prompts == fs::path("/d/p.json"));
    CHECK(o.pairs[0].ground_truth == fs::path("/g"));

    CHECK_THROWS_AS(parse_manifest("[]"), Error);
    CHECK_THROWS_AS(parse_manifest(R"([{"image_a":"a","image_b":"a","gt":"g"}])"), Error);
    CHECK_THROWS_AS(parse_manifest(R"([{"image_a":"a","image_b":"b"}])"), Error);
    CHECK_THROWS_AS(parse_manifest(R"([{"image_a":"a","image_b":"b","gt":"g","extra":1}])"), Error);
    CHECK_THROWS_AS(parse_manifest(R"([{"id":"x","image_a":"a","image_b":"b","gt":"g"},{"id":"x","image_a":"c","image_b":"d","gt":"e"}])"), Error);
}

TEST_CASE("dataset evaluation aggregates and records failures") {
    TempDir dir;
    synth::FixtureOptions o;
    o.kind = synth::SceneKind::Mixed;
    o.seed = 11;
    o.pairs = 3;
    const fs::path manifest_path = synth::write_fixture(o, dir.path());
    const PipelineConfig config = load_config(dir.path() / "config.json");

    DatasetManifest m = load_manifest(manifest_path);
    const DatasetReport ok = evaluate_dataset(m, config, 2);
    CHECK(ok.failures == 0);
    REQUIRE(ok.micro);
    CHECK(ok.micro->f1 == 1.0);
    CHECK(ok.macro->f1 == 1.0);

    DatasetManifest single = m;
    single.pairs.resize(1);
    const DatasetReport one = evaluate_dataset(single, config, 1);
    CHECK(one.micro->f1 == one.pairs[0].metrics->f1);
    CHECK(one.macro->iou == one.pairs[0].metrics->iou);

    m.pairs[1].ground_truth = dir.path() / "missing.png";
    const DatasetReport partial = evaluate_dataset(m, config, 3);
    CHECK(partial.failures == 1);
    CHECK(partial.pairs[0].ok());
    CHECK_FALSE(partial.pairs[1].ok());
    CHECK(partial.pairs[2].ok());
    CHECK(report_json(partial).find("\"failed\"") != std::string::npos);
    CHECK(report_table(partial).find("FAILED " + partial.pairs[1].id) != std::string::npos);

    CHECK(report_json(evaluate_dataset(load_manifest(manifest_path), config, 1)) == report_json(ok));
}

TEST_CASE("micro and macro differ as specified") {
    DatasetReport r;
    ConfusionCounts a{10, 0, 0, 0}, b{0, 10, 10, 0};
    ConfusionCounts sum = a;
    sum += b;
    CHECK(metrics(sum).precision == 0.5);
    CHECK((metrics(a).precision + metrics(b).precision) / 2 == 0.5);
    CHECK(metrics(sum).recall == 0.5);
}

TEST_CASE("ground truth from a single-instance mask manifest") {
    TempDir dir;
    MaskSet s(4, 4);
    s.add(BinaryMask::from_box(4, 4, {0, 0, 2, 2}), Phase::A);
    formats::write_file(dir.path() / "gt.masks.json", formats::encode_masks_json(s));
    CHECK(load_ground_truth(dir.path() / "gt.masks.json") == s[0].mask);
    s.add(BinaryMask::full(4, 4), Phase::A);
    formats::write_file(dir.path() / "two.masks.json", formats::encode_masks_json(s));
    CHECK_THROWS_AS(load_ground_truth(dir.path() / "two.masks.json"), Error);
}

TEST_CASE("report table layout") {
    DatasetReport r;
    PairResult p;
    p.id = "p1";
    p.counts = ConfusionCounts{6283, 3717, 2196, 0};
    p.metrics = metrics(*p.counts);
    r.pairs.push_back(p);
    r.micro = r.macro = p.metrics;
    const std::string t = report_table(r);
    CHECK(t.rfind("pair        ", 0) == 0);
    CHECK(t.find("Prec     Rec      F1     IoU") != std::string::npos);
    CHECK(t.find("p1" + std::string(15, ' ') + "62.83   74.10") != std::string::npos);
}
