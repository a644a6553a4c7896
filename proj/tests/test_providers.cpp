#include <doctest.h>

#include <chrono>
#include <cmath>

#include "adaptcd/formats.hpp"
#include "adaptcd/imaging.hpp"
#include "adaptcd/providers.hpp"
#include "adaptcd/subprocess.hpp"
#include "support.hpp"

using namespace adaptcd;
using namespace adaptcd::providers;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an adaptcd::Error");
    return ErrorKind::Io;
}

// Shell prelude that records the arguments and picks out --task/--out.
std::string adapter_prelude(const fs::path& log) {
    return "echo \"$@\" >> '" + log.string() + "'\n"
           "while [ $# -gt 0 ]; do\n"
           "  case \"$1\" in --out) out=\"$2\"; shift;; --task) task=\"$2\"; shift;; esac\n"
           "  shift\n"
           "done\n";
}

double norm(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("grid segmentation") {
    const MaskSet s = grid_segmentation(64, 64, 32, Phase::A);
    REQUIRE(s.size() == 4);
    DenseMask cover(64, 64);
    for (const auto& m : s) {
        CHECK(m.mask.count() == 1024);
        const DenseMask d = rle_decode(m.mask);
        for (std::size_t i = 0; i < d.size(); ++i) {
            CHECK(cover[i] + d[i] <= 1);
            cover[i] |= d[i];
        }
    }
    for (auto v : cover.values()) CHECK(v == 1);

    const MaskSet odd = grid_segmentation(65, 64, 32, Phase::B);
    REQUIRE(odd.size() == 6);
    CHECK(mask_bbox(odd[4].mask) == BBox{64, 0, 65, 32});
    CHECK(odd[5].mask.count() == 32);
    CHECK(odd[0].source == Phase::B);
    CHECK_THROWS_AS(grid_segmentation(8, 8, 3, Phase::A), Error);
}

TEST_CASE("file segmentation with a phase placeholder") {
    TempDir dir;
    MaskSet s(8, 8);
    s.add(BinaryMask::from_box(8, 8, {0, 0, 4, 4}), Phase::A);
    s.add(BinaryMask::from_box(8, 8, {4, 4, 8, 8}), Phase::A);
    formats::write_file(dir.path() / "seg_b.masks.json", formats::encode_masks_json(s));
    SegmentationProvider p(FileSegmentation{(dir.path() / "seg_{phase}.masks.json").string()});
    const MaskSet got = p.segment(Image(8, 8), Phase::B);
    REQUIRE(got.size() == 2);
    CHECK(got[1].mask == s[1].mask);
    CHECK(got[1].source == Phase::B);
    CHECK(kind_of([&] { p.segment(Image(8, 8), Phase::A); }) == ErrorKind::Io);
    CHECK(kind_of([&] { p.segment(Image(8, 9), Phase::B); }) == ErrorKind::DimensionMismatch);
    CHECK(expand_phase("x_{phase}_{phase}.dfm", Phase::A) == "x_a_a.dfm");
}

TEST_CASE("synthetic features") {
    const DenseFeatureMap flat = synthetic_features(testing::solid(10, 12, 51, 102, 204), 2);
    REQUIRE(flat.channels() == 4);
    for (std::size_t i = 0; i < flat.plane_size(); ++i) {
        CHECK(flat.plane(0)[i] == doctest::Approx(0.2));
        CHECK(flat.plane(2)[i] == doctest::Approx(0.8));
        CHECK(flat.plane(3)[i] == 0.0f);
    }

    const Image img = testing::random_image(15, 11);
    const DenseFeatureMap f = synthetic_features(img, 2);
    CHECK(f == synthetic_features(img, 2));
    for (int r = 0; r < 15; ++r) {
        for (int c = 0; c < 11; ++c) {
            double s = 0;
            for (int dr = -2; dr <= 2; ++dr) {
                for (int dc = -2; dc <= 2; ++dc) {
                    s += img.at(std::clamp(r + dr, 0, 14), std::clamp(c + dc, 0, 10), 1) / 255.0;
                }
            }
            CHECK(f.at(1, r, c) == doctest::Approx(s / 25).epsilon(1e-6));
        }
    }
}

TEST_CASE("synthetic embeddings") {
    const UnitVector red = synthetic_region_embedding(testing::solid(3, 3, 255, 0, 0));
    CHECK(red.components == std::vector<double>{1.0, 0.0, 0.0});
    const UnitVector gray = synthetic_region_embedding(testing::solid(3, 3, 77, 77, 77));
    for (double x : gray.components) CHECK(x == doctest::Approx(1 / std::sqrt(3.0)));
    CHECK(synthetic_region_embedding(testing::solid(2, 2, 0, 0, 0)).degenerate);
    for (int i = 0; i < 100; ++i) {
        const UnitVector v = synthetic_region_embedding(testing::random_image(4, 5));
        if (!v.degenerate) CHECK(std::abs(norm(v.components) - 1.0) < 1e-6);
    }

    EmbeddingProvider p({SyntheticColorEmbeddings{{{"buildings", {0.9, 0.1, 0.1}}}}, 3});
    const UnitVector b = p.embed_text("buildings");
    const double n = std::sqrt(0.83);
    CHECK(b.components[0] == doctest::Approx(0.9 / n));
    CHECK(b.components[1] == doctest::Approx(0.1 / n));
    CHECK(kind_of([&] { p.embed_text("water"); }) == ErrorKind::MissingPrototype);

    CHECK_THROWS_AS(EmbeddingProvider({SyntheticColorEmbeddings{{{"x", {1.5, 0, 0}}}}, 3}), Error);
    CHECK_THROWS_AS(EmbeddingProvider({SyntheticColorEmbeddings{}, 4}), Error);
}

TEST_CASE("file embeddings") {
    TempDir dir;
    formats::EmbeddingManifest m;
    m.dim = 2;
    m.entries["mask:0"] = {3.0f, 4.0f};
    m.entries["text:roofs"] = {0.0f, 2.0f};
    formats::write_file(dir.path() / "e.emb.json", formats::encode_emb_json(m));
    EmbeddingProvider p({FileEmbeddings{(dir.path() / "e.emb.json").string()}, 2});
    CHECK(p.embed_region(Image(1, 1), 0).components == std::vector<double>{0.6, 0.8});
    CHECK(p.embed_text("roofs").components == std::vector<double>{0.0, 1.0});
    CHECK(kind_of([&] { p.embed_region(Image(1, 1), 1); }) == ErrorKind::MissingKey);
    CHECK(kind_of([&] { p.embed_text("water"); }) == ErrorKind::MissingPrototype);

    EmbeddingProvider wrong({FileEmbeddings{(dir.path() / "e.emb.json").string()}, 3});
    CHECK(kind_of([&] { wrong.embed_text("roofs"); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("file features") {
    TempDir dir;
    const auto f = testing::random_features(3, 4, 5);
    formats::write_file(dir.path() / "f_a.dfm", formats::encode_dfm(f));
    FeatureProvider p(FileFeatures{(dir.path() / "f_{phase}.dfm").string()});
    CHECK(p.extract(Image(9, 9), Phase::A) == f);
}

TEST_CASE("subprocess providers follow the protocol") {
    TempDir dir;
    const fs::path log = dir.path() / "calls.log";
    const fs::path tool = dir.path() / "adapter.sh";
    testing::write_script(tool, adapter_prelude(log) +
        "case \"$task\" in\n"
        "  segment) printf '{\"height\":8,\"width\":8,\"instances\":[{\"id\":0,\"rle\":[0,64]}]}' > \"$out\";;\n"
        "  features) printf 'DFM1\\001\\000\\000\\000\\002\\000\\000\\000\\002\\000\\000\\000' > \"$out\"\n"
        "            printf '\\000\\000\\000\\000\\000\\000\\000\\000\\000\\000\\000\\000\\000\\000\\200\\077' >> \"$out\";;\n"
        "  embed) printf '{\"dim\":3,\"entries\":{\"mask:0\":[0,2,0]}}' > \"$out\";;\n"
        "esac\n");

    SegmentationProvider seg(SubprocessSpec{tool.string(), std::chrono::milliseconds(10000)});
    const MaskSet s = seg.segment(Image(8, 8), Phase::B);
    REQUIRE(s.size() == 1);
    CHECK(s[0].mask.count() == 64);

    FeatureProvider feat(SubprocessSpec{tool.string(), std::chrono::milliseconds(10000)});
    const DenseFeatureMap f = feat.extract(Image(8, 8), Phase::A);
    CHECK(f.channels() == 1);
    CHECK(f.at(0, 1, 1) == 1.0f);
    CHECK(f.at(0, 0, 0) == 0.0f);

    EmbeddingProvider emb({SubprocessSpec{tool.string(), std::chrono::milliseconds(10000)}, 3});
    CHECK(emb.embed_region(Image(2, 2, 9), 0).components == std::vector<double>{0.0, 1.0, 0.0});
    CHECK(emb.embed_text("roofs").components == std::vector<double>{0.0, 1.0, 0.0});

    const std::string calls = formats::read_file(log);
    CHECK(calls.find("--task segment --image ") != std::string::npos);
    CHECK(calls.find("--task features --image ") != std::string::npos);
    CHECK(calls.find("--crop 0,0,2,2 --out ") != std::string::npos);
    CHECK(calls.find("--task embed --text roofs --out ") != std::string::npos);
}

TEST_CASE("subprocess failures are all-or-nothing") {
    TempDir dir;
    const fs::path failing = dir.path() / "fail.sh";
    testing::write_script(failing, adapter_prelude(dir.path() / "log") +
        "printf '{\"height\":8,\"width\":8,\"instances\":[]}' > \"$out\"\nexit 3\n");
    SegmentationProvider seg(SubprocessSpec{failing.string(), std::chrono::milliseconds(10000)});
    try {
        seg.segment(Image(8, 8), Phase::A);
        FAIL("expected failure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Provider);
        CHECK(std::string(e.what()).find("exited with code 3") != std::string::npos);
    }

    const fs::path slow = dir.path() / "slow.sh";
    testing::write_script(slow, "sleep 5\n");
    FeatureProvider feat(SubprocessSpec{slow.string(), std::chrono::milliseconds(200)});
    const auto start = std::chrono::steady_clock::now();
    CHECK(kind_of([&] { feat.extract(Image(4, 4), Phase::A); }) == ErrorKind::Provider);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(3));

    const fs::path garbage = dir.path() / "garbage.sh";
    testing::write_script(garbage, adapter_prelude(dir.path() / "log") + "printf 'DFM1' > \"$out\"\n");
    FeatureProvider bad(SubprocessSpec{garbage.string(), std::chrono::milliseconds(10000)});
    CHECK(kind_of([&] { bad.extract(Image(4, 4), Phase::A); }) == ErrorKind::CorruptFeature);

    CHECK_THROWS_AS(SegmentationProvider(SubprocessSpec{"", std::chrono::milliseconds(10)}), Error);
    CHECK_THROWS_AS(SegmentationProvider(SubprocessSpec{"x", std::chrono::milliseconds(0)}), Error);
}

TEST_CASE("run_process") {
    CHECK(run_process({"true"}, std::chrono::milliseconds(5000)).exit_code == 0);
    CHECK(run_process({"false"}, std::chrono::milliseconds(5000)).exit_code == 1);
    CHECK(split_command("  a  b\tc ") == std::vector<std::string>{"a", "b", "c"});
}
