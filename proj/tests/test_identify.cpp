#include <doctest.h>

#include <cmath>

#include "adaptcd/identify.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace adaptcd;
using namespace adaptcd::identify;

namespace {

providers::EmbeddingProvider color_provider() {
    return providers::EmbeddingProvider(
        {providers::SyntheticColorEmbeddings{{{"roof", {0.9, 0.1, 0.1}}, {"ground", {0.5, 0.5, 0.5}}}}, 3});
}

const Prompts kPrompts{"roof", "ground"};

act::CandidateSet all_of(const MaskSet& masks) {
    act::CandidateSet c;
    for (std::size_t i = 0; i < masks.size(); ++i) {
        act::RegionScore s;
        s.mask_id = i;
        c.members.push_back(s);
    }
    return c;
}

}  // namespace

TEST_CASE("crop_box pads and clamps") {
    const BinaryMask m = BinaryMask::from_box(100, 100, {10, 10, 20, 20});
    CHECK(crop_box(m, 0.1) == BBox{6, 6, 24, 24});
    CHECK(crop_box(BinaryMask::from_box(100, 100, {0, 0, 5, 5}), 0.1) == BBox{0, 0, 9, 9});
    CHECK(crop_box(BinaryMask::full(30, 40), 0.1) == BBox{0, 0, 30, 40});
    CHECK(crop_box(BinaryMask::from_box(200, 200, {50, 50, 150, 110}), 0.1) == BBox{40, 40, 160, 120});
    CHECK_THROWS_AS(crop_box(BinaryMask::empty(10, 10), 0.1), Error);

    const Image img = testing::random_image(100, 100);
    const Image c = crop_region(img, m, AcfConfig{});
    CHECK(c.height() == 18);
    CHECK(c.at(0, 0, 2) == img.at(6, 6, 2));
}

TEST_CASE("target_probability") {
    for (double t : {0.5, 1.0, 100.0}) CHECK(target_probability(0.3, 0.3, t) == 0.5);
    CHECK(target_probability(0.8, 0.2, 1.0) == doctest::Approx(std::exp(0.8) / (std::exp(0.8) + std::exp(0.2))).epsilon(1e-12));
    CHECK(target_probability(0.8, 0.2, 1.0) == doctest::Approx(0.6457).epsilon(1e-4));
    CHECK(1.0 - target_probability(0.8, 0.2, 100.0) < 1e-20);
    for (int i = 0; i < 200; ++i) {
        const double a = testing::real(-1, 1), b = testing::real(-1, 1), t = testing::real(0.1, 200);
        CHECK(std::abs(target_probability(a, b, t) + target_probability(b, a, t) - 1.0) < 1e-12);
        CHECK((target_probability(a, b, t) > 0.5) == (a > b));
    }
}

TEST_CASE("classify_region") {
    auto provider = color_provider();
    const auto target = provider.embed_text("roof");
    const auto background = provider.embed_text("ground");
    const AcfConfig cfg;
    const RegionClassification red = classify_region(testing::solid(4, 4, 230, 26, 26), 3, target, background, provider, cfg);
    CHECK(red.mask_id == 3);
    CHECK(red.p_target > 0.99);
    const RegionClassification gray = classify_region(testing::solid(4, 4, 128, 128, 128), 0, target, background, provider, cfg);
    CHECK(gray.p_target < 0.01);
    const RegionClassification black = classify_region(testing::solid(4, 4, 0, 0, 0), 0, target, background, provider, cfg);
    CHECK(black.degenerate);
    CHECK(black.p_target == 0.0);
}

TEST_CASE("percentile and adaptive_conf_threshold") {
    CHECK(percentile({0.6, 0.7, 0.8, 0.9}, 25) == doctest::Approx(0.675).epsilon(1e-15));
    CHECK(percentile({0.9, 0.6, 0.8, 0.7}, 100) == 0.9);
    CHECK_THROWS_AS(percentile({}, 50), Error);

    const AcfConfig cfg;
    CHECK(adaptive_conf_threshold(std::vector<double>{0.6}, cfg) == doctest::Approx(0.5));
    CHECK(*adaptive_conf_threshold(std::vector<double>{0.6, 0.7, 0.8, 0.9}, cfg) == doctest::Approx(0.5625).epsilon(1e-12));
    CHECK_FALSE(adaptive_conf_threshold(std::vector<double>{}, cfg));
    AcfConfig huge = cfg;
    huge.lambda = 1e12;
    CHECK(*adaptive_conf_threshold(std::vector<double>{0.99, 0.98}, huge) == cfg.clip_lo);

    for (int i = 0; i < 200; ++i) {
        std::vector<double> v(testing::uniform(1, 30));
        for (auto& x : v) x = testing::real(0.5, 1.0);
        AcfConfig c;
        c.percentile = testing::real(1, 100);
        c.lambda = testing::real(0.5, 3);
        const double expect = std::clamp(oracle::percentile(v, c.percentile) / c.lambda, c.clip_lo, c.clip_hi);
        const double got = *adaptive_conf_threshold(v, c);
        CHECK(std::abs(got - expect) < 1e-9);
        CHECK(got >= c.clip_lo);
        CHECK(got <= c.clip_hi);
    }
}

TEST_CASE("connected_filter gates") {
    const AcfConfig cfg;
    const ChangeMask one = connected_filter({{BinaryMask::from_box(20, 20, {0, 0, 10, 10}), 0.8}}, 20, 20, cfg);
    REQUIRE(one.regions.size() == 1);
    CHECK(one.regions[0].area == 100);
    CHECK(one.regions[0].cv == 0.0);
    CHECK(one.mask.count() == 100);

    const ChangeMask small = connected_filter({{BinaryMask::from_box(20, 20, {0, 0, 2, 5}), 0.9}}, 20, 20, cfg);
    CHECK(small.mask.is_empty());
    CHECK_FALSE(small.regions[0].reliable);

    // 10x10 at 0.6 overlapped by a 10x4 strip at 0.9.
    const BinaryMask a = BinaryMask::from_box(20, 20, {0, 0, 10, 10});
    const BinaryMask b = BinaryMask::from_box(20, 20, {0, 6, 10, 10});
    const ChangeMask both = connected_filter({{a, 0.6}, {b, 0.9}}, 20, 20, cfg);
    REQUIRE(both.regions.size() == 1);
    const double mu = (60 * 0.6 + 40 * 0.9) / 100.0;
    const double sd = std::sqrt((60 * (0.6 - mu) * (0.6 - mu) + 40 * (0.9 - mu) * (0.9 - mu)) / 100.0);
    CHECK(both.regions[0].mean == doctest::Approx(mu).epsilon(1e-12));
    CHECK(both.regions[0].stddev == doctest::Approx(sd).epsilon(1e-12));
    CHECK(both.regions[0].cv == doctest::Approx(sd / mu).epsilon(1e-12));
    CHECK(both.regions[0].reliable == (sd / mu < cfg.gamma));
    CHECK(both.confidence(0, 7) == 0.9);

    AcfConfig strict = cfg;
    strict.gamma = 0.1;
    CHECK(connected_filter({{a, 0.6}, {b, 0.9}}, 20, 20, strict).mask.is_empty());
    AcfConfig low = cfg;
    low.mu_min = 0.9;
    CHECK(connected_filter({{a, 0.6}}, 20, 20, low).mask.is_empty());
}

TEST_CASE("identify on a constructed scene") {
    Image img = testing::solid(64, 64, 128, 128, 128);
    for (std::size_t r = 0; r < 16; ++r) {
        for (std::size_t c = 0; c < 16; ++c) {
            img.at(r, c, 0) = 230;
            img.at(r, c, 1) = img.at(r, c, 2) = 26;
            img.at(r + 32, c + 32, 0) = img.at(r + 32, c + 32, 2) = 40;
            img.at(r + 32, c + 32, 1) = 200;
        }
    }
    MaskSet masks(64, 64);
    masks.add(BinaryMask::from_box(64, 64, {0, 0, 16, 16}), Phase::B);
    masks.add(BinaryMask::from_box(64, 64, {32, 32, 48, 48}), Phase::B);
    auto provider = color_provider();
    AcfConfig cfg;
    cfg.crop_pad_fraction = 0.0;

    const IdentifyResult r = identify::identify(all_of(masks), img, masks, kPrompts, provider, cfg);
    CHECK(r.change.mask == masks[0].mask);
    CHECK(r.accepted_ids == std::vector<std::size_t>{0});
    REQUIRE(r.tau_conf);

    CHECK(identify::identify(act::CandidateSet{}, img, masks, kPrompts, provider, cfg).change.mask.is_empty());

    MaskSet only_green(64, 64);
    only_green.add(masks[1].mask, Phase::B);
    const IdentifyResult none = identify::identify(all_of(only_green), img, only_green, kPrompts, provider, cfg);
    CHECK(none.change.mask.is_empty());
    CHECK_FALSE(none.tau_conf);

    const IdentifyResult plain = identify::identify(all_of(masks), img, masks, kPrompts, provider, cfg, false);
    CHECK(plain.change.mask == masks[0].mask);
    CHECK_FALSE(plain.tau_conf);
}

TEST_CASE("accepted ids never shrink as lambda grows") {
    for (int run = 0; run < 20; ++run) {
        Image img = testing::random_image(48, 48);
        MaskSet masks(48, 48);
        for (std::size_t r = 0; r < 48; r += 12) {
            for (std::size_t c = 0; c < 48; c += 12) masks.add(BinaryMask::from_box(48, 48, {r, c, r + 12, c + 12}), Phase::A);
        }
        auto provider = color_provider();
        std::vector<std::size_t> prev;
        for (double lambda : {0.5, 0.8, 1.0, 1.2, 1.5, 2.0, 4.0}) {
            AcfConfig cfg;
            cfg.lambda = lambda;
            cfg.softmax_temperature = 10;
            const auto ids = identify::identify(all_of(masks), img, masks, kPrompts, provider, cfg).accepted_ids;
            CHECK(std::includes(ids.begin(), ids.end(), prev.begin(), prev.end()));
            prev = ids;
        }
    }
}

TEST_CASE("acf config validation") {
    AcfConfig c;
    c.percentile = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    AcfConfig d;
    d.clip_lo = 0.9;
    d.clip_hi = 0.5;
    CHECK_THROWS_AS(d.validate(), Error);
    AcfConfig e;
    e.softmax_temperature = 0;
    CHECK_THROWS_AS(e.validate(), Error);
}
