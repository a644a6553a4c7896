#include <doctest.h>

#include <cmath>

#include "adaptcd/ara.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace adaptcd;
using namespace adaptcd::ara;

namespace {

Image shifted(const Image& img, int delta) {
    Image out = img;
    for (auto& v : out.data()) v = static_cast<std::uint8_t>(std::clamp(static_cast<int>(v) + delta, 0, 255));
    return out;
}

// min{u : CDF_ref(u) >= CDF_src(v)} by a fresh linear scan per v.
std::uint8_t transfer_oracle(const Image& src, const Image& ref, std::size_t ch, std::size_t v) {
    std::uint64_t src_le = 0;
    for (std::size_t i = 0; i < src.pixel_count(); ++i) src_le += src.data()[i * 3 + ch] <= v;
    for (std::size_t u = 0; u < 256; ++u) {
        std::uint64_t ref_le = 0;
        for (std::size_t i = 0; i < ref.pixel_count(); ++i) ref_le += ref.data()[i * 3 + ch] <= u;
        if (ref_le * src.pixel_count() >= src_le * ref.pixel_count()) return static_cast<std::uint8_t>(u);
    }
    return 255;
}

}  // namespace

TEST_CASE("compute_cdf") {
    const ImageCdf flat = compute_cdf(testing::solid(4, 4, 100, 100, 100));
    CHECK(flat[0](99) == 0.0);
    CHECK(flat[0](100) == 1.0);
    CHECK(flat[2](255) == 1.0);

    Image two(1, 2);
    two.at(0, 1, 0) = 255;
    const ImageCdf t = compute_cdf(two);
    CHECK(t[0](0) == 0.5);
    CHECK(t[0](254) == 0.5);
    CHECK(t[0](255) == 1.0);

    const Image img = testing::random_image(17, 23);
    const ImageCdf c = compute_cdf(img);
    for (std::size_t ch = 0; ch < 3; ++ch) {
        for (std::size_t v = 0; v < 256; v += 17) {
            std::uint64_t n = 0;
            for (std::size_t i = 0; i < img.pixel_count(); ++i) n += img.data()[i * 3 + ch] <= v;
            CHECK(c[ch].cumulative[v] == n);
        }
        CHECK(c[ch](255) == 1.0);
    }
}

TEST_CASE("radiometric_transfer follows the minimal-quantile definition") {
    const Image out = radiometric_transfer(testing::solid(8, 8, 50, 50, 50), testing::solid(8, 8, 200, 200, 200));
    for (auto v : out.data()) CHECK(v == 200);

    for (int trial = 0; trial < 5; ++trial) {
        const Image src = testing::random_image(12, 9, 20, 120);
        const Image ref = testing::random_image(7, 9, 60, 250);
        const TransferLut lut = transfer_lut(src, ref);
        for (std::size_t ch = 0; ch < 3; ++ch) {
            for (std::size_t v = 0; v < 256; v += 5) CHECK(lut[ch][v] == transfer_oracle(src, ref, ch, v));
        }
    }
    CHECK_THROWS_AS(radiometric_transfer(testing::random_image(3, 3), testing::random_image(3, 4)), Error);
}

TEST_CASE("transfer of a self-reference preserves the histogram") {
    const Image img = testing::random_image(20, 20);
    const Image out = radiometric_transfer(img, img);
    for (std::size_t ch = 0; ch < 3; ++ch) CHECK(oracle::ks_distance(out, img, ch) == 0.0);
}

TEST_CASE("transfer of a shifted image recovers the reference histogram") {
    const Image ref = testing::random_image(32, 32, 0, 200);
    const Image src = shifted(ref, 30);
    const Image out = radiometric_transfer(src, ref);
    for (std::size_t ch = 0; ch < 3; ++ch) CHECK(oracle::ks_distance(out, ref, ch) == 0.0);
    CHECK(out == ref);
}

TEST_CASE("adaptive_mix") {
    const Image same = testing::random_image(5, 5);
    const AraResult id = adaptive_mix(same, same, AraConfig{});
    CHECK(id.delta_max == 0.0);
    CHECK(id.alpha == 1.0);
    CHECK(id.aligned == same);

    Image t = testing::solid(2, 2, 100, 100, 100), o = t;
    t.at(0, 0, 0) = 200;
    const AraResult half = adaptive_mix(t, o, AraConfig{50.0 / 255.0});
    CHECK(half.alpha == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(half.aligned.at(0, 0, 0) == 150);
    CHECK(half.aligned.at(1, 1, 0) == 100);

    for (int trial = 0; trial < 50; ++trial) {
        const Image a = testing::random_image(9, 11), b = testing::random_image(9, 11);
        const AraConfig cfg{testing::real(0.01, 1.0)};
        const AraResult r = adaptive_mix(a, b, cfg);
        if (r.alpha < 1.0) CHECK(r.alpha * r.delta_max <= cfg.tau_max + 1e-15);
        if (r.delta_max <= cfg.tau_max) CHECK(r.aligned == a);
        for (std::size_t i = 0; i < a.data().size(); ++i) {
            CHECK(r.aligned.data()[i] >= std::min(a.data()[i], b.data()[i]));
            CHECK(r.aligned.data()[i] <= std::max(a.data()[i], b.data()[i]));
        }
    }
    CHECK_THROWS_AS(adaptive_mix(same, same, AraConfig{0.0}), Error);
    CHECK_THROWS_AS(adaptive_mix(same, testing::random_image(5, 6), AraConfig{}), Error);
}

TEST_CASE("align") {
    const Image img = testing::random_image(16, 16);
    CHECK(align(img, img, AraConfig{}).aligned == img);

    const Image a = testing::random_image(32, 32, 20, 200);
    const Image b = shifted(a, 40);
    const AraResult r = align(a, b, AraConfig{});
    for (std::size_t ch = 0; ch < 3; ++ch) {
        CHECK(oracle::ks_distance(r.aligned, a, ch) < oracle::ks_distance(b, a, ch));
    }

    const Image dark = testing::random_image(16, 16, 0, 40);
    const Image bright = testing::random_image(16, 16, 215, 255);
    const AraResult small = align(dark, bright, AraConfig{0.05});
    CHECK(small.alpha < 0.1);
    int to_orig = 0, to_trans = 0;
    for (std::size_t i = 0; i < bright.data().size(); ++i) {
        to_orig = std::max(to_orig, std::abs(small.aligned.data()[i] - bright.data()[i]));
        to_trans = std::max(to_trans, std::abs(small.aligned.data()[i] - small.transferred.data()[i]));
    }
    CHECK(to_orig < to_trans);
}

TEST_CASE("equal source intensities map to equal outputs") {
    const Image a = testing::random_image(20, 20), b = testing::random_image(20, 20);
    const AraResult r = align(a, b, AraConfig{0.1});
    for (std::size_t ch = 0; ch < 3; ++ch) {
        std::array<int, 256> seen;
        seen.fill(-1);
        for (std::size_t i = 0; i < b.pixel_count(); ++i) {
            const auto v = b.data()[i * 3 + ch];
            const int out = r.aligned.data()[i * 3 + ch];
            if (seen[v] < 0) seen[v] = out;
            CHECK(seen[v] == out);
        }
    }
}
