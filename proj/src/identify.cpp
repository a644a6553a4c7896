#include "adaptcd/identify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adaptcd/imaging.hpp"

namespace adaptcd::identify {

void AcfConfig::validate() const {
    if (!(percentile > 0.0 && percentile <= 100.0)) {
        fail(ErrorKind::Config, "acf.percentile must be in (0, 100]");
    }
    if (!(lambda > 0.0)) {
        fail(ErrorKind::Config, "acf.lambda must be > 0");
    }
    if (!(clip_lo >= 0.0 && clip_lo <= clip_hi && clip_hi <= 1.0)) {
        fail(ErrorKind::Config, "acf clip bounds must satisfy 0 <= clip_lo <= clip_hi <= 1");
    }
    if (!(mu_min >= 0.0 && mu_min <= 1.0)) {
        fail(ErrorKind::Config, "acf.mu_min must be in [0, 1]");
    }
    if (!(gamma > 0.0)) {
        fail(ErrorKind::Config, "acf.gamma must be > 0");
    }
    if (!(crop_pad_fraction >= 0.0)) {
        fail(ErrorKind::Config, "acf.crop_pad_fraction must be >= 0");
    }
    if (!(softmax_temperature > 0.0)) {
        fail(ErrorKind::Config, "acf.softmax_temperature must be > 0");
    }
}

BBox crop_box(const BinaryMask& mask, double pad_fraction) {
    const BBox box = mask_bbox(mask);
    const auto longest = static_cast<double>(std::max(box.height(), box.width()));
    const auto pad = static_cast<std::size_t>(
        std::max<long>(4, std::lround(pad_fraction * longest)));
    return BBox{
        box.row0 > pad ? box.row0 - pad : 0,
        box.col0 > pad ? box.col0 - pad : 0,
        std::min(mask.height(), box.row1 + pad),
        std::min(mask.width(), box.col1 + pad),
    };
}

Image crop_region(const Image& image, const BinaryMask& mask, const AcfConfig& config) {
    if (image.height() != mask.height() || image.width() != mask.width()) {
        fail(ErrorKind::DimensionMismatch, "crop_region: mask and image frames differ");
    }
    return crop(image, crop_box(mask, config.crop_pad_fraction));
}

double target_probability(double sim_target, double sim_background, double temperature) {
    const double x = temperature * (sim_target - sim_background);
    return 1.0 / (1.0 + std::exp(-x));
}

RegionClassification classify_region(const Image& crop, std::size_t mask_id,
                                     const providers::UnitVector& target,
                                     const providers::UnitVector& background,
                                     providers::EmbeddingProvider& provider,
                                     const AcfConfig& config) {
    RegionClassification out;
    out.mask_id = mask_id;
    const providers::UnitVector region = provider.embed_region(crop, mask_id);
    if (region.degenerate) {
        out.degenerate = true;
        out.p_target = 0.0;
        return out;
    }
    const auto st = act::cosine_similarity(region.components, target.components);
    const auto sb = act::cosine_similarity(region.components, background.components);
    out.sim_target = st.degenerate ? 0.0 : st.value;
    out.sim_background = sb.degenerate ? 0.0 : sb.value;
    out.p_target = target_probability(out.sim_target, out.sim_background, config.softmax_temperature);
    return out;
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) {
        fail(ErrorKind::InvalidArgument, "percentile of an empty set");
    }
    std::sort(values.begin(), values.end());
    const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (rank - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::optional<double> adaptive_conf_threshold(std::span<const double> positives,
                                              const AcfConfig& config) {
    if (positives.empty()) {
        return std::nullopt;
    }
    const double base = percentile({positives.begin(), positives.end()}, config.percentile);
    return std::clamp(base / config.lambda, config.clip_lo, config.clip_hi);
}

bool region_reliable(const RegionStats& s, const AcfConfig& config) {
    return s.area >= config.a_min && s.mean >= config.mu_min && s.cv < config.gamma;
}

ChangeMask connected_filter(const std::vector<std::pair<BinaryMask, double>>& accepted,
                            std::size_t height, std::size_t width, const AcfConfig& config) {
    ChangeMask out;
    out.confidence = Grid<double>(height, width, 0.0);
    DenseMask preliminary(height, width);
    for (const auto& [mask, p] : accepted) {
        if (mask.height() != height || mask.width() != width) {
            fail(ErrorKind::DimensionMismatch, "connected_filter: mask frame differs");
        }
        mask.for_each_span([&](std::size_t start, std::size_t len) {
            for (std::size_t i = start; i < start + len; ++i) {
                preliminary[i] = 1;
                out.confidence[i] = std::max(out.confidence[i], p);
            }
        });
    }

    const ComponentLabeling labeling = connected_components_8(preliminary);
    DenseMask kept(height, width);
    for (const Component& comp : labeling.components) {
        RegionStats s;
        s.label = comp.label;
        s.area = comp.area();
        // Shifted by the first pixel so a uniform region has exactly zero spread.
        const double ref = out.confidence[comp.pixels.front()];
        double sum = 0.0;
        for (std::size_t i : comp.pixels) sum += out.confidence[i] - ref;
        const double shift = sum / static_cast<double>(s.area);
        s.mean = ref + shift;
        double sq = 0.0;
        for (std::size_t i : comp.pixels) {
            const double d = out.confidence[i] - ref - shift;
            sq += d * d;
        }
        s.stddev = std::sqrt(sq / static_cast<double>(s.area));
        s.cv = s.mean > 0.0 ? s.stddev / s.mean : std::numeric_limits<double>::infinity();
        s.reliable = region_reliable(s, config);
        if (s.reliable) {
            for (std::size_t i : comp.pixels) kept[i] = 1;
        }
        out.regions.push_back(s);
    }
    out.mask = rle_encode(kept);
    return out;
}

IdentifyResult identify(const act::CandidateSet& candidates, const Image& image_b,
                        const MaskSet& masks, const Prompts& prompts,
                        providers::EmbeddingProvider& provider, const AcfConfig& config,
                        bool filtering) {
    config.validate();
    prompts.validate();
    if (image_b.height() != masks.height() || image_b.width() != masks.width()) {
        fail(ErrorKind::DimensionMismatch, "identify: image and mask frames differ");
    }
    IdentifyResult out;
    const std::size_t h = masks.height(), w = masks.width();
    if (candidates.members.empty()) {
        out.change.mask = BinaryMask::empty(h, w);
        out.change.confidence = Grid<double>(h, w, 0.0);
        return out;
    }

    const auto target = provider.embed_text(prompts.target);
    const auto background = provider.embed_text(prompts.background);
    std::vector<double> positives;
    for (const auto& cand : candidates.members) {
        if (cand.mask_id >= masks.size()) {
            fail(ErrorKind::InvalidArgument, "candidate id " + std::to_string(cand.mask_id) + " out of range");
        }
        const BinaryMask& m = masks[cand.mask_id].mask;
        const Image region = crop_region(image_b, m, config);
        out.classifications.push_back(classify_region(region, cand.mask_id, target, background, provider, config));
        if (out.classifications.back().p_target > 0.5) {
            positives.push_back(out.classifications.back().p_target);
        }
    }

    double cut = 0.5;
    if (filtering) {
        out.tau_conf = adaptive_conf_threshold(positives, config);
        if (!out.tau_conf) {
            out.change.mask = BinaryMask::empty(h, w);
            out.change.confidence = Grid<double>(h, w, 0.0);
            return out;
        }
        cut = *out.tau_conf;
    }

    std::vector<std::pair<BinaryMask, double>> accepted;
    for (const auto& c : out.classifications) {
        if (c.p_target > cut) {
            out.accepted_ids.push_back(c.mask_id);
            accepted.emplace_back(masks[c.mask_id].mask, c.p_target);
        }
    }

    if (filtering) {
        out.change = connected_filter(accepted, h, w, config);
    } else {
        out.change.confidence = Grid<double>(h, w, 0.0);
        DenseMask merged(h, w);
        for (const auto& [mask, p] : accepted) {
            mask.for_each_span([&](std::size_t start, std::size_t len) {
                for (std::size_t i = start; i < start + len; ++i) {
                    merged[i] = 1;
                    out.change.confidence[i] = std::max(out.change.confidence[i], p);
                }
            });
        }
        out.change.mask = rle_encode(merged);
    }
    return out;
}

}  // namespace adaptcd::identify
