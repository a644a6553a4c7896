#pragma once

#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "adaptcd/act.hpp"
#include "adaptcd/formats.hpp"
#include "adaptcd/image.hpp"
#include "adaptcd/mask.hpp"
#include "adaptcd/providers.hpp"

namespace adaptcd::identify {

using formats::Prompts;

struct AcfConfig {
    double percentile = 25.0;       // (0, 100]
    double lambda = 1.2;            // filtering intensity, > 0
    double clip_lo = 0.5;
    double clip_hi = 0.95;
    double mu_min = 0.5;            // region mean-confidence floor
    double gamma = 0.5;             // coefficient-of-variation ceiling
    std::size_t a_min = 64;         // minimum region area in pixels
    double crop_pad_fraction = 0.1;
    double softmax_temperature = 100.0;

    void validate() const;
};

struct RegionClassification {
    std::size_t mask_id = 0;
    double sim_target = 0.0;
    double sim_background = 0.0;
    double p_target = 0.0;
    bool degenerate = false;  // region embedding had zero norm; p_target forced to 0
};

struct RegionStats {
    std::size_t label = 0;
    std::size_t area = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double cv = 0.0;  // +inf when mean == 0
    bool reliable = false;
};

struct ChangeMask {
    BinaryMask mask;
    Grid<double> confidence;         // per-pixel max p over accepted masks
    std::vector<RegionStats> regions;
};

// Bounding box grown by max(4, round(pad_fraction * max(h, w))) per side, clamped.
BBox crop_box(const BinaryMask& mask, double pad_fraction);
Image crop_region(const Image& image, const BinaryMask& mask, const AcfConfig& config);

// Two-way softmax with temperature, evaluated as a logistic for stability.
double target_probability(double sim_target, double sim_background, double temperature);

RegionClassification classify_region(const Image& crop, std::size_t mask_id,
                                     const providers::UnitVector& target,
                                     const providers::UnitVector& background,
                                     providers::EmbeddingProvider& provider,
                                     const AcfConfig& config);

// Percentile with linear interpolation between closest ranks (input need not be sorted).
double percentile(std::vector<double> values, double p);

// nullopt when there are no positives.
std::optional<double> adaptive_conf_threshold(std::span<const double> positives,
                                              const AcfConfig& config);

bool region_reliable(const RegionStats& stats, const AcfConfig& config);

ChangeMask connected_filter(const std::vector<std::pair<BinaryMask, double>>& accepted,
                            std::size_t height, std::size_t width, const AcfConfig& config);

struct IdentifyResult {
    std::vector<RegionClassification> classifications;  // candidate order
    std::optional<double> tau_conf;
    std::vector<std::size_t> accepted_ids;
    ChangeMask change;
};

// Classifies candidates on crops of `image_b`, derives the confidence cut and applies the
// region filter. With `filtering` off, the mask is the union of candidates with p > 0.5.
IdentifyResult identify(const act::CandidateSet& candidates, const Image& image_b,
                        const MaskSet& masks, const Prompts& prompts,
                        providers::EmbeddingProvider& provider, const AcfConfig& config,
                        bool filtering = true);

}  // namespace adaptcd::identify
