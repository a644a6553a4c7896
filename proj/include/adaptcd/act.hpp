#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "adaptcd/features.hpp"
#include "adaptcd/image.hpp"
#include "adaptcd/mask.hpp"

namespace adaptcd::act {

inline constexpr std::size_t kOtsuBins = 256;

using Histogram = std::array<std::uint64_t, kOtsuBins>;

struct OtsuResult {
    double threshold = 0.0;   // center of the first upper-class bin
    std::size_t cut_bin = 0;  // first bin of the upper class; 0 when degenerate
    bool degenerate = false;  // fewer than two occupied bins
};

// Bin index of a sample in [0, 1]: min(255, floor(v * 256)).
std::size_t otsu_bin(double v);

// Maximizes w0 * w1 * (mu0 - mu1)^2 over cuts 1..255 with exact integer comparison;
// ties go to the smaller cut.
OtsuResult otsu_from_histogram(const Histogram& histogram);

// Throws InvalidArgument on empty input or samples outside [0, 1].
OtsuResult otsu_threshold(std::span<const double> values);

struct DifferenceMap {
    RealGrid values;          // min-max normalized to [0, 1]
    bool degenerate = false;  // max == min; values are then all zero
};

DifferenceMap difference_map(const DenseFeatureMap& fa, const DenseFeatureMap& fb);

struct ActConfig {
    double w_g = 0.7;
    double w_e = 0.3;
    double theta_min = 90.0;   // degrees
    double theta_max = 150.0;  // degrees
    std::optional<std::size_t> n_min;  // nullopt: max(256, 0.005 * H * W)
    std::size_t dilation_iterations = 1;

    void validate() const;
    double min_edge_pixels(std::size_t height, std::size_t width) const;
};

struct EdgeThreshold {
    std::optional<double> tau_edge;  // nullopt = invalid
    std::size_t edge_pixel_count = 0;
};

EdgeThreshold edge_local_threshold(const DifferenceMap& d, const ActConfig& config);

double fuse_thresholds(double tau_global, std::optional<double> tau_edge,
                       const ActConfig& config);

double map_to_angle(double tau_final, const ActConfig& config);

// Similarity cut for a mask to count as changed: cos(180 deg - theta).
double decision_cut(double theta_degrees);

struct ThresholdBundle {
    double tau_global = 0.0;
    bool global_degenerate = false;
    std::optional<double> tau_edge;
    double tau_final = 0.0;
    std::size_t edge_pixel_count = 0;
    double theta = 0.0;
    double cut = 0.0;
};

ThresholdBundle compute_thresholds(const DifferenceMap& d, const ActConfig& config);

// Per-channel mean of `features` over the mask's set pixels, summed in row-major order.
std::vector<double> mask_pool(const DenseFeatureMap& features, const BinaryMask& mask);

struct Similarity {
    double value = 1.0;
    bool degenerate = false;  // one vector has zero norm
};

Similarity cosine_similarity(std::span<const double> u, std::span<const double> v);

struct RegionScore {
    std::size_t mask_id = 0;
    std::vector<double> pooled_a;
    std::vector<double> pooled_b;
    double similarity = 1.0;
    bool degenerate = false;
};

struct CandidateSet {
    std::vector<RegionScore> members;  // ascending mask id

    std::vector<std::size_t> ids() const;
};

// Pools and compares every mask. Feature maps must already match the mask frame.
std::vector<RegionScore> score_regions(const MaskSet& masks, const DenseFeatureMap& fa,
                                       const DenseFeatureMap& fb);

// Members are the non-degenerate scores with similarity < cut.
CandidateSet select_by_cut(const std::vector<RegionScore>& scores, double cut);

CandidateSet select_candidates(const MaskSet& masks, const DenseFeatureMap& fa,
                               const DenseFeatureMap& fb, double theta_degrees);

}  // namespace adaptcd::act
