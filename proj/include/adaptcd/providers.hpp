#pragma once

// Pluggable stand-ins for the three foundation models: instance segmentation, dense
// features and region/text embeddings. Each has a file-backed, a deterministic synthetic
// and an external-subprocess implementation.

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

#include "adaptcd/features.hpp"
#include "adaptcd/image.hpp"
#include "adaptcd/mask.hpp"

namespace adaptcd::providers {

/// L2-normalized embedding, or a flagged zero vector.
struct UnitVector {
    std::vector<double> components;
    bool degenerate = false;

    static UnitVector normalized(std::vector<double> raw);
};

struct SubprocessSpec {
    std::string command;  // split on whitespace; first token is the executable
    std::chrono::milliseconds timeout{600'000};
};

// --- segmentation ---------------------------------------------------------------------

struct FileSegmentation {
    // "{phase}" is replaced by "a" or "b" so one spec covers both phases.
    std::string path_pattern;
};
struct GridSegmentation {
    std::size_t tile = 32;
};
using SegmentationProviderSpec = std::variant<FileSegmentation, GridSegmentation, SubprocessSpec>;

// --- dense features -------------------------------------------------------------------

struct FileFeatures {
    std::string path_pattern;  // "{phase}" substituted as above
};
struct SyntheticFeatures {
    std::size_t blur_radius = 2;
};
using FeatureProviderSpec = std::variant<FileFeatures, SyntheticFeatures, SubprocessSpec>;

// --- embeddings -----------------------------------------------------------------------

struct FileEmbeddings {
    std::string path;
};
struct SyntheticColorEmbeddings {
    std::map<std::string, std::array<double, 3>> anchors;  // prototype -> RGB in [0,1]
};
struct EmbeddingProviderSpec {
    std::variant<FileEmbeddings, SyntheticColorEmbeddings, SubprocessSpec> kind;
    std::size_t dim = 3;
};

void validate(const SegmentationProviderSpec& spec);
void validate(const FeatureProviderSpec& spec);
void validate(const EmbeddingProviderSpec& spec);

std::string expand_phase(const std::string& pattern, Phase phase);

// Grid tiles of size g in row-major tile order; edge tiles are clipped to the frame.
MaskSet grid_segmentation(std::size_t height, std::size_t width, std::size_t tile, Phase phase);

// Four channels: box-blurred R, G, B scaled to [0,1] and the Sobel magnitude of
// luminance (0.299R + 0.587G + 0.114B) / 255.
DenseFeatureMap synthetic_features(const Image& image, std::size_t blur_radius);

// Normalized mean RGB of the crop, summed in row-major order with integer accumulators.
UnitVector synthetic_region_embedding(const Image& crop);

class SegmentationProvider {
public:
    explicit SegmentationProvider(SegmentationProviderSpec spec);
    MaskSet segment(const Image& image, Phase phase);

private:
    SegmentationProviderSpec spec_;
    std::mutex mutex_;
};

class FeatureProvider {
public:
    explicit FeatureProvider(FeatureProviderSpec spec);
    DenseFeatureMap extract(const Image& image, Phase phase);

private:
    FeatureProviderSpec spec_;
    std::mutex mutex_;
};

class EmbeddingProvider {
public:
    explicit EmbeddingProvider(EmbeddingProviderSpec spec);

    UnitVector embed_region(const Image& crop, std::size_t mask_id);
    UnitVector embed_text(const std::string& prototype);

private:
    const std::map<std::string, std::vector<float>>& manifest();

    EmbeddingProviderSpec spec_;
    std::mutex mutex_;
    std::unique_ptr<std::map<std::string, std::vector<float>>> manifest_;  // lazily loaded
};

}  // namespace adaptcd::providers
