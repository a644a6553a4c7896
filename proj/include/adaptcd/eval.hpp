#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "adaptcd/config.hpp"
#include "adaptcd/mask.hpp"

namespace adaptcd::eval {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const noexcept { return tp + fp + fn + tn; }
    ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept;
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Changed-class scores in [0, 1]. An empty prediction against an empty ground truth
// scores IoU = 1 with precision, recall and F1 all 0.
struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double iou = 0.0;
};

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt);
Metrics metrics(const ConfusionCounts& counts);
// F1 from precision and recall alone, 0 when both are 0.
double f1_score(double precision, double recall);

struct DatasetEntry {
    std::string id;
    std::filesystem::path image_a;
    std::filesystem::path image_b;
    std::filesystem::path ground_truth;  // .png (nonzero = changed) or single-instance .masks.json
};

struct DatasetManifest {
    std::vector<DatasetEntry> pairs;
    std::optional<std::filesystem::path> prompts;
};

// Accepts either a JSON list of entries or {"prompts": path, "pairs": [...]}. Each entry
// is {"id", "image_a", "image_b", "gt"}; relative paths resolve against the manifest.
DatasetManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {});
DatasetManifest load_manifest(const std::filesystem::path& path);

BinaryMask load_ground_truth(const std::filesystem::path& path);

struct PairResult {
    std::string id;
    std::optional<ConfusionCounts> counts;
    std::optional<Metrics> metrics;
    std::string error;  // set when the pair failed

    bool ok() const noexcept { return counts.has_value(); }
};

struct DatasetReport {
    std::vector<PairResult> pairs;  // manifest order
    std::optional<Metrics> micro;   // metrics of the summed counts
    std::optional<Metrics> macro;   // mean of per-pair metrics
    std::size_t failures = 0;
};

// Runs the pipeline on every pair, concurrently on up to `threads` workers (0 = hardware
// concurrency). A pair that fails is recorded and the rest continue. The manifest's prompt
// file, when given, overrides the configured prototypes.
DatasetReport evaluate_dataset(const DatasetManifest& manifest, const PipelineConfig& config,
                               std::size_t threads = 0);

std::string report_json(const DatasetReport& report);
// Fixed-width table, scores x100 with two decimals.
std::string report_table(const DatasetReport& report);

}  // namespace adaptcd::eval
