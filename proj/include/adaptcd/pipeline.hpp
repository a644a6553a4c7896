#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adaptcd/act.hpp"
#include "adaptcd/config.hpp"
#include "adaptcd/identify.hpp"

namespace adaptcd {

// How the similarity cut was obtained for a run.
struct Decision {
    bool adaptive = true;                     // false: fixed-percentile fallback
    std::optional<act::ThresholdBundle> act;  // set when adaptive
    double cut = 0.0;                         // candidates satisfy s_k < cut
};

struct RunArtifacts {
    Image aligned;  // I'_b; equals I_b when alignment is off
    std::optional<ara::AraResult> ara;
    MaskSet masks_a;
    MaskSet masks_b;
    MaskSet masks_all;
    act::DifferenceMap difference;
    Decision decision;
    std::vector<act::RegionScore> scores;
    act::CandidateSet candidates;
    identify::IdentifyResult identification;
    std::map<std::string, double> timings_ms;  // wall time per stage, never written to disk

    const BinaryMask& change_mask() const { return identification.change.mask; }
};

// S_a then S_b, ids reassigned in that order.
MaskSet merge_mask_sets(const MaskSet& sa, const MaskSet& sb);

// Runs align, segment, features + thresholds, identify. Stage failures are rethrown with
// the stage name prefixed to the message.
RunArtifacts run(const Image& image_a, const Image& image_b, const PipelineConfig& config);

struct DumpEntry {
    std::string file;  // relative to the dump directory
    std::uint64_t bytes = 0;
    std::uint32_t crc32 = 0;
};

// Writes the intermediate artifacts plus manifest.json; returns the manifest entries.
// Nothing is written when `enabled` is false.
std::vector<DumpEntry> dump_artifacts(const RunArtifacts& artifacts,
                                      const std::filesystem::path& dir, bool enabled = true);

// The run summary written by the CLI (configuration switches, thresholds, counts).
std::string summary_json(const RunArtifacts& artifacts, const PipelineConfig& config);

}  // namespace adaptcd
