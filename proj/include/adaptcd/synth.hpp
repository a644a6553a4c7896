#pragma once
// Deterministic constructed scenes with planted changes.
//
//   single  gray base, one tile recolored to the target color in phase b
//   mixed   single plus one tile recolored to vegetation green (not a target change)
//   noisy   tiled palette including unchanged rooftops, per-pixel noise, per-channel
//           gain/offset on phase a, target, vegetation and brick-colored changes, and
//           small alterations on unchanged rooftops that phase b segments separately

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "adaptcd/config.hpp"
#include "adaptcd/image.hpp"
#include "adaptcd/mask.hpp"

namespace adaptcd::synth {

enum class SceneKind { Single, Mixed, Noisy };

SceneKind parse_scene_kind(const std::string& name);
std::string to_string(SceneKind kind);

inline constexpr std::array<std::uint8_t, 3> kTargetColor{230, 26, 26};
inline constexpr std::array<std::uint8_t, 3> kGrayColor{128, 128, 128};
inline constexpr std::array<std::uint8_t, 3> kVegetationColor{40, 200, 40};
inline constexpr const char* kTargetPrompt = "buildings, rooftops, and urban structures";
inline constexpr const char* kNoisySegmentationPattern = "pairs/{pair}/seg_{phase}.masks.json";
inline constexpr const char* kBackgroundPrompt = "open ground, vegetation, and non-building areas";

struct SceneOptions {
    SceneKind kind = SceneKind::Single;
    std::uint64_t seed = 0;
    std::size_t size = 0;  // square frame; 0 picks the kind's default
    std::size_t tile = 32;
};

// 256 for single and mixed scenes, 512 for noisy ones.
std::size_t default_size(SceneKind kind);

struct Scene {
    Image image_a;
    Image image_b;
    BinaryMask ground_truth;
    // Instance masks for the file segmentation provider (noisy scenes).
    std::optional<MaskSet> segmentation_a;
    std::optional<MaskSet> segmentation_b;
};

Scene make_scene(const SceneOptions& options);

// Pipeline configuration matching a scene kind, with the anchor table inlined.
PipelineConfig fixture_config(SceneKind kind);

struct FixtureOptions {
    SceneKind kind = SceneKind::Single;
    std::uint64_t seed = 0;
    std::size_t pairs = 1;  // pair i uses seed + i
    std::size_t size = 0;
    std::size_t tile = 32;
};

// Writes pairs/<id>/{a.png,b.png,gt.png[,seg_a.masks.json,seg_b.masks.json]},
// prompts.json, anchors.json, config.json and manifest.json under `dir`. Returns the
// manifest path.
std::filesystem::path write_fixture(const FixtureOptions& options, const std::filesystem::path& dir);

}  // namespace adaptcd::synth
