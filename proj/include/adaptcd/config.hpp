#pragma once
// Pipeline configuration and its JSON form.
//
// {
//   "ara":  {"enabled": true, "tau_max": 0.25},
//   "act":  {"enabled": true, "w_g": 0.7, "w_e": 0.3, "theta_min": 90, "theta_max": 150,
//            "n_min": null, "dilation_iterations": 1},
//   "acf":  {"enabled": true, "percentile": 25, "lambda": 1.2, "clip_lo": 0.5, "clip_hi": 0.95,
//            "mu_min": 0.5, "gamma": 0.5, "a_min": 64, "crop_pad_fraction": 0.1,
//            "softmax_temperature": 100},
//   "fixed_percentile": 30,
//   "providers": {
//     "segmentation": {"kind": "synthetic-grid", "tile": 32},
//     "features":     {"kind": "synthetic", "blur_radius": 2},
//     "embedding":    {"kind": "synthetic-color", "anchors_path": "anchors.json"}
//   },
//   "prototypes": {"target": "...", "background": "..."},
//   "dump_intermediate": false,
//   "output_dir": "out"
// }
//
// Every section and key is optional; unknown keys are rejected. Relative paths inside
// provider specs are resolved against the directory of the config file.

#include <filesystem>
#include <string>
#include <string_view>

#include "adaptcd/act.hpp"
#include "adaptcd/ara.hpp"
#include "adaptcd/formats.hpp"
#include "adaptcd/identify.hpp"
#include "adaptcd/providers.hpp"

namespace adaptcd {

struct PipelineConfig {
    bool ara_enabled = true;
    ara::AraConfig ara;
    bool act_enabled = true;
    act::ActConfig act;
    bool acf_enabled = true;
    identify::AcfConfig acf;
    double fixed_percentile = 30.0;  // similarity percentile used when ACT is off

    providers::SegmentationProviderSpec segmentation = providers::GridSegmentation{};
    providers::FeatureProviderSpec features = providers::SyntheticFeatures{};
    providers::EmbeddingProviderSpec embedding{providers::SyntheticColorEmbeddings{}, 3};

    formats::Prompts prototypes;
    bool dump_intermediate = false;
    std::string output_dir;

    // Checks component configs and provider specs. Prototypes are checked at run time,
    // since they may come from a separate prompts file.
    void validate() const;
};

// Parses a config document. `base_dir` anchors relative provider paths.
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const PipelineConfig& config);

// Applies a "seg=<kind>:<param>,feat=<kind>:<param>,emb=<kind>:<param>" override. Any
// subset of the three keys may be given.
//   seg:  synthetic-grid:<tile> | file:<pattern> | subprocess:<command>
//   feat: synthetic:<radius>    | file:<pattern> | subprocess:<command>
//   emb:  synthetic-color:<anchors.json> | file:<manifest> | subprocess:<command>
void apply_provider_flag(PipelineConfig& config, std::string_view flag);

// Reads a {"prototype": [r, g, b], ...} anchor table.
std::map<std::string, std::array<double, 3>> load_anchor_table(const std::filesystem::path& path);

// Replaces "{pair}" in file-provider paths.
PipelineConfig with_pair_id(PipelineConfig config, const std::string& pair_id);

}  // namespace adaptcd
