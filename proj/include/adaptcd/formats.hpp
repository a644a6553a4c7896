#pragma once

// On-disk formats shared with external model adapters.
//
//   .dfm         "DFM1", u32le C, u32le H, u32le W, then C*H*W f32le values (c, row, col).
//   .masks.json  {"height":H,"width":W,"instances":[{"id":0,"rle":[...]}, ...]}
//   .emb.json    {"dim":d,"entries":{"mask:<id>":[...], "text:<prototype>":[...]}}
//   .prompts.json {"target":"...","background":"..."}
//
// Decoders throw Error whose message names the first violated invariant.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "adaptcd/features.hpp"
#include "adaptcd/mask.hpp"

namespace adaptcd::formats {

std::string encode_dfm(const DenseFeatureMap& map);
DenseFeatureMap decode_dfm(std::string_view bytes);

std::string encode_masks_json(const MaskSet& masks);
MaskSet decode_masks_json(std::string_view text, Phase phase = Phase::A);

struct EmbeddingManifest {
    std::size_t dim = 0;
    std::map<std::string, std::vector<float>> entries;
};

std::string encode_emb_json(const EmbeddingManifest& manifest);
EmbeddingManifest decode_emb_json(std::string_view text);

struct Prompts {
    std::string target;
    std::string background;

    void validate() const;
};

std::string encode_prompts_json(const Prompts& prompts);
Prompts decode_prompts_json(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace adaptcd::formats
