#include "adaptcd/providers.hpp"

#include <cmath>
#include <string>

#include "adaptcd/formats.hpp"
#include "adaptcd/imaging.hpp"
#include "adaptcd/log.hpp"
#include "adaptcd/png_io.hpp"
#include "adaptcd/subprocess.hpp"

namespace adaptcd::providers {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate_subprocess(const SubprocessSpec& spec) {
    if (split_command(spec.command).empty()) {
        fail(ErrorKind::Config, "subprocess provider needs a command");
    }
    if (spec.timeout.count() <= 0) {
        fail(ErrorKind::Config, "subprocess provider timeout must be positive");
    }
}

// Runs the external adapter and fails unless it exits 0 before the timeout.
void invoke(const SubprocessSpec& spec, std::vector<std::string> extra) {
    auto argv = split_command(spec.command);
    argv.insert(argv.end(), extra.begin(), extra.end());
    const ProcessResult r = run_process(argv, spec.timeout);
    if (r.timed_out) {
        fail(ErrorKind::Provider, "subprocess '" + spec.command + "' timed out after " +
                                      std::to_string(spec.timeout.count()) + " ms");
    }
    if (r.exit_code != 0) {
        fail(ErrorKind::Provider, "subprocess '" + spec.command + "' exited with code " +
                                      std::to_string(r.exit_code));
    }
}

std::string phase_letter(Phase phase) { return phase == Phase::A ? "a" : "b"; }

}  // namespace

UnitVector UnitVector::normalized(std::vector<double> raw) {
    double norm2 = 0.0;
    for (double v : raw) norm2 += v * v;
    UnitVector out;
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
        out.components.assign(raw.size(), 0.0);
        out.degenerate = true;
        return out;
    }
    const double norm = std::sqrt(norm2);
    for (double& v : raw) v /= norm;
    out.components = std::move(raw);
    return out;
}

std::string expand_phase(const std::string& pattern, Phase phase) {
    std::string out = pattern;
    const std::string token = "{phase}";
    for (auto pos = out.find(token); pos != std::string::npos; pos = out.find(token, pos)) {
        out.replace(pos, token.size(), phase_letter(phase));
        pos += 1;
    }
    return out;
}

void validate(const SegmentationProviderSpec& spec) {
    std::visit(overloaded{
                   [](const FileSegmentation& s) {
                       if (s.path_pattern.empty()) fail(ErrorKind::Config, "segmentation file path is empty");
                   },
                   [](const GridSegmentation& s) {
                       if (s.tile < 4) fail(ErrorKind::Config, "grid segmentation tile size must be >= 4");
                   },
                   [](const SubprocessSpec& s) { validate_subprocess(s); },
               },
               spec);
}

void validate(const FeatureProviderSpec& spec) {
    std::visit(overloaded{
                   [](const FileFeatures& s) {
                       if (s.path_pattern.empty()) fail(ErrorKind::Config, "feature file path is empty");
                   },
                   [](const SyntheticFeatures&) {},
                   [](const SubprocessSpec& s) { validate_subprocess(s); },
               },
               spec);
}

void validate(const EmbeddingProviderSpec& spec) {
    if (spec.dim < 1) {
        fail(ErrorKind::Config, "embedding dim must be >= 1");
    }
    std::visit(overloaded{
                   [](const FileEmbeddings& s) {
                       if (s.path.empty()) fail(ErrorKind::Config, "embedding manifest path is empty");
                   },
                   [&](const SyntheticColorEmbeddings& s) {
                       if (spec.dim != 3) fail(ErrorKind::Config, "synthetic-color embeddings have dim 3");
                       for (const auto& [name, rgb] : s.anchors) {
                           for (double v : rgb) {
                               if (!(v >= 0.0 && v <= 1.0)) {
                                   fail(ErrorKind::Config, "anchor '" + name + "' has a component outside [0,1]");
                               }
                           }
                       }
                   },
                   [](const SubprocessSpec& s) { validate_subprocess(s); },
               },
               spec.kind);
}

MaskSet grid_segmentation(std::size_t height, std::size_t width, std::size_t tile, Phase phase) {
    if (tile < 4) {
        fail(ErrorKind::Config, "grid tile size must be >= 4");
    }
    MaskSet set(height, width);
    for (std::size_t r = 0; r < height; r += tile) {
        for (std::size_t c = 0; c < width; c += tile) {
            const BBox box{r, c, std::min(height, r + tile), std::min(width, c + tile)};
            set.add(BinaryMask::from_box(height, width, box), phase);
        }
    }
    return set;
}

DenseFeatureMap synthetic_features(const Image& image, std::size_t blur_radius) {
    if (image.empty()) {
        fail(ErrorKind::InvalidArgument, "synthetic_features of an empty image");
    }
    const std::size_t h = image.height(), w = image.width();
    DenseFeatureMap out(4, h, w);
    for (std::size_t ch = 0; ch < Image::kChannels; ++ch) {
        RealGrid plane(h, w);
        for (std::size_t r = 0; r < h; ++r) {
            for (std::size_t c = 0; c < w; ++c) {
                plane(r, c) = image.at(r, c, ch);
            }
        }
        const RealGrid blurred = box_blur(plane, blur_radius);
        auto dst = out.plane(ch);
        for (std::size_t i = 0; i < blurred.size(); ++i) {
            dst[i] = static_cast<float>(blurred[i] / 255.0);
        }
    }
    RealGrid luma(h, w);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            luma(r, c) = (0.299 * image.at(r, c, 0) + 0.587 * image.at(r, c, 1) +
                          0.114 * image.at(r, c, 2)) / 255.0;
        }
    }
    auto grad_plane = out.plane(3);
    if (h >= 3 && w >= 3) {
        const RealGrid grad = sobel_magnitude(luma);
        for (std::size_t i = 0; i < grad.size(); ++i) {
            grad_plane[i] = static_cast<float>(grad[i]);
        }
    }
    return out;
}

UnitVector synthetic_region_embedding(const Image& crop) {
    if (crop.empty()) {
        fail(ErrorKind::EmptyRegion, "embedding of an empty crop");
    }
    std::array<std::uint64_t, 3> sums{};
    const auto data = crop.data();
    for (std::size_t i = 0; i < data.size(); i += Image::kChannels) {
        for (std::size_t c = 0; c < Image::kChannels; ++c) sums[c] += data[i + c];
    }
    const double n = static_cast<double>(crop.pixel_count()) * 255.0;
    return UnitVector::normalized({sums[0] / n, sums[1] / n, sums[2] / n});
}

SegmentationProvider::SegmentationProvider(SegmentationProviderSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
}

MaskSet SegmentationProvider::segment(const Image& image, Phase phase) {
    if (image.empty()) {
        fail(ErrorKind::InvalidArgument, "segment: empty image");
    }
    MaskSet set = std::visit(
        overloaded{
            [&](const FileSegmentation& s) {
                const std::string path = expand_phase(s.path_pattern, phase);
                return formats::decode_masks_json(formats::read_file(path), phase);
            },
            [&](const GridSegmentation& s) {
                return grid_segmentation(image.height(), image.width(), s.tile, phase);
            },
            [&](const SubprocessSpec& s) {
                std::lock_guard lock(mutex_);
                TempDir tmp;
                const auto img = tmp.path() / "image.png";
                const auto out = tmp.path() / "out.masks.json";
                write_png_rgb(img, image);
                invoke(s, {"--task", "segment", "--image", img.string(), "--out", out.string()});
                return formats::decode_masks_json(formats::read_file(out), phase);
            },
        },
        spec_);
    if (set.height() != image.height() || set.width() != image.width()) {
        fail(ErrorKind::DimensionMismatch,
             "segmentation manifest is " + std::to_string(set.height()) + "x" +
                 std::to_string(set.width()) + " but the image is " +
                 std::to_string(image.height()) + "x" + std::to_string(image.width()));
    }
    return set;
}

FeatureProvider::FeatureProvider(FeatureProviderSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
}

DenseFeatureMap FeatureProvider::extract(const Image& image, Phase phase) {
    if (image.empty()) {
        fail(ErrorKind::InvalidArgument, "extract_features: empty image");
    }
    DenseFeatureMap map = std::visit(
        overloaded{
            [&](const FileFeatures& s) {
                return formats::decode_dfm(formats::read_file(expand_phase(s.path_pattern, phase)));
            },
            [&](const SyntheticFeatures& s) { return synthetic_features(image, s.blur_radius); },
            [&](const SubprocessSpec& s) {
                std::lock_guard lock(mutex_);
                TempDir tmp;
                const auto img = tmp.path() / "image.png";
                const auto out = tmp.path() / "out.dfm";
                write_png_rgb(img, image);
                invoke(s, {"--task", "features", "--image", img.string(), "--out", out.string()});
                return formats::decode_dfm(formats::read_file(out));
            },
        },
        spec_);
    map.require_finite();
    return map;
}

EmbeddingProvider::EmbeddingProvider(EmbeddingProviderSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
}

const std::map<std::string, std::vector<float>>& EmbeddingProvider::manifest() {
    std::lock_guard lock(mutex_);
    if (!manifest_) {
        const auto& file = std::get<FileEmbeddings>(spec_.kind);
        auto parsed = formats::decode_emb_json(formats::read_file(file.path));
        if (parsed.dim != spec_.dim) {
            fail(ErrorKind::DimensionMismatch, "embedding manifest dim " + std::to_string(parsed.dim) +
                                                   " != provider dim " + std::to_string(spec_.dim));
        }
        manifest_ = std::make_unique<std::map<std::string, std::vector<float>>>(std::move(parsed.entries));
    }
    return *manifest_;
}

namespace {

UnitVector from_floats(const std::vector<float>& v) {
    return UnitVector::normalized(std::vector<double>(v.begin(), v.end()));
}

UnitVector read_single_entry(const std::filesystem::path& path, const std::string& key,
                             std::size_t dim) {
    auto parsed = formats::decode_emb_json(formats::read_file(path));
    if (parsed.dim != dim) {
        fail(ErrorKind::DimensionMismatch, "subprocess embedding dim " + std::to_string(parsed.dim) +
                                               " != provider dim " + std::to_string(dim));
    }
    if (auto it = parsed.entries.find(key); it != parsed.entries.end()) {
        return from_floats(it->second);
    }
    if (parsed.entries.size() == 1) {
        return from_floats(parsed.entries.begin()->second);
    }
    fail(ErrorKind::MissingKey, "subprocess embedding output lacks '" + key + "'");
}

}  // namespace

UnitVector EmbeddingProvider::embed_region(const Image& crop, std::size_t mask_id) {
    if (crop.empty()) {
        fail(ErrorKind::EmptyRegion, "embed_region: empty crop");
    }
    const std::string key = "mask:" + std::to_string(mask_id);
    return std::visit(
        overloaded{
            [&](const FileEmbeddings&) {
                const auto& entries = manifest();
                auto it = entries.find(key);
                if (it == entries.end()) {
                    fail(ErrorKind::MissingKey, "embedding manifest lacks '" + key + "'");
                }
                return from_floats(it->second);
            },
            [&](const SyntheticColorEmbeddings&) { return synthetic_region_embedding(crop); },
            [&](const SubprocessSpec& s) {
                std::lock_guard lock(mutex_);
                TempDir tmp;
                const auto img = tmp.path() / "crop.png";
                const auto out = tmp.path() / "out.emb.json";
                write_png_rgb(img, crop);
                const std::string box = "0,0," + std::to_string(crop.height()) + "," +
                                        std::to_string(crop.width());
                invoke(s, {"--task", "embed", "--image", img.string(), "--crop", box, "--out",
                           out.string()});
                return read_single_entry(out, key, spec_.dim);
            },
        },
        spec_.kind);
}

UnitVector EmbeddingProvider::embed_text(const std::string& prototype) {
    if (prototype.empty()) {
        fail(ErrorKind::InvalidArgument, "embed_text: empty prototype");
    }
    const std::string key = "text:" + prototype;
    return std::visit(
        overloaded{
            [&](const FileEmbeddings&) {
                const auto& entries = manifest();
                auto it = entries.find(key);
                if (it == entries.end()) {
                    fail(ErrorKind::MissingPrototype, "embedding manifest lacks '" + key + "'");
                }
                return from_floats(it->second);
            },
            [&](const SyntheticColorEmbeddings& s) {
                auto it = s.anchors.find(prototype);
                if (it == s.anchors.end()) {
                    fail(ErrorKind::MissingPrototype, "no color anchor for prototype '" + prototype + "'");
                }
                return UnitVector::normalized({it->second[0], it->second[1], it->second[2]});
            },
            [&](const SubprocessSpec& s) {
                std::lock_guard lock(mutex_);
                TempDir tmp;
                const auto out = tmp.path() / "out.emb.json";
                invoke(s, {"--task", "embed", "--text", prototype, "--out", out.string()});
                return read_single_entry(out, key, spec_.dim);
            },
        },
        spec_.kind);
}

}  // namespace adaptcd::providers
