#include "adaptcd/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include <nlohmann/json.hpp>

#include "adaptcd/formats.hpp"
#include "adaptcd/png_io.hpp"
#include "adaptcd/providers.hpp"

namespace adaptcd::synth {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Rgb = std::array<int, 3>;

// mt19937_64 output is fixed by the standard; the distributions are not, so values are
// derived from raw draws directly.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed ^ 0x9E3779B97F4A7C15ull) {}

    std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
    int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::size_t>(hi - lo + 1))); }
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double between(double lo, double hi) { return lo + (hi - lo) * unit(); }

private:
    std::mt19937_64 engine_;
};

struct TileGrid {
    std::size_t size, tile, per_row;

    std::size_t count() const { return per_row * per_row; }
    BBox box(std::size_t t) const {
        const std::size_t r = (t / per_row) * tile, c = (t % per_row) * tile;
        return {r, c, std::min(size, r + tile), std::min(size, c + tile)};
    }
};

std::uint8_t clamp8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

void paint(Image& img, const BBox& box, const Rgb& color) {
    for (std::size_t r = box.row0; r < box.row1; ++r) {
        for (std::size_t c = box.col0; c < box.col1; ++c) {
            for (std::size_t ch = 0; ch < 3; ++ch) img.at(r, c, ch) = clamp8(color[ch]);
        }
    }
}

Rgb rgb(const std::array<std::uint8_t, 3>& c) { return {c[0], c[1], c[2]}; }

// Distinct tile indices in draw order, skipping those already taken.
std::vector<std::size_t> pick_tiles(Rng& rng, std::size_t n, std::vector<bool>& taken,
                                    const std::vector<bool>& allowed) {
    std::vector<std::size_t> out;
    std::size_t free = 0;
    for (std::size_t t = 0; t < taken.size(); ++t) free += !taken[t] && allowed[t];
    n = std::min(n, free);
    while (out.size() < n) {
        const std::size_t t = rng.below(taken.size());
        if (taken[t] || !allowed[t]) continue;
        taken[t] = true;
        out.push_back(t);
    }
    return out;
}

enum class Surface { Gray, Green, Sand, Roof };

Rgb surface_color(Rng& rng, Surface s) {
    switch (s) {
        case Surface::Gray: {
            const int v = rng.between(90, 170);
            return {v + rng.between(-6, 6), v + rng.between(-6, 6), v + rng.between(-6, 6)};
        }
        case Surface::Green:
            return {rng.between(40, 80), rng.between(130, 190), rng.between(40, 80)};
        case Surface::Sand:
            return {rng.between(170, 200), rng.between(150, 175), rng.between(110, 135)};
        case Surface::Roof:
            return {rng.between(190, 235), rng.between(25, 60), rng.between(25, 60)};
    }
    return {};
}

Rgb brick_color(Rng& rng) {
    return {rng.between(205, 215), rng.between(85, 100), rng.between(70, 85)};
}

Scene single_or_mixed(const SceneOptions& o, bool mixed) {
    Rng rng(o.seed);
    const TileGrid grid{o.size, o.tile, (o.size + o.tile - 1) / o.tile};
    Scene s;
    s.image_a = Image(o.size, o.size, kGrayColor[0]);
    s.image_b = s.image_a;
    std::vector<bool> taken(grid.count(), false);
    const std::vector<bool> all(grid.count(), true);
    const auto target = pick_tiles(rng, 1, taken, all).front();
    paint(s.image_b, grid.box(target), rgb(kTargetColor));
    s.ground_truth = BinaryMask::from_box(o.size, o.size, grid.box(target));
    if (mixed) {
        const auto veg = pick_tiles(rng, 1, taken, all).front();
        paint(s.image_b, grid.box(veg), rgb(kVegetationColor));
    }
    return s;
}

Scene noisy(const SceneOptions& o) {
    Rng rng(o.seed);
    const TileGrid grid{o.size, o.tile, (o.size + o.tile - 1) / o.tile};
    const std::size_t n = grid.count();

    std::vector<Surface> surface(n);
    std::vector<Rgb> color_a(n);
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t roll = rng.below(100);
        surface[t] = roll < 20 ? Surface::Roof : roll < 50 ? Surface::Gray : roll < 80 ? Surface::Green : Surface::Sand;
        color_a[t] = surface_color(rng, surface[t]);
    }
    std::vector<Rgb> color_b = color_a;

    std::vector<bool> taken(n, false), not_roof(n);
    for (std::size_t t = 0; t < n; ++t) not_roof[t] = surface[t] != Surface::Roof;
    const auto targets = pick_tiles(rng, 2 + rng.below(3), taken, not_roof);
    for (std::size_t t : targets) color_b[t] = surface_color(rng, Surface::Roof);
    for (std::size_t t : pick_tiles(rng, 1 + rng.below(2), taken, not_roof)) {
        color_b[t] = surface_color(rng, surface[t] == Surface::Green ? Surface::Sand : Surface::Green);
    }
    for (std::size_t t : pick_tiles(rng, 1, taken, not_roof)) {
        color_b[t] = brick_color(rng);
    }

    // Small alterations on unchanged rooftops, each segmented as its own instance in phase b.
    std::vector<bool> roof(n);
    for (std::size_t t = 0; t < n; ++t) roof[t] = surface[t] == Surface::Roof;
    std::vector<std::pair<BBox, Rgb>> details;
    const std::size_t side = 7;
    for (std::size_t t : pick_tiles(rng, 1 + rng.below(3), taken, roof)) {
        const BBox tb = grid.box(t);
        if (tb.height() < side + 12 || tb.width() < side + 12) continue;
        const std::size_t r0 = tb.row0 + 6 + rng.below(tb.height() - side - 11);
        const std::size_t c0 = tb.col0 + 6 + rng.below(tb.width() - side - 11);
        details.push_back({BBox{r0, c0, r0 + side, c0 + side},
                           Rgb{rng.between(110, 130), rng.between(35, 50), rng.between(55, 75)}});
    }

    std::array<double, 3> gain{}, offset{};
    for (std::size_t ch = 0; ch < 3; ++ch) {
        gain[ch] = rng.between(0.7, 1.3);
        offset[ch] = rng.between(-40.0, 40.0);
    }

    Scene s;
    s.image_a = Image(o.size, o.size);
    s.image_b = Image(o.size, o.size);
    DenseMask gt(o.size, o.size);
    for (std::size_t t = 0; t < n; ++t) {
        const BBox box = grid.box(t);
        const bool changed = std::find(targets.begin(), targets.end(), t) != targets.end();
        for (std::size_t r = box.row0; r < box.row1; ++r) {
            for (std::size_t c = box.col0; c < box.col1; ++c) {
                for (std::size_t ch = 0; ch < 3; ++ch) {
                    s.image_a.at(r, c, ch) =
                        clamp8(gain[ch] * color_a[t][ch] + offset[ch] + rng.between(-8, 8));
                    s.image_b.at(r, c, ch) = clamp8(color_b[t][ch] + rng.between(-8, 8));
                }
                for (const auto& [db, color] : details) {
                    if (r >= db.row0 && r < db.row1 && c >= db.col0 && c < db.col1) {
                        for (std::size_t ch = 0; ch < 3; ++ch) {
                            s.image_b.at(r, c, ch) = clamp8(color[ch] + rng.between(-8, 8));
                        }
                    }
                }
                if (changed) gt(r, c) = 1;
            }
        }
    }
    s.ground_truth = rle_encode(gt);
    s.segmentation_a = providers::grid_segmentation(o.size, o.size, o.tile, Phase::A);
    s.segmentation_b = providers::grid_segmentation(o.size, o.size, o.tile, Phase::B);
    for (const auto& d : details) {
        s.segmentation_b->add(BinaryMask::from_box(o.size, o.size, d.first), Phase::B);
    }
    return s;
}

std::string pair_id(SceneKind kind, std::uint64_t seed) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s-%04llu", to_string(kind).c_str(), static_cast<unsigned long long>(seed));
    return buf;
}

}  // namespace

SceneKind parse_scene_kind(const std::string& name) {
    if (name == "single") return SceneKind::Single;
    if (name == "mixed") return SceneKind::Mixed;
    if (name == "noisy") return SceneKind::Noisy;
    fail(ErrorKind::Config, "unknown scene kind '" + name + "' (expected single, mixed or noisy)");
}

std::string to_string(SceneKind kind) {
    switch (kind) {
        case SceneKind::Single: return "single";
        case SceneKind::Mixed: return "mixed";
        case SceneKind::Noisy: return "noisy";
    }
    return "?";
}

std::size_t default_size(SceneKind kind) { return kind == SceneKind::Noisy ? 512 : 256; }

Scene make_scene(const SceneOptions& options) {
    SceneOptions o = options;
    if (o.size == 0) o.size = default_size(o.kind);
    if (o.tile < 4 || o.size < o.tile) {
        fail(ErrorKind::Config, "synth: need tile >= 4 and size >= tile");
    }
    switch (o.kind) {
        case SceneKind::Single: return single_or_mixed(o, false);
        case SceneKind::Mixed: return single_or_mixed(o, true);
        case SceneKind::Noisy: return noisy(o);
    }
    fail(ErrorKind::Config, "synth: bad scene kind");
}

PipelineConfig fixture_config(SceneKind kind) {
    PipelineConfig c;
    c.segmentation = providers::GridSegmentation{32};
    c.features = providers::SyntheticFeatures{2};
    providers::SyntheticColorEmbeddings anchors;
    anchors.anchors[kTargetPrompt] = {0.9, 0.1, 0.1};
    anchors.anchors[kBackgroundPrompt] = {0.5, 0.5, 0.5};
    c.embedding = {anchors, 3};
    c.prototypes = {kTargetPrompt, kBackgroundPrompt};
    // Synthetic features are non-negative, so every similarity is >= 0 and the useful
    // decision cuts lie close to 1.
    c.act.theta_min = 170.0;
    c.act.theta_max = 179.0;
    if (kind == SceneKind::Noisy) {
        c.segmentation = providers::FileSegmentation{kNoisySegmentationPattern};
    }
    return c;
}

fs::path write_fixture(const FixtureOptions& o, const fs::path& dir) {
    if (o.pairs == 0) fail(ErrorKind::Config, "synth: need at least one pair");
    std::error_code ec;
    fs::create_directories(dir / "pairs", ec);
    if (ec) fail(ErrorKind::Io, "cannot create " + (dir / "pairs").string() + ": " + ec.message());

    PipelineConfig config = fixture_config(o.kind);
    if (o.kind != SceneKind::Noisy) config.segmentation = providers::GridSegmentation{o.tile};
    formats::write_file(dir / "config.json", serialize_config(config));
    formats::write_file(dir / "prompts.json", formats::encode_prompts_json(config.prototypes));
    json anchors = json::object();
    for (const auto& [name, v] : std::get<providers::SyntheticColorEmbeddings>(config.embedding.kind).anchors) {
        anchors[name] = v;
    }
    formats::write_file(dir / "anchors.json", anchors.dump(2) + "\n");

    json pairs = json::array();
    for (std::size_t i = 0; i < o.pairs; ++i) {
        const std::uint64_t seed = o.seed + i;
        const Scene s = make_scene({o.kind, seed, o.size, o.tile});
        const std::string id = pair_id(o.kind, seed);
        const fs::path rel = fs::path("pairs") / id;
        fs::create_directories(dir / rel, ec);
        if (ec) fail(ErrorKind::Io, "cannot create " + (dir / rel).string() + ": " + ec.message());
        write_png_rgb(dir / rel / "a.png", s.image_a);
        write_png_rgb(dir / rel / "b.png", s.image_b);
        write_png_mask(dir / rel / "gt.png", rle_decode(s.ground_truth));
        if (s.segmentation_a) {
            formats::write_file(dir / rel / "seg_a.masks.json", formats::encode_masks_json(*s.segmentation_a));
            formats::write_file(dir / rel / "seg_b.masks.json", formats::encode_masks_json(*s.segmentation_b));
        }
        pairs.push_back({{"id", id},
                         {"image_a", (rel / "a.png").generic_string()},
                         {"image_b", (rel / "b.png").generic_string()},
                         {"gt", (rel / "gt.png").generic_string()}});
    }
    const fs::path manifest = dir / "manifest.json";
    formats::write_file(manifest, json{{"prompts", "prompts.json"}, {"pairs", pairs}}.dump(2) + "\n");
    return manifest;
}

}  // namespace adaptcd::synth
