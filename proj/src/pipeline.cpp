#include "adaptcd/pipeline.hpp"

#include <chrono>
#include <future>

#include <nlohmann/json.hpp>
#include <zlib.h>

#include "adaptcd/formats.hpp"
#include "adaptcd/imaging.hpp"
#include "adaptcd/log.hpp"
#include "adaptcd/png_io.hpp"

namespace adaptcd {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Runs one stage, records its wall time and prefixes failures with the stage name.
template <class F>
auto stage(const char* name, RunArtifacts& out, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if constexpr (std::is_void_v<decltype(body())>) {
            body();
            out.timings_ms[name] =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        } else {
            auto result = body();
            out.timings_ms[name] =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            return result;
        }
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(name) + ": " + e.what());
    } catch (const std::exception& e) {
        throw Error(ErrorKind::Provider, std::string(name) + ": " + e.what());
    }
}

double fixed_percentile_cut(const std::vector<act::RegionScore>& scores, double p) {
    std::vector<double> s;
    for (const auto& r : scores) {
        if (!r.degenerate) s.push_back(r.similarity);
    }
    if (s.empty()) return -std::numeric_limits<double>::infinity();
    return identify::percentile(std::move(s), p);
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json decision_json(const Decision& d) {
    json j;
    j["mode"] = d.adaptive ? "adaptive" : "fixed-percentile";
    j["cut"] = d.cut;
    if (d.act) {
        j["tau_global"] = d.act->tau_global;
        j["global_degenerate"] = d.act->global_degenerate;
        j["tau_edge"] = optional_number(d.act->tau_edge);
        j["edge_pixel_count"] = d.act->edge_pixel_count;
        j["tau_final"] = d.act->tau_final;
        j["theta"] = d.act->theta;
    }
    return j;
}

std::string single_mask_json(const BinaryMask& mask) {
    MaskSet set(mask.height(), mask.width());
    set.add(mask, Phase::B);
    return formats::encode_masks_json(set);
}

}  // namespace

MaskSet merge_mask_sets(const MaskSet& sa, const MaskSet& sb) {
    if (sa.height() != sb.height() || sa.width() != sb.width()) {
        fail(ErrorKind::DimensionMismatch, "merge_mask_sets: phase frames differ");
    }
    MaskSet all(sa.height(), sa.width());
    for (const auto& m : sa) all.add(m.mask, m.source);
    for (const auto& m : sb) all.add(m.mask, m.source);
    return all;
}

RunArtifacts run(const Image& image_a, const Image& image_b, const PipelineConfig& config) {
    config.validate();
    if (image_a.empty() || !image_a.same_dims(image_b)) {
        fail(ErrorKind::DimensionMismatch, "run: images must be non-empty with identical dimensions");
    }
    const std::size_t h = image_a.height(), w = image_a.width();
    RunArtifacts out;

    stage("align", out, [&] {
        if (config.ara_enabled) {
            out.ara = ara::align(image_a, image_b, config.ara);
            out.aligned = out.ara->aligned;
        } else {
            out.aligned = image_b;
        }
    });

    providers::SegmentationProvider segmenter(config.segmentation);
    providers::FeatureProvider extractor(config.features);
    providers::EmbeddingProvider embedder(config.embedding);

    stage("segment", out, [&] {
        auto fb = std::async(std::launch::async, [&] { return segmenter.segment(out.aligned, Phase::B); });
        out.masks_a = segmenter.segment(image_a, Phase::A);
        out.masks_b = fb.get();
        out.masks_all = merge_mask_sets(out.masks_a, out.masks_b);
    });
    log().info("segment: {} + {} masks", out.masks_a.size(), out.masks_b.size());

    DenseFeatureMap fa, fb;
    stage("features", out, [&] {
        auto later = std::async(std::launch::async, [&] {
            return bilinear_upsample(extractor.extract(out.aligned, Phase::B), h, w);
        });
        fa = bilinear_upsample(extractor.extract(image_a, Phase::A), h, w);
        fb = later.get();
        if (fa.channels() != fb.channels()) {
            fail(ErrorKind::DimensionMismatch, "feature channel counts differ between phases");
        }
    });

    stage("threshold", out, [&] {
        out.difference = act::difference_map(fa, fb);
        out.scores = act::score_regions(out.masks_all, fa, fb);
        out.decision.adaptive = config.act_enabled;
        if (config.act_enabled) {
            out.decision.act = act::compute_thresholds(out.difference, config.act);
            out.decision.cut = out.decision.act->cut;
        } else {
            out.decision.cut = fixed_percentile_cut(out.scores, config.fixed_percentile);
        }
        out.candidates = act::select_by_cut(out.scores, out.decision.cut);
    });
    log().info("threshold: cut {:.6f}, {} candidates", out.decision.cut, out.candidates.members.size());

    stage("identify", out, [&] {
        out.identification = identify::identify(out.candidates, image_b, out.masks_all, config.prototypes,
                                                embedder, config.acf, config.acf_enabled);
    });
    log().info("identify: {} accepted, {} changed pixels", out.identification.accepted_ids.size(),
               out.change_mask().count());
    return out;
}

std::vector<DumpEntry> dump_artifacts(const RunArtifacts& a, const fs::path& dir, bool enabled) {
    std::vector<DumpEntry> entries;
    if (!enabled) return entries;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());

    auto put = [&](const std::string& name, const std::string& bytes) {
        try {
            formats::write_file(dir / name, bytes);
        } catch (const Error& e) {
            throw Error(e.kind(), "dump " + name + ": " + e.what());
        }
        const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
        entries.push_back({name, bytes.size(), static_cast<std::uint32_t>(crc)});
    };
    auto put_png = [&](const std::string& name, auto&& writer) {
        writer(dir / name);
        put(name, formats::read_file(dir / name));
    };

    put_png("aligned.png", [&](const fs::path& p) { write_png_rgb(p, a.aligned); });
    put("masks_a.masks.json", formats::encode_masks_json(a.masks_a));
    put("masks_b.masks.json", formats::encode_masks_json(a.masks_b));
    put("masks_all.masks.json", formats::encode_masks_json(a.masks_all));

    const auto& d = a.difference.values;
    DenseFeatureMap dmap(1, d.height(), d.width());
    auto plane = dmap.plane(0);
    for (std::size_t i = 0; i < d.size(); ++i) plane[i] = static_cast<float>(d[i]);
    put("difference.dfm", formats::encode_dfm(dmap));

    json thresholds = decision_json(a.decision);
    thresholds["difference_degenerate"] = a.difference.degenerate;
    if (a.ara) {
        thresholds["ara"] = {{"delta_max", a.ara->delta_max}, {"alpha", a.ara->alpha}};
    }
    put("thresholds.json", thresholds.dump(2) + "\n");

    json scores = json::array();
    for (const auto& s : a.scores) {
        scores.push_back({{"id", s.mask_id},
                          {"source", std::string(to_string(a.masks_all[s.mask_id].source))},
                          {"similarity", s.similarity},
                          {"degenerate", s.degenerate}});
    }
    put("scores.json", scores.dump(2) + "\n");

    json candidates = json::array();
    for (const auto& s : a.candidates.members) {
        candidates.push_back({{"id", s.mask_id}, {"similarity", s.similarity}});
    }
    put("candidates.json", candidates.dump(2) + "\n");

    json cls = json::array();
    for (const auto& c : a.identification.classifications) {
        cls.push_back({{"id", c.mask_id},
                       {"sim_target", c.sim_target},
                       {"sim_background", c.sim_background},
                       {"p_target", c.p_target},
                       {"degenerate", c.degenerate}});
    }
    json classifications = {{"tau_conf", optional_number(a.identification.tau_conf)},
                            {"accepted", a.identification.accepted_ids},
                            {"regions", cls}};
    put("classifications.json", classifications.dump(2) + "\n");

    json regions = json::array();
    for (const auto& r : a.identification.change.regions) {
        regions.push_back({{"label", r.label},
                           {"area", r.area},
                           {"mean", r.mean},
                           {"stddev", r.stddev},
                           {"cv", std::isfinite(r.cv) ? json(r.cv) : json(nullptr)},
                           {"reliable", r.reliable}});
    }
    put("regions.json", regions.dump(2) + "\n");

    put_png("mask.png", [&](const fs::path& p) { write_png_mask(p, rle_decode(a.change_mask())); });
    put("mask.masks.json", single_mask_json(a.change_mask()));

    json manifest = json::array();
    for (const auto& e : entries) {
        char crc[9];
        std::snprintf(crc, sizeof crc, "%08x", e.crc32);
        manifest.push_back({{"file", e.file}, {"bytes", e.bytes}, {"crc32", crc}});
    }
    formats::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return entries;
}

std::string summary_json(const RunArtifacts& a, const PipelineConfig& config) {
    json j;
    j["image"] = {{"height", a.aligned.height()}, {"width", a.aligned.width()}};
    j["stages"] = {{"ara", config.ara_enabled}, {"act", config.act_enabled}, {"acf", config.acf_enabled}};
    if (a.ara) {
        j["ara"] = {{"delta_max", a.ara->delta_max}, {"alpha", a.ara->alpha}};
    } else {
        j["ara"] = nullptr;
    }
    j["masks"] = {{"phase_a", a.masks_a.size()}, {"phase_b", a.masks_b.size()}, {"all", a.masks_all.size()}};
    j["decision"] = decision_json(a.decision);
    if (!config.act_enabled) j["decision"]["fixed_percentile"] = config.fixed_percentile;
    j["candidates"] = a.candidates.ids();
    j["tau_conf"] = optional_number(a.identification.tau_conf);
    j["accepted"] = a.identification.accepted_ids;
    std::size_t reliable = 0;
    for (const auto& r : a.identification.change.regions) reliable += r.reliable ? 1 : 0;
    j["regions"] = {{"total", a.identification.change.regions.size()}, {"reliable", reliable}};
    j["changed_pixels"] = a.change_mask().count();
    j["prototypes"] = {{"target", config.prototypes.target}, {"background", config.prototypes.background}};
    return j.dump(2) + "\n";
}

}  // namespace adaptcd
