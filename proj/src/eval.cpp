#include "adaptcd/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "adaptcd/formats.hpp"
#include "adaptcd/log.hpp"
#include "adaptcd/pipeline.hpp"
#include "adaptcd/png_io.hpp"

namespace adaptcd::eval {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

[[noreturn]] void bad_manifest(const std::string& what) {
    fail(ErrorKind::Config, "dataset manifest: " + what);
}

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return base.empty() || path.is_absolute() ? path : base / path;
}

DatasetEntry parse_entry(const json& node, std::size_t index, const fs::path& base) {
    if (!node.is_object()) bad_manifest("entry " + std::to_string(index) + " must be an object");
    static const std::set<std::string> known{"id", "image_a", "image_b", "gt"};
    for (const auto& [key, _] : node.items()) {
        if (!known.count(key)) bad_manifest("entry " + std::to_string(index) + ": unknown key '" + key + "'");
    }
    auto str = [&](const char* key) {
        auto it = node.find(key);
        if (it == node.end() || !it->is_string() || it->get<std::string>().empty()) {
            bad_manifest("entry " + std::to_string(index) + ": '" + key + "' must be a non-empty string");
        }
        return it->get<std::string>();
    };
    DatasetEntry e;
    if (node.contains("id")) {
        e.id = str("id");
    } else {
        char buf[32];
        std::snprintf(buf, sizeof buf, "pair-%03zu", index);
        e.id = buf;
    }
    e.image_a = resolve(base, str("image_a"));
    e.image_b = resolve(base, str("image_b"));
    e.ground_truth = resolve(base, str("gt"));
    if (e.image_a == e.image_b || e.image_a == e.ground_truth || e.image_b == e.ground_truth) {
        bad_manifest("pair '" + e.id + "' reuses a path");
    }
    return e;
}

json metrics_json(const Metrics& m) {
    return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"iou", m.iou}};
}

std::string table_row(const std::string& name, std::size_t width, const Metrics& m) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "  %8.2f%8.2f%8.2f%8.2f\n", 100.0 * m.precision, 100.0 * m.recall,
                  100.0 * m.f1, 100.0 * m.iou);
    std::string row = name;
    row.resize(std::max(width, name.size()), ' ');
    return row + buf;
}

}  // namespace

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) noexcept {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
}

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt) {
    if (pred.height() != gt.height() || pred.width() != gt.width()) {
        fail(ErrorKind::DimensionMismatch, "confusion: prediction and ground truth frames differ");
    }
    const DenseMask p = rle_decode(pred);
    const DenseMask g = rle_decode(gt);
    ConfusionCounts c;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i]) {
            (g[i] ? c.tp : c.fp) += 1;
        } else {
            (g[i] ? c.fn : c.tn) += 1;
        }
    }
    return c;
}

double f1_score(double precision, double recall) {
    const double s = precision + recall;
    return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

Metrics metrics(const ConfusionCounts& c) {
    Metrics m;
    m.precision = ratio(c.tp, c.tp + c.fp);
    m.recall = ratio(c.tp, c.tp + c.fn);
    m.f1 = f1_score(m.precision, m.recall);
    const std::uint64_t uni = c.tp + c.fp + c.fn;
    m.iou = uni == 0 ? 1.0 : ratio(c.tp, uni);
    return m;
}

DatasetManifest parse_manifest(std::string_view text, const fs::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        bad_manifest(std::string("malformed JSON: ") + e.what());
    }
    DatasetManifest out;
    const json* pairs = &doc;
    if (doc.is_object()) {
        for (const auto& [key, _] : doc.items()) {
            if (key != "pairs" && key != "prompts") bad_manifest("unknown key '" + key + "'");
        }
        if (!doc.contains("pairs")) bad_manifest("missing 'pairs'");
        pairs = &doc["pairs"];
        if (doc.contains("prompts")) {
            if (!doc["prompts"].is_string()) bad_manifest("'prompts' must be a path string");
            out.prompts = resolve(base_dir, doc["prompts"].get<std::string>());
        }
    }
    if (!pairs->is_array()) bad_manifest("expected a list of pairs");
    if (pairs->empty()) bad_manifest("no pairs");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < pairs->size(); ++i) {
        out.pairs.push_back(parse_entry((*pairs)[i], i, base_dir));
        if (!ids.insert(out.pairs.back().id).second) bad_manifest("duplicate id '" + out.pairs.back().id + "'");
    }
    return out;
}

DatasetManifest load_manifest(const fs::path& path) {
    return parse_manifest(formats::read_file(path), path.parent_path());
}

BinaryMask load_ground_truth(const fs::path& path) {
    const std::string name = path.filename().string();
    if (name.size() > 11 && name.ends_with(".masks.json")) {
        const MaskSet set = formats::decode_masks_json(formats::read_file(path));
        if (set.size() != 1) {
            fail(ErrorKind::MalformedMask, path.string() + ": ground truth must hold exactly one instance");
        }
        return set[0].mask;
    }
    return rle_encode(read_png_mask(path));
}

DatasetReport evaluate_dataset(const DatasetManifest& manifest, const PipelineConfig& config,
                               std::size_t threads) {
    if (manifest.pairs.empty()) bad_manifest("no pairs");
    PipelineConfig base = config;
    if (manifest.prompts) {
        base.prototypes = formats::decode_prompts_json(formats::read_file(*manifest.prompts));
    }

    DatasetReport report;
    report.pairs.resize(manifest.pairs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < manifest.pairs.size(); i = next++) {
            const DatasetEntry& e = manifest.pairs[i];
            PairResult& r = report.pairs[i];
            r.id = e.id;
            try {
                const Image a = read_png_rgb(e.image_a);
                const Image b = read_png_rgb(e.image_b);
                const BinaryMask gt = load_ground_truth(e.ground_truth);
                const RunArtifacts run_out = run(a, b, with_pair_id(base, e.id));
                r.counts = confusion(run_out.change_mask(), gt);
                r.metrics = metrics(*r.counts);
            } catch (const std::exception& ex) {
                r.counts.reset();
                r.metrics.reset();
                r.error = ex.what();
                log().warn("pair {} failed: {}", e.id, r.error);
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, manifest.pairs.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    ConfusionCounts sum;
    Metrics mean;
    std::size_t scored = 0;
    for (const auto& r : report.pairs) {
        if (!r.ok()) {
            ++report.failures;
            continue;
        }
        sum += *r.counts;
        mean.precision += r.metrics->precision;
        mean.recall += r.metrics->recall;
        mean.f1 += r.metrics->f1;
        mean.iou += r.metrics->iou;
        ++scored;
    }
    if (scored > 0) {
        report.micro = metrics(sum);
        const double n = static_cast<double>(scored);
        mean.precision /= n;
        mean.recall /= n;
        mean.f1 /= n;
        mean.iou /= n;
        report.macro = mean;
    }
    return report;
}

std::string report_json(const DatasetReport& report) {
    json pairs = json::array();
    for (const auto& r : report.pairs) {
        json j = {{"id", r.id}, {"status", r.ok() ? "ok" : "failed"}};
        if (r.ok()) {
            j["counts"] = {{"tp", r.counts->tp}, {"fp", r.counts->fp}, {"fn", r.counts->fn}, {"tn", r.counts->tn}};
            j["metrics"] = metrics_json(*r.metrics);
        } else {
            j["error"] = r.error;
        }
        pairs.push_back(std::move(j));
    }
    json doc = {{"pairs", pairs},
                {"scored", report.pairs.size() - report.failures},
                {"failures", report.failures},
                {"micro", report.micro ? metrics_json(*report.micro) : json(nullptr)},
                {"macro", report.macro ? metrics_json(*report.macro) : json(nullptr)}};
    return doc.dump(2) + "\n";
}

std::string report_table(const DatasetReport& report) {
    std::size_t width = 12;
    for (const auto& r : report.pairs) width = std::max(width, r.id.size());
    std::string header = "pair";
    header.resize(width, ' ');
    std::string out = header + "      Prec     Rec      F1     IoU\n";
    for (const auto& r : report.pairs) {
        if (r.ok()) out += table_row(r.id, width, *r.metrics);
    }
    out += std::string(width + 34, '-') + "\n";
    if (report.micro) out += table_row("micro", width, *report.micro);
    if (report.macro) out += table_row("macro", width, *report.macro);
    for (const auto& r : report.pairs) {
        if (!r.ok()) out += "FAILED " + r.id + ": " + r.error + "\n";
    }
    return out;
}

}  // namespace adaptcd::eval
