#include <cmath>
#include <iostream>
#include <limits>

#include "adaptcd/formats.hpp"
#include "commands.hpp"

namespace adaptcd::cli {

namespace {

bool has_suffix(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void inspect_dfm(const std::string& bytes) {
    const DenseFeatureMap map = formats::decode_dfm(bytes);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    for (float v : map.data()) {
        lo = std::min<double>(lo, v);
        hi = std::max<double>(hi, v);
        sum += v;
    }
    std::cout << "format: dfm\n"
              << "channels: " << map.channels() << "\n"
              << "height: " << map.height() << "\n"
              << "width: " << map.width() << "\n"
              << "min: " << lo << "\n"
              << "max: " << hi << "\n"
              << "mean: " << sum / static_cast<double>(map.data().size()) << "\n";
}

void inspect_masks(const std::string& text) {
    const MaskSet set = formats::decode_masks_json(text);
    std::cout << "format: masks\n"
              << "height: " << set.height() << "\n"
              << "width: " << set.width() << "\n"
              << "instances: " << set.size() << "\n";
    for (std::size_t i = 0; i < set.size(); ++i) {
        const BinaryMask& m = set[i].mask;
        std::cout << "  id " << i << ": area " << m.count();
        if (!m.is_empty()) {
            const BBox b = mask_bbox(m);
            std::cout << ", bbox [" << b.row0 << "," << b.col0 << "," << b.row1 << "," << b.col1 << ")";
        }
        std::cout << "\n";
    }
}

void inspect_emb(const std::string& text) {
    const auto manifest = formats::decode_emb_json(text);
    std::size_t masks = 0, texts = 0;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& [key, v] : manifest.entries) {
        (key.rfind("mask:", 0) == 0 ? masks : texts) += 1;
        double n2 = 0.0;
        for (float x : v) n2 += static_cast<double>(x) * x;
        lo = std::min(lo, std::sqrt(n2));
        hi = std::max(hi, std::sqrt(n2));
    }
    std::cout << "format: emb\n"
              << "dim: " << manifest.dim << "\n"
              << "entries: " << manifest.entries.size() << " (" << masks << " mask, " << texts << " text)\n";
    if (!manifest.entries.empty()) std::cout << "norm range: " << lo << " .. " << hi << "\n";
}

}  // namespace

int cmd_inspect(const InspectOptions& o) {
    require_file(o.path, "path");
    const std::string& p = o.path;
    void (*inspect)(const std::string&) = nullptr;
    if (has_suffix(p, ".dfm")) inspect = inspect_dfm;
    else if (has_suffix(p, ".masks.json")) inspect = inspect_masks;
    else if (has_suffix(p, ".emb.json")) inspect = inspect_emb;
    else throw UsageError("cannot tell the format of '" + p + "' (expected .dfm, .masks.json or .emb.json)");

    const std::string bytes = formats::read_file(p);
    try {
        inspect(bytes);
    } catch (const Error& e) {
        std::cerr << "invalid: " << e.what() << "\n";
        return kRuntime;
    }
    std::cout << "valid\n";
    return kSuccess;
}

}  // namespace adaptcd::cli
