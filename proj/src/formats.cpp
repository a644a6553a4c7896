#include "adaptcd/formats.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace adaptcd::formats {

using nlohmann::json;

namespace {

constexpr std::string_view kDfmMagic = "DFM1";
constexpr std::size_t kDfmHeader = 16;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
    }
}

std::uint32_t get_u32(std::string_view bytes, std::size_t offset) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
    }
    return v;
}

[[noreturn]] void corrupt(ErrorKind kind, const std::string& what) {
    fail(kind, what);
}

json parse_json(std::string_view text, std::string_view what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        corrupt(ErrorKind::Io, "malformed JSON in " + std::string(what) + ": " + e.what());
    }
}

const json& require(const json& obj, const char* key, std::string_view what) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        corrupt(ErrorKind::Io, std::string(what) + ": missing field '" + key + "'");
    }
    return *it;
}

std::uint64_t require_uint(const json& obj, const char* key, std::string_view what) {
    const json& v = require(obj, key, what);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        corrupt(ErrorKind::Io, std::string(what) + ": field '" + key + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

}  // namespace

std::string encode_dfm(const DenseFeatureMap& map) {
    std::string out;
    out.reserve(kDfmHeader + map.data().size() * 4);
    out.append(kDfmMagic);
    put_u32(out, static_cast<std::uint32_t>(map.channels()));
    put_u32(out, static_cast<std::uint32_t>(map.height()));
    put_u32(out, static_cast<std::uint32_t>(map.width()));
    for (float v : map.data()) {
        put_u32(out, std::bit_cast<std::uint32_t>(v));
    }
    return out;
}

DenseFeatureMap decode_dfm(std::string_view bytes) {
    if (bytes.size() < kDfmMagic.size() || bytes.substr(0, kDfmMagic.size()) != kDfmMagic) {
        corrupt(ErrorKind::CorruptFeature, "bad magic: expected \"DFM1\"");
    }
    if (bytes.size() < kDfmHeader) {
        corrupt(ErrorKind::CorruptFeature, "truncated header: need 16 bytes, have " +
                                               std::to_string(bytes.size()));
    }
    const std::uint64_t c = get_u32(bytes, 4), h = get_u32(bytes, 8), w = get_u32(bytes, 12);
    if (c == 0 || h == 0 || w == 0) {
        corrupt(ErrorKind::CorruptFeature, "zero dimension in header (C=" + std::to_string(c) +
                                               ", H=" + std::to_string(h) + ", W=" +
                                               std::to_string(w) + ")");
    }
    const std::uint64_t count = c * h * w;
    const std::uint64_t expected = kDfmHeader + count * 4;
    if (bytes.size() != expected) {
        corrupt(ErrorKind::CorruptFeature, "payload length mismatch: expected " +
                                               std::to_string(expected) + " bytes, have " +
                                               std::to_string(bytes.size()));
    }
    std::vector<float> data(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        data[i] = std::bit_cast<float>(get_u32(bytes, kDfmHeader + i * 4));
        if (!std::isfinite(data[i])) {
            corrupt(ErrorKind::CorruptFeature, "non-finite value at flat index " + std::to_string(i));
        }
    }
    return DenseFeatureMap(c, h, w, std::move(data));
}

std::string encode_masks_json(const MaskSet& masks) {
    json instances = json::array();
    for (std::size_t id = 0; id < masks.size(); ++id) {
        instances.push_back({{"id", id}, {"rle", masks[id].mask.runs()}});
    }
    json doc = {{"height", masks.height()}, {"width", masks.width()}, {"instances", instances}};
    return doc.dump() + "\n";
}

MaskSet decode_masks_json(std::string_view text, Phase phase) {
    constexpr std::string_view what = "mask manifest";
    const json doc = parse_json(text, what);
    if (!doc.is_object()) {
        corrupt(ErrorKind::Io, "mask manifest: top level must be an object");
    }
    const std::uint64_t h = require_uint(doc, "height", what);
    const std::uint64_t w = require_uint(doc, "width", what);
    if (h == 0 || w == 0) {
        corrupt(ErrorKind::Io, "mask manifest: zero dimension");
    }
    const json& instances = require(doc, "instances", what);
    if (!instances.is_array()) {
        corrupt(ErrorKind::Io, "mask manifest: 'instances' must be an array");
    }
    MaskSet set(h, w);
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const json& inst = instances[i];
        if (!inst.is_object()) {
            corrupt(ErrorKind::Io, "mask manifest: instance " + std::to_string(i) + " is not an object");
        }
        const std::uint64_t id = require_uint(inst, "id", what);
        if (id != i) {
            corrupt(ErrorKind::MalformedMask, "ids must be dense and ordered: instance at position " +
                                                  std::to_string(i) + " has id " + std::to_string(id));
        }
        const json& rle = require(inst, "rle", what);
        if (!rle.is_array()) {
            corrupt(ErrorKind::MalformedMask, "instance id " + std::to_string(id) + ": 'rle' must be an array");
        }
        std::vector<std::uint32_t> runs;
        runs.reserve(rle.size());
        for (const json& r : rle) {
            if (!r.is_number_integer() || r.get<std::int64_t>() < 0 ||
                r.get<std::int64_t>() > static_cast<std::int64_t>(UINT32_MAX)) {
                corrupt(ErrorKind::MalformedMask, "instance id " + std::to_string(id) +
                                                      ": run lengths must be non-negative integers");
            }
            runs.push_back(r.get<std::uint32_t>());
        }
        if (auto problem = validate_runs(h, w, runs); !problem.empty()) {
            corrupt(ErrorKind::MalformedMask, "instance id " + std::to_string(id) + ": " + problem);
        }
        set.add(BinaryMask(h, w, std::move(runs)), phase);
    }
    return set;
}

std::string encode_emb_json(const EmbeddingManifest& manifest) {
    json entries = json::object();
    for (const auto& [key, vec] : manifest.entries) {
        json arr = json::array();
        for (float v : vec) arr.push_back(v);
        entries[key] = std::move(arr);
    }
    json doc = {{"dim", manifest.dim}, {"entries", entries}};
    return doc.dump() + "\n";
}

EmbeddingManifest decode_emb_json(std::string_view text) {
    constexpr std::string_view what = "embedding manifest";
    const json doc = parse_json(text, what);
    if (!doc.is_object()) {
        corrupt(ErrorKind::Io, "embedding manifest: top level must be an object");
    }
    EmbeddingManifest out;
    out.dim = require_uint(doc, "dim", what);
    if (out.dim == 0) {
        corrupt(ErrorKind::Io, "embedding manifest: dim must be >= 1");
    }
    const json& entries = require(doc, "entries", what);
    if (!entries.is_object()) {
        corrupt(ErrorKind::Io, "embedding manifest: 'entries' must be an object");
    }
    for (const auto& [key, value] : entries.items()) {
        if (key.rfind("mask:", 0) != 0 && key.rfind("text:", 0) != 0) {
            corrupt(ErrorKind::Io, "embedding key must start with mask: or text: (got '" + key + "')");
        }
        if (!value.is_array() || value.size() != out.dim) {
            corrupt(ErrorKind::DimensionMismatch, "entry '" + key + "': dimension mismatch, expected " +
                                                      std::to_string(out.dim));
        }
        std::vector<float> vec;
        vec.reserve(out.dim);
        for (const json& x : value) {
            if (!x.is_number()) {
                corrupt(ErrorKind::Io, "entry '" + key + "': non-numeric component");
            }
            const double d = x.get<double>();
            if (!std::isfinite(d)) {
                corrupt(ErrorKind::Io, "entry '" + key + "': non-finite value");
            }
            vec.push_back(static_cast<float>(d));
        }
        out.entries.emplace(key, std::move(vec));
    }
    return out;
}

void Prompts::validate() const {
    if (target.empty() || background.empty()) {
        fail(ErrorKind::Config, "prompts: target and background must be non-empty");
    }
    if (target == background) {
        fail(ErrorKind::Config, "prompts: target and background must differ");
    }
}

std::string encode_prompts_json(const Prompts& prompts) {
    json doc = {{"target", prompts.target}, {"background", prompts.background}};
    return doc.dump(2) + "\n";
}

Prompts decode_prompts_json(std::string_view text) {
    const json doc = parse_json(text, "prompt file");
    if (!doc.is_object()) {
        fail(ErrorKind::Config, "prompt file: top level must be an object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (key != "target" && key != "background") {
            fail(ErrorKind::Config, "prompt file: unknown key '" + key + "'");
        }
        if (!value.is_string()) {
            fail(ErrorKind::Config, "prompt file: '" + key + "' must be a string");
        }
    }
    Prompts p;
    p.target = require(doc, "target", "prompt file").get<std::string>();
    p.background = require(doc, "background", "prompt file").get<std::string>();
    p.validate();
    return p;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        fail(ErrorKind::Io, "short write to '" + path.string() + "'");
    }
}

}  // namespace adaptcd::formats
