#include "adaptcd/config.hpp"

#include <set>

#include <nlohmann/json.hpp>

namespace adaptcd {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void bad(const std::string& what) { fail(ErrorKind::Config, "config: " + what); }

// Walks one JSON object, rejecting keys nobody asked for.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) bad(path_ + " must be an object");
    }
    ~Section() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [key, value] : node_.items()) {
            if (!seen_.count(key)) bad("unknown key '" + where(key) + "'");
        }
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    void get(const std::string& key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) bad(where(key) + " must be a boolean");
            out = v->get<bool>();
        }
    }
    void get(const std::string& key, double& out) {
        if (const json* v = find(key)) {
            if (!v->is_number()) bad(where(key) + " must be a number");
            out = v->get<double>();
        }
    }
    void get(const std::string& key, std::size_t& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_integer() || v->get<std::int64_t>() < 0) {
                bad(where(key) + " must be a non-negative integer");
            }
            out = v->get<std::size_t>();
        }
    }
    void get(const std::string& key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) bad(where(key) + " must be a string");
            out = v->get<std::string>();
        }
    }

    std::string require_string(const std::string& key) {
        const json* v = find(key);
        if (!v || !v->is_string()) bad(where(key) + " must be a string");
        return v->get<std::string>();
    }

    std::string where(const std::string& key) const { return path_ + "." + key; }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string resolve(const fs::path& base, const std::string& p) {
    if (base.empty() || p.empty() || fs::path(p).is_absolute()) return p;
    return (base / p).string();
}

std::map<std::string, std::array<double, 3>> parse_anchors(const json& node, const std::string& where) {
    if (!node.is_object()) bad(where + " must be an object");
    std::map<std::string, std::array<double, 3>> out;
    for (const auto& [name, rgb] : node.items()) {
        if (!rgb.is_array() || rgb.size() != 3) bad(where + "['" + name + "'] must be [r, g, b]");
        std::array<double, 3> v{};
        for (std::size_t i = 0; i < 3; ++i) {
            if (!rgb[i].is_number()) bad(where + "['" + name + "'] must hold numbers");
            v[i] = rgb[i].get<double>();
        }
        out[name] = v;
    }
    return out;
}

providers::SubprocessSpec parse_subprocess(Section& s) {
    providers::SubprocessSpec spec;
    spec.command = s.require_string("command");
    std::size_t ms = static_cast<std::size_t>(spec.timeout.count());
    s.get("timeout_ms", ms);
    spec.timeout = std::chrono::milliseconds(ms);
    return spec;
}

providers::SegmentationProviderSpec parse_segmentation(const json& node, const fs::path& base) {
    Section s(node, "providers.segmentation");
    const std::string kind = s.require_string("kind");
    if (kind == "synthetic-grid") {
        providers::GridSegmentation g;
        s.get("tile", g.tile);
        return g;
    }
    if (kind == "file") return providers::FileSegmentation{resolve(base, s.require_string("path"))};
    if (kind == "subprocess") return parse_subprocess(s);
    bad("unknown segmentation kind '" + kind + "'");
}

providers::FeatureProviderSpec parse_features(const json& node, const fs::path& base) {
    Section s(node, "providers.features");
    const std::string kind = s.require_string("kind");
    if (kind == "synthetic") {
        providers::SyntheticFeatures f;
        s.get("blur_radius", f.blur_radius);
        return f;
    }
    if (kind == "file") return providers::FileFeatures{resolve(base, s.require_string("path"))};
    if (kind == "subprocess") return parse_subprocess(s);
    bad("unknown features kind '" + kind + "'");
}

providers::EmbeddingProviderSpec parse_embedding(const json& node, const fs::path& base) {
    Section s(node, "providers.embedding");
    const std::string kind = s.require_string("kind");
    providers::EmbeddingProviderSpec spec;
    s.get("dim", spec.dim);
    if (kind == "synthetic-color") {
        providers::SyntheticColorEmbeddings e;
        const json* inline_anchors = s.find("anchors");
        const json* anchors_path = s.find("anchors_path");
        if (inline_anchors && anchors_path) bad("providers.embedding: give anchors or anchors_path, not both");
        if (inline_anchors) e.anchors = parse_anchors(*inline_anchors, s.where("anchors"));
        if (anchors_path) {
            if (!anchors_path->is_string()) bad(s.where("anchors_path") + " must be a string");
            e.anchors = load_anchor_table(resolve(base, anchors_path->get<std::string>()));
        }
        spec.kind = std::move(e);
    } else if (kind == "file") {
        spec.kind = providers::FileEmbeddings{resolve(base, s.require_string("path"))};
    } else if (kind == "subprocess") {
        spec.kind = parse_subprocess(s);
    } else {
        bad("unknown embedding kind '" + kind + "'");
    }
    return spec;
}

json subprocess_json(const providers::SubprocessSpec& s) {
    return {{"kind", "subprocess"}, {"command", s.command}, {"timeout_ms", s.timeout.count()}};
}

std::size_t parse_count(std::string_view text, const std::string& what) {
    std::size_t v = 0;
    try {
        std::size_t used = 0;
        v = std::stoul(std::string(text), &used);
        if (used != text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        bad("--provider " + what + " expects an integer, got '" + std::string(text) + "'");
    }
    return v;
}

std::string replace_all(std::string s, std::string_view token, std::string_view with) {
    for (auto pos = s.find(token); pos != std::string::npos; pos = s.find(token, pos + with.size())) {
        s.replace(pos, token.size(), with);
    }
    return s;
}

}  // namespace

void PipelineConfig::validate() const {
    ara.validate();
    act.validate();
    acf.validate();
    if (!(fixed_percentile > 0.0 && fixed_percentile < 100.0)) {
        bad("fixed_percentile must be in (0, 100)");
    }
    providers::validate(segmentation);
    providers::validate(features);
    providers::validate(embedding);
}

std::map<std::string, std::array<double, 3>> load_anchor_table(const fs::path& path) {
    json doc;
    try {
        doc = json::parse(formats::read_file(path));
    } catch (const json::parse_error& e) {
        bad("malformed anchor table " + path.string() + ": " + e.what());
    }
    return parse_anchors(doc, path.filename().string());
}

PipelineConfig parse_config(std::string_view text, const fs::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        bad(std::string("malformed JSON: ") + e.what());
    }
    PipelineConfig c;
    {
        Section root(doc, "config");
        if (const json* n = root.find("ara")) {
            Section s(*n, "ara");
            s.get("enabled", c.ara_enabled);
            s.get("tau_max", c.ara.tau_max);
        }
        if (const json* n = root.find("act")) {
            Section s(*n, "act");
            s.get("enabled", c.act_enabled);
            s.get("w_g", c.act.w_g);
            s.get("w_e", c.act.w_e);
            s.get("theta_min", c.act.theta_min);
            s.get("theta_max", c.act.theta_max);
            if (const json* v = s.find("n_min"); v && !v->is_null()) {
                std::size_t n = 0;
                s.get("n_min", n);
                c.act.n_min = n;
            }
            s.get("dilation_iterations", c.act.dilation_iterations);
        }
        if (const json* n = root.find("acf")) {
            Section s(*n, "acf");
            s.get("enabled", c.acf_enabled);
            s.get("percentile", c.acf.percentile);
            s.get("lambda", c.acf.lambda);
            s.get("clip_lo", c.acf.clip_lo);
            s.get("clip_hi", c.acf.clip_hi);
            s.get("mu_min", c.acf.mu_min);
            s.get("gamma", c.acf.gamma);
            s.get("a_min", c.acf.a_min);
            s.get("crop_pad_fraction", c.acf.crop_pad_fraction);
            s.get("softmax_temperature", c.acf.softmax_temperature);
        }
        root.get("fixed_percentile", c.fixed_percentile);
        if (const json* n = root.find("providers")) {
            Section s(*n, "providers");
            if (const json* v = s.find("segmentation")) c.segmentation = parse_segmentation(*v, base_dir);
            if (const json* v = s.find("features")) c.features = parse_features(*v, base_dir);
            if (const json* v = s.find("embedding")) c.embedding = parse_embedding(*v, base_dir);
        }
        if (const json* n = root.find("prototypes")) {
            Section s(*n, "prototypes");
            s.get("target", c.prototypes.target);
            s.get("background", c.prototypes.background);
        }
        root.get("dump_intermediate", c.dump_intermediate);
        root.get("output_dir", c.output_dir);
    }
    c.validate();
    return c;
}

PipelineConfig load_config(const fs::path& path) {
    return parse_config(formats::read_file(path), path.parent_path());
}

std::string serialize_config(const PipelineConfig& c) {
    json doc;
    doc["ara"] = {{"enabled", c.ara_enabled}, {"tau_max", c.ara.tau_max}};
    doc["act"] = {{"enabled", c.act_enabled},
                  {"w_g", c.act.w_g},
                  {"w_e", c.act.w_e},
                  {"theta_min", c.act.theta_min},
                  {"theta_max", c.act.theta_max},
                  {"n_min", c.act.n_min ? json(*c.act.n_min) : json(nullptr)},
                  {"dilation_iterations", c.act.dilation_iterations}};
    doc["acf"] = {{"enabled", c.acf_enabled},
                  {"percentile", c.acf.percentile},
                  {"lambda", c.acf.lambda},
                  {"clip_lo", c.acf.clip_lo},
                  {"clip_hi", c.acf.clip_hi},
                  {"mu_min", c.acf.mu_min},
                  {"gamma", c.acf.gamma},
                  {"a_min", c.acf.a_min},
                  {"crop_pad_fraction", c.acf.crop_pad_fraction},
                  {"softmax_temperature", c.acf.softmax_temperature}};
    doc["fixed_percentile"] = c.fixed_percentile;

    json seg = std::visit(
        overloaded{
            [](const providers::FileSegmentation& s) { return json{{"kind", "file"}, {"path", s.path_pattern}}; },
            [](const providers::GridSegmentation& s) { return json{{"kind", "synthetic-grid"}, {"tile", s.tile}}; },
            [](const providers::SubprocessSpec& s) { return subprocess_json(s); },
        },
        c.segmentation);
    json feat = std::visit(
        overloaded{
            [](const providers::FileFeatures& s) { return json{{"kind", "file"}, {"path", s.path_pattern}}; },
            [](const providers::SyntheticFeatures& s) {
                return json{{"kind", "synthetic"}, {"blur_radius", s.blur_radius}};
            },
            [](const providers::SubprocessSpec& s) { return subprocess_json(s); },
        },
        c.features);
    json emb = std::visit(
        overloaded{
            [](const providers::FileEmbeddings& s) { return json{{"kind", "file"}, {"path", s.path}}; },
            [](const providers::SyntheticColorEmbeddings& s) {
                json anchors = json::object();
                for (const auto& [name, rgb] : s.anchors) anchors[name] = rgb;
                return json{{"kind", "synthetic-color"}, {"anchors", anchors}};
            },
            [](const providers::SubprocessSpec& s) { return subprocess_json(s); },
        },
        c.embedding.kind);
    emb["dim"] = c.embedding.dim;
    doc["providers"] = {{"segmentation", seg}, {"features", feat}, {"embedding", emb}};
    doc["prototypes"] = {{"target", c.prototypes.target}, {"background", c.prototypes.background}};
    doc["dump_intermediate"] = c.dump_intermediate;
    doc["output_dir"] = c.output_dir;
    return doc.dump(2) + "\n";
}

void apply_provider_flag(PipelineConfig& config, std::string_view flag) {
    std::set<std::string> seen;
    std::size_t start = 0;
    while (start <= flag.size()) {
        std::size_t end = flag.find(',', start);
        if (end == std::string_view::npos) end = flag.size();
        const std::string_view item = flag.substr(start, end - start);
        start = end + 1;

        const auto eq = item.find('=');
        const auto colon = item.find(':');
        if (eq == std::string_view::npos || colon == std::string_view::npos || colon < eq) {
            bad("--provider item '" + std::string(item) + "' must look like key=kind:param");
        }
        const std::string key(item.substr(0, eq));
        const std::string kind(item.substr(eq + 1, colon - eq - 1));
        const std::string param(item.substr(colon + 1));
        if (!seen.insert(key).second) bad("--provider repeats '" + key + "'");
        if (param.empty()) bad("--provider " + key + " needs a parameter");

        if (key == "seg") {
            if (kind == "synthetic-grid") config.segmentation = providers::GridSegmentation{parse_count(param, "seg")};
            else if (kind == "file") config.segmentation = providers::FileSegmentation{param};
            else if (kind == "subprocess") config.segmentation = providers::SubprocessSpec{param};
            else bad("--provider seg: unknown kind '" + kind + "'");
        } else if (key == "feat") {
            if (kind == "synthetic") config.features = providers::SyntheticFeatures{parse_count(param, "feat")};
            else if (kind == "file") config.features = providers::FileFeatures{param};
            else if (kind == "subprocess") config.features = providers::SubprocessSpec{param};
            else bad("--provider feat: unknown kind '" + kind + "'");
        } else if (key == "emb") {
            if (kind == "synthetic-color") {
                config.embedding = {providers::SyntheticColorEmbeddings{load_anchor_table(param)}, 3};
            } else if (kind == "file") {
                const auto manifest = formats::decode_emb_json(formats::read_file(param));
                config.embedding = {providers::FileEmbeddings{param}, manifest.dim};
            } else if (kind == "subprocess") {
                // Keeps the dimensionality already configured.
                config.embedding.kind = providers::SubprocessSpec{param};
            } else {
                bad("--provider emb: unknown kind '" + kind + "'");
            }
        } else {
            bad("--provider: unknown key '" + key + "' (expected seg, feat or emb)");
        }
        if (end == flag.size()) break;
    }
    config.validate();
}

PipelineConfig with_pair_id(PipelineConfig config, const std::string& pair_id) {
    if (auto* s = std::get_if<providers::FileSegmentation>(&config.segmentation)) {
        s->path_pattern = replace_all(s->path_pattern, "{pair}", pair_id);
    }
    if (auto* s = std::get_if<providers::FileFeatures>(&config.features)) {
        s->path_pattern = replace_all(s->path_pattern, "{pair}", pair_id);
    }
    if (auto* s = std::get_if<providers::FileEmbeddings>(&config.embedding.kind)) {
        s->path = replace_all(s->path, "{pair}", pair_id);
    }
    return config;
}

}  // namespace adaptcd
