#include "adaptcd/act.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "adaptcd/imaging.hpp"
#include "adaptcd/log.hpp"
#include "adaptcd/simd/kernels.hpp"

namespace adaptcd::act {
namespace {

using u128 = unsigned __int128;
using i128 = __int128;

struct U256 {
    std::array<std::uint64_t, 4> limb{};  // little-endian
};

U256 mul_wide(u128 a, u128 b) {
    const std::uint64_t a_lo = static_cast<std::uint64_t>(a), a_hi = static_cast<std::uint64_t>(a >> 64);
    const std::uint64_t b_lo = static_cast<std::uint64_t>(b), b_hi = static_cast<std::uint64_t>(b >> 64);
    const u128 ll = static_cast<u128>(a_lo) * b_lo;
    const u128 lh = static_cast<u128>(a_lo) * b_hi;
    const u128 hl = static_cast<u128>(a_hi) * b_lo;
    const u128 hh = static_cast<u128>(a_hi) * b_hi;

    U256 r;
    r.limb[0] = static_cast<std::uint64_t>(ll);
    u128 mid = (ll >> 64) + static_cast<std::uint64_t>(lh) + static_cast<std::uint64_t>(hl);
    r.limb[1] = static_cast<std::uint64_t>(mid);
    u128 upper = (mid >> 64) + (lh >> 64) + (hl >> 64) + static_cast<std::uint64_t>(hh);
    r.limb[2] = static_cast<std::uint64_t>(upper);
    r.limb[3] = static_cast<std::uint64_t>((upper >> 64) + (hh >> 64));
    return r;
}

bool greater(const U256& a, const U256& b) {
    for (int i = 3; i >= 0; --i) {
        if (a.limb[i] != b.limb[i]) return a.limb[i] > b.limb[i];
    }
    return false;
}

// Between-class variance up to the common factor 1/N^2: A^2 / (n0 * n1) with
// A = n1 * s0 - n0 * s1. Kept as a fraction for exact comparison.
struct Variance {
    u128 num = 0;
    u128 den = 1;
};

}  // namespace

std::size_t otsu_bin(double v) {
    return std::min<std::size_t>(kOtsuBins - 1,
                                 static_cast<std::size_t>(std::floor(v * static_cast<double>(kOtsuBins))));
}

OtsuResult otsu_from_histogram(const Histogram& histogram) {
    std::uint64_t total = 0;
    u128 weighted = 0;
    for (std::size_t i = 0; i < kOtsuBins; ++i) {
        total += histogram[i];
        weighted += static_cast<u128>(histogram[i]) * i;
    }
    // |A| <= 255 * N^2 / 4 must fit 64 bits so that A^2 fits 128.
    if (total >= (std::uint64_t{1} << 28)) {
        fail(ErrorKind::InvalidArgument, "otsu histogram too large for exact comparison");
    }

    OtsuResult best;
    best.degenerate = true;
    Variance best_var;
    std::uint64_t n0 = 0;
    u128 s0 = 0;
    for (std::size_t k = 1; k < kOtsuBins; ++k) {
        n0 += histogram[k - 1];
        s0 += static_cast<u128>(histogram[k - 1]) * (k - 1);
        const std::uint64_t n1 = total - n0;
        if (n0 == 0 || n1 == 0) continue;
        const u128 s1 = weighted - s0;
        const i128 a = static_cast<i128>(static_cast<u128>(n1) * s0) -
                       static_cast<i128>(static_cast<u128>(n0) * s1);
        const u128 abs_a = static_cast<u128>(a < 0 ? -a : a);
        const Variance var{abs_a * abs_a, static_cast<u128>(n0) * n1};
        if (best.degenerate || greater(mul_wide(var.num, best_var.den), mul_wide(best_var.num, var.den))) {
            best.degenerate = false;
            best.cut_bin = k;
            best_var = var;
        }
    }
    if (best.degenerate) {
        return OtsuResult{0.0, 0, true};
    }
    best.threshold = (static_cast<double>(best.cut_bin) + 0.5) / static_cast<double>(kOtsuBins);
    return best;
}

OtsuResult otsu_threshold(std::span<const double> values) {
    if (values.empty()) {
        fail(ErrorKind::InvalidArgument, "otsu_threshold of an empty sample set");
    }
    Histogram hist{};
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            fail(ErrorKind::InvalidArgument, "otsu sample outside [0, 1]: " + std::to_string(v));
        }
        ++hist[otsu_bin(v)];
    }
    return otsu_from_histogram(hist);
}

DifferenceMap difference_map(const DenseFeatureMap& fa, const DenseFeatureMap& fb) {
    if (!fa.same_dims(fb)) {
        fail(ErrorKind::DimensionMismatch, "difference_map requires identical feature dims");
    }
    const std::size_t h = fa.height(), w = fa.width();
    DifferenceMap out;
    out.values = RealGrid(h, w);
    auto raw = out.values.values();
    simd::active_kernels().l2_diff(fa.data().data(), fb.data().data(), fa.channels(),
                                   fa.plane_size(), raw.data());
    const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
    const double dmin = *lo, dmax = *hi;
    if (!(dmax > dmin)) {
        std::fill(raw.begin(), raw.end(), 0.0);
        out.degenerate = true;
        return out;
    }
    const double range = dmax - dmin;
    for (double& v : raw) {
        v = std::clamp((v - dmin) / range, 0.0, 1.0);
    }
    return out;
}

void ActConfig::validate() const {
    if (!(w_g >= 0.0 && w_e >= 0.0) || std::abs(w_g + w_e - 1.0) > 1e-9) {
        fail(ErrorKind::Config, "act weights must be non-negative and sum to 1");
    }
    if (!(theta_min > 0.0 && theta_min < theta_max && theta_max <= 180.0)) {
        fail(ErrorKind::Config, "act angles must satisfy 0 < theta_min < theta_max <= 180");
    }
}

double ActConfig::min_edge_pixels(std::size_t height, std::size_t width) const {
    if (n_min) {
        return static_cast<double>(*n_min);
    }
    return std::max(256.0, 0.005 * static_cast<double>(height * width));
}

EdgeThreshold edge_local_threshold(const DifferenceMap& d, const ActConfig& config) {
    EdgeThreshold out;
    const RealGrid& values = d.values;
    if (d.degenerate || values.height() < 3 || values.width() < 3) {
        return out;
    }
    RealGrid gradient = sobel_magnitude(values);
    const double gmax = *std::max_element(gradient.values().begin(), gradient.values().end());
    if (!(gmax > 0.0)) {
        return out;
    }
    for (double& g : gradient.values()) {
        g /= gmax;
    }
    const OtsuResult edge_cut = otsu_threshold(gradient.values());
    if (edge_cut.degenerate) {
        return out;
    }
    DenseMask edges(values.height(), values.width());
    for (std::size_t i = 0; i < gradient.size(); ++i) {
        edges[i] = otsu_bin(gradient[i]) >= edge_cut.cut_bin ? 1 : 0;
    }
    edges = dilate_3x3(edges, config.dilation_iterations);

    std::vector<double> band;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i] != 0) band.push_back(values[i]);
    }
    out.edge_pixel_count = band.size();
    if (static_cast<double>(band.size()) < config.min_edge_pixels(values.height(), values.width())) {
        return out;
    }
    const OtsuResult local = otsu_threshold(band);
    if (!local.degenerate) {
        out.tau_edge = local.threshold;
    }
    return out;
}

double fuse_thresholds(double tau_global, std::optional<double> tau_edge,
                       const ActConfig& config) {
    if (!tau_edge) {
        return tau_global;
    }
    return config.w_g * tau_global + config.w_e * *tau_edge;
}

double map_to_angle(double tau_final, const ActConfig& config) {
    return config.theta_min + tau_final * (config.theta_max - config.theta_min);
}

double decision_cut(double theta_degrees) {
    return std::cos((180.0 - theta_degrees) * std::numbers::pi / 180.0);
}

ThresholdBundle compute_thresholds(const DifferenceMap& d, const ActConfig& config) {
    config.validate();
    ThresholdBundle b;
    const OtsuResult global = otsu_threshold(d.values.values());
    b.tau_global = global.threshold;
    b.global_degenerate = global.degenerate;
    const EdgeThreshold edge = edge_local_threshold(d, config);
    b.tau_edge = edge.tau_edge;
    b.edge_pixel_count = edge.edge_pixel_count;
    b.tau_final = fuse_thresholds(b.tau_global, b.tau_edge, config);
    b.theta = map_to_angle(b.tau_final, config);
    b.cut = decision_cut(b.theta);
    return b;
}

std::vector<double> mask_pool(const DenseFeatureMap& features, const BinaryMask& mask) {
    if (features.height() != mask.height() || features.width() != mask.width()) {
        fail(ErrorKind::DimensionMismatch, "mask_pool: feature map and mask frames differ");
    }
    const std::size_t n = mask.count();
    if (n == 0) {
        fail(ErrorKind::EmptyRegion, "mask_pool over an empty mask");
    }
    std::vector<double> pooled(features.channels(), 0.0);
    for (std::size_t c = 0; c < features.channels(); ++c) {
        const auto plane = features.plane(c);
        double acc = 0.0;
        mask.for_each_span([&](std::size_t start, std::size_t len) {
            for (std::size_t i = start; i < start + len; ++i) {
                acc += static_cast<double>(plane[i]);
            }
        });
        pooled[c] = acc / static_cast<double>(n);
    }
    return pooled;
}

Similarity cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        fail(ErrorKind::DimensionMismatch, "cosine_similarity of vectors with different dims");
    }
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) {
        return {1.0, true};
    }
    // sqrt(x * x) == x exactly, so identical vectors give exactly 1.
    return {std::clamp(dot / std::sqrt(nu * nv), -1.0, 1.0), false};
}

std::vector<std::size_t> CandidateSet::ids() const {
    std::vector<std::size_t> out;
    out.reserve(members.size());
    for (const auto& m : members) out.push_back(m.mask_id);
    return out;
}

std::vector<RegionScore> score_regions(const MaskSet& masks, const DenseFeatureMap& fa,
                                       const DenseFeatureMap& fb) {
    if (!fa.same_dims(fb)) {
        fail(ErrorKind::DimensionMismatch, "score_regions: feature maps differ in shape");
    }
    std::vector<RegionScore> scores;
    scores.reserve(masks.size());
    for (std::size_t id = 0; id < masks.size(); ++id) {
        RegionScore s;
        s.mask_id = id;
        s.pooled_a = mask_pool(fa, masks[id].mask);
        s.pooled_b = mask_pool(fb, masks[id].mask);
        const Similarity sim = cosine_similarity(s.pooled_a, s.pooled_b);
        s.similarity = sim.value;
        s.degenerate = sim.degenerate;
        if (sim.degenerate) {
            log().warn("mask {} has a zero-norm pooled feature; treated as unchanged", id);
        }
        scores.push_back(std::move(s));
    }
    return scores;
}

CandidateSet select_by_cut(const std::vector<RegionScore>& scores, double cut) {
    CandidateSet out;
    for (const auto& s : scores) {
        if (!s.degenerate && s.similarity < cut) {
            out.members.push_back(s);
        }
    }
    return out;
}

CandidateSet select_candidates(const MaskSet& masks, const DenseFeatureMap& fa,
                               const DenseFeatureMap& fb, double theta_degrees) {
    return select_by_cut(score_regions(masks, fa, fb), decision_cut(theta_degrees));
}

}  // namespace adaptcd::act
