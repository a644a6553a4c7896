#include "adaptcd/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "adaptcd/simd/kernels.hpp"

namespace adaptcd {

DenseMask dilate_3x3(const DenseMask& grid, std::size_t iterations) {
    const std::size_t h = grid.height();
    const std::size_t w = grid.width();
    DenseMask current = grid;
    for (std::size_t it = 0; it < iterations; ++it) {
        DenseMask next(h, w);
        for (std::size_t r = 0; r < h; ++r) {
            const std::size_t r0 = r == 0 ? 0 : r - 1;
            const std::size_t r1 = std::min(h - 1, r + 1);
            for (std::size_t c = 0; c < w; ++c) {
                const std::size_t c0 = c == 0 ? 0 : c - 1;
                const std::size_t c1 = std::min(w - 1, c + 1);
                std::uint8_t v = 0;
                for (std::size_t rr = r0; rr <= r1 && v == 0; ++rr) {
                    for (std::size_t cc = c0; cc <= c1; ++cc) {
                        if (current(rr, cc) != 0) {
                            v = 1;
                            break;
                        }
                    }
                }
                next(r, c) = v;
            }
        }
        current = std::move(next);
    }
    return current;
}

BinaryMask dilate_3x3(const BinaryMask& mask, std::size_t iterations) {
    if (iterations == 0 || mask.is_empty()) {
        return mask;
    }
    return rle_encode(dilate_3x3(rle_decode(mask), iterations));
}

namespace {

// Copies `map` into an (H + 2p) x (W + 2p) buffer with replicated borders.
std::vector<double> replicate_pad(const RealGrid& map, std::size_t pad) {
    const std::size_t h = map.height();
    const std::size_t w = map.width();
    const std::size_t pw = w + 2 * pad;
    std::vector<double> out((h + 2 * pad) * pw);
    for (std::size_t pr = 0; pr < h + 2 * pad; ++pr) {
        const std::size_t r = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
            static_cast<std::ptrdiff_t>(pr) - static_cast<std::ptrdiff_t>(pad), 0,
            static_cast<std::ptrdiff_t>(h) - 1));
        const double* src = map.row_ptr(r);
        double* dst = out.data() + pr * pw;
        for (std::size_t pc = 0; pc < pw; ++pc) {
            const std::size_t c = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
                static_cast<std::ptrdiff_t>(pc) - static_cast<std::ptrdiff_t>(pad), 0,
                static_cast<std::ptrdiff_t>(w) - 1));
            dst[pc] = src[c];
        }
    }
    return out;
}

}  // namespace

RealGrid sobel_magnitude(const RealGrid& map) {
    if (map.height() < 3 || map.width() < 3) {
        fail(ErrorKind::TooSmall, "sobel_magnitude needs at least a 3x3 grid, got " +
                                      std::to_string(map.height()) + "x" +
                                      std::to_string(map.width()));
    }
    const std::size_t h = map.height();
    const std::size_t w = map.width();
    const std::size_t pw = w + 2;
    const auto padded = replicate_pad(map, 1);
    const auto& k = simd::active_kernels();
    RealGrid out(h, w);
    for (std::size_t r = 0; r < h; ++r) {
        k.sobel_row(padded.data() + r * pw, padded.data() + (r + 1) * pw,
                    padded.data() + (r + 2) * pw, w, out.row_ptr(r));
    }
    return out;
}

RealGrid box_blur(const RealGrid& map, std::size_t radius) {
    const std::size_t h = map.height();
    const std::size_t w = map.width();
    if (h == 0 || w == 0) {
        fail(ErrorKind::InvalidArgument, "box_blur of an empty grid");
    }
    if (radius == 0) {
        return map;
    }
    const std::size_t taps = 2 * radius + 1;
    const auto& k = simd::active_kernels();

    // Horizontal pass over rows padded only along columns.
    std::vector<double> row_buf(w + 2 * radius);
    RealGrid horizontal(h, w);
    for (std::size_t r = 0; r < h; ++r) {
        const double* src = map.row_ptr(r);
        for (std::size_t pc = 0; pc < row_buf.size(); ++pc) {
            const auto c = std::clamp<std::ptrdiff_t>(
                static_cast<std::ptrdiff_t>(pc) - static_cast<std::ptrdiff_t>(radius), 0,
                static_cast<std::ptrdiff_t>(w) - 1);
            row_buf[pc] = src[c];
        }
        k.window_sum(row_buf.data(), w, taps, horizontal.row_ptr(r));
    }

    RealGrid out(h, w);
    std::vector<const double*> rows(taps);
    const double norm = static_cast<double>(taps * taps);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t d = 0; d < taps; ++d) {
            const auto rr = std::clamp<std::ptrdiff_t>(
                static_cast<std::ptrdiff_t>(r + d) - static_cast<std::ptrdiff_t>(radius), 0,
                static_cast<std::ptrdiff_t>(h) - 1);
            rows[d] = horizontal.row_ptr(static_cast<std::size_t>(rr));
        }
        double* dst = out.row_ptr(r);
        k.row_sum(rows.data(), taps, w, dst);
        for (std::size_t c = 0; c < w; ++c) {
            dst[c] /= norm;
        }
    }
    return out;
}

DenseFeatureMap bilinear_upsample(const DenseFeatureMap& map, std::size_t height,
                                  std::size_t width) {
    if (height == 0 || width == 0) {
        fail(ErrorKind::InvalidArgument, "bilinear_upsample target dimension is zero");
    }
    if (map.channels() == 0 || map.height() == 0 || map.width() == 0) {
        fail(ErrorKind::InvalidArgument, "bilinear_upsample source is empty");
    }
    if (map.height() == height && map.width() == width) {
        return map;
    }

    struct Tap {
        std::size_t i0, i1;
        double f;
    };
    auto taps_for = [](std::size_t src, std::size_t dst) {
        std::vector<Tap> taps(dst);
        const double scale = static_cast<double>(src) / static_cast<double>(dst);
        for (std::size_t x = 0; x < dst; ++x) {
            double s = (static_cast<double>(x) + 0.5) * scale - 0.5;
            s = std::clamp(s, 0.0, static_cast<double>(src - 1));
            const auto i0 = static_cast<std::size_t>(std::floor(s));
            const std::size_t i1 = std::min(i0 + 1, src - 1);
            taps[x] = {i0, i1, s - static_cast<double>(i0)};
        }
        return taps;
    };
    const auto ty = taps_for(map.height(), height);
    const auto tx = taps_for(map.width(), width);

    DenseFeatureMap out(map.channels(), height, width);
    for (std::size_t c = 0; c < map.channels(); ++c) {
        for (std::size_t y = 0; y < height; ++y) {
            const Tap& a = ty[y];
            for (std::size_t x = 0; x < width; ++x) {
                const Tap& b = tx[x];
                const double v00 = map.at(c, a.i0, b.i0);
                const double v01 = map.at(c, a.i0, b.i1);
                const double v10 = map.at(c, a.i1, b.i0);
                const double v11 = map.at(c, a.i1, b.i1);
                const double top = v00 + (v01 - v00) * b.f;
                const double bot = v10 + (v11 - v10) * b.f;
                double v = top + (bot - top) * a.f;
                // Keep the result inside the sample hull despite rounding.
                const double lo = std::min(std::min(v00, v01), std::min(v10, v11));
                const double hi = std::max(std::max(v00, v01), std::max(v10, v11));
                v = std::clamp(v, lo, hi);
                out.at(c, y, x) = static_cast<float>(v);
            }
        }
    }
    return out;
}

namespace {

std::uint32_t find_root(std::vector<std::uint32_t>& parent, std::uint32_t x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

void unite(std::vector<std::uint32_t>& parent, std::uint32_t a, std::uint32_t b) {
    a = find_root(parent, a);
    b = find_root(parent, b);
    if (a == b) return;
    if (a < b) {
        parent[b] = a;
    } else {
        parent[a] = b;
    }
}

}  // namespace

ComponentLabeling connected_components_8(const DenseMask& grid) {
    const std::size_t h = grid.height();
    const std::size_t w = grid.width();
    Grid<std::uint32_t> provisional(h, w, 0);
    std::vector<std::uint32_t> parent{0};

    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            if (grid(r, c) == 0) continue;
            std::uint32_t label = 0;
            auto visit = [&](std::size_t rr, std::size_t cc) {
                const std::uint32_t n = provisional(rr, cc);
                if (n == 0) return;
                if (label == 0) {
                    label = n;
                } else {
                    unite(parent, label, n);
                }
            };
            if (c > 0) visit(r, c - 1);
            if (r > 0) {
                if (c > 0) visit(r - 1, c - 1);
                visit(r - 1, c);
                if (c + 1 < w) visit(r - 1, c + 1);
            }
            if (label == 0) {
                label = static_cast<std::uint32_t>(parent.size());
                parent.push_back(label);
            }
            provisional(r, c) = label;
        }
    }

    ComponentLabeling out;
    out.labels = Grid<std::uint32_t>(h, w, 0);
    std::vector<std::uint32_t> final_label(parent.size(), 0);
    for (std::size_t i = 0; i < provisional.size(); ++i) {
        const std::uint32_t p = provisional[i];
        if (p == 0) continue;
        const std::uint32_t root = find_root(parent, p);
        if (final_label[root] == 0) {
            out.components.push_back({out.components.size() + 1, {}});
            final_label[root] = static_cast<std::uint32_t>(out.components.size());
        }
        const std::uint32_t label = final_label[root];
        out.labels[i] = label;
        out.components[label - 1].pixels.push_back(i);
    }
    return out;
}

ComponentLabeling connected_components_8(const BinaryMask& mask) {
    return connected_components_8(rle_decode(mask));
}

}  // namespace adaptcd
