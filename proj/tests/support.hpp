#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "adaptcd/features.hpp"
#include "adaptcd/image.hpp"
#include "adaptcd/mask.hpp"

namespace testing {

inline std::mt19937_64& rng() {
    static std::mt19937_64 engine(20240521);
    return engine;
}

inline std::size_t uniform(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng());
}

inline double real(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

// Bernoulli pixels with density `p`.
inline adaptcd::DenseMask random_grid(std::size_t h, std::size_t w, double p) {
    adaptcd::DenseMask g(h, w);
    std::bernoulli_distribution on(p);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = on(rng()) ? 1 : 0;
    return g;
}

inline adaptcd::Image random_image(std::size_t h, std::size_t w, int lo = 0, int hi = 255) {
    adaptcd::Image img(h, w);
    std::uniform_int_distribution<int> v(lo, hi);
    for (auto& px : img.data()) px = static_cast<std::uint8_t>(v(rng()));
    return img;
}

inline adaptcd::DenseFeatureMap random_features(std::size_t c, std::size_t h, std::size_t w) {
    adaptcd::DenseFeatureMap f(c, h, w);
    std::uniform_real_distribution<float> v(-1.0f, 1.0f);
    for (auto& x : f.data()) x = v(rng());
    return f;
}

inline adaptcd::Image solid(std::size_t h, std::size_t w, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    adaptcd::Image img(h, w);
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            img.at(i, j, 0) = r;
            img.at(i, j, 1) = g;
            img.at(i, j, 2) = b;
        }
    }
    return img;
}

// Every regular file under `root`, keyed by relative path.
std::vector<std::pair<std::string, std::string>> read_tree(const std::filesystem::path& root);

// Writes an executable shell script.
void write_script(const std::filesystem::path& path, const std::string& body);

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

// Calls adaptcd::cli::main with the given arguments (program name prepended), capturing
// std::cout and std::cerr.
CliResult run_cli(const std::vector<std::string>& args);

}  // namespace testing
