// Copyright (c) 2026 The rawsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rawsynth/synth.hpp"

#include <algorithm>
#include <cmath>

#include "rawsynth/metrics.hpp"

namespace rawsynth::synth {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

Vec3 random_color(std::mt19937_64& rng) {
    return {uniform01(rng), uniform01(rng), uniform01(rng)};
}

// A color near `base`: each channel jittered by +-spread, clamped.
Vec3 nearby_color(const Vec3& base, double spread, std::mt19937_64& rng) {
    return {clamp01(base[0] + uniform(rng, -spread, spread)),
            clamp01(base[1] + uniform(rng, -spread, spread)),
            clamp01(base[2] + uniform(rng, -spread, spread))};
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(base ^ (a * 0x2545f4914f6cdd1dull)) ^ b);
}

RgbImage gradient_between(int width, int height, const Vec3& c0, const Vec3& c1,
                          std::mt19937_64& rng) {
    const double angle = uniform(rng, 0.0, 2.0 * 3.14159265358979323846);
    const double dx = std::cos(angle);
    const double dy = std::sin(angle);
    // Project pixel centers onto the direction and normalize to [0,1].
    const double span = std::abs(dx) * (width - 1) + std::abs(dy) * (height - 1);
    const double offset = std::min(0.0, dx * (width - 1)) + std::min(0.0, dy * (height - 1));
    RgbImage img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double t = span > 0.0 ? (dx * x + dy * y - offset) / span : 0.0;
            for (int c = 0; c < 3; ++c) {
                const auto ci = static_cast<std::size_t>(c);
                img.at(static_cast<Channel>(c), x, y) = c0[ci] + t * (c1[ci] - c0[ci]);
            }
        }
    }
    return img;
}

}  // namespace

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

RgbImage make_gradient(int width, int height, std::mt19937_64& rng) {
    const Vec3 c0 = random_color(rng);
    const Vec3 c1 = nearby_color(c0, 0.5, rng);
    return gradient_between(width, height, c0, c1, rng);
}

RgbImage make_patches(int width, int height, std::mt19937_64& rng) {
    const Vec3 base = random_color(rng);
    RgbImage img = RgbImage::constant(width, height, base[0], base[1], base[2]);
    const int patches = 3 + static_cast<int>(rng() % 5);
    for (int p = 0; p < patches; ++p) {
        const Vec3 color = nearby_color(base, 0.25, rng);
        const int pw = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(width / 2));
        const int ph = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(height / 2));
        const int px = static_cast<int>(rng() % static_cast<std::uint64_t>(width - pw + 1));
        const int py = static_cast<int>(rng() % static_cast<std::uint64_t>(height - ph + 1));
        for (int y = py; y < py + ph; ++y) {
            for (int x = px; x < px + pw; ++x) {
                for (int c = 0; c < 3; ++c) {
                    img.at(static_cast<Channel>(c), x, y) = color[static_cast<std::size_t>(c)];
                }
            }
        }
    }
    return img;
}

RgbImage make_noise(int width, int height, std::mt19937_64& rng) {
    const Vec3 base = random_color(rng);
    // Band-limited field: a coarse grid of offsets, bilinearly upsampled.
    constexpr int kCell = 8;
    const int gw = (width + kCell - 1) / kCell + 1;
    const int gh = (height + kCell - 1) / kCell + 1;
    std::vector<double> grid(static_cast<std::size_t>(gw) * gh * 3);
    for (double& v : grid) v = uniform(rng, -0.3, 0.3);

    RgbImage img(width, height);
    for (int y = 0; y < height; ++y) {
        const double fy = static_cast<double>(y) / kCell;
        const int y0 = static_cast<int>(fy);
        const double wy = fy - y0;
        for (int x = 0; x < width; ++x) {
            const double fx = static_cast<double>(x) / kCell;
            const int x0 = static_cast<int>(fx);
            const double wx = fx - x0;
            for (int c = 0; c < 3; ++c) {
                auto g = [&](int gx, int gy) {
                    return grid[(static_cast<std::size_t>(gy) * gw + gx) * 3 +
                                static_cast<std::size_t>(c)];
                };
                const double v = (1 - wy) * ((1 - wx) * g(x0, y0) + wx * g(x0 + 1, y0)) +
                                 wy * ((1 - wx) * g(x0, y0 + 1) + wx * g(x0 + 1, y0 + 1));
                img.at(static_cast<Channel>(c), x, y) =
                    clamp01(base[static_cast<std::size_t>(c)] + v);
            }
        }
    }
    return img;
}

RgbImage make_sample(int width, int height, int index, std::mt19937_64& rng) {
    switch (index % 3) {
        case 0: return make_gradient(width, height, rng);
        case 1: return make_patches(width, height, rng);
        default: return make_noise(width, height, rng);
    }
}

std::vector<RgbImage> make_dataset(int n, int width, int height, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<RgbImage> out;
    out.reserve(static_cast<std::size_t>(std::max(n, 0)));
    for (int i = 0; i < n; ++i) out.push_back(make_sample(width, height, i, rng));
    return out;
}

std::vector<lccm::ImagePair> teacher_pairs(std::span<const RgbImage> sources,
                                           const isp::IspParams& teacher) {
    std::vector<lccm::ImagePair> pairs;
    pairs.reserve(sources.size());
    for (const RgbImage& src : sources) {
        pairs.push_back({src, isp::isp_inverse_rgb(src, teacher)});
    }
    return pairs;
}

BayerRaw make_smooth_raw(int width, int height, const isp::IspParams& p, std::mt19937_64& rng) {
    Vec3 c0, c1;
    for (int c = 0; c < 3; ++c) {
        const auto ci = static_cast<std::size_t>(c);
        c0[ci] = uniform(rng, 0.15, 0.85);
        c1[ci] = uniform(rng, 0.15, 0.85);
    }
    RgbImage srgb = gradient_between(width, height, c0, c1, rng);
    return isp::isp_inverse(srgb, p);
}

std::vector<AblationRow> run_ablation(const AblationConfig& cfg, const isp::IspParams& teacher) {
    teacher.validate();
    const auto test_sources = make_dataset(cfg.test_samples, cfg.width, cfg.height,
                                           derive_seed(cfg.seed, 0x7e57u, 0));
    const auto test_pairs = teacher_pairs(test_sources, teacher);

    std::vector<AblationRow> rows;
    for (int count : cfg.sample_counts) {
        for (int trial = 0; trial < cfg.trials; ++trial) {
            const std::uint64_t fit_seed =
                derive_seed(cfg.seed, static_cast<std::uint64_t>(count),
                            static_cast<std::uint64_t>(trial) + 1);
            const auto sources = make_dataset(count, cfg.width, cfg.height, fit_seed);
            const auto pairs = teacher_pairs(sources, teacher);
            lccm::FitConfig fit_cfg = cfg.fit;
            fit_cfg.seed = fit_seed;
            const lccm::FitReport report = lccm::fit(pairs, fit_cfg);

            double psnr_sum = 0.0;
            double ssim_sum = 0.0;
            for (const auto& pair : test_pairs) {
                RgbImage pred = lccm::apply(pair.source, report.final_matrix);
                pred.clamp01();
                psnr_sum += metrics::psnr(pred, pair.target);
                ssim_sum += metrics::ssim(pred, pair.target);
            }
            const double n = static_cast<double>(test_pairs.size());
            rows.push_back({count, trial, psnr_sum / n, ssim_sum / n});
        }
    }
    return rows;
}

}  // namespace rawsynth::synth
