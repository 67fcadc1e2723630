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

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rawsynth/image.hpp"
#include "rawsynth/isp.hpp"
#include "rawsynth/lccm.hpp"

namespace rawsynth::synth {

/// Uniform double in [0,1) from the top 53 bits of the generator, so results
/// do not depend on the standard library's distribution implementation.
double uniform01(std::mt19937_64& rng);
double uniform(std::mt19937_64& rng, double lo, double hi);

// Procedural sRGB sources. Each image draws a narrow palette of its own
// (a color line, a handful of patches, or noise around one base color), so
// small training sets cover color space poorly and sample count matters.
RgbImage make_gradient(int width, int height, std::mt19937_64& rng);
RgbImage make_patches(int width, int height, std::mt19937_64& rng);
RgbImage make_noise(int width, int height, std::mt19937_64& rng);

/// Round-robin over the three families by index.
RgbImage make_sample(int width, int height, int index, std::mt19937_64& rng);

std::vector<RgbImage> make_dataset(int n, int width, int height, std::uint64_t seed);

/// Pair each source with its RGB-domain RAW reconstruction under the teacher
/// pipeline (unclamped, pre-mosaic).
std::vector<lccm::ImagePair> teacher_pairs(std::span<const RgbImage> sources,
                                           const isp::IspParams& teacher);

/// Smooth synthetic raw: the inverse image of a smooth mid-range sRGB
/// gradient, so the forward pipeline stays inside [0,1].
BayerRaw make_smooth_raw(int width, int height, const isp::IspParams& p, std::mt19937_64& rng);

struct AblationConfig {
    std::vector<int> sample_counts{10, 25, 50, 100, 250, 500};
    int trials = 3;
    int test_samples = 50;
    int width = 64;
    int height = 64;
    std::uint64_t seed = 0;
    lccm::FitConfig fit;
};

struct AblationRow {
    int samples = 0;
    int trial = 0;
    double psnr_db = 0.0;
    double ssim = 0.0;
};

/// For each (sample count, trial): fit on a fresh subset and measure PSNR /
/// SSIM of clamped predictions on a shared held-out test set.
std::vector<AblationRow> run_ablation(const AblationConfig& cfg, const isp::IspParams& teacher);

}  // namespace rawsynth::synth
