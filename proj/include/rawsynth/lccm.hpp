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
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "rawsynth/color_matrix.hpp"
#include "rawsynth/image.hpp"

namespace rawsynth::lccm {

/// One training sample: an sRGB source and its RGB-domain RAW target
/// (pre-mosaic), dimension-matched.
struct ImagePair {
    RgbImage source;
    RgbImage target;
};

enum class Optimizer { adam, sgd, closed_form };
enum class Init { identity, zeros, seeded_random };

Optimizer optimizer_from_string(std::string_view name);
Init init_from_string(std::string_view name);

struct FitConfig {
    Optimizer optimizer = Optimizer::adam;
    double learning_rate = 0.001;
    int epochs = 100;
    int batch = 1;  // images per optimizer step
    std::uint64_t seed = 0;
    Init init = Init::identity;

    void validate() const;
};

struct FitReport {
    ColorMatrix final_matrix;
    std::vector<double> loss_per_epoch;   // full-dataset MSE after each pass
    std::vector<double> psnr_per_epoch;   // 10*log10(1/loss), capped at 99 dB
    std::size_t samples_used = 0;
};

/// Per-pixel affine transform, unclamped. Same math as isp::color_correct.
RgbImage apply(const RgbImage& img, const ColorMatrix& m);

/// Mean squared error over all n = 3*W*H scalar samples.
double mse_loss(const RgbImage& pred, const RgbImage& target);

struct Gradients {
    Mat3 weights{};
    Vec3 bias{};
};

/// Analytic gradient of the pooled MSE over the batch:
///   dL/dW = (2/n) sum (pred - target) outer source,  dL/db = (2/n) sum (pred - target)
/// with n the total scalar sample count of the batch.
Gradients gradients(std::span<const ImagePair> batch, const ColorMatrix& m);

/// Run the configured optimizer. Deterministic given cfg.seed: the epoch
/// shuffle and any random init draw from one seeded generator. Closed-form
/// mode ignores epochs and records a single loss entry.
/// Throws DivergenceError (naming the epoch) when the loss goes non-finite.
FitReport fit(std::span<const ImagePair> pairs, const FitConfig& cfg);

/// Exact minimizer of the MSE over the affine family, via normal equations
/// on the (r, g, b, 1)-augmented inputs. Throws RankError on a degenerate
/// design (e.g. constant images).
ColorMatrix solve_least_squares(std::span<const ImagePair> pairs);

/// Always 12: nine weights plus three biases.
int param_count(const ColorMatrix& m);

/// FLOP counting convention for one application of the matrix.
enum class FlopConvention {
    // 9 multiplies + 9 adds + 3 bias adds = 21 per pixel
    mul_add_separate,
};

double flop_estimate(int width, int height,
                     FlopConvention convention = FlopConvention::mul_add_separate);

/// CSV with header "epoch,loss,psnr_db", one row per recorded epoch.
void write_report_csv(const FitReport& report, const std::filesystem::path& path);

}  // namespace rawsynth::lccm
