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

#include <array>
#include <filesystem>

#include "rawsynth/color_matrix.hpp"
#include "rawsynth/image.hpp"

namespace rawsynth::isp {

enum class DemosaicMethod { bilinear };

/// Parameters of the five-stage pipeline
///
///   forward: demosaic -> white balance -> brightness -> color matrix -> gamma encode
///   inverse: gamma decode -> inverse matrix -> inverse brightness -> inverse WB -> mosaic
///
/// Defaults are the synthetic teacher used for dataset generation: a
/// non-trivial, row-normalized CCM and daylight-ish white balance gains, so
/// every stage does real work.
struct IspParams {
    Vec3 wb_gains{2.0, 1.0, 1.6};
    double brightness_gain = 1.1;
    ColorMatrix ccm{{{{1.6, -0.4, -0.2}, {-0.3, 1.5, -0.2}, {0.0, -0.4, 1.4}}}, {0.0, 0.0, 0.0}};
    double gamma = 2.2;
    BayerPattern pattern = BayerPattern::RGGB;
    DemosaicMethod demosaic_method = DemosaicMethod::bilinear;

    /// Identity parameters: unit gains, identity matrix, gamma 1.
    static IspParams neutral();

    /// Throws ParamError unless all gains and gamma are positive and the
    /// color matrix is invertible (|det| > 1e-9).
    void validate() const;
};

/// Bilinear demosaic. The channel present in the mosaic is copied unchanged;
/// missing channels are averaged from the nearest same-channel neighbors.
/// Borders replicate the nearest same-channel sample (parity-preserving
/// reflection), so interpolation never mixes color planes.
RgbImage demosaic(const BayerRaw& raw, DemosaicMethod method = DemosaicMethod::bilinear);

/// Sample the channel dictated by the CFA at each pixel. No filtering.
BayerRaw mosaic(const RgbImage& img, BayerPattern pattern, int bit_depth = 16);

RgbImage white_balance(const RgbImage& img, const Vec3& gains);
RgbImage white_balance_inverse(const RgbImage& img, const Vec3& gains);

RgbImage brightness(const RgbImage& img, double gain);
RgbImage brightness_inverse(const RgbImage& img, double gain);

/// Per-pixel affine map out = W in + b, unclamped.
RgbImage color_correct(const RgbImage& img, const ColorMatrix& ccm);
/// Applies the inverse affine map; throws ParamError on a singular matrix.
RgbImage color_correct_inverse(const RgbImage& img, const ColorMatrix& ccm);

/// s -> s^(1/gamma), negatives clamped to 0 first.
RgbImage gamma_encode(const RgbImage& img, double gamma);
/// s -> s^gamma, negatives clamped to 0 first.
RgbImage gamma_decode(const RgbImage& img, double gamma);

/// Full forward pipeline; output clamped to [0,1].
RgbImage isp_forward(const BayerRaw& raw, const IspParams& p);

/// Inverse stages up to (not including) the mosaic, unclamped. This is the
/// RGB-domain RAW reconstruction used as the fitting target.
RgbImage isp_inverse_rgb(const RgbImage& srgb, const IspParams& p);

/// Full inverse pipeline ending in a mosaic; output clamped to [0,1].
BayerRaw isp_inverse(const RgbImage& srgb, const IspParams& p, int bit_depth = 16);

/// Plain-text key = value serialization, consumed by the CLI.
void save_params(const IspParams& p, const std::filesystem::path& path);
IspParams load_params(const std::filesystem::path& path);

}  // namespace rawsynth::isp
