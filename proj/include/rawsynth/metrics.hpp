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
#include <string>

#include "rawsynth/image.hpp"

namespace rawsynth::metrics {

/// PSNR sentinel for identical images; also the serialization cap.
inline constexpr double kPsnrCap = 99.0;

struct QualityReport {
    double psnr_db = 0.0;
    double ssim = 0.0;
    std::array<double, 3> per_channel_psnr{};
};

/// 10*log10(peak^2 / MSE) with peak 1.0, capped at 99 dB.
double psnr(const RgbImage& a, const RgbImage& b);
double psnr(const BayerRaw& a, const BayerRaw& b);
double psnr_channel(const RgbImage& a, const RgbImage& b, Channel c);

/// Mean SSIM over 11x11 Gaussian windows (sigma 1.5), C1 = 0.01^2,
/// C2 = 0.03^2, averaged over channels. Requires min(W, H) >= 11.
double ssim(const RgbImage& a, const RgbImage& b);

/// L1 distance between the normalized 256-bin frequencies, in [0,2].
double histogram_distance(const Histogram& h1, const Histogram& h2);

QualityReport evaluate(const RgbImage& a, const RgbImage& b);

/// "psnr_db,ssim,psnr_r,psnr_g,psnr_b" (no trailing newline).
std::string csv_row(const QualityReport& q);
const char* csv_header();

}  // namespace rawsynth::metrics
