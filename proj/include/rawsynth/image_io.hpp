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

#include <filesystem>
#include <variant>

#include "rawsynth/image.hpp"

namespace rawsynth {

enum class ImageFormat { ppm8, ppm16, raw_bin };

using LoadedImage = std::variant<RgbImage, BayerRaw>;

// File formats
//   ppm8 / ppm16: binary PPM (P6), maxval 255 / 65535, 16-bit samples
//       big-endian per the PPM convention.
//   raw-bin: little-endian container for Bayer mosaics. 16-byte header
//       (magic "RWB1", u32 width, u32 height, u8 pattern, u8 bit_depth,
//       u16 reserved) followed by one u16 per pixel, row-major. The
//       bit_depth-bit code is left-aligned in the u16, so depths above 16
//       store the 16 most significant bits of the code.

/// Load a file into the matching container; samples are normalized to [0,1]
/// by dividing by (2^depth - 1).
LoadedImage load_image(const std::filesystem::path& path, ImageFormat format);

/// Save with clamping to [0,1] and quantization at the format's depth.
void save_image(const LoadedImage& img, const std::filesystem::path& path, ImageFormat format);

RgbImage load_ppm(const std::filesystem::path& path);
void save_ppm(const RgbImage& img, const std::filesystem::path& path, ImageFormat format);

BayerRaw load_raw_bin(const std::filesystem::path& path);
void save_raw_bin(const BayerRaw& raw, const std::filesystem::path& path);

/// ppm8/ppm16 for .ppm (by header maxval on load), raw_bin for .rawb.
ImageFormat format_from_extension(const std::filesystem::path& path);

}  // namespace rawsynth
