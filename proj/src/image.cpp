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

#include "rawsynth/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rawsynth {

namespace {

void check_even_dims(int width, int height, const char* what) {
    if (width < 2 || height < 2 || width % 2 != 0 || height % 2 != 0) {
        throw ParamError(std::string(what) + ": dimensions must be even and >= 2, got " +
                         std::to_string(width) + "x" + std::to_string(height));
    }
}

}  // namespace

const char* to_string(BayerPattern pattern) {
    switch (pattern) {
        case BayerPattern::RGGB: return "RGGB";
        case BayerPattern::BGGR: return "BGGR";
        case BayerPattern::GRBG: return "GRBG";
        case BayerPattern::GBRG: return "GBRG";
    }
    return "?";
}

BayerPattern bayer_pattern_from_string(std::string_view name) {
    if (name == "RGGB") return BayerPattern::RGGB;
    if (name == "BGGR") return BayerPattern::BGGR;
    if (name == "GRBG") return BayerPattern::GRBG;
    if (name == "GBRG") return BayerPattern::GBRG;
    throw ParamError("unknown Bayer pattern: " + std::string(name));
}

Channel bayer_channel_at(BayerPattern pattern, int x, int y) {
    // 2x2 cell layout, rows top to bottom.
    static constexpr Channel kLayout[4][2][2] = {
        {{Channel::R, Channel::G}, {Channel::G, Channel::B}},  // RGGB
        {{Channel::B, Channel::G}, {Channel::G, Channel::R}},  // BGGR
        {{Channel::G, Channel::R}, {Channel::B, Channel::G}},  // GRBG
        {{Channel::G, Channel::B}, {Channel::R, Channel::G}},  // GBRG
    };
    return kLayout[static_cast<int>(pattern)][y & 1][x & 1];
}

RgbImage::RgbImage(int width, int height) : width_(width), height_(height) {
    check_even_dims(width, height, "RgbImage");
    data_.assign(3 * pixel_count(), 0.0);
}

RgbImage::RgbImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_even_dims(width, height, "RgbImage");
    if (data_.size() != 3 * pixel_count()) {
        throw ShapeError("RgbImage: data length " + std::to_string(data_.size()) +
                         " != 3*" + std::to_string(pixel_count()));
    }
}

RgbImage RgbImage::constant(int width, int height, double r, double g, double b) {
    RgbImage img(width, height);
    std::ranges::fill(img.plane(Channel::R), r);
    std::ranges::fill(img.plane(Channel::G), g);
    std::ranges::fill(img.plane(Channel::B), b);
    return img;
}

void RgbImage::clamp01() {
    for (double& s : data_) s = std::clamp(s, 0.0, 1.0);
}

BayerRaw::BayerRaw(int width, int height, BayerPattern pattern, int bit_depth)
    : width_(width), height_(height), pattern_(pattern), bit_depth_(bit_depth) {
    check_even_dims(width, height, "BayerRaw");
    if (bit_depth < 8 || bit_depth > 24) {
        throw ParamError("BayerRaw: bit depth must be in [8,24], got " + std::to_string(bit_depth));
    }
    data_.assign(pixel_count(), 0.0);
}

BayerRaw::BayerRaw(int width, int height, BayerPattern pattern, int bit_depth,
                   std::vector<double> data)
    : BayerRaw(width, height, pattern, bit_depth) {
    if (data.size() != pixel_count()) {
        throw ShapeError("BayerRaw: data length " + std::to_string(data.size()) +
                         " != " + std::to_string(pixel_count()));
    }
    data_ = std::move(data);
}

void BayerRaw::clamp01() {
    for (double& s : data_) s = std::clamp(s, 0.0, 1.0);
}

int histogram_bin(double sample) {
    int bin = static_cast<int>(std::floor(sample * 256.0));
    return std::clamp(bin, 0, 255);
}

Histogram histogram(const RgbImage& img, Channel channel) {
    Histogram h;
    h.channel = channel;
    for (double s : img.plane(channel)) {
        ++h.bins[static_cast<std::size_t>(histogram_bin(s))];
    }
    h.total = img.pixel_count();
    return h;
}

std::uint32_t quantize_code(double sample, int bit_depth) {
    const double max_code = static_cast<double>((1u << bit_depth) - 1);
    const double clamped = std::clamp(sample, 0.0, 1.0);
    return static_cast<std::uint32_t>(std::llround(clamped * max_code));
}

double dequantize_code(std::uint32_t code, int bit_depth) {
    const double max_code = static_cast<double>((1u << bit_depth) - 1);
    return static_cast<double>(code) / max_code;
}

double quantize_unit(double sample, int bit_depth) {
    return dequantize_code(quantize_code(sample, bit_depth), bit_depth);
}

}  // namespace rawsynth
