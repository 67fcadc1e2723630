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
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rawsynth/error.hpp"

namespace rawsynth {

enum class Channel : int { R = 0, G = 1, B = 2 };

enum class BayerPattern : int { RGGB = 0, BGGR = 1, GRBG = 2, GBRG = 3 };

const char* to_string(BayerPattern pattern);
BayerPattern bayer_pattern_from_string(std::string_view name);

/// Channel recorded by the sensor at pixel (x, y) under the given CFA tiling.
Channel bayer_channel_at(BayerPattern pattern, int x, int y);

/// Planar RGB image, samples nominally in [0,1]. Sample layout is the full R
/// plane, then G, then B, each row-major. Dimensions must be even and >= 2 so
/// the image can be mosaiced.
class RgbImage {
public:
    RgbImage(int width, int height);
    RgbImage(int width, int height, std::vector<double> data);

    static RgbImage constant(int width, int height, double r, double g, double b);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    double at(Channel c, int x, int y) const {
        return data_[plane_offset(c) + static_cast<std::size_t>(y) * width_ + x];
    }
    double& at(Channel c, int x, int y) {
        return data_[plane_offset(c) + static_cast<std::size_t>(y) * width_ + x];
    }

    std::span<const double> plane(Channel c) const {
        return {data_.data() + plane_offset(c), pixel_count()};
    }
    std::span<double> plane(Channel c) {
        return {data_.data() + plane_offset(c), pixel_count()};
    }

    std::span<const double> samples() const { return data_; }
    std::span<double> samples() { return data_; }

    /// Clamp every sample into [0,1].
    void clamp01();

    bool same_shape(const RgbImage& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    std::size_t plane_offset(Channel c) const {
        return static_cast<std::size_t>(static_cast<int>(c)) * pixel_count();
    }

    int width_;
    int height_;
    std::vector<double> data_;
};

/// Single-channel Bayer mosaic. Samples are kept as floating point in [0,1];
/// bit_depth describes the quantization grid used at file boundaries.
class BayerRaw {
public:
    BayerRaw(int width, int height, BayerPattern pattern, int bit_depth);
    BayerRaw(int width, int height, BayerPattern pattern, int bit_depth,
             std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }
    BayerPattern pattern() const { return pattern_; }
    int bit_depth() const { return bit_depth_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    double at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    double& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    Channel channel_at(int x, int y) const { return bayer_channel_at(pattern_, x, y); }

    std::span<const double> samples() const { return data_; }
    std::span<double> samples() { return data_; }

    void clamp01();

private:
    int width_;
    int height_;
    BayerPattern pattern_;
    int bit_depth_;
    std::vector<double> data_;
};

struct Histogram {
    Channel channel = Channel::R;
    std::array<std::uint64_t, 256> bins{};
    std::uint64_t total = 0;
};

/// Bin index for a sample: floor(s * 256) clamped to [0,255], so 1.0 lands in
/// the top bin.
int histogram_bin(double sample);

Histogram histogram(const RgbImage& img, Channel channel);

/// Nearest code value for a unit-range sample at the given depth, clamped.
std::uint32_t quantize_code(double sample, int bit_depth);
double dequantize_code(std::uint32_t code, int bit_depth);

/// Round a unit-range sample onto the bit_depth code grid. Idempotent.
double quantize_unit(double sample, int bit_depth);

}  // namespace rawsynth
