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

namespace rawsynth {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

/// Affine color transform: out = weights * in + bias. Twelve scalar
/// parameters total (9 weights, 3 biases).
struct ColorMatrix {
    Mat3 weights{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
    Vec3 bias{0.0, 0.0, 0.0};

    static ColorMatrix identity() { return ColorMatrix{}; }

    bool finite() const;
    double determinant() const;

    /// Inverse of the affine map: x = W y + b  =>  y = W^-1 x - W^-1 b.
    /// Throws ParamError when |det| <= 1e-9.
    ColorMatrix inverse_affine() const;

    Vec3 transform(const Vec3& in) const {
        return {weights[0][0] * in[0] + weights[0][1] * in[1] + weights[0][2] * in[2] + bias[0],
                weights[1][0] * in[0] + weights[1][1] * in[1] + weights[1][2] * in[2] + bias[1],
                weights[2][0] * in[0] + weights[2][1] * in[1] + weights[2][2] * in[2] + bias[2]};
    }
};

bool operator==(const ColorMatrix& a, const ColorMatrix& b);

/// Plain-text serialization: 12 decimal values, row-major weights then bias.
void save_matrix(const ColorMatrix& m, const std::filesystem::path& path);
ColorMatrix load_matrix(const std::filesystem::path& path);

}  // namespace rawsynth
