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

#include "rawsynth/color_matrix.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "rawsynth/error.hpp"

namespace rawsynth {

bool ColorMatrix::finite() const {
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            if (!std::isfinite(weights[r][c])) return false;
        }
        if (!std::isfinite(bias[r])) return false;
    }
    return true;
}

double ColorMatrix::determinant() const {
    const Mat3& w = weights;
    return w[0][0] * (w[1][1] * w[2][2] - w[1][2] * w[2][1]) -
           w[0][1] * (w[1][0] * w[2][2] - w[1][2] * w[2][0]) +
           w[0][2] * (w[1][0] * w[2][1] - w[1][1] * w[2][0]);
}

ColorMatrix ColorMatrix::inverse_affine() const {
    const double det = determinant();
    if (!std::isfinite(det) || std::abs(det) <= 1e-9) {
        throw ParamError("color matrix is singular (|det| <= 1e-9)");
    }
    const Mat3& w = weights;
    Mat3 inv;
    inv[0][0] = (w[1][1] * w[2][2] - w[1][2] * w[2][1]) / det;
    inv[0][1] = (w[0][2] * w[2][1] - w[0][1] * w[2][2]) / det;
    inv[0][2] = (w[0][1] * w[1][2] - w[0][2] * w[1][1]) / det;
    inv[1][0] = (w[1][2] * w[2][0] - w[1][0] * w[2][2]) / det;
    inv[1][1] = (w[0][0] * w[2][2] - w[0][2] * w[2][0]) / det;
    inv[1][2] = (w[0][2] * w[1][0] - w[0][0] * w[1][2]) / det;
    inv[2][0] = (w[1][0] * w[2][1] - w[1][1] * w[2][0]) / det;
    inv[2][1] = (w[0][1] * w[2][0] - w[0][0] * w[2][1]) / det;
    inv[2][2] = (w[0][0] * w[1][1] - w[0][1] * w[1][0]) / det;

    ColorMatrix out;
    out.weights = inv;
    for (int r = 0; r < 3; ++r) {
        out.bias[r] = -(inv[r][0] * bias[0] + inv[r][1] * bias[1] + inv[r][2] * bias[2]);
    }
    return out;
}

bool operator==(const ColorMatrix& a, const ColorMatrix& b) {
    return a.weights == b.weights && a.bias == b.bias;
}

void save_matrix(const ColorMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    char buf[32];
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", m.weights[r][c]);
            out << buf << (c == 2 ? "\n" : " ");
        }
    }
    for (int r = 0; r < 3; ++r) {
        std::snprintf(buf, sizeof(buf), "%.17g", m.bias[r]);
        out << buf << (r == 2 ? "\n" : " ");
    }
    if (!out) throw IoError("matrix write failed: " + path.string());
}

ColorMatrix load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    ColorMatrix m;
    std::vector<double> values;
    double v = 0.0;
    while (in >> v) values.push_back(v);
    if (values.size() != 12) {
        throw FormatError("matrix file must hold exactly 12 values, got " +
                          std::to_string(values.size()) + ": " + path.string());
    }
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) m.weights[r][c] = values[static_cast<std::size_t>(3 * r + c)];
    }
    for (int r = 0; r < 3; ++r) m.bias[r] = values[static_cast<std::size_t>(9 + r)];
    if (!m.finite()) throw FormatError("matrix file holds non-finite values: " + path.string());
    return m;
}

}  // namespace rawsynth
