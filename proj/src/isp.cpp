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

#include "rawsynth/isp.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "rawsynth/error.hpp"

namespace rawsynth::isp {

namespace {

// Pairwise means so that averaging equal values is exact.
inline double avg2(double a, double b) { return (a + b) * 0.5; }
inline double avg4(double a, double b, double c, double d) {
    return avg2(avg2(a, b), avg2(c, d));
}

// Mirror an out-of-range coordinate back inside without changing its parity,
// so a reflected fetch always lands on a same-channel site.
inline int reflect(int i, int n) {
    if (i < 0) return -i;
    if (i >= n) return 2 * n - 2 - i;
    return i;
}

void check_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ParamError(std::string(what) + " must be positive, got " + std::to_string(v));
    }
}

}  // namespace

IspParams IspParams::neutral() {
    IspParams p;
    p.wb_gains = {1.0, 1.0, 1.0};
    p.brightness_gain = 1.0;
    p.ccm = ColorMatrix::identity();
    p.gamma = 1.0;
    return p;
}

void IspParams::validate() const {
    for (double g : wb_gains) check_positive(g, "white balance gain");
    check_positive(brightness_gain, "brightness gain");
    check_positive(gamma, "gamma");
    if (!ccm.finite() || std::abs(ccm.determinant()) <= 1e-9) {
        throw ParamError("ccm must be finite and invertible");
    }
}

RgbImage demosaic(const BayerRaw& raw, DemosaicMethod method) {
    (void)method;  // bilinear is the only method
    const int w = raw.width();
    const int h = raw.height();
    RgbImage out(w, h);

    auto fetch = [&](int x, int y) { return raw.at(reflect(x, w), reflect(y, h)); };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const Channel native = raw.channel_at(x, y);
            const double v = raw.at(x, y);
            out.at(native, x, y) = v;

            if (native == Channel::G) {
                // R and B live on the neighboring rows/columns; which is
                // which depends on the row's non-green channel.
                const Channel row_chan = raw.channel_at(x + 1, y);
                const double horiz = avg2(fetch(x - 1, y), fetch(x + 1, y));
                const double vert = avg2(fetch(x, y - 1), fetch(x, y + 1));
                if (row_chan == Channel::R) {
                    out.at(Channel::R, x, y) = horiz;
                    out.at(Channel::B, x, y) = vert;
                } else {
                    out.at(Channel::B, x, y) = horiz;
                    out.at(Channel::R, x, y) = vert;
                }
            } else {
                // At an R or B site: green from the 4-cross, the opposite
                // color from the 4 diagonals.
                out.at(Channel::G, x, y) = avg4(fetch(x - 1, y), fetch(x + 1, y),
                                                fetch(x, y - 1), fetch(x, y + 1));
                const Channel opposite = native == Channel::R ? Channel::B : Channel::R;
                out.at(opposite, x, y) = avg4(fetch(x - 1, y - 1), fetch(x + 1, y - 1),
                                              fetch(x - 1, y + 1), fetch(x + 1, y + 1));
            }
        }
    }
    return out;
}

BayerRaw mosaic(const RgbImage& img, BayerPattern pattern, int bit_depth) {
    BayerRaw raw(img.width(), img.height(), pattern, bit_depth);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            raw.at(x, y) = img.at(bayer_channel_at(pattern, x, y), x, y);
        }
    }
    return raw;
}

RgbImage white_balance(const RgbImage& img, const Vec3& gains) {
    for (double g : gains) check_positive(g, "white balance gain");
    RgbImage out = img;
    for (int c = 0; c < 3; ++c) {
        for (double& s : out.plane(static_cast<Channel>(c))) s *= gains[static_cast<std::size_t>(c)];
    }
    return out;
}

RgbImage white_balance_inverse(const RgbImage& img, const Vec3& gains) {
    for (double g : gains) check_positive(g, "white balance gain");
    return white_balance(img, {1.0 / gains[0], 1.0 / gains[1], 1.0 / gains[2]});
}

RgbImage brightness(const RgbImage& img, double gain) {
    check_positive(gain, "brightness gain");
    RgbImage out = img;
    for (double& s : out.samples()) s *= gain;
    return out;
}

RgbImage brightness_inverse(const RgbImage& img, double gain) {
    check_positive(gain, "brightness gain");
    return brightness(img, 1.0 / gain);
}

RgbImage color_correct(const RgbImage& img, const ColorMatrix& ccm) {
    if (!ccm.finite()) throw ParamError("color matrix has non-finite entries");
    RgbImage out(img.width(), img.height());
    auto ri = img.plane(Channel::R), gi = img.plane(Channel::G), bi = img.plane(Channel::B);
    auto ro = out.plane(Channel::R), go = out.plane(Channel::G), bo = out.plane(Channel::B);
    const Mat3& w = ccm.weights;
    const Vec3& b = ccm.bias;
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        ro[i] = w[0][0] * ri[i] + w[0][1] * gi[i] + w[0][2] * bi[i] + b[0];
        go[i] = w[1][0] * ri[i] + w[1][1] * gi[i] + w[1][2] * bi[i] + b[1];
        bo[i] = w[2][0] * ri[i] + w[2][1] * gi[i] + w[2][2] * bi[i] + b[2];
    }
    return out;
}

RgbImage color_correct_inverse(const RgbImage& img, const ColorMatrix& ccm) {
    return color_correct(img, ccm.inverse_affine());
}

namespace {

RgbImage power_map(const RgbImage& img, double exponent) {
    RgbImage out = img;
    if (exponent == 1.0) {
        for (double& s : out.samples()) s = std::max(s, 0.0);
        return out;
    }
    for (double& s : out.samples()) {
        s = s <= 0.0 ? 0.0 : std::pow(s, exponent);
    }
    return out;
}

}  // namespace

RgbImage gamma_encode(const RgbImage& img, double gamma) {
    check_positive(gamma, "gamma");
    return power_map(img, 1.0 / gamma);
}

RgbImage gamma_decode(const RgbImage& img, double gamma) {
    check_positive(gamma, "gamma");
    return power_map(img, gamma);
}

RgbImage isp_forward(const BayerRaw& raw, const IspParams& p) {
    p.validate();
    RgbImage img = demosaic(raw, p.demosaic_method);
    img = white_balance(img, p.wb_gains);
    img = brightness(img, p.brightness_gain);
    img = color_correct(img, p.ccm);
    img = gamma_encode(img, p.gamma);
    img.clamp01();
    return img;
}

RgbImage isp_inverse_rgb(const RgbImage& srgb, const IspParams& p) {
    p.validate();
    RgbImage img = gamma_decode(srgb, p.gamma);
    img = color_correct_inverse(img, p.ccm);
    img = brightness_inverse(img, p.brightness_gain);
    img = white_balance_inverse(img, p.wb_gains);
    return img;
}

BayerRaw isp_inverse(const RgbImage& srgb, const IspParams& p, int bit_depth) {
    BayerRaw raw = mosaic(isp_inverse_rgb(srgb, p), p.pattern, bit_depth);
    raw.clamp01();
    return raw;
}

void save_params(const IspParams& p, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    char buf[160];
    std::snprintf(buf, sizeof(buf), "wb_gains = %.17g %.17g %.17g\n", p.wb_gains[0],
                  p.wb_gains[1], p.wb_gains[2]);
    out << buf;
    std::snprintf(buf, sizeof(buf), "brightness = %.17g\n", p.brightness_gain);
    out << buf;
    std::snprintf(buf, sizeof(buf), "gamma = %.17g\n", p.gamma);
    out << buf;
    out << "pattern = " << to_string(p.pattern) << "\n";
    for (int r = 0; r < 3; ++r) {
        std::snprintf(buf, sizeof(buf), "ccm_row%d = %.17g %.17g %.17g\n", r, p.ccm.weights[r][0],
                      p.ccm.weights[r][1], p.ccm.weights[r][2]);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "ccm_bias = %.17g %.17g %.17g\n", p.ccm.bias[0], p.ccm.bias[1],
                  p.ccm.bias[2]);
    out << buf;
    out << "demosaic = bilinear\n";
    if (!out) throw IoError("params write failed: " + path.string());
}

IspParams load_params(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    IspParams p;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw FormatError("params: missing '=' at line " + std::to_string(lineno));
        }
        std::istringstream key_in(line.substr(0, eq));
        std::string key;
        key_in >> key;
        std::istringstream val(line.substr(eq + 1));
        auto read_doubles = [&](double* dst, int n) {
            for (int i = 0; i < n; ++i) {
                if (!(val >> dst[i])) {
                    throw FormatError("params: bad value for " + key + " at line " +
                                      std::to_string(lineno));
                }
            }
        };
        if (key == "wb_gains") {
            read_doubles(p.wb_gains.data(), 3);
        } else if (key == "brightness") {
            read_doubles(&p.brightness_gain, 1);
        } else if (key == "gamma") {
            read_doubles(&p.gamma, 1);
        } else if (key == "pattern") {
            std::string name;
            val >> name;
            p.pattern = bayer_pattern_from_string(name);
        } else if (key == "ccm_row0" || key == "ccm_row1" || key == "ccm_row2") {
            const int r = key.back() - '0';
            read_doubles(p.ccm.weights[static_cast<std::size_t>(r)].data(), 3);
        } else if (key == "ccm_bias") {
            read_doubles(p.ccm.bias.data(), 3);
        } else if (key == "demosaic") {
            std::string name;
            val >> name;
            if (name != "bilinear") throw FormatError("params: unknown demosaic method " + name);
        } else {
            throw FormatError("params: unknown key '" + key + "' at line " + std::to_string(lineno));
        }
    }
    p.validate();
    return p;
}

}  // namespace rawsynth::isp
