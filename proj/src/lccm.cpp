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

#include "rawsynth/lccm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "rawsynth/error.hpp"
#include "rawsynth/isp.hpp"

namespace rawsynth::lccm {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

void check_pair_shapes(const ImagePair& pair) {
    if (!pair.source.same_shape(pair.target)) {
        throw ShapeError("image pair dimensions do not match");
    }
}

// Residual and gradient sums for the pooled MSE of a set of images:
//   sq      = sum of squared residuals over all scalar samples
//   w[c][u] = sum over pixels of residual_c * source_u
//   b[c]    = sum over pixels of residual_c
struct Accum {
    Mat3 w{};
    Vec3 b{};
    double sq = 0.0;
    std::size_t samples = 0;

    void add(const ImagePair& pair, const ColorMatrix& m) {
        check_pair_shapes(pair);
        const RgbImage& src = pair.source;
        const RgbImage& tgt = pair.target;
        auto r = src.plane(Channel::R), g = src.plane(Channel::G), bl = src.plane(Channel::B);
        auto tr = tgt.plane(Channel::R), tg = tgt.plane(Channel::G), tb = tgt.plane(Channel::B);
        const Mat3& W = m.weights;
        const Vec3& B = m.bias;
        for (std::size_t i = 0; i < src.pixel_count(); ++i) {
            const double y0 = r[i], y1 = g[i], y2 = bl[i];
            const double res[3] = {
                W[0][0] * y0 + W[0][1] * y1 + W[0][2] * y2 + B[0] - tr[i],
                W[1][0] * y0 + W[1][1] * y1 + W[1][2] * y2 + B[1] - tg[i],
                W[2][0] * y0 + W[2][1] * y1 + W[2][2] * y2 + B[2] - tb[i],
            };
            for (int c = 0; c < 3; ++c) {
                sq += res[c] * res[c];
                w[c][0] += res[c] * y0;
                w[c][1] += res[c] * y1;
                w[c][2] += res[c] * y2;
                b[c] += res[c];
            }
        }
        samples += 3 * src.pixel_count();
    }
};

double pooled_loss(std::span<const ImagePair> pairs, const ColorMatrix& m) {
    Accum acc;
    for (const ImagePair& pair : pairs) acc.add(pair, m);
    return acc.sq / static_cast<double>(acc.samples);
}

double psnr_from_loss(double loss) {
    if (!(loss > 0.0)) return 99.0;
    return std::min(10.0 * std::log10(1.0 / loss), 99.0);
}

// Deterministic Fisher-Yates; avoids std::shuffle's unspecified draws.
void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        std::swap(idx[i - 1], idx[rng() % i]);
    }
}

// 4x4 linear solve with partial pivoting; shared matrix, three right-hand
// sides (one per output channel). Throws RankError on a degenerate system.
void solve4x3(double a[4][4], double rhs[4][3], double out[4][3]) {
    double scale = 0.0;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) scale = std::max(scale, std::abs(a[r][c]));
    if (scale == 0.0) throw RankError("least squares: zero design matrix");

    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (std::abs(a[pivot][col]) <= 1e-12 * scale) {
            throw RankError("least squares: rank-deficient design (constant or degenerate inputs)");
        }
        if (pivot != col) {
            for (int c = 0; c < 4; ++c) std::swap(a[col][c], a[pivot][c]);
            for (int c = 0; c < 3; ++c) std::swap(rhs[col][c], rhs[pivot][c]);
        }
        for (int r = col + 1; r < 4; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
            for (int c = 0; c < 3; ++c) rhs[r][c] -= f * rhs[col][c];
        }
    }
    for (int r = 3; r >= 0; --r) {
        for (int c = 0; c < 3; ++c) {
            double v = rhs[r][c];
            for (int k = r + 1; k < 4; ++k) v -= a[r][k] * out[k][c];
            out[r][c] = v / a[r][r];
        }
    }
}

ColorMatrix initial_matrix(Init init, std::mt19937_64& rng) {
    ColorMatrix m;
    switch (init) {
        case Init::identity:
            return ColorMatrix::identity();
        case Init::zeros:
            m.weights = Mat3{};
            return m;
        case Init::seeded_random: {
            auto draw = [&rng] {
                return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
            };
            for (int r = 0; r < 3; ++r) {
                for (int c = 0; c < 3; ++c) m.weights[r][c] = draw();
                m.bias[r] = draw();
            }
            return m;
        }
    }
    throw ParamError("unknown init mode");
}

struct AdamState {
    Mat3 mw{}, vw{};
    Vec3 mb{}, vb{};
    long t = 0;
};

void adam_step(ColorMatrix& m, const Gradients& g, AdamState& s, double lr) {
    ++s.t;
    const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(s.t));
    const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(s.t));
    auto update = [&](double& param, double& m1, double& m2, double grad) {
        m1 = kAdamBeta1 * m1 + (1.0 - kAdamBeta1) * grad;
        m2 = kAdamBeta2 * m2 + (1.0 - kAdamBeta2) * grad * grad;
        param -= lr * (m1 / c1) / (std::sqrt(m2 / c2) + kAdamEps);
    };
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) update(m.weights[r][c], s.mw[r][c], s.vw[r][c], g.weights[r][c]);
        update(m.bias[r], s.mb[r], s.vb[r], g.bias[r]);
    }
}

void sgd_step(ColorMatrix& m, const Gradients& g, double lr) {
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) m.weights[r][c] -= lr * g.weights[r][c];
        m.bias[r] -= lr * g.bias[r];
    }
}

}  // namespace

Optimizer optimizer_from_string(std::string_view name) {
    if (name == "adam") return Optimizer::adam;
    if (name == "sgd") return Optimizer::sgd;
    if (name == "closed-form") return Optimizer::closed_form;
    throw ParamError("unknown optimizer: " + std::string(name));
}

Init init_from_string(std::string_view name) {
    if (name == "identity") return Init::identity;
    if (name == "zeros") return Init::zeros;
    if (name == "seeded-random") return Init::seeded_random;
    throw ParamError("unknown init mode: " + std::string(name));
}

void FitConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ParamError("learning rate must be positive");
    if (epochs < 1) throw ParamError("epochs must be >= 1");
    if (batch < 1) throw ParamError("batch must be >= 1");
}

RgbImage apply(const RgbImage& img, const ColorMatrix& m) {
    // Same per-pixel affine map as the ISP color-correction stage.
    return isp::color_correct(img, m);
}

double mse_loss(const RgbImage& pred, const RgbImage& target) {
    if (!pred.same_shape(target)) throw ShapeError("mse_loss: image dimensions do not match");
    auto p = pred.samples();
    auto t = target.samples();
    double sq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - t[i];
        sq += d * d;
    }
    return sq / static_cast<double>(p.size());
}

Gradients gradients(std::span<const ImagePair> batch, const ColorMatrix& m) {
    if (batch.empty()) throw ParamError("gradients: empty batch");
    Accum acc;
    for (const ImagePair& pair : batch) acc.add(pair, m);
    const double scale = 2.0 / static_cast<double>(acc.samples);
    Gradients g;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) g.weights[r][c] = scale * acc.w[r][c];
        g.bias[r] = scale * acc.b[r];
    }
    return g;
}

ColorMatrix solve_least_squares(std::span<const ImagePair> pairs) {
    if (pairs.empty()) throw ParamError("solve_least_squares: empty pair list");

    // Normal equations over the (r, g, b, 1)-augmented inputs.
    double gram[4][4] = {};
    double rhs[4][3] = {};
    std::size_t pixels = 0;
    for (const ImagePair& pair : pairs) {
        check_pair_shapes(pair);
        const RgbImage& src = pair.source;
        const RgbImage& tgt = pair.target;
        auto r = src.plane(Channel::R), g = src.plane(Channel::G), b = src.plane(Channel::B);
        auto tr = tgt.plane(Channel::R), tg = tgt.plane(Channel::G), tb = tgt.plane(Channel::B);
        for (std::size_t i = 0; i < src.pixel_count(); ++i) {
            const double y[4] = {r[i], g[i], b[i], 1.0};
            const double t[3] = {tr[i], tg[i], tb[i]};
            for (int u = 0; u < 4; ++u) {
                for (int v = u; v < 4; ++v) gram[u][v] += y[u] * y[v];
                for (int c = 0; c < 3; ++c) rhs[u][c] += y[u] * t[c];
            }
        }
        pixels += src.pixel_count();
    }
    if (pixels < 4) throw RankError("least squares: need at least 4 pixel samples");
    for (int u = 0; u < 4; ++u)
        for (int v = 0; v < u; ++v) gram[u][v] = gram[v][u];

    double theta[4][3];
    solve4x3(gram, rhs, theta);

    ColorMatrix m;
    for (int c = 0; c < 3; ++c) {
        for (int u = 0; u < 3; ++u) m.weights[c][u] = theta[u][c];
        m.bias[c] = theta[3][c];
    }
    return m;
}

FitReport fit(std::span<const ImagePair> pairs, const FitConfig& cfg) {
    cfg.validate();
    if (pairs.empty()) throw ParamError("fit: empty pair list");
    for (const ImagePair& pair : pairs) check_pair_shapes(pair);

    FitReport report;
    report.samples_used = pairs.size();

    if (cfg.optimizer == Optimizer::closed_form) {
        report.final_matrix = solve_least_squares(pairs);
        const double loss = pooled_loss(pairs, report.final_matrix);
        report.loss_per_epoch.push_back(loss);
        report.psnr_per_epoch.push_back(psnr_from_loss(loss));
        return report;
    }

    std::mt19937_64 rng(cfg.seed);
    ColorMatrix m = initial_matrix(cfg.init, rng);
    AdamState adam;

    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<ImagePair const*> chunk;
    report.loss_per_epoch.reserve(static_cast<std::size_t>(cfg.epochs));
    report.psnr_per_epoch.reserve(static_cast<std::size_t>(cfg.epochs));

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_indices(order, rng);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch));
            Accum acc;
            for (std::size_t k = start; k < stop; ++k) acc.add(pairs[order[k]], m);
            const double scale = 2.0 / static_cast<double>(acc.samples);
            Gradients g;
            for (int r = 0; r < 3; ++r) {
                for (int c = 0; c < 3; ++c) g.weights[r][c] = scale * acc.w[r][c];
                g.bias[r] = scale * acc.b[r];
            }
            if (cfg.optimizer == Optimizer::adam) {
                adam_step(m, g, adam, cfg.learning_rate);
            } else {
                sgd_step(m, g, cfg.learning_rate);
            }
        }
        const double loss = pooled_loss(pairs, m);
        if (!std::isfinite(loss)) {
            throw DivergenceError("fit diverged (non-finite loss) at epoch " +
                                      std::to_string(epoch),
                                  epoch);
        }
        report.loss_per_epoch.push_back(loss);
        report.psnr_per_epoch.push_back(psnr_from_loss(loss));
    }
    report.final_matrix = m;
    return report;
}

int param_count(const ColorMatrix& m) {
    (void)m;  // 3x3 weights + 3 biases, by construction
    return 12;
}

double flop_estimate(int width, int height, FlopConvention convention) {
    switch (convention) {
        case FlopConvention::mul_add_separate:
            // 9 multiplies + 9 adds + 3 bias adds per pixel
            return 21.0 * static_cast<double>(width) * static_cast<double>(height);
    }
    throw ParamError("unknown FLOP convention");
}

void write_report_csv(const FitReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "epoch,loss,psnr_db\n";
    char buf[80];
    for (std::size_t e = 0; e < report.loss_per_epoch.size(); ++e) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", e + 1, report.loss_per_epoch[e],
                      report.psnr_per_epoch[e]);
        out << buf;
    }
    if (!out) throw IoError("report write failed: " + path.string());
}

}  // namespace rawsynth::lccm
