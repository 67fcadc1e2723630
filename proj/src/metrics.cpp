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

#include "rawsynth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace rawsynth::metrics {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

double mse(std::span<const double> a, std::span<const double> b) {
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sq += d * d;
    }
    return sq / static_cast<double>(a.size());
}

double psnr_from_mse(double m) {
    if (!(m > 0.0)) return kPsnrCap;
    return std::min(10.0 * std::log10(1.0 / m), kPsnrCap);
}

std::array<double, kWindow> gaussian_kernel() {
    std::array<double, kWindow> k{};
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - (kWindow - 1) / 2.0;
        k[i] = std::exp(-(d * d) / (2.0 * kSigma * kSigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable Gaussian filter evaluated only where the full window fits;
// output is (w - 10) x (h - 10).
std::vector<double> filter_valid(const std::vector<double>& plane, int w, int h,
                                 const std::array<double, kWindow>& k) {
    const int wv = w - kWindow + 1;
    const int hv = h - kWindow + 1;
    std::vector<double> tmp(static_cast<std::size_t>(wv) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < wv; ++x) {
            double s = 0.0;
            for (int i = 0; i < kWindow; ++i) s += k[i] * plane[static_cast<std::size_t>(y) * w + x + i];
            tmp[static_cast<std::size_t>(y) * wv + x] = s;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(wv) * hv);
    for (int y = 0; y < hv; ++y) {
        for (int x = 0; x < wv; ++x) {
            double s = 0.0;
            for (int i = 0; i < kWindow; ++i) s += k[i] * tmp[static_cast<std::size_t>(y + i) * wv + x];
            out[static_cast<std::size_t>(y) * wv + x] = s;
        }
    }
    return out;
}

}  // namespace

double psnr(const RgbImage& a, const RgbImage& b) {
    if (!a.same_shape(b)) throw ShapeError("psnr: image dimensions do not match");
    return psnr_from_mse(mse(a.samples(), b.samples()));
}

double psnr(const BayerRaw& a, const BayerRaw& b) {
    if (a.width() != b.width() || a.height() != b.height() || a.pattern() != b.pattern()) {
        throw ShapeError("psnr: raw dimensions or pattern do not match");
    }
    return psnr_from_mse(mse(a.samples(), b.samples()));
}

double psnr_channel(const RgbImage& a, const RgbImage& b, Channel c) {
    if (!a.same_shape(b)) throw ShapeError("psnr: image dimensions do not match");
    return psnr_from_mse(mse(a.plane(c), b.plane(c)));
}

double ssim(const RgbImage& a, const RgbImage& b) {
    if (!a.same_shape(b)) throw ShapeError("ssim: image dimensions do not match");
    if (a.width() < kWindow || a.height() < kWindow) {
        throw ShapeError("ssim: image sides must be >= 11");
    }
    const int w = a.width();
    const int h = a.height();
    const auto kernel = gaussian_kernel();
    const std::size_t n_pix = a.pixel_count();

    double total = 0.0;
    for (int ch = 0; ch < 3; ++ch) {
        auto pa = a.plane(static_cast<Channel>(ch));
        auto pb = b.plane(static_cast<Channel>(ch));
        std::vector<double> x(pa.begin(), pa.end());
        std::vector<double> y(pb.begin(), pb.end());
        std::vector<double> xx(n_pix), yy(n_pix), xy(n_pix);
        for (std::size_t i = 0; i < n_pix; ++i) {
            xx[i] = x[i] * x[i];
            yy[i] = y[i] * y[i];
            xy[i] = x[i] * y[i];
        }
        const auto mu_x = filter_valid(x, w, h, kernel);
        const auto mu_y = filter_valid(y, w, h, kernel);
        const auto m_xx = filter_valid(xx, w, h, kernel);
        const auto m_yy = filter_valid(yy, w, h, kernel);
        const auto m_xy = filter_valid(xy, w, h, kernel);

        double sum = 0.0;
        for (std::size_t i = 0; i < mu_x.size(); ++i) {
            const double mx = mu_x[i], my = mu_y[i];
            const double var_x = m_xx[i] - mx * mx;
            const double var_y = m_yy[i] - my * my;
            const double cov = m_xy[i] - mx * my;
            const double num = (2.0 * mx * my + kC1) * (2.0 * cov + kC2);
            const double den = (mx * mx + my * my + kC1) * (var_x + var_y + kC2);
            sum += num / den;
        }
        total += sum / static_cast<double>(mu_x.size());
    }
    return total / 3.0;
}

double histogram_distance(const Histogram& h1, const Histogram& h2) {
    double dist = 0.0;
    const double t1 = h1.total > 0 ? static_cast<double>(h1.total) : 1.0;
    const double t2 = h2.total > 0 ? static_cast<double>(h2.total) : 1.0;
    for (int i = 0; i < 256; ++i) {
        const double f1 = static_cast<double>(h1.bins[static_cast<std::size_t>(i)]) / t1;
        const double f2 = static_cast<double>(h2.bins[static_cast<std::size_t>(i)]) / t2;
        dist += std::abs(f1 - f2);
    }
    return dist;
}

QualityReport evaluate(const RgbImage& a, const RgbImage& b) {
    QualityReport q;
    q.psnr_db = psnr(a, b);
    q.ssim = ssim(a, b);
    for (int c = 0; c < 3; ++c) {
        q.per_channel_psnr[static_cast<std::size_t>(c)] =
            psnr_channel(a, b, static_cast<Channel>(c));
    }
    return q;
}

const char* csv_header() { return "psnr_db,ssim,psnr_r,psnr_g,psnr_b"; }

std::string csv_row(const QualityReport& q) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g,%.10g", q.psnr_db, q.ssim,
                  q.per_channel_psnr[0], q.per_channel_psnr[1], q.per_channel_psnr[2]);
    return buf;
}

}  // namespace rawsynth::metrics
