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

// rawsynth: simulate a parametric camera ISP, fit the 12-parameter color
// matrix that approximates its inverse, and batch-convert sRGB images into
// synthetic Bayer RAW files.
//
// Exit codes: 0 success, 2 bad arguments, 3 data error, 4 numerical
// divergence.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rawsynth/image_io.hpp"
#include "rawsynth/isp.hpp"
#include "rawsynth/lccm.hpp"
#include "rawsynth/metrics.hpp"
#include "rawsynth/synth.hpp"

namespace fs = std::filesystem;
using namespace rawsynth;

namespace {

constexpr int kExitBadArgs = 2;
constexpr int kExitDataError = 3;
constexpr int kExitDivergence = 4;

std::string index_name(const char* prefix, int i, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%04d%s", prefix, i, ext);
    return buf;
}

isp::IspParams teacher_from_file(const std::string& params_file) {
    if (params_file.empty()) return isp::IspParams{};
    return isp::load_params(params_file);
}

void require_exists(const fs::path& p, const char* what) {
    if (!fs::exists(p)) {
        throw IoError(std::string(what) + " not found: " + p.string());
    }
}

// Quantize in memory exactly as a ppm16 save/load round trip would.
RgbImage quantize16(const RgbImage& img) {
    RgbImage out = img;
    for (double& s : out.samples()) s = quantize_unit(s, 16);
    return out;
}

struct FitFlags {
    std::string optimizer = "adam";
    std::string init = "identity";
    double lr = 0.001;
    int epochs = 100;
    int batch = 1;
    std::uint64_t seed = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--optimizer", optimizer, "adam | sgd | closed-form")
            ->capture_default_str();
        cmd->add_option("--init", init, "identity | zeros | seeded-random")
            ->capture_default_str();
        cmd->add_option("--lr", lr, "learning rate")->capture_default_str();
        cmd->add_option("--epochs", epochs, "training epochs")->capture_default_str();
        cmd->add_option("--batch", batch, "images per optimizer step")->capture_default_str();
        cmd->add_option("--seed", seed, "RNG seed")->capture_default_str();
    }

    lccm::FitConfig to_config() const {
        lccm::FitConfig cfg;
        cfg.optimizer = lccm::optimizer_from_string(optimizer);
        cfg.init = lccm::init_from_string(init);
        cfg.learning_rate = lr;
        cfg.epochs = epochs;
        cfg.batch = batch;
        cfg.seed = seed;
        return cfg;
    }
};

struct ManifestEntry {
    fs::path source;
    fs::path target_rgb;
    fs::path target_raw;
};

std::vector<ManifestEntry> read_manifest(const fs::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw IoError("cannot open manifest: " + manifest.string());
    const fs::path base = manifest.parent_path();
    std::vector<ManifestEntry> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos) {
            throw FormatError("manifest: expected 3 tab-separated paths: " + line);
        }
        entries.push_back({base / line.substr(0, tab1),
                           base / line.substr(tab1 + 1, tab2 - tab1 - 1),
                           base / line.substr(tab2 + 1)});
    }
    return entries;
}

int cmd_synthesize(int count, const std::string& params_file, const std::string& out_dir,
                   std::uint64_t seed, int width, int height, int bit_depth) {
    const isp::IspParams teacher = teacher_from_file(params_file);
    teacher.validate();
    fs::create_directories(out_dir);

    std::mt19937_64 rng(seed);
    std::string manifest;
    for (int i = 0; i < count; ++i) {
        const RgbImage source = synth::make_sample(width, height, i, rng);
        const std::string src_name = index_name("src", i, ".ppm");
        const std::string rgb_name = index_name("tgt", i, ".ppm");
        const std::string raw_name = index_name("tgt", i, ".rawb");
        save_ppm(source, fs::path(out_dir) / src_name, ImageFormat::ppm16);

        // Derive targets from the quantized source so a consumer reading the
        // files back can reproduce them bit-exactly.
        const RgbImage stored = quantize16(source);
        save_ppm(isp::isp_inverse_rgb(stored, teacher), fs::path(out_dir) / rgb_name,
                 ImageFormat::ppm16);
        save_raw_bin(isp::isp_inverse(stored, teacher, bit_depth), fs::path(out_dir) / raw_name);
        manifest += src_name + "\t" + rgb_name + "\t" + raw_name + "\n";
    }
    isp::save_params(teacher, fs::path(out_dir) / "teacher_params.txt");

    std::ofstream mf(fs::path(out_dir) / "manifest.tsv", std::ios::trunc);
    mf << manifest;
    if (!mf) throw IoError("cannot write manifest");
    std::cout << "synthesized " << count << " pairs into " << out_dir << "\n";
    return 0;
}

int cmd_fit(const std::string& manifest_path, const FitFlags& flags,
            const std::string& out_matrix, const std::string& report_csv) {
    require_exists(manifest_path, "manifest");
    const auto entries = read_manifest(manifest_path);
    std::vector<lccm::ImagePair> pairs;
    pairs.reserve(entries.size());
    for (const auto& e : entries) {
        require_exists(e.source, "source image");
        require_exists(e.target_rgb, "target image");
        pairs.push_back({load_ppm(e.source), load_ppm(e.target_rgb)});
    }

    const lccm::FitReport report = lccm::fit(pairs, flags.to_config());
    save_matrix(report.final_matrix, out_matrix);
    if (!report_csv.empty()) lccm::write_report_csv(report, report_csv);
    std::cout << "fit " << pairs.size() << " pairs, final loss "
              << report.loss_per_epoch.back() << " (psnr "
              << report.psnr_per_epoch.back() << " dB)\n";
    return 0;
}

int cmd_convert(const std::string& matrix_file, std::vector<std::string> images,
                const std::string& in_dir, const std::string& out_dir,
                const std::string& pattern_name, int bit_depth) {
    const ColorMatrix matrix = load_matrix(matrix_file);
    const BayerPattern pattern = bayer_pattern_from_string(pattern_name);
    if (!in_dir.empty()) {
        require_exists(in_dir, "input directory");
        std::vector<std::string> found;
        for (const auto& entry : fs::directory_iterator(in_dir)) {
            if (entry.path().extension() == ".ppm") found.push_back(entry.path().string());
        }
        std::sort(found.begin(), found.end());
        images.insert(images.end(), found.begin(), found.end());
    }
    if (images.empty()) throw ParamError("convert: no input images");
    for (const auto& img : images) require_exists(img, "input image");
    fs::create_directories(out_dir);

    const auto start = std::chrono::steady_clock::now();
    for (const auto& path : images) {
        RgbImage pred = lccm::apply(load_ppm(path), matrix);
        pred.clamp01();
        const BayerRaw raw = isp::mosaic(pred, pattern, bit_depth);
        const fs::path out = fs::path(out_dir) / fs::path(path).filename().replace_extension(".rawb");
        save_raw_bin(raw, out);
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    const double rate = static_cast<double>(images.size()) / std::max(elapsed.count(), 1e-9);
    std::printf("converted %zu images in %.3f s (%.1f images/s)\n", images.size(),
                elapsed.count(), rate);
    return 0;
}

int cmd_eval(const std::string& pred_dir, const std::string& target_dir,
             const std::string& report_csv) {
    require_exists(pred_dir, "prediction directory");
    require_exists(target_dir, "target directory");
    std::vector<fs::path> preds;
    for (const auto& entry : fs::directory_iterator(pred_dir)) {
        const auto ext = entry.path().extension();
        if (ext == ".ppm" || ext == ".rawb") preds.push_back(entry.path());
    }
    std::sort(preds.begin(), preds.end());
    if (preds.empty()) throw IoError("eval: no .ppm or .rawb files in " + pred_dir);

    std::ofstream out(report_csv, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + report_csv);
    out << "file,psnr_db,ssim,psnr_r,psnr_g,psnr_b\n";

    double psnr_sum = 0.0, ssim_sum = 0.0;
    std::size_t ssim_count = 0;
    for (const auto& pred_path : preds) {
        const fs::path target_path = fs::path(target_dir) / pred_path.filename();
        require_exists(target_path, "target image");
        char buf[256];
        if (pred_path.extension() == ".rawb") {
            const double p = metrics::psnr(load_raw_bin(pred_path), load_raw_bin(target_path));
            psnr_sum += p;
            std::snprintf(buf, sizeof(buf), "%s,%.10g,,,,\n",
                          pred_path.filename().string().c_str(), p);
        } else {
            const auto q = metrics::evaluate(load_ppm(pred_path), load_ppm(target_path));
            psnr_sum += q.psnr_db;
            ssim_sum += q.ssim;
            ++ssim_count;
            std::snprintf(buf, sizeof(buf), "%s,%s\n", pred_path.filename().string().c_str(),
                          metrics::csv_row(q).c_str());
        }
        out << buf;
    }
    const double n = static_cast<double>(preds.size());
    char buf[256];
    if (ssim_count > 0) {
        std::snprintf(buf, sizeof(buf), "mean,%.10g,%.10g,,,\n", psnr_sum / n,
                      ssim_sum / static_cast<double>(ssim_count));
    } else {
        std::snprintf(buf, sizeof(buf), "mean,%.10g,,,,\n", psnr_sum / n);
    }
    out << buf;
    if (!out) throw IoError("report write failed: " + report_csv);
    std::cout << "evaluated " << preds.size() << " images, mean psnr " << psnr_sum / n << " dB\n";
    return 0;
}

int cmd_ablate(const std::vector<int>& sample_counts, int trials, int test_samples,
               const std::string& params_file, const FitFlags& flags, int width, int height,
               const std::string& report_csv) {
    synth::AblationConfig cfg;
    if (!sample_counts.empty()) cfg.sample_counts = sample_counts;
    cfg.trials = trials;
    cfg.test_samples = test_samples;
    cfg.width = width;
    cfg.height = height;
    cfg.seed = flags.seed;
    cfg.fit = flags.to_config();

    const auto rows = synth::run_ablation(cfg, teacher_from_file(params_file));

    std::ofstream out(report_csv, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + report_csv);
    out << "samples,trial,psnr_db,ssim\n";
    char buf[128];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.10g,%.10g\n", row.samples, row.trial,
                      row.psnr_db, row.ssim);
        out << buf;
    }
    if (!out) throw IoError("report write failed: " + report_csv);
    std::cout << "ablation wrote " << rows.size() << " rows to " << report_csv << "\n";
    return 0;
}

int cmd_histogram(const std::string& image_path, const std::string& out_csv) {
    require_exists(image_path, "image");
    const RgbImage img = load_ppm(image_path);
    const Histogram r = histogram(img, Channel::R);
    const Histogram g = histogram(img, Channel::G);
    const Histogram b = histogram(img, Channel::B);

    std::ofstream out(out_csv, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + out_csv);
    out << "bin,r,g,b\n";
    const double total = static_cast<double>(img.pixel_count());
    char buf[128];
    for (int i = 0; i < 256; ++i) {
        const auto bi = static_cast<std::size_t>(i);
        std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g\n", i,
                      static_cast<double>(r.bins[bi]) / total,
                      static_cast<double>(g.bins[bi]) / total,
                      static_cast<double>(b.bins[bi]) / total);
        out << buf;
    }
    if (!out) throw IoError("histogram write failed: " + out_csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"parametric ISP simulator and color-matrix RAW reconstruction"};
    app.require_subcommand(1);

    // synthesize
    auto* synth_cmd = app.add_subcommand("synthesize", "generate paired sRGB / simRAW data");
    int count = 0;
    std::string params_file, out_dir;
    std::uint64_t seed = 0;
    int width = 64, height = 64, bit_depth = 12;
    synth_cmd->add_option("--count", count, "number of pairs")->required();
    synth_cmd->add_option("--out", out_dir, "output directory")->required();
    synth_cmd->add_option("--params", params_file, "teacher ISP parameter file");
    synth_cmd->add_option("--seed", seed, "RNG seed")->capture_default_str();
    synth_cmd->add_option("--width", width, "image width")->capture_default_str();
    synth_cmd->add_option("--height", height, "image height")->capture_default_str();
    synth_cmd->add_option("--bit-depth", bit_depth, "raw bit depth")->capture_default_str();

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "fit the color matrix to manifest pairs");
    std::string manifest, out_matrix, fit_report;
    FitFlags fit_flags;
    fit_cmd->add_option("--manifest", manifest, "pairs manifest (TSV)")->required();
    fit_cmd->add_option("--out-matrix", out_matrix, "output matrix file")->required();
    fit_cmd->add_option("--report", fit_report, "per-epoch CSV report");
    fit_flags.attach(fit_cmd);

    // convert
    auto* conv_cmd = app.add_subcommand("convert", "apply a matrix and mosaic to raw-bin");
    std::string matrix_file, conv_in_dir, conv_out_dir, pattern_name = "RGGB";
    int conv_bit_depth = 12;
    std::vector<std::string> conv_images;
    conv_cmd->add_option("--matrix", matrix_file, "matrix file (12 values)")->required();
    conv_cmd->add_option("--out", conv_out_dir, "output directory")->required();
    conv_cmd->add_option("--in-dir", conv_in_dir, "directory of .ppm inputs");
    conv_cmd->add_option("--pattern", pattern_name, "Bayer pattern")->capture_default_str();
    conv_cmd->add_option("--bit-depth", conv_bit_depth, "raw bit depth")->capture_default_str();
    conv_cmd->add_option("images", conv_images, "input .ppm images");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "PSNR/SSIM report for matching files");
    std::string pred_dir, target_dir, eval_report;
    eval_cmd->add_option("--pred", pred_dir, "prediction directory")->required();
    eval_cmd->add_option("--target", target_dir, "target directory")->required();
    eval_cmd->add_option("--report", eval_report, "output CSV")->required();

    // ablate
    auto* abl_cmd = app.add_subcommand("ablate", "training-set size sweep");
    std::vector<int> abl_counts;
    int abl_trials = 3, abl_test_samples = 50, abl_width = 64, abl_height = 64;
    std::string abl_params, abl_report;
    FitFlags abl_flags;
    abl_cmd->add_option("--samples", abl_counts, "sample counts (default 10 25 50 100 250 500)");
    abl_cmd->add_option("--trials", abl_trials, "trials per count")->capture_default_str();
    abl_cmd->add_option("--test-samples", abl_test_samples, "held-out set size")
        ->capture_default_str();
    abl_cmd->add_option("--width", abl_width, "image width")->capture_default_str();
    abl_cmd->add_option("--height", abl_height, "image height")->capture_default_str();
    abl_cmd->add_option("--params", abl_params, "teacher ISP parameter file");
    abl_cmd->add_option("--report", abl_report, "output CSV")->required();
    abl_flags.attach(abl_cmd);

    // histogram
    auto* hist_cmd = app.add_subcommand("histogram", "per-channel histogram CSV");
    std::string hist_image, hist_out;
    hist_cmd->add_option("--image", hist_image, "input .ppm image")->required();
    hist_cmd->add_option("--out", hist_out, "output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitBadArgs;
    }

    try {
        if (synth_cmd->parsed()) {
            return cmd_synthesize(count, params_file, out_dir, seed, width, height, bit_depth);
        }
        if (fit_cmd->parsed()) return cmd_fit(manifest, fit_flags, out_matrix, fit_report);
        if (conv_cmd->parsed()) {
            return cmd_convert(matrix_file, conv_images, conv_in_dir, conv_out_dir, pattern_name,
                               conv_bit_depth);
        }
        if (eval_cmd->parsed()) return cmd_eval(pred_dir, target_dir, eval_report);
        if (abl_cmd->parsed()) {
            return cmd_ablate(abl_counts, abl_trials, abl_test_samples, abl_params, abl_flags,
                              abl_width, abl_height, abl_report);
        }
        if (hist_cmd->parsed()) return cmd_histogram(hist_image, hist_out);
        std::cerr << "no subcommand\n";
        return kExitBadArgs;
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const ParamError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadArgs;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
