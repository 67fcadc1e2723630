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

#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "rawsynth/image_io.hpp"
#include "rawsynth/isp.hpp"
#include "rawsynth/lccm.hpp"
#include "test_support.hpp"

using namespace rawsynth;
namespace ts = test_support;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(RAWSYNTH_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("cli: bad arguments exit with code 2") {
    CHECK(run_cli("") == 2);
    CHECK(run_cli("synthesize --count 2") == 2);        // missing --out
    CHECK(run_cli("synthesize --count 2 --out x --frobnicate 1") == 2);
    CHECK(run_cli("nonsense") == 2);
    CHECK(run_cli("--help") == 0);
}

TEST_CASE("cli: synthesize with count 0 writes an empty manifest") {
    const auto dir = ts::temp_dir("cli_synth0");
    CHECK(run_cli("synthesize --count 0 --out " + (dir / "d").string()) == 0);
    CHECK(fs::exists(dir / "d" / "manifest.tsv"));
    CHECK(fs::file_size(dir / "d" / "manifest.tsv") == 0);
}

TEST_CASE("cli: synthesize is byte-deterministic for a fixed seed") {
    const auto dir = ts::temp_dir("cli_synth_det");
    const std::string a = (dir / "a").string();
    const std::string b = (dir / "b").string();
    REQUIRE(run_cli("synthesize --count 4 --seed 9 --width 16 --height 16 --out " + a) == 0);
    REQUIRE(run_cli("synthesize --count 4 --seed 9 --width 16 --height 16 --out " + b) == 0);
    for (const auto& entry : fs::directory_iterator(a)) {
        const fs::path other = fs::path(b) / entry.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(ts::read_file_bytes(entry.path()) == ts::read_file_bytes(other));
    }
}

TEST_CASE("cli: emitted targets are the inverse pipeline applied to the source") {
    const auto dir = ts::temp_dir("cli_synth_check");
    const fs::path out = dir / "d";
    REQUIRE(run_cli("synthesize --count 3 --seed 5 --width 16 --height 16 --bit-depth 12 --out " +
                    out.string()) == 0);
    const isp::IspParams teacher = isp::load_params(out / "teacher_params.txt");

    const auto lines = read_lines(out / "manifest.tsv");
    REQUIRE(lines.size() == 3);
    for (const auto& line : lines) {
        const auto tab1 = line.find('\t');
        const auto tab2 = line.find('\t', tab1 + 1);
        const RgbImage src = load_ppm(out / line.substr(0, tab1));
        const RgbImage tgt_rgb = load_ppm(out / line.substr(tab1 + 1, tab2 - tab1 - 1));
        const BayerRaw tgt_raw = load_raw_bin(out / line.substr(tab2 + 1));

        const RgbImage expect_rgb = isp::isp_inverse_rgb(src, teacher);
        for (std::size_t i = 0; i < src.samples().size(); ++i) {
            CHECK(tgt_rgb.samples()[i] == quantize_unit(expect_rgb.samples()[i], 16));
        }
        const BayerRaw expect_raw = isp::isp_inverse(src, teacher, 12);
        CHECK(tgt_raw.pattern() == expect_raw.pattern());
        for (std::size_t i = 0; i < expect_raw.samples().size(); ++i) {
            CHECK(tgt_raw.samples()[i] == quantize_unit(expect_raw.samples()[i], 12));
        }
    }
}

TEST_CASE("cli: fit recovers the affine teacher from synthesized files") {
    const auto dir = ts::temp_dir("cli_fit");
    isp::IspParams affine;  // teacher defaults with the nonlinearity disabled
    affine.gamma = 1.0;
    isp::save_params(affine, dir / "affine.txt");
    const fs::path data = dir / "data";
    REQUIRE(run_cli("synthesize --count 6 --seed 3 --params " + (dir / "affine.txt").string() +
                    " --out " + data.string()) == 0);
    REQUIRE(run_cli("fit --manifest " + (data / "manifest.tsv").string() + " --out-matrix " +
                    (dir / "m.txt").string() + " --report " + (dir / "r.csv").string() +
                    " --optimizer closed-form") == 0);

    const ColorMatrix fitted = load_matrix(dir / "m.txt");
    const ColorMatrix inv = affine.ccm.inverse_affine();
    double max_err = 0.0;
    for (int c = 0; c < 3; ++c) {
        const double scale = affine.brightness_gain * affine.wb_gains[static_cast<std::size_t>(c)];
        for (int u = 0; u < 3; ++u) {
            max_err = std::max(max_err, std::abs(fitted.weights[c][u] - inv.weights[c][u] / scale));
        }
        max_err = std::max(max_err, std::abs(fitted.bias[c]));
    }
    CHECK(max_err <= 1e-3);  // dominated by 16-bit file quantization

    const auto lines = read_lines(dir / "r.csv");
    REQUIRE(!lines.empty());
    CHECK(lines[0] == "epoch,loss,psnr_db");
}

TEST_CASE("cli: fit exit codes for data errors and divergence") {
    const auto dir = ts::temp_dir("cli_fit_err");
    CHECK(run_cli("fit --manifest missing.tsv --out-matrix " + (dir / "m.txt").string()) == 3);

    const fs::path data = dir / "data";
    REQUIRE(run_cli("synthesize --count 3 --seed 1 --out " + data.string()) == 0);
    CHECK(run_cli("fit --manifest " + (data / "manifest.tsv").string() + " --out-matrix " +
                  (dir / "m.txt").string() + " --optimizer sgd --lr 1e12 --epochs 10") == 4);
}

TEST_CASE("cli: convert quantizes into range and reports throughput") {
    const auto dir = ts::temp_dir("cli_convert");
    const fs::path data = dir / "data";
    REQUIRE(run_cli("synthesize --count 2 --seed 2 --width 16 --height 16 --out " +
                    data.string()) == 0);
    save_matrix(ColorMatrix::identity(), dir / "id.txt");

    const fs::path out = dir / "raw";
    REQUIRE(run_cli("convert --matrix " + (dir / "id.txt").string() + " --out " + out.string() +
                    " --pattern GRBG --bit-depth 12 " + (data / "src_0000.ppm").string() + " " +
                    (data / "src_0001.ppm").string()) == 0);

    for (int i = 0; i < 2; ++i) {
        const fs::path raw_path = out / ("src_000" + std::to_string(i) + ".rawb");
        REQUIRE(fs::exists(raw_path));
        const BayerRaw raw = load_raw_bin(raw_path);
        CHECK(raw.pattern() == BayerPattern::GRBG);
        CHECK(raw.bit_depth() == 12);
        // Stored codes must fit 12 bits: left-aligned u16 payload keeps the
        // low 4 bits clear.
        const std::string bytes = ts::read_file_bytes(raw_path);
        for (std::size_t off = 16; off < bytes.size(); off += 2) {
            CHECK((static_cast<unsigned char>(bytes[off]) & 0x0f) == 0);
        }
    }

    std::ofstream bad(dir / "bad.txt");
    bad << "1 2 3 4 5\n";
    bad.close();
    CHECK(run_cli("convert --matrix " + (dir / "bad.txt").string() + " --out " + out.string() +
                  " " + (data / "src_0000.ppm").string()) == 3);
    CHECK(run_cli("convert --matrix " + (dir / "id.txt").string() + " --out " + out.string() +
                  " missing.ppm") == 3);
}

TEST_CASE("cli: eval writes per-image rows plus a mean row") {
    const auto dir = ts::temp_dir("cli_eval");
    const fs::path a = dir / "a";
    const fs::path b = dir / "b";
    REQUIRE(run_cli("synthesize --count 2 --seed 4 --width 16 --height 16 --out " + a.string()) ==
            0);
    REQUIRE(run_cli("synthesize --count 2 --seed 4 --width 16 --height 16 --out " + b.string()) ==
            0);
    REQUIRE(run_cli("eval --pred " + a.string() + " --target " + b.string() + " --report " +
                    (dir / "e.csv").string()) == 0);
    const auto lines = read_lines(dir / "e.csv");
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0] == "file,psnr_db,ssim,psnr_r,psnr_g,psnr_b");
    CHECK(lines.back().substr(0, 5) == "mean,");

    CHECK(run_cli("eval --pred missing_dir --target " + b.string() + " --report " +
                  (dir / "e2.csv").string()) == 3);
}

TEST_CASE("cli: histogram emits 256 frequency rows that sum to one") {
    const auto dir = ts::temp_dir("cli_hist");
    const fs::path data = dir / "data";
    REQUIRE(run_cli("synthesize --count 1 --seed 6 --width 16 --height 16 --out " +
                    data.string()) == 0);
    REQUIRE(run_cli("histogram --image " + (data / "src_0000.ppm").string() + " --out " +
                    (dir / "h.csv").string()) == 0);
    const auto lines = read_lines(dir / "h.csv");
    REQUIRE(lines.size() == 257);
    CHECK(lines[0] == "bin,r,g,b");
    double sum_r = 0.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto c1 = lines[i].find(',');
        const auto c2 = lines[i].find(',', c1 + 1);
        sum_r += std::stod(lines[i].substr(c1 + 1, c2 - c1 - 1));
    }
    CHECK(sum_r == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cli: ablate writes the sweep CSV") {
    const auto dir = ts::temp_dir("cli_ablate");
    REQUIRE(run_cli("ablate --samples 4 --samples 8 --trials 1 --test-samples 4 --width 16 "
                    "--height 16 --optimizer closed-form --report " +
                    (dir / "a.csv").string()) == 0);
    const auto lines = read_lines(dir / "a.csv");
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "samples,trial,psnr_db,ssim");
    CHECK(lines[1].substr(0, 2) == "4,");
    CHECK(lines[2].substr(0, 2) == "8,");
}
