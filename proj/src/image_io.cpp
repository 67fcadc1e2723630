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

#include "rawsynth/image_io.hpp"

#include <array>
#include <cctype>
#include <cstring>
#include <fstream>
#include <string>

namespace rawsynth {

namespace {

constexpr char kRawBinMagic[4] = {'R', 'W', 'B', '1'};

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

// PPM header token: whitespace-separated, '#' starts a comment to end of line.
std::string next_ppm_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return tok;
}

int parse_ppm_int(std::istream& in, const char* what) {
    const std::string tok = next_ppm_token(in);
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
        throw FormatError(std::string("ppm: bad ") + what + " field '" + tok + "'");
    }
    return std::stoi(tok);
}

void write_u16_le(std::string& buf, std::uint16_t v) {
    buf.push_back(static_cast<char>(v & 0xff));
    buf.push_back(static_cast<char>(v >> 8));
}

void write_u32_le(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

// Left-align a bit_depth-bit code in 16 bits; depths above 16 keep the MSBs.
std::uint16_t pack_raw_sample(double s, int bit_depth) {
    const std::uint32_t code = quantize_code(s, bit_depth);
    if (bit_depth <= 16) return static_cast<std::uint16_t>(code << (16 - bit_depth));
    return static_cast<std::uint16_t>(code >> (bit_depth - 16));
}

double unpack_raw_sample(std::uint16_t stored, int bit_depth) {
    std::uint32_t code;
    if (bit_depth <= 16) {
        code = static_cast<std::uint32_t>(stored) >> (16 - bit_depth);
    } else {
        code = static_cast<std::uint32_t>(stored) << (bit_depth - 16);
    }
    return dequantize_code(code, bit_depth);
}

}  // namespace

namespace {

RgbImage load_ppm_impl(const std::filesystem::path& path, int* depth_out);

}  // namespace

RgbImage load_ppm(const std::filesystem::path& path) { return load_ppm_impl(path, nullptr); }

namespace {

RgbImage load_ppm_impl(const std::filesystem::path& path, int* depth_out) {
    std::ifstream in = open_input(path);
    if (next_ppm_token(in) != "P6") throw FormatError("ppm: missing P6 magic in " + path.string());
    const int width = parse_ppm_int(in, "width");
    const int height = parse_ppm_int(in, "height");
    const int maxval = parse_ppm_int(in, "maxval");
    if (maxval != 255 && maxval != 65535) {
        throw FormatError("ppm: unsupported maxval " + std::to_string(maxval));
    }
    if (depth_out) *depth_out = maxval == 255 ? 8 : 16;
    // The single whitespace byte after maxval was consumed by the tokenizer.
    const std::size_t pixels = static_cast<std::size_t>(width) * height;
    const int bytes_per_sample = maxval == 255 ? 1 : 2;
    std::string payload(pixels * 3 * bytes_per_sample, '\0');
    in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (static_cast<std::size_t>(in.gcount()) != payload.size()) {
        throw ShapeError("ppm: truncated payload in " + path.string());
    }

    RgbImage img(width, height);
    auto r = img.plane(Channel::R);
    auto g = img.plane(Channel::G);
    auto b = img.plane(Channel::B);
    const auto* bytes = reinterpret_cast<const unsigned char*>(payload.data());
    for (std::size_t i = 0; i < pixels; ++i) {
        if (bytes_per_sample == 1) {
            r[i] = dequantize_code(bytes[3 * i + 0], 8);
            g[i] = dequantize_code(bytes[3 * i + 1], 8);
            b[i] = dequantize_code(bytes[3 * i + 2], 8);
        } else {
            const auto* p = bytes + 6 * i;
            r[i] = dequantize_code(static_cast<std::uint32_t>(p[0]) << 8 | p[1], 16);
            g[i] = dequantize_code(static_cast<std::uint32_t>(p[2]) << 8 | p[3], 16);
            b[i] = dequantize_code(static_cast<std::uint32_t>(p[4]) << 8 | p[5], 16);
        }
    }
    return img;
}

}  // namespace

void save_ppm(const RgbImage& img, const std::filesystem::path& path, ImageFormat format) {
    if (format != ImageFormat::ppm8 && format != ImageFormat::ppm16) {
        throw ParamError("save_ppm: format must be ppm8 or ppm16");
    }
    const int depth = format == ImageFormat::ppm8 ? 8 : 16;
    const int maxval = (1 << depth) - 1;

    std::string buf;
    buf += "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n" +
           std::to_string(maxval) + "\n";
    auto r = img.plane(Channel::R);
    auto g = img.plane(Channel::G);
    auto b = img.plane(Channel::B);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        for (double s : {r[i], g[i], b[i]}) {
            const std::uint32_t code = quantize_code(s, depth);
            if (depth == 8) {
                buf.push_back(static_cast<char>(code));
            } else {
                buf.push_back(static_cast<char>(code >> 8));  // big-endian per PPM
                buf.push_back(static_cast<char>(code & 0xff));
            }
        }
    }
    std::ofstream out = open_output(path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("ppm: write failed: " + path.string());
}

BayerRaw load_raw_bin(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::array<unsigned char, 16> header{};
    in.read(reinterpret_cast<char*>(header.data()), header.size());
    if (in.gcount() != 16 || std::memcmp(header.data(), kRawBinMagic, 4) != 0) {
        throw FormatError("raw-bin: bad header in " + path.string());
    }
    auto read_u32 = [&](int off) {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(header[off + i]) << (8 * i);
        return v;
    };
    const int width = static_cast<int>(read_u32(4));
    const int height = static_cast<int>(read_u32(8));
    const int pattern = header[12];
    const int bit_depth = header[13];
    if (pattern > 3) throw FormatError("raw-bin: bad pattern byte in " + path.string());
    if (bit_depth < 8 || bit_depth > 24) {
        throw FormatError("raw-bin: bad bit depth " + std::to_string(bit_depth));
    }

    BayerRaw raw(width, height, static_cast<BayerPattern>(pattern), bit_depth);
    std::string payload(raw.pixel_count() * 2, '\0');
    in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (static_cast<std::size_t>(in.gcount()) != payload.size()) {
        throw ShapeError("raw-bin: truncated payload in " + path.string());
    }
    const auto* bytes = reinterpret_cast<const unsigned char*>(payload.data());
    auto samples = raw.samples();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const std::uint16_t stored =
            static_cast<std::uint16_t>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
        samples[i] = unpack_raw_sample(stored, bit_depth);
    }
    return raw;
}

void save_raw_bin(const BayerRaw& raw, const std::filesystem::path& path) {
    std::string buf;
    buf.append(kRawBinMagic, 4);
    write_u32_le(buf, static_cast<std::uint32_t>(raw.width()));
    write_u32_le(buf, static_cast<std::uint32_t>(raw.height()));
    buf.push_back(static_cast<char>(raw.pattern()));
    buf.push_back(static_cast<char>(raw.bit_depth()));
    buf.push_back('\0');
    buf.push_back('\0');
    for (double s : raw.samples()) write_u16_le(buf, pack_raw_sample(s, raw.bit_depth()));

    std::ofstream out = open_output(path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("raw-bin: write failed: " + path.string());
}

LoadedImage load_image(const std::filesystem::path& path, ImageFormat format) {
    switch (format) {
        case ImageFormat::raw_bin:
            return load_raw_bin(path);
        case ImageFormat::ppm8:
        case ImageFormat::ppm16: {
            int depth = 0;
            RgbImage img = load_ppm_impl(path, &depth);
            const int expected = format == ImageFormat::ppm8 ? 8 : 16;
            if (depth != expected) {
                throw FormatError("ppm: depth " + std::to_string(depth) + " does not match the requested format");
            }
            return img;
        }
    }
    throw ParamError("load_image: unknown format");
}

void save_image(const LoadedImage& img, const std::filesystem::path& path, ImageFormat format) {
    if (std::holds_alternative<BayerRaw>(img)) {
        if (format != ImageFormat::raw_bin) {
            throw ParamError("save_image: Bayer data requires raw-bin format");
        }
        save_raw_bin(std::get<BayerRaw>(img), path);
    } else {
        save_ppm(std::get<RgbImage>(img), path, format);
    }
}

ImageFormat format_from_extension(const std::filesystem::path& path) {
    const std::string ext = path.extension().string();
    if (ext == ".ppm") return ImageFormat::ppm16;
    if (ext == ".rawb") return ImageFormat::raw_bin;
    throw ParamError("unrecognized image extension: " + path.string());
}

}  // namespace rawsynth
