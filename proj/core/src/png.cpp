// Copyright 2026 the mriq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mriq/png.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace mriq {

namespace {

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back((v >> 24) & 0xff);
    out.push_back((v >> 16) & 0xff);
    out.push_back((v >> 8) & 0xff);
    out.push_back(v & 0xff);
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4], const std::vector<std::uint8_t>& data) {
    put_be32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const uLong crc = crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
    put_be32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

void write_png_gray8(const std::string& path, int width, int height, const std::vector<std::uint8_t>& pixels) {
    if (width < 1 || height < 1 || pixels.size() != static_cast<std::size_t>(width) * height)
        throw Error(Errc::invalid_params, "pixel buffer does not match dims");

    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(height) * (width + 1));
    for (int y = 0; y < height; ++y) {
        raw.push_back(0);  // filter: none
        raw.insert(raw.end(), pixels.begin() + static_cast<std::size_t>(y) * width,
                   pixels.begin() + static_cast<std::size_t>(y + 1) * width);
    }
    uLongf comp_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> compressed(comp_size);
    if (compress2(compressed.data(), &comp_size, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw Error(Errc::io_error, "zlib compression failed");
    compressed.resize(comp_size);

    std::vector<std::uint8_t> png = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<std::uint8_t> ihdr;
    put_be32(ihdr, static_cast<std::uint32_t>(width));
    put_be32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(0);  // grayscale
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter
    ihdr.push_back(0);  // no interlace
    put_chunk(png, "IHDR", ihdr);
    put_chunk(png, "IDAT", compressed);
    put_chunk(png, "IEND", {});

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
    if (!out) throw Error(Errc::io_error, "write failed on " + path);
}

void write_middle_slice_png(const Volume& v, const std::string& path) {
    v.validate();
    const int z = v.nz / 2;
    float lo = v.at(0, 0, z), hi = lo;
    for (int y = 0; y < v.ny; ++y)
        for (int x = 0; x < v.nx; ++x) {
            const float val = v.at(x, y, z);
            lo = std::min(lo, val);
            hi = std::max(hi, val);
        }
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(v.nx) * v.ny, 0);
    if (hi > lo) {
        const double scale = 255.0 / (static_cast<double>(hi) - lo);
        for (int y = 0; y < v.ny; ++y)
            for (int x = 0; x < v.nx; ++x)
                pixels[static_cast<std::size_t>(y) * v.nx + x] = static_cast<std::uint8_t>(
                    std::lround((static_cast<double>(v.at(x, y, z)) - lo) * scale));
    }
    write_png_gray8(path, v.nx, v.ny, pixels);
}

}  // namespace mriq
