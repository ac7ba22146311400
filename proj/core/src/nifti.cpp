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

#include "mriq/nifti.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

namespace mriq {

namespace {

constexpr std::size_t kHeaderSize = 348;
constexpr std::size_t kVoxOffset = 352;

// NIfTI-1 datatype codes
constexpr std::int16_t kDtUint8 = 2;
constexpr std::int16_t kDtInt16 = 4;
constexpr std::int16_t kDtInt32 = 8;
constexpr std::int16_t kDtFloat32 = 16;
constexpr std::int16_t kDtFloat64 = 64;

// little-endian field access, independent of host byte order

std::uint32_t get_u32(const std::uint8_t* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

std::int32_t get_i32(const std::uint8_t* p) { return static_cast<std::int32_t>(get_u32(p)); }

std::int16_t get_i16(const std::uint8_t* p) {
    return static_cast<std::int16_t>(std::uint16_t(p[0]) | std::uint16_t(p[1]) << 8);
}

float get_f32(const std::uint8_t* p) {
    const std::uint32_t u = get_u32(p);
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

double get_f64(const std::uint8_t* p) {
    std::uint64_t u = 0;
    for (int i = 7; i >= 0; --i) u = u << 8 | p[i];
    double d;
    std::memcpy(&d, &u, 8);
    return d;
}

void put_u32(std::uint8_t* p, std::uint32_t v) {
    p[0] = v & 0xff;
    p[1] = (v >> 8) & 0xff;
    p[2] = (v >> 16) & 0xff;
    p[3] = (v >> 24) & 0xff;
}

void put_i32(std::uint8_t* p, std::int32_t v) { put_u32(p, static_cast<std::uint32_t>(v)); }

void put_i16(std::uint8_t* p, std::int16_t v) {
    p[0] = v & 0xff;
    p[1] = (static_cast<std::uint16_t>(v) >> 8) & 0xff;
}

void put_f32(std::uint8_t* p, float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    put_u32(p, u);
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(Errc::io_error, "read failed on " + path);
    return bytes;
}

bool is_gzip(const std::vector<std::uint8_t>& b) { return b.size() >= 2 && b[0] == 0x1f && b[1] == 0x8b; }

std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& in) {
    z_stream strm{};
    if (inflateInit2(&strm, 15 + 32) != Z_OK) throw Error(Errc::io_error, "inflateInit failed");
    std::vector<std::uint8_t> out;
    out.reserve(in.size() * 4);
    std::uint8_t buf[1 << 16];
    strm.next_in = const_cast<std::uint8_t*>(in.data());
    strm.avail_in = static_cast<uInt>(in.size());
    int rc = Z_OK;
    do {
        strm.next_out = buf;
        strm.avail_out = sizeof(buf);
        rc = inflate(&strm, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&strm);
            throw Error(Errc::truncated_data, "gzip stream is corrupt or incomplete");
        }
        out.insert(out.end(), buf, buf + (sizeof(buf) - strm.avail_out));
    } while (rc != Z_STREAM_END && (strm.avail_in > 0 || strm.avail_out == 0));
    inflateEnd(&strm);
    if (rc != Z_STREAM_END) throw Error(Errc::truncated_data, "gzip stream ended prematurely");
    return out;
}

std::vector<std::uint8_t> gzip_compress(const std::vector<std::uint8_t>& in) {
    z_stream strm{};
    // windowBits 15+16 selects the gzip container; zlib's default gzip
    // header has mtime 0, so output is reproducible byte for byte.
    if (deflateInit2(&strm, 6, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK)
        throw Error(Errc::io_error, "deflateInit failed");
    std::vector<std::uint8_t> out;
    std::uint8_t buf[1 << 16];
    strm.next_in = const_cast<std::uint8_t*>(in.data());
    strm.avail_in = static_cast<uInt>(in.size());
    int rc = Z_OK;
    do {
        strm.next_out = buf;
        strm.avail_out = sizeof(buf);
        rc = deflate(&strm, Z_FINISH);
        out.insert(out.end(), buf, buf + (sizeof(buf) - strm.avail_out));
    } while (rc != Z_STREAM_END);
    deflateEnd(&strm);
    return out;
}

std::string fixed_string(const std::uint8_t* p, std::size_t n) {
    std::size_t len = 0;
    while (len < n && p[len] != 0) ++len;
    return std::string(reinterpret_cast<const char*>(p), len);
}

std::array<std::array<double, 4>, 4> affine_from_header(const std::uint8_t* h, const std::array<double, 3>& spacing) {
    std::array<std::array<double, 4>, 4> m{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
    const std::int16_t qform_code = get_i16(h + 252);
    const std::int16_t sform_code = get_i16(h + 254);
    if (sform_code > 0) {
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 4; ++c) m[r][c] = get_f32(h + 280 + 16 * r + 4 * c);
        return m;
    }
    if (qform_code > 0) {
        const double b = get_f32(h + 256), c = get_f32(h + 260), d = get_f32(h + 264);
        const double a = std::sqrt(std::max(0.0, 1.0 - b * b - c * c - d * d));
        const double qfac = get_f32(h + 76) < 0.0f ? -1.0 : 1.0;  // pixdim[0]
        const double rot[3][3] = {
            {a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)},
            {2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b)},
            {2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - b * b - c * c}};
        for (int r = 0; r < 3; ++r) {
            m[r][0] = rot[r][0] * spacing[0];
            m[r][1] = rot[r][1] * spacing[1];
            m[r][2] = rot[r][2] * spacing[2] * qfac;
        }
        m[0][3] = get_f32(h + 268);
        m[1][3] = get_f32(h + 272);
        m[2][3] = get_f32(h + 276);
        return m;
    }
    for (int i = 0; i < 3; ++i) m[i][i] = spacing[i];
    return m;
}

}  // namespace

Volume read_nifti(const std::string& path) {
    std::vector<std::uint8_t> bytes = read_file_bytes(path);
    if (is_gzip(bytes)) bytes = gunzip(bytes);
    if (bytes.size() < kHeaderSize) throw Error(Errc::truncated_data, "file shorter than the 348-byte header");
    const std::uint8_t* h = bytes.data();

    const char* magic = reinterpret_cast<const char*>(h + 344);
    if (std::memcmp(magic, "ni1", 4) == 0)
        throw Error(Errc::bad_magic, "detached .hdr/.img pairs are not supported");
    if (std::memcmp(magic, "n+1", 4) != 0) throw Error(Errc::bad_magic, "magic is not \"n+1\\0\"");
    if (get_i32(h + 0) != 348)
        throw Error(Errc::bad_magic, "sizeof_hdr != 348; not a little-endian NIfTI-1 file");

    std::int16_t dim0 = get_i16(h + 40);
    if (dim0 < 1 || dim0 > 7) throw Error(Errc::unsupported_dimensionality, "dim[0] out of range");
    std::int16_t dims[8] = {dim0, 1, 1, 1, 1, 1, 1, 1};
    for (int i = 1; i <= dim0; ++i) dims[i] = get_i16(h + 40 + 2 * i);
    for (int i = 4; i <= dim0; ++i)
        if (dims[i] > 1) throw Error(Errc::unsupported_dimensionality, "4D+ volumes are not supported");
    const int nx = dims[1], ny = dim0 >= 2 ? dims[2] : 1, nz = dim0 >= 3 ? dims[3] : 1;
    if (nx < 1 || ny < 1 || nz < 1) throw Error(Errc::unsupported_dimensionality, "non-positive dim");

    const std::int16_t datatype = get_i16(h + 70);
    std::size_t voxel_bytes;
    switch (datatype) {
        case kDtUint8: voxel_bytes = 1; break;
        case kDtInt16: voxel_bytes = 2; break;
        case kDtInt32: voxel_bytes = 4; break;
        case kDtFloat32: voxel_bytes = 4; break;
        case kDtFloat64: voxel_bytes = 8; break;
        default: throw Error(Errc::unsupported_datatype, "datatype code " + std::to_string(datatype));
    }

    const double vox_offset = get_f32(h + 108);
    if (vox_offset < static_cast<double>(kHeaderSize))
        throw Error(Errc::bad_magic, "vox_offset < 348");
    const std::size_t offset = static_cast<std::size_t>(vox_offset);
    const std::size_t n = static_cast<std::size_t>(nx) * ny * nz;
    if (bytes.size() < offset + n * voxel_bytes)
        throw Error(Errc::truncated_data, "payload shorter than header promises");

    float slope = get_f32(h + 112);
    float inter = get_f32(h + 116);
    if (slope == 0.0f) {  // NIfTI convention: zero slope means unscaled
        slope = 1.0f;
        inter = 0.0f;
    }

    Volume v;
    v.nx = nx;
    v.ny = ny;
    v.nz = nz;
    for (int i = 0; i < 3; ++i) {
        const float p = get_f32(h + 76 + 4 * (i + 1));
        v.spacing[i] = p > 0.0f ? p : 1.0;
    }
    v.affine = affine_from_header(h, v.spacing);
    v.data.resize(n);
    const std::uint8_t* payload = bytes.data() + offset;
    for (std::size_t i = 0; i < n; ++i) {
        double raw;
        switch (datatype) {
            case kDtUint8: raw = payload[i]; break;
            case kDtInt16: raw = get_i16(payload + 2 * i); break;
            case kDtInt32: raw = get_i32(payload + 4 * i); break;
            case kDtFloat32: raw = get_f32(payload + 4 * i); break;
            default: raw = get_f64(payload + 8 * i); break;
        }
        const float val = static_cast<float>(slope * raw + inter);
        if (!std::isfinite(val)) throw Error(Errc::non_finite_data, "non-finite intensity at voxel " + std::to_string(i));
        v.data[i] = val;
    }

    if (auto s = fixed_string(h + 148, 80); !s.empty()) v.metadata["descrip"] = s;
    if (auto s = fixed_string(h + 228, 24); !s.empty()) v.metadata["aux_file"] = s;
    if (auto s = fixed_string(h + 328, 16); !s.empty()) v.metadata["intent_name"] = s;
    v.metadata["source_datatype"] = datatype == kDtUint8     ? "uint8"
                                    : datatype == kDtInt16   ? "int16"
                                    : datatype == kDtInt32   ? "int32"
                                    : datatype == kDtFloat32 ? "float32"
                                                             : "float64";
    return v;
}

void write_nifti(const Volume& v, const std::string& path) {
    v.validate();
    const std::size_t n = v.size();
    std::vector<std::uint8_t> bytes(kVoxOffset + 4 * n, 0);
    std::uint8_t* h = bytes.data();

    put_i32(h + 0, 348);
    put_i16(h + 40, 3);  // dim[0]
    put_i16(h + 42, static_cast<std::int16_t>(v.nx));
    put_i16(h + 44, static_cast<std::int16_t>(v.ny));
    put_i16(h + 46, static_cast<std::int16_t>(v.nz));
    for (int i = 4; i <= 7; ++i) put_i16(h + 40 + 2 * i, 1);
    put_i16(h + 70, kDtFloat32);
    put_i16(h + 72, 32);  // bitpix
    put_f32(h + 76, 1.0f);  // pixdim[0] (qfac)
    for (int i = 0; i < 3; ++i) put_f32(h + 80 + 4 * i, static_cast<float>(v.spacing[i]));
    for (int i = 4; i <= 7; ++i) put_f32(h + 76 + 4 * i, 0.0f);
    put_f32(h + 108, static_cast<float>(kVoxOffset));
    put_f32(h + 112, 1.0f);  // scl_slope
    put_f32(h + 116, 0.0f);  // scl_inter
    h[123] = 2 | 8;          // xyzt_units: mm / sec

    std::string descrip = "mriq";
    if (auto it = v.metadata.find("descrip"); it != v.metadata.end()) descrip = it->second;
    std::memcpy(h + 148, descrip.data(), std::min<std::size_t>(descrip.size(), 79));

    put_i16(h + 252, 0);  // qform_code
    put_i16(h + 254, 1);  // sform_code: scanner
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) put_f32(h + 280 + 16 * r + 4 * c, static_cast<float>(v.affine[r][c]));
    std::memcpy(h + 344, "n+1", 4);
    // bytes 348..352 stay zero: no header extensions

    std::uint8_t* payload = bytes.data() + kVoxOffset;
    for (std::size_t i = 0; i < n; ++i) put_f32(payload + 4 * i, v.data[i]);

    const bool gz = path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
    if (gz) bytes = gzip_compress(bytes);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::io_error, "write failed on " + path);
}

void write_mask_nifti(const Mask& m, std::array<double, 3> spacing, const std::string& path) {
    Volume v = make_volume(m.nx, m.ny, m.nz, spacing);
    for (std::size_t i = 0; i < m.size(); ++i) v.data[i] = m.on[i] ? 1.0f : 0.0f;
    write_nifti(v, path);
}

}  // namespace mriq
