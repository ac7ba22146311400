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

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "mriq/nifti.hpp"
#include "mriq/phantom.hpp"
#include "mriq/rng.hpp"
#include "test_util.hpp"

using namespace mriq;

namespace {

// Test-side NIfTI-1 writer assembled byte-by-byte from the published field
// offset table. Kept separate from the library writer so datatype/scaling
// decoding is checked against an independent encoding of the format.
std::vector<std::uint8_t> build_header(std::int16_t datatype, std::int16_t bitpix, int nx, int ny, int nz,
                                       float slope, float inter, const char magic[4]) {
    std::vector<std::uint8_t> h(352, 0);
    auto put32 = [&](std::size_t off, std::uint32_t v) {
        h[off] = v & 0xff;
        h[off + 1] = (v >> 8) & 0xff;
        h[off + 2] = (v >> 16) & 0xff;
        h[off + 3] = (v >> 24) & 0xff;
    };
    auto put16 = [&](std::size_t off, std::uint16_t v) {
        h[off] = v & 0xff;
        h[off + 1] = (v >> 8) & 0xff;
    };
    auto putf = [&](std::size_t off, float f) {
        std::uint32_t u;
        std::memcpy(&u, &f, 4);
        put32(off, u);
    };
    put32(0, 348);                                   // sizeof_hdr
    put16(40, 3);                                    // dim[0]
    put16(42, static_cast<std::uint16_t>(nx));       // dim[1]
    put16(44, static_cast<std::uint16_t>(ny));
    put16(46, static_cast<std::uint16_t>(nz));
    for (std::size_t off = 48; off <= 54; off += 2) put16(off, 1);
    put16(70, static_cast<std::uint16_t>(datatype));  // datatype
    put16(72, static_cast<std::uint16_t>(bitpix));    // bitpix
    putf(76, 1.0f);                                   // pixdim[0]
    putf(80, 1.0f);                                   // pixdim[1..3]
    putf(84, 1.0f);
    putf(88, 1.0f);
    putf(108, 352.0f);  // vox_offset
    putf(112, slope);   // scl_slope
    putf(116, inter);   // scl_inter
    std::memcpy(h.data() + 344, magic, 4);
    return h;
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an mriq::Error");
    return Errc::io_error;
}

}  // namespace

TEST_CASE("nifti roundtrip preserves data, dims, spacing and affine") {
    const std::string dir = testutil::tmp_dir("nifti_roundtrip");
    Rng rng(1);
    for (int iter = 0; iter < 8; ++iter) {
        const int nx = 2 + static_cast<int>(rng.below(9));
        const int ny = 2 + static_cast<int>(rng.below(9));
        const int nz = 1 + static_cast<int>(rng.below(6));
        Volume v = make_volume(nx, ny, nz);
        for (auto& x : v.data) x = static_cast<float>(rng.uniform(-50.0, 150.0));
        // spacings quantized to float32 so the float header round-trips them
        for (auto& s : v.spacing) s = static_cast<float>(rng.uniform(0.5, 3.0));
        for (int i = 0; i < 3; ++i) v.affine[i][i] = v.spacing[i];
        v.affine[0][3] = static_cast<float>(rng.uniform(-10.0, 10.0));

        const std::string path = dir + "/v" + std::to_string(iter) + (iter % 2 ? ".nii.gz" : ".nii");
        write_nifti(v, path);
        const Volume r = read_nifti(path);

        REQUIRE(r.nx == v.nx);
        REQUIRE(r.ny == v.ny);
        REQUIRE(r.nz == v.nz);
        for (int i = 0; i < 3; ++i) CHECK(r.spacing[i] == v.spacing[i]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 4; ++j) CHECK(r.affine[i][j] == doctest::Approx(v.affine[i][j]).epsilon(1e-6));
        REQUIRE(r.data.size() == v.data.size());
        for (std::size_t i = 0; i < v.data.size(); ++i) REQUIRE(r.data[i] == v.data[i]);
    }
}

TEST_CASE("uncompressed file size is 352 + 4*n bytes") {
    const std::string dir = testutil::tmp_dir("nifti_size");
    Volume v = make_volume(4, 4, 4);
    for (auto& x : v.data) x = 7.0f;
    const std::string path = dir + "/c.nii";
    write_nifti(v, path);
    CHECK(std::filesystem::file_size(path) == 352 + 4 * 64);
}

TEST_CASE("gzip output is sniffed by magic bytes, not extension") {
    const std::string dir = testutil::tmp_dir("nifti_gz");
    auto [v, truth] = generate_phantom(PhantomSpec{.nx = 12, .ny = 12, .nz = 8, .semi_axes = {4, 4, 3}, .seed = 3});
    (void)truth;
    const std::string gz_path = dir + "/vol.nii.gz";
    write_nifti(v, gz_path);
    // hide the compressed file behind a plain extension
    const std::string disguised = dir + "/vol_plain.nii";
    std::filesystem::copy_file(gz_path, disguised);
    const Volume r = read_nifti(disguised);
    CHECK(r.data == v.data);
}

TEST_CASE("detached-header magic is rejected") {
    const std::string dir = testutil::tmp_dir("nifti_magic");
    auto bytes = build_header(16, 32, 2, 2, 1, 1.0f, 0.0f, "ni1");
    bytes.resize(352 + 16, 0);
    write_bytes(dir + "/detached.nii", bytes);
    CHECK(code_of([&] { (void)read_nifti(dir + "/detached.nii"); }) == Errc::bad_magic);

    auto garbage = build_header(16, 32, 2, 2, 1, 1.0f, 0.0f, "xyz");
    garbage.resize(352 + 16, 0);
    write_bytes(dir + "/garbage.nii", garbage);
    CHECK(code_of([&] { (void)read_nifti(dir + "/garbage.nii"); }) == Errc::bad_magic);
}

TEST_CASE("unsupported datatype and truncated payload raise typed errors") {
    const std::string dir = testutil::tmp_dir("nifti_errors");
    auto complex_hdr = build_header(32, 64, 2, 2, 1, 1.0f, 0.0f, "n+1");  // DT_COMPLEX64
    complex_hdr.resize(352 + 4 * 8, 0);
    write_bytes(dir + "/complex.nii", complex_hdr);
    CHECK(code_of([&] { (void)read_nifti(dir + "/complex.nii"); }) == Errc::unsupported_datatype);

    auto short_file = build_header(16, 32, 4, 4, 4, 1.0f, 0.0f, "n+1");
    short_file.resize(352 + 4 * 10, 0);  // header promises 64 voxels
    write_bytes(dir + "/short.nii", short_file);
    CHECK(code_of([&] { (void)read_nifti(dir + "/short.nii"); }) == Errc::truncated_data);

    CHECK(code_of([&] { (void)read_nifti(dir + "/does_not_exist.nii"); }) == Errc::io_error);
}

TEST_CASE("int16 payload is promoted through scl_slope and scl_inter") {
    const std::string dir = testutil::tmp_dir("nifti_scaling");
    const int nx = 3, ny = 2, nz = 2;
    auto bytes = build_header(4, 16, nx, ny, nz, 2.0f, 1.0f, "n+1");
    const std::int16_t raw[12] = {-300, -2, -1, 0, 1, 2, 77, 1000, -32768, 32767, 12, -12};
    for (int i = 0; i < 12; ++i) {
        bytes.push_back(static_cast<std::uint8_t>(raw[i] & 0xff));
        bytes.push_back(static_cast<std::uint8_t>((raw[i] >> 8) & 0xff));
    }
    write_bytes(dir + "/scaled.nii", bytes);
    const Volume v = read_nifti(dir + "/scaled.nii");
    REQUIRE(v.data.size() == 12);
    for (int i = 0; i < 12; ++i) CHECK(v.data[i] == static_cast<float>(2.0 * raw[i] + 1.0));
    CHECK(v.metadata.at("source_datatype") == "int16");
}

TEST_CASE("non-finite float payload is rejected") {
    const std::string dir = testutil::tmp_dir("nifti_nan");
    auto bytes = build_header(16, 32, 2, 2, 1, 1.0f, 0.0f, "n+1");
    const float vals[4] = {1.0f, std::numeric_limits<float>::quiet_NaN(), 3.0f, 4.0f};
    for (float f : vals) {
        std::uint32_t u;
        std::memcpy(&u, &f, 4);
        for (int b = 0; b < 4; ++b) bytes.push_back((u >> (8 * b)) & 0xff);
    }
    write_bytes(dir + "/nan.nii", bytes);
    CHECK(code_of([&] { (void)read_nifti(dir + "/nan.nii"); }) == Errc::non_finite_data);
}

TEST_CASE("writing to an unwritable path raises io_error") {
    Volume v = make_volume(2, 2, 2);
    CHECK(code_of([&] { write_nifti(v, "/nonexistent_dir_873/x.nii"); }) == Errc::io_error);
}

TEST_CASE("uint8, int32 and float64 payloads decode") {
    const std::string dir = testutil::tmp_dir("nifti_dtypes");
    {
        auto bytes = build_header(2, 8, 2, 2, 1, 0.0f, 0.0f, "n+1");  // slope 0 => unscaled
        for (std::uint8_t u : {0, 1, 128, 255}) bytes.push_back(u);
        write_bytes(dir + "/u8.nii", bytes);
        const Volume v = read_nifti(dir + "/u8.nii");
        CHECK(v.data[3] == 255.0f);
    }
    {
        auto bytes = build_header(8, 32, 2, 2, 1, 1.0f, 0.0f, "n+1");
        for (std::int32_t x : {-100000, 0, 7, 100000}) {
            for (int b = 0; b < 4; ++b) bytes.push_back((static_cast<std::uint32_t>(x) >> (8 * b)) & 0xff);
        }
        write_bytes(dir + "/i32.nii", bytes);
        const Volume v = read_nifti(dir + "/i32.nii");
        CHECK(v.data[0] == -100000.0f);
        CHECK(v.data[3] == 100000.0f);
    }
    {
        auto bytes = build_header(64, 64, 2, 2, 1, 1.0f, 0.0f, "n+1");
        for (double d : {-2.5, 0.0, 1.25, 1e6}) {
            std::uint64_t u;
            std::memcpy(&u, &d, 8);
            for (int b = 0; b < 8; ++b) bytes.push_back((u >> (8 * b)) & 0xff);
        }
        write_bytes(dir + "/f64.nii", bytes);
        const Volume v = read_nifti(dir + "/f64.nii");
        CHECK(v.data[0] == -2.5f);
        CHECK(v.data[2] == 1.25f);
    }
}

TEST_CASE("4D payloads with more than one frame are rejected") {
    const std::string dir = testutil::tmp_dir("nifti_4d");
    auto bytes = build_header(16, 32, 2, 2, 1, 1.0f, 0.0f, "n+1");
    bytes[40] = 4;  // dim[0] = 4
    bytes[48] = 2;  // dim[4] = 2
    bytes.resize(352 + 4 * 8, 0);
    write_bytes(dir + "/t.nii", bytes);
    CHECK(code_of([&] { (void)read_nifti(dir + "/t.nii"); }) == Errc::unsupported_dimensionality);
}
