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

#include "mriq/kspace.hpp"

#include <fftw3.h>

#include <mutex>

namespace mriq {

namespace {

// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

void dft2(std::vector<std::complex<double>>& data, int nx, int ny, int sign) {
    fftw_complex* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        // FFTW is row-major with the last dimension fastest; our x is fastest.
        plan = fftw_plan_dft_2d(ny, nx, p, p, sign, FFTW_ESTIMATE);
    }
    if (!plan) throw Error(Errc::invalid_params, "FFTW refused the transform size");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan);
    }
}

// circular shift by (sx, sy)
std::vector<std::complex<double>> shift2(const std::vector<std::complex<double>>& in, int nx, int ny, int sx, int sy) {
    std::vector<std::complex<double>> out(in.size());
    for (int y = 0; y < ny; ++y) {
        const int Y = (y + sy) % ny;
        for (int x = 0; x < nx; ++x) {
            const int X = (x + sx) % nx;
            out[static_cast<std::size_t>(X) + static_cast<std::size_t>(nx) * Y] =
                in[static_cast<std::size_t>(x) + static_cast<std::size_t>(nx) * y];
        }
    }
    return out;
}

void check_dims(int nx, int ny) {
    if (nx < 2 || ny < 2) throw Error(Errc::invalid_params, "k-space transforms need at least a 2x2 grid");
}

}  // namespace

Kspace2D to_kspace(const Image2D& img) {
    check_dims(img.nx, img.ny);
    if (img.v.size() != static_cast<std::size_t>(img.nx) * img.ny)
        throw Error(Errc::invalid_params, "image size does not match dims");
    std::vector<std::complex<double>> buf(img.v.begin(), img.v.end());
    dft2(buf, img.nx, img.ny, FFTW_FORWARD);
    Kspace2D k;
    k.nx = img.nx;
    k.ny = img.ny;
    k.v = shift2(buf, img.nx, img.ny, img.nx / 2, img.ny / 2);  // fftshift
    return k;
}

std::vector<std::complex<double>> from_kspace_complex(const Kspace2D& k) {
    check_dims(k.nx, k.ny);
    if (k.v.size() != static_cast<std::size_t>(k.nx) * k.ny)
        throw Error(Errc::invalid_params, "k-space size does not match dims");
    // ifftshift: inverse of the forward shift
    std::vector<std::complex<double>> buf = shift2(k.v, k.nx, k.ny, k.nx - k.nx / 2, k.ny - k.ny / 2);
    dft2(buf, k.nx, k.ny, FFTW_BACKWARD);
    const double scale = 1.0 / (static_cast<double>(k.nx) * k.ny);
    for (auto& z : buf) z *= scale;
    return buf;
}

Image2D from_kspace(const Kspace2D& k) {
    const auto buf = from_kspace_complex(k);
    Image2D img;
    img.nx = k.nx;
    img.ny = k.ny;
    img.v.resize(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) img.v[i] = buf[i].real();
    return img;
}

}  // namespace mriq
