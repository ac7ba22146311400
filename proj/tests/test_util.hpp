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

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "mriq/rng.hpp"
#include "mriq/volume.hpp"

namespace testutil {

inline double rel_err(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

/// Fresh per-test scratch directory under the working directory.
inline std::string tmp_dir(const std::string& name) {
    const std::filesystem::path dir = std::filesystem::path("mriq_test_tmp") / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

/// Uniform random volume with strictly positive intensities.
inline mriq::Volume random_volume(mriq::Rng& rng, int nx, int ny, int nz, double lo = 0.5, double hi = 2.0) {
    mriq::Volume v = mriq::make_volume(nx, ny, nz);
    for (auto& x : v.data) x = static_cast<float>(rng.uniform(lo, hi));
    return v;
}

/// Random volume whose values are dyadic rationals k/256 with k in
/// [1, 65536]; scaling such values by 0.5, 3 or 100 is exact in float32,
/// which makes intensity-scaling tests roundoff-free.
inline mriq::Volume random_dyadic_volume(mriq::Rng& rng, int nx, int ny, int nz) {
    mriq::Volume v = mriq::make_volume(nx, ny, nz);
    for (auto& x : v.data)
        x = static_cast<float>(static_cast<double>(1 + rng.below(65536)) / 256.0);
    return v;
}

/// Disjoint random fg/bg masks, both guaranteed nonempty.
inline std::pair<mriq::Mask, mriq::Mask> random_masks(mriq::Rng& rng, int nx, int ny, int nz) {
    mriq::Mask fg = mriq::make_mask(nx, ny, nz);
    mriq::Mask bg = mriq::make_mask(nx, ny, nz);
    for (std::size_t i = 0; i < fg.size(); ++i) {
        const double u = rng.uniform();
        if (u < 0.4)
            fg.on[i] = 1;
        else if (u < 0.8)
            bg.on[i] = 1;
    }
    fg.on[0] = 1;
    bg.on[0] = 0;
    fg.on[fg.size() - 1] = 0;
    bg.on[bg.size() - 1] = 1;
    fg.recount();
    bg.recount();
    return {std::move(fg), std::move(bg)};
}

}  // namespace testutil
