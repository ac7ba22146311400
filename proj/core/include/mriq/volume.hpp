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

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mriq/error.hpp"

namespace mriq {

/// A 3D scalar intensity grid with voxel spacing, a voxel-to-world affine
/// and free-form acquisition metadata. Storage is x-fastest (index =
/// x + nx*(y + ny*z)), matching the on-disk NIfTI layout. Treat volumes as
/// immutable once constructed; sharing across threads is then safe.
struct Volume {
    int nx = 0, ny = 0, nz = 0;
    std::array<double, 3> spacing{1.0, 1.0, 1.0};
    std::array<std::array<double, 4>, 4> affine{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
    std::vector<float> data;
    std::map<std::string, std::string> metadata;

    std::size_t size() const { return data.size(); }

    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) + static_cast<std::size_t>(nx) * (static_cast<std::size_t>(y) + static_cast<std::size_t>(ny) * static_cast<std::size_t>(z));
    }

    float at(int x, int y, int z) const { return data[index(x, y, z)]; }
    float& at(int x, int y, int z) { return data[index(x, y, z)]; }

    bool same_dims(const Volume& o) const { return nx == o.nx && ny == o.ny && nz == o.nz; }

    /// Throws invalid_params unless dims >= 1, spacing > 0 and the data
    /// length matches nx*ny*nz.
    void validate() const;
};

/// Creates a zero-filled volume with identity affine scaled by spacing.
Volume make_volume(int nx, int ny, int nz, std::array<double, 3> spacing = {1.0, 1.0, 1.0});

/// Boolean voxel mask tied to the dims of a parent volume.
struct Mask {
    int nx = 0, ny = 0, nz = 0;
    std::vector<std::uint8_t> on;  // 0 or 1 per voxel, same layout as Volume::data
    std::size_t foreground_count = 0;

    std::size_t size() const { return on.size(); }
    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) + static_cast<std::size_t>(nx) * (static_cast<std::size_t>(y) + static_cast<std::size_t>(ny) * static_cast<std::size_t>(z));
    }
    bool at(int x, int y, int z) const { return on[index(x, y, z)] != 0; }
    void set(int x, int y, int z, bool v) { on[index(x, y, z)] = v ? 1 : 0; }
    bool same_dims(const Volume& v) const { return nx == v.nx && ny == v.ny && nz == v.nz; }

    void recount() {
        foreground_count = 0;
        for (auto b : on) foreground_count += b;
    }
};

Mask make_mask(int nx, int ny, int nz);

}  // namespace mriq
