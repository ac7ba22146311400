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
#include <cstdint>
#include <optional>

#include "mriq/volume.hpp"

namespace mriq {

/// Synthetic test volume: one ellipsoid of constant tissue intensity at the
/// grid center, i.i.d. zero-mean Gaussian noise outside it, and optionally
/// a concentric inner ellipsoid of a second intensity (gives a known
/// contrast pair for CNR checks).
struct PhantomSpec {
    int nx = 64, ny = 64, nz = 64;
    std::array<double, 3> spacing{1.0, 1.0, 1.0};
    double tissue_intensity = 100.0;
    std::array<double, 3> semi_axes{20.0, 24.0, 18.0};  // voxels
    double background_noise_sigma = 5.0;
    std::uint64_t seed = 0;
    std::optional<std::array<double, 3>> inner_semi_axes;  // concentric, same center
    double inner_intensity = 0.0;

    void validate() const;  // throws invalid_params
};

/// Exact construction record for a generated phantom: the foreground mask
/// as built (not estimated), the realized foreground mean and background
/// standard deviation, and the inner-ellipsoid mask when present.
struct PhantomTruth {
    Mask foreground;
    Mask inner;  // empty mask when no inner ellipsoid
    double mu_foreground = 0.0;
    double sigma_background = 0.0;
    double mu_background = 0.0;
    std::size_t n_foreground = 0;
    std::size_t n_background = 0;
};

/// Deterministic under spec.seed: equal specs produce bit-identical volumes.
std::pair<Volume, PhantomTruth> generate_phantom(const PhantomSpec& spec);

}  // namespace mriq
