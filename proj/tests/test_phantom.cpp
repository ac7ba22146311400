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

#include "mriq/phantom.hpp"
#include "test_util.hpp"

using namespace mriq;

TEST_CASE("zero noise leaves the background exactly zero") {
    PhantomSpec spec;
    spec.nx = spec.ny = spec.nz = 32;
    spec.semi_axes = {10, 12, 9};
    spec.background_noise_sigma = 0.0;
    auto [v, truth] = generate_phantom(spec);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (truth.foreground.on[i])
            CHECK(v.data[i] == static_cast<float>(spec.tissue_intensity));
        else
            CHECK(v.data[i] == 0.0f);
    }
    CHECK(truth.sigma_background == 0.0);
    CHECK(truth.mu_foreground == spec.tissue_intensity);
}

TEST_CASE("equal specs give bit-identical volumes") {
    PhantomSpec spec;
    spec.nx = 24;
    spec.ny = 20;
    spec.nz = 16;
    spec.semi_axes = {8, 7, 6};
    spec.seed = 981;
    auto [v1, t1] = generate_phantom(spec);
    auto [v2, t2] = generate_phantom(spec);
    CHECK(v1.data == v2.data);
    CHECK(t1.foreground.on == t2.foreground.on);

    spec.seed = 982;
    auto [v3, t3] = generate_phantom(spec);
    (void)t3;
    CHECK(v1.data != v3.data);
}

TEST_CASE("foreground voxel count matches a brute-force membership test") {
    PhantomSpec spec;
    spec.nx = spec.ny = spec.nz = 64;
    spec.semi_axes = {20, 24, 18};
    spec.seed = 5;
    auto [v, truth] = generate_phantom(spec);
    (void)v;

    // independent recount: direct quadratic-form evaluation per voxel
    std::size_t count = 0;
    const double cx = (spec.nx - 1) / 2.0, cy = (spec.ny - 1) / 2.0, cz = (spec.nz - 1) / 2.0;
    for (int z = 0; z < spec.nz; ++z)
        for (int y = 0; y < spec.ny; ++y)
            for (int x = 0; x < spec.nx; ++x) {
                const double q = (x - cx) * (x - cx) / (20.0 * 20.0) + (y - cy) * (y - cy) / (24.0 * 24.0) +
                                 (z - cz) * (z - cz) / (18.0 * 18.0);
                if (q <= 1.0) ++count;
            }
    CHECK(truth.foreground.foreground_count == count);
    CHECK(truth.n_foreground == count);
    CHECK(truth.n_background == v.size() - count);
}

TEST_CASE("realized background statistics track the requested sigma") {
    PhantomSpec spec;
    spec.nx = spec.ny = spec.nz = 64;
    spec.semi_axes = {20, 24, 18};
    spec.background_noise_sigma = 5.0;
    spec.seed = 11;
    auto [v, truth] = generate_phantom(spec);
    (void)v;
    CHECK(std::abs(truth.sigma_background - 5.0) < 0.1);
    CHECK(std::abs(truth.mu_background) < 0.1);
}

TEST_CASE("inner ellipsoid carries its own intensity") {
    PhantomSpec spec;
    spec.nx = spec.ny = spec.nz = 48;
    spec.semi_axes = {16, 16, 14};
    spec.inner_semi_axes = {{6, 6, 5}};
    spec.inner_intensity = 150.0;
    spec.background_noise_sigma = 0.0;
    auto [v, truth] = generate_phantom(spec);
    REQUIRE(truth.inner.foreground_count > 0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (truth.inner.on[i]) {
            CHECK(v.data[i] == 150.0f);
            CHECK(truth.foreground.on[i] == 1);  // inner is part of the foreground
        }
    }
}

TEST_CASE("invalid specs are rejected") {
    PhantomSpec spec;
    spec.nx = spec.ny = spec.nz = 16;
    spec.semi_axes = {20, 4, 4};  // does not fit
    CHECK_THROWS_AS((void)generate_phantom(spec), Error);

    spec.semi_axes = {4, 4, 4};
    spec.tissue_intensity = -1.0;
    CHECK_THROWS_AS((void)generate_phantom(spec), Error);

    spec.tissue_intensity = 100.0;
    spec.background_noise_sigma = -0.1;
    CHECK_THROWS_AS((void)generate_phantom(spec), Error);

    spec.background_noise_sigma = 1.0;
    spec.inner_semi_axes = {{5, 5, 5}};  // larger than outer on no axis? 5 > 4
    spec.inner_intensity = 120.0;
    CHECK_THROWS_AS((void)generate_phantom(spec), Error);
}
