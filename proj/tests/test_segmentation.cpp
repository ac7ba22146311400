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

#include <queue>

#include "mriq/phantom.hpp"
#include "mriq/segmentation.hpp"
#include "test_util.hpp"

using namespace mriq;

namespace {

double dice(const Mask& a, const Mask& b) {
    REQUIRE(a.size() == b.size());
    std::size_t inter = 0;
    for (std::size_t i = 0; i < a.size(); ++i) inter += (a.on[i] && b.on[i]) ? 1 : 0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(a.foreground_count + b.foreground_count);
}

// independent 26-connected component labelling (BFS) over a binary volume
std::vector<std::size_t> brute_force_components(const Volume& v, float threshold, std::vector<int>& labels) {
    labels.assign(v.size(), 0);
    std::vector<std::size_t> sizes{0};  // index = label
    int next = 0;
    for (int z0 = 0; z0 < v.nz; ++z0)
        for (int y0 = 0; y0 < v.ny; ++y0)
            for (int x0 = 0; x0 < v.nx; ++x0) {
                const std::size_t start = v.index(x0, y0, z0);
                if (v.data[start] <= threshold || labels[start]) continue;
                ++next;
                sizes.push_back(0);
                std::queue<std::array<int, 3>> q;
                q.push({x0, y0, z0});
                labels[start] = next;
                while (!q.empty()) {
                    auto [x, y, z] = q.front();
                    q.pop();
                    ++sizes[next];
                    for (int dz = -1; dz <= 1; ++dz)
                        for (int dy = -1; dy <= 1; ++dy)
                            for (int dx = -1; dx <= 1; ++dx) {
                                const int X = x + dx, Y = y + dy, Z = z + dz;
                                if (X < 0 || Y < 0 || Z < 0 || X >= v.nx || Y >= v.ny || Z >= v.nz) continue;
                                const std::size_t j = v.index(X, Y, Z);
                                if (v.data[j] > threshold && !labels[j]) {
                                    labels[j] = next;
                                    q.push({X, Y, Z});
                                }
                            }
                }
            }
    return sizes;
}

}  // namespace

TEST_CASE("phantom mask overlaps the ground truth with dice >= 0.99") {
    PhantomSpec spec;
    spec.nx = spec.ny = spec.nz = 64;
    spec.semi_axes = {20, 24, 18};
    spec.background_noise_sigma = 1.0;
    spec.seed = 21;
    auto [v, truth] = generate_phantom(spec);
    const Mask fg = foreground_mask(v);
    CHECK(dice(fg, truth.foreground) >= 0.99);
}

TEST_CASE("constant volumes are degenerate") {
    Volume v = make_volume(8, 8, 8);
    for (auto& x : v.data) x = 3.5f;
    try {
        (void)foreground_mask(v);
        FAIL("expected degenerate_volume");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate_volume);
    }
}

TEST_CASE("only the largest of two disjoint blobs survives") {
    Volume v = make_volume(40, 24, 24);
    // blob A: 10x10x10 = 1000 voxels, blob B: 5x5x8 = 200 voxels
    for (int z = 4; z < 14; ++z)
        for (int y = 4; y < 14; ++y)
            for (int x = 2; x < 12; ++x) v.at(x, y, z) = 100.0f;
    for (int z = 4; z < 12; ++z)
        for (int y = 4; y < 9; ++y)
            for (int x = 26; x < 31; ++x) v.at(x, y, z) = 100.0f;

    // oracle: brute-force components at mid threshold
    std::vector<int> labels;
    const auto sizes = brute_force_components(v, 50.0f, labels);
    REQUIRE(sizes.size() == 3);  // two blobs
    const int big_label = sizes[1] >= sizes[2] ? 1 : 2;
    REQUIRE(sizes[big_label] == 1000);

    const Mask fg = foreground_mask(v);
    CHECK(fg.foreground_count == 1000);
    for (std::size_t i = 0; i < v.size(); ++i)
        CHECK(fg.on[i] == (labels[i] == big_label ? 1 : 0));
}

TEST_CASE("mask is invariant under positive affine intensity maps") {
    Rng rng(33);
    for (int iter = 0; iter < 4; ++iter) {
        Volume v = testutil::random_dyadic_volume(rng, 16, 14, 12);
        // plant a bright blob so Otsu has two populations
        for (int z = 3; z < 9; ++z)
            for (int y = 3; y < 10; ++y)
                for (int x = 3; x < 12; ++x) v.at(x, y, z) = static_cast<float>(600.0 + (x + y + z) / 8.0);

        const Mask base = foreground_mask(v);
        for (const double a : {0.5, 3.0, 100.0}) {
            for (const double b : {0.0, 1.5, 10.0}) {
                Volume w = v;
                for (auto& x : w.data) x = static_cast<float>(a) * x + static_cast<float>(b);
                const Mask m = foreground_mask(w);
                REQUIRE(m.on == base.on);
            }
        }
    }
}

TEST_CASE("foreground, guard band and background partition the volume") {
    PhantomSpec spec;
    spec.nx = spec.ny = spec.nz = 32;
    spec.semi_axes = {9, 10, 8};
    spec.background_noise_sigma = 1.0;
    spec.seed = 8;
    auto [v, truth] = generate_phantom(spec);
    (void)truth;
    const Mask fg = foreground_mask(v);
    const Mask bg = background_mask(v, fg);
    const Mask guard = dilate(fg);

    std::size_t both = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        CHECK((fg.on[i] & bg.on[i]) == 0);  // disjoint
        // every voxel is fg, bg, or in the guard shell
        const bool in_shell = guard.on[i] && !fg.on[i];
        CHECK((fg.on[i] || bg.on[i] || in_shell));
        both += (fg.on[i] && in_shell) ? 1 : 0;
    }
    CHECK(both == 0);
    CHECK(fg.foreground_count + bg.foreground_count + (guard.foreground_count - fg.foreground_count) == v.size());
}

TEST_CASE("background mean stays near zero on a zero-mean noise phantom") {
    PhantomSpec spec;
    spec.nx = spec.ny = spec.nz = 48;
    spec.semi_axes = {14, 15, 13};
    spec.background_noise_sigma = 4.0;
    spec.seed = 77;
    auto [v, truth] = generate_phantom(spec);
    (void)truth;
    const Mask fg = foreground_mask(v);
    const Mask bg = background_mask(v, fg);
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (bg.on[i]) sum += v.data[i];
    const double mean = sum / static_cast<double>(bg.foreground_count);
    const double bound = 3.0 * 4.0 / std::sqrt(static_cast<double>(bg.foreground_count));
    CHECK(std::abs(mean) <= bound);
}

TEST_CASE("a near-total foreground leaves an empty background") {
    Volume v = make_volume(6, 6, 6);
    for (auto& x : v.data) x = 1.0f;
    v.at(0, 0, 0) = 0.0f;
    Mask fg = make_mask(6, 6, 6);
    for (auto& b : fg.on) b = 1;
    fg.set(0, 0, 0, false);
    fg.recount();
    const Mask bg = background_mask(v, fg);
    CHECK(bg.foreground_count == 0);
}

TEST_CASE("dilate and erode behave on a point") {
    Mask m = make_mask(7, 7, 7);
    m.set(3, 3, 3, true);
    m.recount();
    const Mask d = dilate(m);
    CHECK(d.foreground_count == 27);
    const Mask back = erode(d);
    CHECK(back.foreground_count == 1);
    CHECK(back.at(3, 3, 3));
}
