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

#include "mriq/segmentation.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

namespace mriq {

namespace {

constexpr int kBins = 256;

// Otsu threshold as a bin index; voxels in bins strictly above it are
// foreground. Binning is done on the min-max normalized intensity in
// double precision, which makes the split covariant under positive affine
// intensity maps.
int otsu_bin(const std::vector<int>& bin_of, std::size_t n) {
    std::vector<std::size_t> hist(kBins, 0);
    for (std::size_t i = 0; i < n; ++i) ++hist[bin_of[i]];

    double total_mean = 0.0;
    for (int b = 0; b < kBins; ++b) total_mean += static_cast<double>(b) * hist[b];
    total_mean /= static_cast<double>(n);

    double best = -1.0;
    int best_bin = 0;
    double w0 = 0.0, sum0 = 0.0;
    for (int t = 0; t < kBins - 1; ++t) {
        w0 += static_cast<double>(hist[t]);
        sum0 += static_cast<double>(t) * hist[t];
        if (w0 == 0.0) continue;
        const double w1 = static_cast<double>(n) - w0;
        if (w1 == 0.0) break;
        const double mu0 = sum0 / w0;
        const double mu1 = (total_mean * static_cast<double>(n) - sum0) / w1;
        const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (between > best) {  // strict: ties keep the lower threshold
            best = between;
            best_bin = t;
        }
    }
    return best_bin;
}

// iterative flood fill (26-neighborhood); recursion would overflow on
// large blobs
void label_component(const Mask& binary, std::vector<std::int32_t>& labels, std::int32_t label, std::size_t start,
                     std::vector<std::size_t>& stack, std::size_t& count) {
    const int nx = binary.nx, ny = binary.ny, nz = binary.nz;
    stack.clear();
    stack.push_back(start);
    labels[start] = label;
    count = 0;
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        ++count;
        const int x = static_cast<int>(i % nx);
        const int y = static_cast<int>((i / nx) % ny);
        const int z = static_cast<int>(i / (static_cast<std::size_t>(nx) * ny));
        for (int dz = -1; dz <= 1; ++dz) {
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0 && dz == 0) continue;
                    const int X = x + dx, Y = y + dy, Z = z + dz;
                    if (X < 0 || Y < 0 || Z < 0 || X >= nx || Y >= ny || Z >= nz) continue;
                    const std::size_t j = binary.index(X, Y, Z);
                    if (binary.on[j] && labels[j] == 0) {
                        labels[j] = label;
                        stack.push_back(j);
                    }
                }
            }
        }
    }
}

Mask morph(const Mask& m, bool dilation) {
    Mask out = make_mask(m.nx, m.ny, m.nz);
    for (int z = 0; z < m.nz; ++z) {
        for (int y = 0; y < m.ny; ++y) {
            for (int x = 0; x < m.nx; ++x) {
                bool hit = dilation ? false : true;
                for (int dz = -1; dz <= 1 && (dilation ? !hit : hit); ++dz) {
                    for (int dy = -1; dy <= 1 && (dilation ? !hit : hit); ++dy) {
                        for (int dx = -1; dx <= 1 && (dilation ? !hit : hit); ++dx) {
                            const int X = x + dx, Y = y + dy, Z = z + dz;
                            bool bit = false;  // zero padding outside
                            if (X >= 0 && Y >= 0 && Z >= 0 && X < m.nx && Y < m.ny && Z < m.nz)
                                bit = m.on[m.index(X, Y, Z)] != 0;
                            if (dilation)
                                hit = hit || bit;
                            else
                                hit = hit && bit;
                        }
                    }
                }
                out.on[out.index(x, y, z)] = hit ? 1 : 0;
            }
        }
    }
    out.recount();
    return out;
}

}  // namespace

Mask dilate(const Mask& m) { return morph(m, true); }
Mask erode(const Mask& m) { return morph(m, false); }

Mask foreground_mask(const Volume& v) {
    v.validate();
    const std::size_t n = v.size();
    float lo = v.data[0], hi = v.data[0];
    for (float x : v.data) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (!(hi > lo)) throw Error(Errc::degenerate_volume, "constant intensity: Otsu threshold is undefined");

    std::vector<int> bin_of(n);
    const double span = static_cast<double>(hi) - static_cast<double>(lo);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (static_cast<double>(v.data[i]) - static_cast<double>(lo)) / span;
        int b = static_cast<int>(t * kBins);
        bin_of[i] = std::clamp(b, 0, kBins - 1);
    }
    const int threshold = otsu_bin(bin_of, n);

    Mask binary = make_mask(v.nx, v.ny, v.nz);
    for (std::size_t i = 0; i < n; ++i) binary.on[i] = bin_of[i] > threshold ? 1 : 0;
    binary.recount();
    if (binary.foreground_count == 0) throw Error(Errc::degenerate_volume, "Otsu produced an empty foreground");

    // keep only the largest 26-connected component (first one wins a tie)
    std::vector<std::int32_t> labels(n, 0);
    std::vector<std::size_t> stack;
    std::int32_t next_label = 0, best_label = 0;
    std::size_t best_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (binary.on[i] && labels[i] == 0) {
            std::size_t count = 0;
            label_component(binary, labels, ++next_label, i, stack, count);
            if (count > best_count) {
                best_count = count;
                best_label = next_label;
            }
        }
    }
    Mask largest = make_mask(v.nx, v.ny, v.nz);
    for (std::size_t i = 0; i < n; ++i) largest.on[i] = labels[i] == best_label ? 1 : 0;
    largest.recount();

    Mask closed = erode(dilate(largest));
    if (closed.foreground_count == 0 || closed.foreground_count == n)
        throw Error(Errc::degenerate_volume, "segmentation did not split the volume");
    return closed;
}

Mask background_mask(const Volume& v, const Mask& fg) {
    if (!fg.same_dims(v)) throw Error(Errc::dim_mismatch, "mask dims do not match volume");
    const Mask guard = dilate(fg);
    Mask bg = make_mask(v.nx, v.ny, v.nz);
    for (std::size_t i = 0; i < bg.size(); ++i) bg.on[i] = guard.on[i] ? 0 : 1;
    bg.recount();
    return bg;
}

}  // namespace mriq
