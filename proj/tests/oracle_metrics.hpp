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

// Reference recomputation of the 15 quality indicators, written as plain
// nested loops straight from the metric definitions in the README. This is
// deliberately independent of core/src/metrics.cpp: it shares only the
// Volume/Mask containers, never the metric code, so the two paths can
// cross-check each other.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "mriq/volume.hpp"

namespace oracle {

// defined metrics by name; an absent key means "undefined"
using MetricMap = std::map<std::string, double>;

inline double list_mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double list_std(const std::vector<double>& xs) {
    const double m = list_mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size()));
}

inline double list_median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

inline MetricMap reference_metrics(const mriq::Volume& v, const mriq::Mask& fg, const mriq::Mask& bg) {
    MetricMap out;

    std::vector<double> f, b;
    for (int z = 0; z < v.nz; ++z)
        for (int y = 0; y < v.ny; ++y)
            for (int x = 0; x < v.nx; ++x) {
                if (fg.at(x, y, z)) f.push_back(v.at(x, y, z));
                if (bg.at(x, y, z)) b.push_back(v.at(x, y, z));
            }

    const double mu_f = list_mean(f), sigma_f = list_std(f);
    const double mu_b = list_mean(b), sigma_b = list_std(b);
    const double max_f = *std::max_element(f.begin(), f.end());
    const double min_f = *std::min_element(f.begin(), f.end());

    out["mean"] = mu_f;
    out["rng"] = max_f - min_f;
    out["var"] = sigma_f * sigma_f;
    if (mu_f > 0.0) out["cv"] = sigma_f / mu_f;

    // cpp: high-pass (center 8, in-plane neighbors -1) over foreground
    // voxels whose 3x3 window fits inside the slice
    {
        std::vector<double> responses;
        for (int z = 0; z < v.nz; ++z)
            for (int y = 1; y < v.ny - 1; ++y)
                for (int x = 1; x < v.nx - 1; ++x) {
                    if (!fg.at(x, y, z)) continue;
                    double r = 8.0 * v.at(x, y, z);
                    for (int dy = -1; dy <= 1; ++dy)
                        for (int dx = -1; dx <= 1; ++dx)
                            if (dx != 0 || dy != 0) r -= v.at(x + dx, y + dy, z);
                    responses.push_back(std::abs(r));
                }
        if (!responses.empty()) out["cpp"] = list_mean(responses);
    }

    // psnr: 10*log10(max_f^2 / mse(I, median3(I))) over foreground; the
    // median filter is in-plane 3x3 with the window clipped at borders
    {
        double sq = 0.0;
        std::size_t n = 0;
        for (int z = 0; z < v.nz; ++z)
            for (int y = 0; y < v.ny; ++y)
                for (int x = 0; x < v.nx; ++x) {
                    if (!fg.at(x, y, z)) continue;
                    std::vector<double> window;
                    for (int dy = -1; dy <= 1; ++dy)
                        for (int dx = -1; dx <= 1; ++dx) {
                            const int X = x + dx, Y = y + dy;
                            if (X >= 0 && X < v.nx && Y >= 0 && Y < v.ny) window.push_back(v.at(X, Y, z));
                        }
                    const double d = v.at(x, y, z) - list_median(window);
                    sq += d * d;
                    ++n;
                }
        const double mse = sq / static_cast<double>(n);
        if (mse > 0.0 && max_f != 0.0) out["psnr"] = 10.0 * std::log10(max_f * max_f / mse);
    }

    // foreground patch: 5x5x5 box at the rounded centroid, snapped to the
    // nearest foreground voxel (z,y,x scan, first strict minimum) when the
    // centroid voxel is background; box clipped to the volume
    std::vector<double> patch, corner;
    {
        double sx = 0.0, sy = 0.0, sz = 0.0;
        std::size_t n = 0;
        for (int z = 0; z < v.nz; ++z)
            for (int y = 0; y < v.ny; ++y)
                for (int x = 0; x < v.nx; ++x)
                    if (fg.at(x, y, z)) {
                        sx += x;
                        sy += y;
                        sz += z;
                        ++n;
                    }
        int cx = static_cast<int>(std::llround(sx / static_cast<double>(n)));
        int cy = static_cast<int>(std::llround(sy / static_cast<double>(n)));
        int cz = static_cast<int>(std::llround(sz / static_cast<double>(n)));
        cx = std::clamp(cx, 0, v.nx - 1);
        cy = std::clamp(cy, 0, v.ny - 1);
        cz = std::clamp(cz, 0, v.nz - 1);
        if (!fg.at(cx, cy, cz)) {
            long best = -1;
            int bx = 0, by = 0, bz = 0;
            for (int z = 0; z < v.nz; ++z)
                for (int y = 0; y < v.ny; ++y)
                    for (int x = 0; x < v.nx; ++x) {
                        if (!fg.at(x, y, z)) continue;
                        const long d2 = static_cast<long>(x - cx) * (x - cx) +
                                        static_cast<long>(y - cy) * (y - cy) +
                                        static_cast<long>(z - cz) * (z - cz);
                        if (best < 0 || d2 < best) {
                            best = d2;
                            bx = x;
                            by = y;
                            bz = z;
                        }
                    }
            cx = bx;
            cy = by;
            cz = bz;
        }
        for (int z = std::max(0, cz - 2); z <= std::min(v.nz - 1, cz + 2); ++z)
            for (int y = std::max(0, cy - 2); y <= std::min(v.ny - 1, cy + 2); ++y)
                for (int x = std::max(0, cx - 2); x <= std::min(v.nx - 1, cx + 2); ++x)
                    patch.push_back(v.at(x, y, z));
    }

    // background corner patch: among the 8 corner-anchored 5x5x5 boxes the
    // one holding the most background voxels, first winner on ties; corner
    // k has x side k&1, y side (k>>1)&1, z side (k>>2)&1
    {
        std::size_t best_count = 0;
        bool first = true;
        for (int k = 0; k < 8; ++k) {
            const int x0 = (k & 1) ? std::max(0, v.nx - 5) : 0;
            const int y0 = ((k >> 1) & 1) ? std::max(0, v.ny - 5) : 0;
            const int z0 = ((k >> 2) & 1) ? std::max(0, v.nz - 5) : 0;
            std::vector<double> vals;
            std::size_t count = 0;
            for (int z = z0; z <= std::min(v.nz - 1, z0 + 4); ++z)
                for (int y = y0; y <= std::min(v.ny - 1, y0 + 4); ++y)
                    for (int x = x0; x <= std::min(v.nx - 1, x0 + 4); ++x) {
                        vals.push_back(v.at(x, y, z));
                        if (bg.at(x, y, z)) ++count;
                    }
            if (first || count > best_count) {
                corner = vals;
                best_count = count;
                first = false;
            }
        }
    }

    const double mu_p = list_mean(patch), sigma_p = list_std(patch);
    const double mu_bp = list_mean(corner), sigma_bp = list_std(corner);

    if (sigma_b > 0.0) {
        out["snr1"] = mu_f / sigma_b;
        out["snr2"] = mu_p / sigma_b;
    }
    if (sigma_p > 0.0) out["snr3"] = mu_p / sigma_p;
    if (sigma_bp > 0.0) {
        out["snr4"] = mu_p / sigma_bp;
        out["cnr"] = std::abs(mu_p - mu_bp) / sigma_bp;
    }
    if (mu_p > 0.0) out["cvp"] = sigma_p / mu_p;
    if (mu_f != mu_b) out["cjv"] = (sigma_f + sigma_b) / std::abs(mu_f - mu_b);

    // efc on absolute intensities over the whole volume, normalized by the
    // flat-image entropy sqrt(N)*log(sqrt(N))
    {
        double energy = 0.0;
        for (float x : v.data) energy += static_cast<double>(x) * x;
        const double n = static_cast<double>(v.size());
        const double denom = std::sqrt(n) * std::log(std::sqrt(n));
        if (energy > 0.0 && denom > 0.0) {
            const double norm = std::sqrt(energy);
            double e = 0.0;
            for (float xf : v.data) {
                const double a = std::abs(static_cast<double>(xf)) / norm;
                if (a > 0.0) e -= a * std::log(a);
            }
            out["efc"] = e / denom;
        }
    }

    {
        std::vector<double> f2, b2;
        for (double x : f) f2.push_back(x * x);
        for (double x : b) b2.push_back(x * x);
        const double mb = list_median(b2);
        if (mb > 0.0) out["fber"] = list_median(f2) / mb;
    }

    return out;
}

}  // namespace oracle
