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

#include "mriq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mriq {

const std::array<const char*, kMetricCount> kMetricNames = {
    "mean", "rng", "var", "cv", "cpp", "psnr", "snr1", "snr2", "snr3", "snr4", "cnr", "cvp", "cjv", "efc", "fber"};

namespace {

struct BoxStats {
    double mu = 0.0;
    double sigma = 0.0;
    std::size_t n = 0;
};

struct Box {
    int x0, x1, y0, y1, z0, z1;  // inclusive
};

BoxStats box_stats(const Volume& v, const Box& b) {
    double sum = 0.0, sumsq = 0.0;
    std::size_t n = 0;
    for (int z = b.z0; z <= b.z1; ++z)
        for (int y = b.y0; y <= b.y1; ++y)
            for (int x = b.x0; x <= b.x1; ++x) {
                const double val = v.at(x, y, z);
                sum += val;
                sumsq += val * val;
                ++n;
            }
    BoxStats s;
    s.n = n;
    if (n) {
        s.mu = sum / static_cast<double>(n);
        s.sigma = std::sqrt(std::max(0.0, sumsq / static_cast<double>(n) - s.mu * s.mu));
    }
    return s;
}

Box clipped_box_around(const Volume& v, int cx, int cy, int cz) {
    return Box{std::max(0, cx - 2), std::min(v.nx - 1, cx + 2), std::max(0, cy - 2),
               std::min(v.ny - 1, cy + 2), std::max(0, cz - 2), std::min(v.nz - 1, cz + 2)};
}

// 5x5x5 patch at the foreground centroid; if the rounded centroid voxel is
// background, snap to the nearest foreground voxel (first-found on the
// z,y,x scan wins distance ties).
Box foreground_patch(const Volume& v, const Mask& fg) {
    double sx = 0.0, sy = 0.0, sz = 0.0;
    for (int z = 0; z < v.nz; ++z)
        for (int y = 0; y < v.ny; ++y)
            for (int x = 0; x < v.nx; ++x)
                if (fg.at(x, y, z)) {
                    sx += x;
                    sy += y;
                    sz += z;
                }
    const double n = static_cast<double>(fg.foreground_count);
    int cx = std::clamp<int>(static_cast<int>(std::llround(sx / n)), 0, v.nx - 1);
    int cy = std::clamp<int>(static_cast<int>(std::llround(sy / n)), 0, v.ny - 1);
    int cz = std::clamp<int>(static_cast<int>(std::llround(sz / n)), 0, v.nz - 1);
    if (!fg.at(cx, cy, cz)) {
        long best = std::numeric_limits<long>::max();
        int bx = cx, by = cy, bz = cz;
        for (int z = 0; z < v.nz; ++z)
            for (int y = 0; y < v.ny; ++y)
                for (int x = 0; x < v.nx; ++x)
                    if (fg.at(x, y, z)) {
                        const long dx = x - cx, dy = y - cy, dz = z - cz;
                        const long d2 = dx * dx + dy * dy + dz * dz;
                        if (d2 < best) {
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
    return clipped_box_around(v, cx, cy, cz);
}

// 5x5x5 box at the volume corner containing the most background voxels;
// corners enumerated x-minor (x side = bit 0, y = bit 1, z = bit 2) with
// the first maximum kept.
Box background_corner_patch(const Volume& v, const Mask& bg) {
    auto anchor = [](int n, bool high) { return high ? std::max(0, n - 5) : 0; };
    Box best{};
    std::size_t best_count = 0;
    bool first = true;
    for (int k = 0; k < 8; ++k) {
        const int x0 = anchor(v.nx, k & 1), y0 = anchor(v.ny, (k >> 1) & 1), z0 = anchor(v.nz, (k >> 2) & 1);
        Box b{x0, std::min(v.nx - 1, x0 + 4), y0, std::min(v.ny - 1, y0 + 4), z0, std::min(v.nz - 1, z0 + 4)};
        std::size_t count = 0;
        for (int z = b.z0; z <= b.z1; ++z)
            for (int y = b.y0; y <= b.y1; ++y)
                for (int x = b.x0; x <= b.x1; ++x)
                    if (bg.at(x, y, z)) ++count;
        if (first || count > best_count) {
            best = b;
            best_count = count;
            first = false;
        }
    }
    return best;
}

double median_of(std::vector<double>& xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    if (n % 2 == 1) return xs[n / 2];
    return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// in-plane 3x3 median, window clipped at slice borders
double median3_inplane(const Volume& v, int x, int y, int z) {
    std::vector<double> w;
    w.reserve(9);
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            const int X = x + dx, Y = y + dy;
            if (X >= 0 && Y >= 0 && X < v.nx && Y < v.ny) w.push_back(v.at(X, Y, z));
        }
    return median_of(w);
}

}  // namespace

FgBgStats fg_bg_stats(const Volume& v, const Mask& fg, const Mask& bg) {
    if (!fg.same_dims(v) || !bg.same_dims(v)) throw Error(Errc::dim_mismatch, "mask dims do not match volume");
    if (fg.foreground_count == 0) throw Error(Errc::empty_region, "foreground mask is empty");
    if (bg.foreground_count == 0) throw Error(Errc::empty_region, "background mask is empty");

    FgBgStats s;
    double sum_f = 0.0, sumsq_f = 0.0, sum_b = 0.0, sumsq_b = 0.0;
    double max_f = -std::numeric_limits<double>::infinity();
    double min_f = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double val = v.data[i];
        if (fg.on[i]) {
            sum_f += val;
            sumsq_f += val * val;
            max_f = std::max(max_f, val);
            min_f = std::min(min_f, val);
            ++s.n_f;
        }
        if (bg.on[i]) {
            sum_b += val;
            sumsq_b += val * val;
            ++s.n_b;
        }
    }
    s.mu_f = sum_f / static_cast<double>(s.n_f);
    s.sigma_f = std::sqrt(std::max(0.0, sumsq_f / static_cast<double>(s.n_f) - s.mu_f * s.mu_f));
    s.mu_b = sum_b / static_cast<double>(s.n_b);
    s.sigma_b = std::sqrt(std::max(0.0, sumsq_b / static_cast<double>(s.n_b) - s.mu_b * s.mu_b));
    s.max_f = max_f;
    s.min_f = min_f;
    return s;
}

double efc(const Volume& v) {
    v.validate();
    double energy = 0.0;
    for (float x : v.data) energy += static_cast<double>(x) * x;
    if (!(energy > 0.0)) throw Error(Errc::all_zero_volume, "EFC needs at least one nonzero voxel");
    const double norm = std::sqrt(energy);
    double e = 0.0;
    for (float xf : v.data) {
        const double x = std::abs(static_cast<double>(xf));
        if (x > 0.0) {
            const double a = x / norm;
            e += a * std::log(1.0 / a);
        }
    }
    const double n = static_cast<double>(v.size());
    const double e_max = std::sqrt(n) * std::log(std::sqrt(n));
    if (!(e_max > 0.0)) throw Error(Errc::all_zero_volume, "EFC undefined for single-voxel volumes");
    return e / e_max;
}

QualityMetrics compute_metrics(const Volume& v, const Mask& fg, const Mask& bg) {
    const FgBgStats s = fg_bg_stats(v, fg, bg);
    QualityMetrics m;

    auto set = [&m](MetricId id, double value) {
        m.values[static_cast<int>(id)] = value;
        m.is_defined[static_cast<int>(id)] = true;
    };
    auto undef = [&m](MetricId id, const std::string& cause) {
        m.is_defined[static_cast<int>(id)] = false;
        m.undefined_causes[kMetricNames[static_cast<int>(id)]] = cause;
    };

    set(MetricId::mean, s.mu_f);
    set(MetricId::rng, s.max_f - s.min_f);
    set(MetricId::var, s.sigma_f * s.sigma_f);

    if (s.mu_f > 0.0)
        set(MetricId::cv, s.sigma_f / s.mu_f);
    else
        undef(MetricId::cv, "non-positive foreground mean");

    // CPP: mean |8*center - sum(8 in-plane neighbors)| over foreground
    // voxels whose 3x3 in-plane window is fully inside the slice
    {
        double sum = 0.0;
        std::size_t n = 0;
        for (int z = 0; z < v.nz; ++z)
            for (int y = 1; y + 1 < v.ny; ++y)
                for (int x = 1; x + 1 < v.nx; ++x)
                    if (fg.at(x, y, z)) {
                        double r = 8.0 * v.at(x, y, z);
                        for (int dy = -1; dy <= 1; ++dy)
                            for (int dx = -1; dx <= 1; ++dx)
                                if (dx || dy) r -= v.at(x + dx, y + dy, z);
                        sum += std::abs(r);
                        ++n;
                    }
        if (n)
            set(MetricId::cpp, sum / static_cast<double>(n));
        else
            undef(MetricId::cpp, "no interior foreground voxel");
    }

    // PSNR against the in-plane 3x3 median-filtered volume, over foreground
    {
        double mse = 0.0;
        for (int z = 0; z < v.nz; ++z)
            for (int y = 0; y < v.ny; ++y)
                for (int x = 0; x < v.nx; ++x)
                    if (fg.at(x, y, z)) {
                        const double d = v.at(x, y, z) - median3_inplane(v, x, y, z);
                        mse += d * d;
                    }
        mse /= static_cast<double>(s.n_f);
        if (mse > 0.0 && s.max_f != 0.0)
            set(MetricId::psnr, 10.0 * std::log10(s.max_f * s.max_f / mse));
        else
            undef(MetricId::psnr, mse > 0.0 ? "zero foreground maximum" : "zero residual against median filter");
    }

    const Box p_box = foreground_patch(v, fg);
    const BoxStats p = box_stats(v, p_box);
    const Box bp_box = background_corner_patch(v, bg);
    const BoxStats bp = box_stats(v, bp_box);

    if (s.sigma_b > 0.0) {
        set(MetricId::snr1, s.mu_f / s.sigma_b);
        set(MetricId::snr2, p.mu / s.sigma_b);
    } else {
        undef(MetricId::snr1, "zero background standard deviation");
        undef(MetricId::snr2, "zero background standard deviation");
    }

    if (p.sigma > 0.0)
        set(MetricId::snr3, p.mu / p.sigma);
    else
        undef(MetricId::snr3, "zero patch standard deviation");

    if (bp.sigma > 0.0) {
        set(MetricId::snr4, p.mu / bp.sigma);
        set(MetricId::cnr, std::abs(p.mu - bp.mu) / bp.sigma);
    } else {
        undef(MetricId::snr4, "zero background patch standard deviation");
        undef(MetricId::cnr, "zero background patch standard deviation");
    }

    if (p.mu > 0.0)
        set(MetricId::cvp, p.sigma / p.mu);
    else
        undef(MetricId::cvp, "non-positive patch mean");

    if (s.mu_f != s.mu_b)
        set(MetricId::cjv, (s.sigma_f + s.sigma_b) / std::abs(s.mu_f - s.mu_b));
    else
        undef(MetricId::cjv, "equal foreground and background means");

    try {
        set(MetricId::efc, efc(v));
    } catch (const Error&) {
        undef(MetricId::efc, "all-zero or single-voxel volume");
    }

    {
        std::vector<double> f2, b2;
        f2.reserve(s.n_f);
        b2.reserve(s.n_b);
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double val = v.data[i];
            if (fg.on[i]) f2.push_back(val * val);
            if (bg.on[i]) b2.push_back(val * val);
        }
        const double mb = median_of(b2);
        if (mb > 0.0)
            set(MetricId::fber, median_of(f2) / mb);
        else
            undef(MetricId::fber, "zero median background energy");
    }

    return m;
}

}  // namespace mriq
