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
#include <map>
#include <optional>
#include <string>

#include "mriq/volume.hpp"

namespace mriq {

/// Region statistics behind every quality indicator. Population moments,
/// accumulated in double precision.
struct FgBgStats {
    double mu_f = 0.0;
    double sigma_f = 0.0;
    double mu_b = 0.0;
    double sigma_b = 0.0;
    std::size_t n_f = 0;
    std::size_t n_b = 0;
    double max_f = 0.0;
    double min_f = 0.0;
};

enum class MetricId : int {
    mean = 0, rng, var, cv, cpp, psnr, snr1, snr2, snr3, snr4, cnr, cvp, cjv, efc, fber
};

inline constexpr int kMetricCount = 15;
extern const std::array<const char*, kMetricCount> kMetricNames;  // fixed TSV column order

/// The 15 quality indicators. A metric whose denominator degenerates is
/// flagged undefined with a cause instead of being zeroed; downstream text
/// generation checks the flags.
struct QualityMetrics {
    std::array<double, kMetricCount> values{};
    std::array<bool, kMetricCount> is_defined{};
    std::map<std::string, std::string> undefined_causes;  // metric name -> cause

    std::optional<double> get(MetricId id) const {
        const int i = static_cast<int>(id);
        if (!is_defined[i]) return std::nullopt;
        return values[i];
    }
    bool defined(MetricId id) const { return is_defined[static_cast<int>(id)]; }
    double value(MetricId id) const { return values[static_cast<int>(id)]; }
};

/// Throws empty_region when either mask has no voxels.
FgBgStats fg_bg_stats(const Volume& v, const Mask& fg, const Mask& bg);

/// Computes all 15 indicators. See the metric reference in the README for
/// the exact formulas, patch placement and window conventions.
QualityMetrics compute_metrics(const Volume& v, const Mask& fg, const Mask& bg);

/// Entropy focus criterion over the whole volume, on absolute intensities,
/// normalized to [0, 1] (0 = all energy in one voxel, 1 = perfectly flat).
/// Throws all_zero_volume when every voxel is zero.
double efc(const Volume& v);

}  // namespace mriq
