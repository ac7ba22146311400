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

#include "mriq/phantom.hpp"

#include <cmath>

#include "mriq/rng.hpp"

namespace mriq {

void PhantomSpec::validate() const {
    if (nx < 1 || ny < 1 || nz < 1) throw Error(Errc::invalid_params, "phantom dims must be >= 1");
    if (!(tissue_intensity > 0.0)) throw Error(Errc::invalid_params, "tissue_intensity must be > 0");
    if (background_noise_sigma < 0.0) throw Error(Errc::invalid_params, "noise sigma must be >= 0");
    const double half[3] = {(nx - 1) / 2.0, (ny - 1) / 2.0, (nz - 1) / 2.0};
    for (int i = 0; i < 3; ++i) {
        if (!(semi_axes[i] > 0.0)) throw Error(Errc::invalid_params, "semi-axes must be > 0");
        if (semi_axes[i] > half[i]) throw Error(Errc::invalid_params, "semi-axes must fit inside dims");
    }
    if (inner_semi_axes) {
        for (int i = 0; i < 3; ++i) {
            if (!((*inner_semi_axes)[i] > 0.0)) throw Error(Errc::invalid_params, "inner semi-axes must be > 0");
            if ((*inner_semi_axes)[i] > semi_axes[i])
                throw Error(Errc::invalid_params, "inner ellipsoid must fit inside the outer one");
        }
        if (!(inner_intensity > 0.0)) throw Error(Errc::invalid_params, "inner_intensity must be > 0");
    }
}

std::pair<Volume, PhantomTruth> generate_phantom(const PhantomSpec& spec) {
    spec.validate();
    Volume v = make_volume(spec.nx, spec.ny, spec.nz, spec.spacing);
    PhantomTruth truth;
    truth.foreground = make_mask(spec.nx, spec.ny, spec.nz);
    truth.inner = make_mask(spec.nx, spec.ny, spec.nz);

    const double cx = (spec.nx - 1) / 2.0, cy = (spec.ny - 1) / 2.0, cz = (spec.nz - 1) / 2.0;
    const double ax = spec.semi_axes[0], ay = spec.semi_axes[1], az = spec.semi_axes[2];

    Rng rng(mix_seed(spec.seed));
    double sum_fg = 0.0, sum_bg = 0.0, sumsq_bg = 0.0;

    // single scan in storage order so the noise stream is reproducible
    std::size_t i = 0;
    for (int z = 0; z < spec.nz; ++z) {
        for (int y = 0; y < spec.ny; ++y) {
            for (int x = 0; x < spec.nx; ++x, ++i) {
                const double dx = (x - cx) / ax, dy = (y - cy) / ay, dz = (z - cz) / az;
                if (dx * dx + dy * dy + dz * dz <= 1.0) {
                    double val = spec.tissue_intensity;
                    if (spec.inner_semi_axes) {
                        const double ex = (x - cx) / (*spec.inner_semi_axes)[0];
                        const double ey = (y - cy) / (*spec.inner_semi_axes)[1];
                        const double ez = (z - cz) / (*spec.inner_semi_axes)[2];
                        if (ex * ex + ey * ey + ez * ez <= 1.0) {
                            val = spec.inner_intensity;
                            truth.inner.on[i] = 1;
                        }
                    }
                    v.data[i] = static_cast<float>(val);
                    truth.foreground.on[i] = 1;
                    sum_fg += v.data[i];
                } else {
                    const double noise = spec.background_noise_sigma * rng.gaussian();
                    v.data[i] = static_cast<float>(noise);
                    sum_bg += v.data[i];
                    sumsq_bg += static_cast<double>(v.data[i]) * v.data[i];
                }
            }
        }
    }

    truth.foreground.recount();
    truth.inner.recount();
    truth.n_foreground = truth.foreground.foreground_count;
    truth.n_background = v.size() - truth.n_foreground;
    truth.mu_foreground = truth.n_foreground ? sum_fg / static_cast<double>(truth.n_foreground) : 0.0;
    if (truth.n_background) {
        truth.mu_background = sum_bg / static_cast<double>(truth.n_background);
        const double var = sumsq_bg / static_cast<double>(truth.n_background) - truth.mu_background * truth.mu_background;
        truth.sigma_background = std::sqrt(std::max(0.0, var));
    }
    return {std::move(v), std::move(truth)};
}

}  // namespace mriq
