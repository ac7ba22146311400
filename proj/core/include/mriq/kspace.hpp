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

#include <complex>
#include <vector>

#include "mriq/error.hpp"

namespace mriq {

/// 2D real grid, x-fastest (index = x + nx*y).
struct Image2D {
    int nx = 0, ny = 0;
    std::vector<double> v;
};

/// Centered 2D spectrum: DC sits at (nx/2, ny/2).
struct Kspace2D {
    int nx = 0, ny = 0;
    std::vector<std::complex<double>> v;
};

/// Unnormalized forward DFT followed by an fftshift, so low frequencies are
/// in the middle and phase-encode line k = ny/2 is the DC line. Requires
/// nx, ny >= 2.
Kspace2D to_kspace(const Image2D& img);

/// Inverse of to_kspace for real images: ifftshift, backward DFT, 1/N
/// scaling, real part. from_kspace(to_kspace(x)) == x up to roundoff.
Image2D from_kspace(const Kspace2D& k);

/// Complex-valued inverse, for callers that need magnitude/phase after
/// non-Hermitian k-space edits.
std::vector<std::complex<double>> from_kspace_complex(const Kspace2D& k);

}  // namespace mriq
