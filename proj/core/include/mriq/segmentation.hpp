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

#include "mriq/volume.hpp"

namespace mriq {

/// Tissue mask: Otsu threshold over a 256-bin histogram (ties broken toward
/// the lower threshold), largest 26-connected component, then one pass of
/// 3x3x3 morphological closing. Throws degenerate_volume when all
/// intensities are equal.
Mask foreground_mask(const Volume& v);

/// Complement of the foreground dilated by one voxel (full 3x3x3
/// neighborhood). The dilation shell is the guard band: it belongs to
/// neither region.
Mask background_mask(const Volume& v, const Mask& fg);

/// 3x3x3 box dilation, zero-padded at borders. Exposed for tests and the
/// guard-band construction.
Mask dilate(const Mask& m);

/// 3x3x3 box erosion, zero-padded at borders.
Mask erode(const Mask& m);

}  // namespace mriq
