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

#include <cstdint>
#include <string>
#include <vector>

#include "mriq/volume.hpp"

namespace mriq {

/// Minimal 8-bit grayscale PNG encoder (zlib-deflated, filter 0). Output is
/// deterministic for a given zlib build. pixels are row-major, top row
/// first, width*height bytes.
void write_png_gray8(const std::string& path, int width, int height, const std::vector<std::uint8_t>& pixels);

/// Middle axial slice of a volume, min-max scaled to 0..255 and written as
/// a PNG thumbnail.
void write_middle_slice_png(const Volume& v, const std::string& path);

}  // namespace mriq
