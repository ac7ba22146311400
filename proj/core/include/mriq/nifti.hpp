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

#include <string>

#include "mriq/volume.hpp"

namespace mriq {

// Single-file little-endian NIfTI-1 I/O. Supported datatypes on read:
// uint8, int16, int32, float32, float64. scl_slope/scl_inter are applied
// (slope 0 means unscaled). Detached .hdr/.img pairs ("ni1\0" magic) and
// NIfTI-2 are rejected. Files are gunzipped transparently when they start
// with the gzip magic bytes 0x1f 0x8b, regardless of extension.

/// Reads a .nii or .nii.gz file. Throws Error with code bad_magic,
/// unsupported_datatype, unsupported_dimensionality, truncated_data,
/// non_finite_data or io_error.
Volume read_nifti(const std::string& path);

/// Writes a volume as float32 with vox_offset = 352. Paths ending in .gz
/// are gzip-compressed. Throws io_error on failure.
void write_nifti(const Volume& v, const std::string& path);

/// Writes a mask as a float32 0/1 volume with unit affine scaled by spacing.
void write_mask_nifti(const Mask& m, std::array<double, 3> spacing, const std::string& path);

}  // namespace mriq
