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

#include "mriq/volume.hpp"

#include <cmath>

namespace mriq {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::io_error: return "IoError";
        case Errc::bad_magic: return "BadMagic";
        case Errc::unsupported_datatype: return "UnsupportedDatatype";
        case Errc::unsupported_dimensionality: return "UnsupportedDimensionality";
        case Errc::truncated_data: return "TruncatedData";
        case Errc::non_finite_data: return "NonFiniteData";
        case Errc::invalid_params: return "InvalidParams";
        case Errc::degenerate_volume: return "DegenerateVolume";
        case Errc::empty_region: return "EmptyRegion";
        case Errc::all_zero_volume: return "AllZeroVolume";
        case Errc::undefined_inputs: return "UndefinedInputs";
        case Errc::dim_mismatch: return "DimMismatch";
        case Errc::shape_mismatch: return "ShapeMismatch";
        case Errc::length_mismatch: return "LengthMismatch";
        case Errc::empty_input: return "Empty";
        case Errc::network_error: return "NetworkError";
        case Errc::malformed_response: return "MalformedResponse";
        case Errc::missing_image: return "MissingImage";
        case Errc::config_error: return "ConfigError";
    }
    return "Error";
}

void Volume::validate() const {
    if (nx < 1 || ny < 1 || nz < 1)
        throw Error(Errc::invalid_params, "volume dims must be >= 1");
    if (data.size() != static_cast<std::size_t>(nx) * ny * nz)
        throw Error(Errc::invalid_params, "data length does not match dims");
    for (double s : spacing)
        if (!(s > 0.0)) throw Error(Errc::invalid_params, "spacing must be strictly positive");
}

Volume make_volume(int nx, int ny, int nz, std::array<double, 3> spacing) {
    Volume v;
    v.nx = nx;
    v.ny = ny;
    v.nz = nz;
    v.spacing = spacing;
    for (int i = 0; i < 3; ++i) v.affine[i][i] = spacing[i];
    v.data.assign(static_cast<std::size_t>(nx) * ny * nz, 0.0f);
    v.validate();
    return v;
}

Mask make_mask(int nx, int ny, int nz) {
    Mask m;
    m.nx = nx;
    m.ny = ny;
    m.nz = nz;
    m.on.assign(static_cast<std::size_t>(nx) * ny * nz, 0);
    return m;
}

}  // namespace mriq
