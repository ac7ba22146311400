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

#include <stdexcept>
#include <string>

namespace mriq {

/// Error categories raised by the library. Callers that need to branch on
/// the failure mode should catch mriq::Error and switch on code().
enum class Errc {
    io_error,
    bad_magic,
    unsupported_datatype,
    unsupported_dimensionality,
    truncated_data,
    non_finite_data,
    invalid_params,
    degenerate_volume,
    empty_region,
    all_zero_volume,
    undefined_inputs,
    dim_mismatch,
    shape_mismatch,
    length_mismatch,
    empty_input,
    network_error,
    malformed_response,
    missing_image,
    config_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace mriq
