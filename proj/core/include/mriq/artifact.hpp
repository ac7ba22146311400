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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mriq/volume.hpp"

namespace mriq {

enum class ArtifactKind : int { motion = 0, ghosting, aliasing, noise, bias_field };

inline constexpr int kArtifactKindCount = 5;
const char* artifact_kind_name(ArtifactKind k);
std::optional<ArtifactKind> artifact_kind_from_name(const std::string& name);

/// Parameterized degradation request. Corruption is applied per axial
/// slice in 2D k-space (except bias_field, which is a smooth 3D image-space
/// field); the phase-encode axis is y. Severity maps:
///   motion    shots=4 segments, phase ramps uniform in +-severity*pi/4
///   ghosting  every `period`-th line (offset 1 from the DC line) scaled
///             by 1 - severity*0.8
///   aliasing  keep every R-th line, R = 1 + round(3*severity)
///   noise     complex k-space noise, image-domain sigma =
///             severity * 0.4 * P99(|v|) (override: sigma_ref)
///   bias_field multiply by 1 + severity*f, f a random order-2 polynomial
///             normalized to max |f| = 1
struct ArtifactSpec {
    ArtifactKind kind = ArtifactKind::noise;
    double severity = 0.0;  // [0, 1]
    std::uint64_t seed = 0;
    std::map<std::string, double> params;  // kind-specific overrides

    void validate() const;  // throws invalid_params
    double param_or(const std::string& key, double fallback) const;
};

struct AppliedArtifact {
    ArtifactSpec spec;
    nlohmann::json realized;  // realized phases, dropped lines, field coefficients
};

/// Ground-truth record of every degradation applied, in order. Replaying
/// the record on the original clean volume reproduces the corrupted volume
/// bit for bit.
struct ProvenanceRecord {
    int nx = 0, ny = 0, nz = 0;
    std::vector<AppliedArtifact> applied;

    std::vector<ArtifactKind> kinds() const;
    double max_severity() const;
    bool is_noop() const;

    /// Canonical JSON (sorted keys), suitable for corpus metadata.
    nlohmann::json to_json() const;
    static ProvenanceRecord from_json(const nlohmann::json& j);
};

/// Applies one degradation. Deterministic in (volume, spec): per-slice RNG
/// streams are derived from (spec.seed, slice index), so slices can be
/// processed in parallel without changing the result. severity == 0 is an
/// explicit no-op.
std::pair<Volume, ProvenanceRecord> apply_artifact(const Volume& v, const ArtifactSpec& spec);

/// Applies a chain of degradations, accumulating one record.
std::pair<Volume, ProvenanceRecord> apply_artifacts(const Volume& v, const std::vector<ArtifactSpec>& specs);

/// Re-applies a record to the clean volume. Throws dim_mismatch when dims
/// differ from those the record was produced with.
Volume replay(const Volume& clean, const ProvenanceRecord& rec);

}  // namespace mriq
