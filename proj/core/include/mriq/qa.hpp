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
#include <vector>

#include <json.hpp>

#include "mriq/artifact.hpp"
#include "mriq/label.hpp"
#include "mriq/llm_client.hpp"
#include "mriq/metrics.hpp"

namespace mriq {

enum class QaTask : int { classification = 0, artifact = 1, analysis = 2 };

inline constexpr int kQaTaskCount = 3;
const char* qa_task_name(QaTask t);
std::optional<QaTask> qa_task_from_name(const std::string& s);

/// Rule thresholds for the three-tier label. Defaults are tool constants
/// calibrated on the synthetic phantoms, not values from any reference
/// dataset; override them in the config for real acquisitions.
struct LabelThresholds {
    double snr_hi = 15.0;  // Good requires snr1 >= snr_hi
    double snr_lo = 5.0;   // Bad when snr1 < snr_lo
    double efc_lo = 0.45;  // Good requires efc <= efc_lo
    double efc_hi = 0.75;  // Bad when efc > efc_hi

    void validate() const;  // throws config_error
};

/// Good if snr1 >= snr_hi and efc <= efc_lo; Bad if snr1 < snr_lo or
/// efc > efc_hi; otherwise Medium. Monotone in snr1. Throws
/// undefined_inputs when snr1 or efc is flagged undefined.
QualityLabel derive_label(const QualityMetrics& m, const LabelThresholds& t = {});

/// Fixed cause/feature/remediation vocabulary per artifact kind. QA answers
/// draw from this table, which is also what the tests assert against.
struct ArtifactPhrases {
    const char* cause;
    const char* feature;
    const char* remedy;
};
const ArtifactPhrases& artifact_phrases(ArtifactKind k);

/// Sentence opener that declares which artifacts an answer names. Kind
/// names after this prefix, and only those, count as "named" artifacts.
inline constexpr const char* kArtifactDeclarationPrefix = "Detected artifacts: ";
inline constexpr const char* kNoArtifactAnswer =
    "No dominant artifact detected. The signal statistics are consistent with an uncorrupted acquisition.";

struct QAPair {
    QaTask task = QaTask::classification;
    std::string question;
    std::string answer;
    std::string volume_id;
    QualityLabel label = QualityLabel::medium;
    QualityMetrics metrics;
    std::optional<ProvenanceRecord> provenance;

    nlohmann::json to_json() const;
    static QAPair from_json(const nlohmann::json& j);
};

nlohmann::json metrics_to_json(const QualityMetrics& m);
QualityMetrics metrics_from_json(const nlohmann::json& j);

struct QaGenConfig {
    LabelThresholds thresholds;
    bool include_metrics = true;  // false: answers carry no numeric values
};

/// One deterministic pair per task (Classification, Artifact, Analysis).
/// The Classification answer contains the label token exactly once; the
/// Artifact answer names exactly the kinds present in the provenance
/// record (or declares none).
std::vector<QAPair> generate_qa(const QualityMetrics& m, const std::optional<ProvenanceRecord>& prov,
                                const QaGenConfig& cfg, const std::string& volume_id);

/// Deterministic stratified subsample: per task, round(fraction * n) pairs
/// are kept and original order is preserved. fraction 1.0 is the identity.
std::vector<QAPair> sample_qa(const std::vector<QAPair>& pairs, double fraction, std::uint64_t seed);

/// Rewrites each pair through the external LLM under a fixed system prompt.
/// A rewrite that changes the label token, the artifact-kind mentions or
/// any numeric value, or that cannot be fetched, is discarded and the
/// original pair kept. Warnings describe every fallback.
std::vector<QAPair> llm_paraphrase(const std::vector<QAPair>& pairs, const LlmClientConfig& client,
                                   std::vector<std::string>* warnings = nullptr);

/// Instruction-tuning corpus: one JSON object per line with sorted keys,
/// {"conversations": [...], "id": ..., "image": ...}. image_paths maps
/// volume_id to the image file; a missing entry raises missing_image.
void export_jsonl(const std::vector<QAPair>& pairs, const std::map<std::string, std::string>& image_paths,
                  const std::string& out_path);

/// Reviewer-friendly TSV (volume_id, task, question, answer, label).
void export_review_tsv(const std::vector<QAPair>& pairs, const std::string& out_path);

}  // namespace mriq
