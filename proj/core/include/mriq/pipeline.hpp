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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mriq/artifact.hpp"
#include "mriq/llm_client.hpp"
#include "mriq/phantom.hpp"
#include "mriq/qa.hpp"

namespace mriq {

struct PhantomBatchSpec {
    int count = 0;
    PhantomSpec base;  // per-volume seeds are derived from the run seed
};

/// One line of the corruption plan. An entry fires for every listed volume
/// index (all volumes when the list is absent) with the given probability;
/// severity is fixed or drawn uniformly from [severity_lo, severity_hi].
struct ArtifactPlanEntry {
    ArtifactKind kind = ArtifactKind::noise;
    double severity_lo = 0.5;
    double severity_hi = 0.5;
    double probability = 1.0;
    std::optional<std::vector<int>> volumes;
    std::map<std::string, double> params;
};

struct PipelineConfig {
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;            // NIfTI paths
    std::optional<PhantomBatchSpec> phantoms;   // appended after inputs
    std::vector<ArtifactPlanEntry> artifact_plan;
    LabelThresholds thresholds;
    double qa_fraction = 1.0;
    bool use_metrics = true;  // false: the No-MRQy path, text carries no numbers
    std::optional<LlmClientConfig> llm;    // paraphrase stage when present
    std::optional<LlmClientConfig> judge;  // carried for the judge CLI; run() does not call it
    std::string output_dir;
    int jobs = 1;
    bool save_volumes = false;

    void validate() const;  // throws config_error
    static PipelineConfig from_json(const nlohmann::json& j);
};

struct VolumeReport {
    std::string id;
    bool ok = false;
    std::string error;
    std::optional<QualityLabel> label;
    QualityMetrics metrics;
    std::vector<ArtifactKind> artifacts;
    int n_pairs = 0;  // pairs surviving sampling
};

struct RunReport {
    std::vector<VolumeReport> volumes;
    std::size_t corpus_lines = 0;
    int failures = 0;
    std::vector<std::string> warnings;  // paraphrase fallbacks etc.
    std::string corpus_path;
    std::string report_tsv_path;
    std::string review_tsv_path;
    std::string summary_json_path;
    std::string html_path;
    std::string errors_jsonl_path;
};

/// Executes the full batch: load/generate, corrupt per plan, segment,
/// measure, label, generate and sample QA, then emit the corpus and
/// reports. Per-volume failures are recorded and never abort the batch;
/// only an unwritable output directory is fatal. Reruns with the same
/// config produce byte-identical outputs (with the paraphrase stage off).
RunReport run(const PipelineConfig& cfg);

}  // namespace mriq
