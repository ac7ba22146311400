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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mriq/label.hpp"
#include "mriq/llm_client.hpp"

namespace mriq {

/// 3x3 counts indexed [true label][predicted label] over Bad/Medium/Good.
struct ConfusionMatrix {
    std::array<std::array<std::int64_t, 3>, 3> counts{};

    std::int64_t total() const {
        std::int64_t t = 0;
        for (const auto& row : counts)
            for (auto c : row) t += c;
        return t;
    }
    std::int64_t& at(QualityLabel truth, QualityLabel pred) {
        return counts[static_cast<int>(truth)][static_cast<int>(pred)];
    }
    std::int64_t at(QualityLabel truth, QualityLabel pred) const {
        return counts[static_cast<int>(truth)][static_cast<int>(pred)];
    }
};

/// Throws length_mismatch / empty_input.
ConfusionMatrix confusion(const std::vector<QualityLabel>& preds, const std::vector<QualityLabel>& truths);

double accuracy(const ConfusionMatrix& cm);

/// Unweighted mean of per-class F1; a class with zero precision+recall
/// denominator contributes 0.
double macro_f1(const ConfusionMatrix& cm);

struct JudgeScore {
    std::string item_id;
    int run = 0;
    double score = 0.0;  // [0, 100]
};

/// Sends the fixed judging prompt with the description substituted and
/// parses a single 0-100 number from the reply. With cfg.strict_json the
/// reply must be a JSON object {"score": <number>}; otherwise the first
/// number token is taken. Out-of-range or unparseable replies raise
/// malformed_response.
JudgeScore judge_request(const std::string& description, const LlmClientConfig& cfg,
                         const std::string& item_id = "", int run = 0);

struct ScoreAggregate {
    struct Item {
        std::string item_id;
        double mean = 0.0;
        double stddev = 0.0;
        int runs = 0;
    };
    std::vector<Item> per_item;  // sorted by item_id
    double overall_mean = 0.0;   // unweighted over items
};

/// Mean per item across runs, then unweighted mean across items.
/// Permutation-invariant in run order. Throws empty_input.
ScoreAggregate aggregate_scores(const std::vector<JudgeScore>& scores);

}  // namespace mriq
