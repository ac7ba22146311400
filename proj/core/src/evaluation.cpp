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

#include "mriq/evaluation.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <map>

namespace mriq {

namespace {

constexpr const char* kJudgePromptTemplate =
    "Assess the following MRI quality description [generated text] on a 0-100 scale for artifact "
    "identification and diagnostic relevance.";

// first signed number token in the text, or nullopt
std::optional<double> first_number(const std::string& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        const bool digit = std::isdigit(static_cast<unsigned char>(s[i])) != 0;
        const bool signed_digit = (s[i] == '-' || s[i] == '+') && i + 1 < s.size() &&
                                  std::isdigit(static_cast<unsigned char>(s[i + 1]));
        if (!digit && !signed_digit) continue;
        std::size_t j = i + (signed_digit ? 1 : 0);
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j < s.size() && s[j] == '.' && j + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
            ++j;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        }
        return std::stod(s.substr(i, j - i));
    }
    return std::nullopt;
}

}  // namespace

ConfusionMatrix confusion(const std::vector<QualityLabel>& preds, const std::vector<QualityLabel>& truths) {
    if (preds.size() != truths.size())
        throw Error(Errc::length_mismatch, "prediction and truth lists differ in length");
    if (preds.empty()) throw Error(Errc::empty_input, "nothing to score");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < preds.size(); ++i) ++cm.at(truths[i], preds[i]);
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    const std::int64_t total = cm.total();
    if (total == 0) throw Error(Errc::empty_input, "confusion matrix is empty");
    std::int64_t diag = 0;
    for (int i = 0; i < 3; ++i) diag += cm.counts[i][i];
    return static_cast<double>(diag) / static_cast<double>(total);
}

double macro_f1(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw Error(Errc::empty_input, "confusion matrix is empty");
    double sum_f1 = 0.0;
    for (int c = 0; c < 3; ++c) {
        std::int64_t tp = cm.counts[c][c], fp = 0, fn = 0;
        for (int o = 0; o < 3; ++o) {
            if (o == c) continue;
            fp += cm.counts[o][c];
            fn += cm.counts[c][o];
        }
        const double precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        const double recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        const double f1 = (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        sum_f1 += f1;
    }
    return sum_f1 / 3.0;
}

JudgeScore judge_request(const std::string& description, const LlmClientConfig& cfg, const std::string& item_id,
                         int run) {
    std::string prompt = kJudgePromptTemplate;
    const std::string placeholder = "[generated text]";
    prompt.replace(prompt.find(placeholder), placeholder.size(), description);

    const std::string content = chat_completion(cfg, "You are a strict MRI quality grader.", prompt);

    double value = 0.0;
    if (cfg.strict_json) {
        try {
            const auto j = nlohmann::json::parse(content);
            if (!j.is_object() || !j.contains("score") || !j["score"].is_number())
                throw Error(Errc::malformed_response, "strict mode expects {\"score\": <number>}");
            value = j["score"].get<double>();
        } catch (const nlohmann::json::exception&) {
            throw Error(Errc::malformed_response, "strict mode expects a JSON object reply");
        }
    } else {
        const auto n = first_number(content);
        if (!n) throw Error(Errc::malformed_response, "no numeric score in judge reply: " + content);
        value = *n;
    }
    if (value < 0.0 || value > 100.0)
        throw Error(Errc::malformed_response, "score " + std::to_string(value) + " outside [0, 100]");
    return JudgeScore{item_id, run, value};
}

ScoreAggregate aggregate_scores(const std::vector<JudgeScore>& scores) {
    if (scores.empty()) throw Error(Errc::empty_input, "no scores to aggregate");
    std::map<std::string, std::vector<double>> by_item;
    for (const auto& s : scores) {
        if (s.score < 0.0 || s.score > 100.0)
            throw Error(Errc::invalid_params, "score outside [0, 100] for item " + s.item_id);
        by_item[s.item_id].push_back(s.score);
    }
    ScoreAggregate agg;
    double sum_means = 0.0;
    for (const auto& [id, runs] : by_item) {
        double sum = 0.0, sumsq = 0.0;
        for (double v : runs) {
            sum += v;
            sumsq += v * v;
        }
        const double n = static_cast<double>(runs.size());
        const double mean = sum / n;
        const double var = std::max(0.0, sumsq / n - mean * mean);
        agg.per_item.push_back({id, mean, std::sqrt(var), static_cast<int>(runs.size())});
        sum_means += mean;
    }
    agg.overall_mean = sum_means / static_cast<double>(by_item.size());
    return agg;
}

}  // namespace mriq
