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

#include "mriq/qa.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "mriq/rng.hpp"

namespace mriq {

namespace {

const char* const kTaskNames[kQaTaskCount] = {"Classification", "Artifact", "Analysis"};

const ArtifactPhrases kPhrases[kArtifactKindCount] = {
    // motion
    {"patient movement between shots producing k-space disruption",
     "ghosting or blur along the phase-encode direction",
     "A PROPELLER-style acquisition or prospective correction would reduce the motion sensitivity."},
    // ghosting
    {"periodic amplitude modulation of phase-encode lines",
     "displaced replicas of the anatomy along the phase-encode direction",
     "Cardiac or respiratory gating and flow compensation would suppress the periodic ghosting."},
    // aliasing
    {"phase-encode undersampling below the Nyquist criterion",
     "wrap-around overlap of structures from opposite sides of the field of view",
     "Enlarging the field of view or increasing phase-encode sampling would remove the aliasing wrap."},
    // noise
    {"elevated thermal noise in the receive chain",
     "a grainy floor with Rician statistics across the image",
     "Signal averaging or a larger voxel size would raise the SNR and suppress the noise floor."},
    // bias_field
    {"spatially varying receive-coil sensitivity",
     "smooth shading of intensities across the volume",
     "Prescan normalization or retrospective bias_field correction would flatten the shading."},
};

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// unique applied kinds in enum order
std::vector<ArtifactKind> applied_kinds(const std::optional<ProvenanceRecord>& prov) {
    std::vector<ArtifactKind> out;
    if (!prov) return out;
    std::set<int> seen;
    for (ArtifactKind k : prov->kinds()) seen.insert(static_cast<int>(k));
    for (int i : seen) out.push_back(static_cast<ArtifactKind>(i));
    return out;
}

const char* quality_assessment(QualityLabel l) {
    switch (l) {
        case QualityLabel::good: return "which indicates a clean acquisition with well-preserved tissue signal";
        case QualityLabel::medium: return "which indicates moderate degradation that leaves most structures readable";
        case QualityLabel::bad: return "which indicates heavy degradation that obscures tissue detail";
    }
    return "";
}

const char* usability_statement(QualityLabel l) {
    switch (l) {
        case QualityLabel::good: return "The volume is suitable for quantitative downstream processing without restriction.";
        case QualityLabel::medium: return "The volume is usable with caution; automated measurements should be visually verified.";
        case QualityLabel::bad: return "The volume is not reliable for quantitative analysis and a repeat acquisition is advisable.";
    }
    return "";
}

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    if (needle.empty()) return 0;
    std::size_t count = 0, pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

std::string sanitize_tsv(std::string s) {
    for (char& c : s)
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    return s;
}

constexpr const char* kParaphraseSystemPrompt =
    "You rewrite quality-assessment question-answer pairs about MRI volumes. "
    "Rephrase both texts in fresh wording while preserving their meaning. You must keep every "
    "numeric value, every quality label word (Good, Medium, Bad) and every artifact name "
    "(motion, ghosting, aliasing, noise, bias_field) exactly as written. Respond with a JSON "
    "object {\"question\": \"...\", \"answer\": \"...\"} and nothing else.";

// token-preservation rules a rewrite must satisfy to be accepted
bool rewrite_preserves_tokens(const std::string& original, const std::string& rewritten, std::string* why) {
    auto orig_numbers = extract_numbers(original);
    auto new_numbers = extract_numbers(rewritten);
    std::sort(orig_numbers.begin(), orig_numbers.end());
    std::sort(new_numbers.begin(), new_numbers.end());
    if (orig_numbers != new_numbers) {
        *why = "numeric values altered";
        return false;
    }
    for (int k = 0; k < kArtifactKindCount; ++k) {
        const char* name = artifact_kind_name(static_cast<ArtifactKind>(k));
        if ((count_occurrences(original, name) > 0) != (count_occurrences(rewritten, name) > 0)) {
            *why = std::string("artifact mention changed: ") + name;
            return false;
        }
    }
    for (QualityLabel l : {QualityLabel::bad, QualityLabel::medium, QualityLabel::good}) {
        if (count_occurrences(original, label_name(l)) != count_occurrences(rewritten, label_name(l))) {
            *why = std::string("label token changed: ") + label_name(l);
            return false;
        }
    }
    return true;
}

}  // namespace

const char* qa_task_name(QaTask t) { return kTaskNames[static_cast<int>(t)]; }

std::optional<QaTask> qa_task_from_name(const std::string& s) {
    for (int i = 0; i < kQaTaskCount; ++i)
        if (s == kTaskNames[i]) return static_cast<QaTask>(i);
    return std::nullopt;
}

void LabelThresholds::validate() const {
    if (!(snr_lo <= snr_hi)) throw Error(Errc::config_error, "snr_lo must be <= snr_hi");
    if (!(efc_lo <= efc_hi)) throw Error(Errc::config_error, "efc_lo must be <= efc_hi");
}

QualityLabel derive_label(const QualityMetrics& m, const LabelThresholds& t) {
    t.validate();
    if (!m.defined(MetricId::snr1) || !m.defined(MetricId::efc))
        throw Error(Errc::undefined_inputs, "label derivation needs snr1 and efc to be defined");
    const double snr = m.value(MetricId::snr1);
    const double e = m.value(MetricId::efc);
    if (snr < t.snr_lo || e > t.efc_hi) return QualityLabel::bad;
    if (snr >= t.snr_hi && e <= t.efc_lo) return QualityLabel::good;
    return QualityLabel::medium;
}

const ArtifactPhrases& artifact_phrases(ArtifactKind k) { return kPhrases[static_cast<int>(k)]; }

std::vector<QAPair> generate_qa(const QualityMetrics& m, const std::optional<ProvenanceRecord>& prov,
                                const QaGenConfig& cfg, const std::string& volume_id) {
    const QualityLabel label = derive_label(m, cfg.thresholds);
    const std::vector<ArtifactKind> kinds = applied_kinds(prov);

    std::vector<QAPair> pairs;
    auto push = [&](QaTask task, std::string q, std::string a) {
        QAPair p;
        p.task = task;
        p.question = std::move(q);
        p.answer = std::move(a);
        p.volume_id = volume_id;
        p.label = label;
        p.metrics = m;
        p.provenance = prov;
        pairs.push_back(std::move(p));
    };

    {
        std::string answer = std::string("Overall quality is rated ") + label_name(label);
        if (cfg.include_metrics)
            answer += ". The measured SNR is " + format_value(m.value(MetricId::snr1)) +
                      " with an entropy focus criterion of " + format_value(m.value(MetricId::efc)) + ", " +
                      quality_assessment(label) + ".";
        else
            answer += std::string(", ") + quality_assessment(label) + ".";
        push(QaTask::classification,
             "How would you rate the overall quality of this volume given its signal statistics?",
             std::move(answer));
    }

    {
        std::string answer;
        if (kinds.empty()) {
            answer = kNoArtifactAnswer;
        } else {
            answer = kArtifactDeclarationPrefix;
            for (std::size_t i = 0; i < kinds.size(); ++i) {
                if (i) answer += ", ";
                answer += artifact_kind_name(kinds[i]);
            }
            answer += ".";
            for (ArtifactKind k : kinds) {
                const auto& ph = artifact_phrases(k);
                answer += std::string(" The ") + artifact_kind_name(k) + " component is caused by " + ph.cause +
                          " and shows up as " + ph.feature + ".";
            }
        }
        push(QaTask::artifact, "Which acquisition artifacts, if any, are present in this volume and what caused them?",
             std::move(answer));
    }

    {
        std::string answer = usability_statement(label);
        if (kinds.empty()) {
            answer += " No acquisition change is indicated.";
        } else {
            for (ArtifactKind k : kinds) answer += std::string(" ") + artifact_phrases(k).remedy;
        }
        push(QaTask::analysis, "Is this volume suitable for downstream analysis, and how could the acquisition be improved?",
             std::move(answer));
    }

    return pairs;
}

std::vector<QAPair> sample_qa(const std::vector<QAPair>& pairs, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw Error(Errc::invalid_params, "fraction must be in (0, 1]");
    if (fraction == 1.0) return pairs;

    std::vector<char> keep(pairs.size(), 0);
    for (int t = 0; t < kQaTaskCount; ++t) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < pairs.size(); ++i)
            if (static_cast<int>(pairs[i].task) == t) idx.push_back(i);
        if (idx.empty()) continue;
        const std::size_t k = static_cast<std::size_t>(
            std::llround(fraction * static_cast<double>(idx.size())));
        Rng rng(mix_seed(seed, 0x5a3bULL + static_cast<std::uint64_t>(t)));
        for (std::size_t i = idx.size(); i > 1; --i)  // Fisher-Yates
            std::swap(idx[i - 1], idx[rng.below(i)]);
        for (std::size_t i = 0; i < std::min(k, idx.size()); ++i) keep[idx[i]] = 1;
    }
    std::vector<QAPair> out;
    for (std::size_t i = 0; i < pairs.size(); ++i)
        if (keep[i]) out.push_back(pairs[i]);
    return out;
}

nlohmann::json metrics_to_json(const QualityMetrics& m) {
    nlohmann::json values = nlohmann::json::object();
    for (int i = 0; i < kMetricCount; ++i)
        if (m.is_defined[i]) values[kMetricNames[i]] = m.values[i];
    nlohmann::json undefined = nlohmann::json::object();
    for (const auto& [name, cause] : m.undefined_causes) undefined[name] = cause;
    return {{"values", std::move(values)}, {"undefined", std::move(undefined)}};
}

QualityMetrics metrics_from_json(const nlohmann::json& j) {
    QualityMetrics m;
    for (int i = 0; i < kMetricCount; ++i) {
        const auto& values = j.at("values");
        if (values.contains(kMetricNames[i])) {
            m.values[i] = values.at(kMetricNames[i]).get<double>();
            m.is_defined[i] = true;
        }
    }
    if (j.contains("undefined"))
        for (const auto& [name, cause] : j.at("undefined").items())
            m.undefined_causes[name] = cause.get<std::string>();
    return m;
}

nlohmann::json QAPair::to_json() const {
    nlohmann::json j = {{"volume_id", volume_id}, {"task", qa_task_name(task)},   {"question", question},
                        {"answer", answer},       {"label", label_name(label)},   {"metrics", metrics_to_json(metrics)},
                        {"provenance", provenance ? provenance->to_json() : nlohmann::json()}};
    return j;
}

QAPair QAPair::from_json(const nlohmann::json& j) {
    QAPair p;
    const auto task = qa_task_from_name(j.at("task").get<std::string>());
    if (!task) throw Error(Errc::invalid_params, "unknown QA task in pair");
    p.task = *task;
    p.question = j.at("question").get<std::string>();
    p.answer = j.at("answer").get<std::string>();
    p.volume_id = j.at("volume_id").get<std::string>();
    const auto label = label_from_name(j.at("label").get<std::string>());
    if (!label) throw Error(Errc::invalid_params, "unknown label in pair");
    p.label = *label;
    if (j.contains("metrics")) p.metrics = metrics_from_json(j.at("metrics"));
    if (j.contains("provenance") && !j.at("provenance").is_null())
        p.provenance = ProvenanceRecord::from_json(j.at("provenance"));
    return p;
}

std::vector<QAPair> llm_paraphrase(const std::vector<QAPair>& pairs, const LlmClientConfig& client,
                                   std::vector<std::string>* warnings) {
    auto warn = [&](const std::string& msg) {
        if (warnings) warnings->push_back(msg);
    };
    std::vector<QAPair> out;
    out.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const QAPair& orig = pairs[i];
        std::string content;
        try {
            const nlohmann::json user = {{"question", orig.question}, {"answer", orig.answer}};
            content = chat_completion(client, kParaphraseSystemPrompt, user.dump());
        } catch (const Error& e) {
            warn("pair " + std::to_string(i) + ": " + e.what() + "; keeping original");
            out.push_back(orig);
            continue;
        }

        nlohmann::json rewrite;
        try {
            rewrite = nlohmann::json::parse(content);
        } catch (const nlohmann::json::exception&) {
            const auto lo = content.find('{');
            const auto hi = content.rfind('}');
            bool ok = false;
            if (lo != std::string::npos && hi != std::string::npos && hi > lo) {
                try {
                    rewrite = nlohmann::json::parse(content.substr(lo, hi - lo + 1));
                    ok = true;
                } catch (const nlohmann::json::exception&) {
                }
            }
            if (!ok) {
                warn("pair " + std::to_string(i) + ": MalformedResponse: rewrite is not JSON; keeping original");
                out.push_back(orig);
                continue;
            }
        }

        std::string q, a;
        if (rewrite.is_object() && rewrite.contains("question") && rewrite.contains("answer") &&
            rewrite["question"].is_string() && rewrite["answer"].is_string()) {
            q = rewrite["question"].get<std::string>();
            a = rewrite["answer"].get<std::string>();
        }
        std::string why;
        if (q.empty() || a.empty()) {
            warn("pair " + std::to_string(i) + ": rewrite missing or empty text; keeping original");
            out.push_back(orig);
            continue;
        }
        if (!rewrite_preserves_tokens(orig.question, q, &why) || !rewrite_preserves_tokens(orig.answer, a, &why)) {
            warn("pair " + std::to_string(i) + ": " + why + "; keeping original");
            out.push_back(orig);
            continue;
        }
        QAPair p = orig;
        p.question = std::move(q);
        p.answer = std::move(a);
        out.push_back(std::move(p));
    }
    return out;
}

void export_jsonl(const std::vector<QAPair>& pairs, const std::map<std::string, std::string>& image_paths,
                  const std::string& out_path) {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot open " + out_path + " for writing");
    std::map<std::string, int> ordinal;  // (volume_id, task) -> running index
    for (const QAPair& p : pairs) {
        const auto img = image_paths.find(p.volume_id);
        if (img == image_paths.end())
            throw Error(Errc::missing_image, "no image path for volume " + p.volume_id);
        const std::string key = p.volume_id + ":" + qa_task_name(p.task);
        const int n = ordinal[key]++;
        const nlohmann::json line = {
            {"id", key + ":" + std::to_string(n)},
            {"image", img->second},
            {"conversations",
             {{{"from", "human"}, {"value", p.question}}, {{"from", "assistant"}, {"value", p.answer}}}}};
        out << line.dump() << "\n";
    }
    if (!out) throw Error(Errc::io_error, "write failed on " + out_path);
}

void export_review_tsv(const std::vector<QAPair>& pairs, const std::string& out_path) {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot open " + out_path + " for writing");
    out << "volume_id\ttask\tquestion\tanswer\tlabel\n";
    for (const QAPair& p : pairs)
        out << sanitize_tsv(p.volume_id) << '\t' << qa_task_name(p.task) << '\t' << sanitize_tsv(p.question)
            << '\t' << sanitize_tsv(p.answer) << '\t' << label_name(p.label) << "\n";
    if (!out) throw Error(Errc::io_error, "write failed on " + out_path);
}

}  // namespace mriq
