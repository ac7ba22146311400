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

#include "mriq/pipeline.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "mriq/metrics.hpp"
#include "mriq/nifti.hpp"
#include "mriq/png.hpp"
#include "mriq/rng.hpp"
#include "mriq/segmentation.hpp"

namespace fs = std::filesystem;

namespace mriq {

namespace {

struct Source {
    std::string id;
    std::string path;          // empty for phantoms
    std::optional<PhantomSpec> phantom;
};

struct Outcome {
    VolumeReport row;
    std::vector<QAPair> pairs;
};

std::string stem_of(const std::string& path) {
    fs::path p(path);
    std::string name = p.filename().string();
    for (const char* suffix : {".gz", ".nii"}) {
        const std::size_t len = std::strlen(suffix);
        if (name.size() > len && name.compare(name.size() - len, len, suffix) == 0)
            name.resize(name.size() - len);
    }
    return name.empty() ? "volume" : name;
}

std::string format_cell(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string artifacts_cell(const std::vector<ArtifactKind>& kinds) {
    if (kinds.empty()) return "-";
    std::string s;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (i) s += ";";
        s += artifact_kind_name(kinds[i]);
    }
    return s;
}

std::string html_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

LlmClientConfig llm_config_from_json(const nlohmann::json& j) {
    LlmClientConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "endpoint")
            cfg.endpoint = value.get<std::string>();
        else if (key == "token_env")
            cfg.token_env = value.get<std::string>();
        else if (key == "timeout_seconds")
            cfg.timeout_seconds = value.get<double>();
        else if (key == "max_retries")
            cfg.max_retries = value.get<int>();
        else if (key == "temperature")
            cfg.temperature = value.get<double>();
        else if (key == "model")
            cfg.model = value.get<std::string>();
        else if (key == "strict_json")
            cfg.strict_json = value.get<bool>();
        else
            throw Error(Errc::config_error, "unknown LLM client key: " + key);
    }
    return cfg;
}

std::array<double, 3> triple(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) throw Error(Errc::config_error, std::string(what) + " must be a 3-array");
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

PhantomBatchSpec phantoms_from_json(const nlohmann::json& j) {
    PhantomBatchSpec batch;
    for (const auto& [key, value] : j.items()) {
        if (key == "count")
            batch.count = value.get<int>();
        else if (key == "dims") {
            const auto d = triple(value, "dims");
            batch.base.nx = static_cast<int>(d[0]);
            batch.base.ny = static_cast<int>(d[1]);
            batch.base.nz = static_cast<int>(d[2]);
        } else if (key == "spacing")
            batch.base.spacing = triple(value, "spacing");
        else if (key == "tissue_intensity")
            batch.base.tissue_intensity = value.get<double>();
        else if (key == "semi_axes")
            batch.base.semi_axes = triple(value, "semi_axes");
        else if (key == "noise_sigma")
            batch.base.background_noise_sigma = value.get<double>();
        else if (key == "inner_semi_axes")
            batch.base.inner_semi_axes = triple(value, "inner_semi_axes");
        else if (key == "inner_intensity")
            batch.base.inner_intensity = value.get<double>();
        else
            throw Error(Errc::config_error, "unknown phantom key: " + key);
    }
    if (batch.count < 1) throw Error(Errc::config_error, "phantoms.count must be >= 1");
    return batch;
}

ArtifactPlanEntry plan_entry_from_json(const nlohmann::json& j) {
    ArtifactPlanEntry e;
    bool have_kind = false;
    for (const auto& [key, value] : j.items()) {
        if (key == "kind") {
            const auto k = artifact_kind_from_name(value.get<std::string>());
            if (!k) throw Error(Errc::config_error, "unknown artifact kind: " + value.get<std::string>());
            e.kind = *k;
            have_kind = true;
        } else if (key == "severity") {
            if (value.is_array()) {
                if (value.size() != 2) throw Error(Errc::config_error, "severity range must be [lo, hi]");
                e.severity_lo = value.at(0).get<double>();
                e.severity_hi = value.at(1).get<double>();
            } else {
                e.severity_lo = e.severity_hi = value.get<double>();
            }
        } else if (key == "probability")
            e.probability = value.get<double>();
        else if (key == "volumes")
            e.volumes = value.get<std::vector<int>>();
        else if (key == "params")
            for (const auto& [pk, pv] : value.items()) e.params[pk] = pv.get<double>();
        else
            throw Error(Errc::config_error, "unknown artifact plan key: " + key);
    }
    if (!have_kind) throw Error(Errc::config_error, "artifact plan entry needs a kind");
    return e;
}

Outcome process_volume(const PipelineConfig& cfg, const Source& src, std::size_t index) {
    Outcome outcome;
    outcome.row.id = src.id;
    try {
        Volume vol = src.phantom ? generate_phantom(*src.phantom).first : read_nifti(src.path);

        std::vector<ArtifactSpec> specs;
        for (std::size_t e = 0; e < cfg.artifact_plan.size(); ++e) {
            const ArtifactPlanEntry& entry = cfg.artifact_plan[e];
            if (entry.volumes) {
                bool listed = false;
                for (int idx : *entry.volumes) listed |= idx == static_cast<int>(index);
                if (!listed) continue;
            }
            Rng rng(mix_seed(mix_seed(cfg.seed, 0x900 + index), e));
            if (rng.uniform() >= entry.probability) continue;
            ArtifactSpec spec;
            spec.kind = entry.kind;
            spec.severity = entry.severity_lo == entry.severity_hi
                                ? entry.severity_lo
                                : rng.uniform(entry.severity_lo, entry.severity_hi);
            spec.seed = rng.next_u64();
            spec.params = entry.params;
            specs.push_back(std::move(spec));
        }

        std::optional<ProvenanceRecord> prov;
        if (!specs.empty()) {
            auto [corrupted, rec] = apply_artifacts(vol, specs);
            vol = std::move(corrupted);
            prov = std::move(rec);
            outcome.row.artifacts = prov->kinds();
        }

        const Mask fg = foreground_mask(vol);
        const Mask bg = background_mask(vol, fg);
        // metrics always run: labels are rule-based on snr1/efc. The
        // No-MRQy ablation only strips the numbers from the QA text.
        outcome.row.metrics = compute_metrics(vol, fg, bg);
        outcome.row.label = derive_label(outcome.row.metrics, cfg.thresholds);

        QaGenConfig qa_cfg;
        qa_cfg.thresholds = cfg.thresholds;
        qa_cfg.include_metrics = cfg.use_metrics;
        outcome.pairs = generate_qa(outcome.row.metrics, prov, qa_cfg, src.id);

        write_middle_slice_png(vol, (fs::path(cfg.output_dir) / "images" / (src.id + ".png")).string());
        if (cfg.save_volumes)
            write_nifti(vol, (fs::path(cfg.output_dir) / "volumes" / (src.id + ".nii.gz")).string());

        outcome.row.ok = true;
    } catch (const std::exception& e) {
        outcome.row.ok = false;
        outcome.row.error = e.what();
        outcome.pairs.clear();
    }
    return outcome;
}

void write_report_tsv(const std::string& path, const std::vector<VolumeReport>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot open " + path);
    out << "volume_id\tstatus\tlabel\tartifacts\tn_pairs";
    for (const char* name : kMetricNames) out << '\t' << name;
    out << "\terror\n";
    for (const auto& r : rows) {
        out << r.id << '\t' << (r.ok ? "ok" : "error") << '\t' << (r.label ? label_name(*r.label) : "-") << '\t'
            << artifacts_cell(r.artifacts) << '\t' << r.n_pairs;
        for (int i = 0; i < kMetricCount; ++i)
            out << '\t' << (r.ok && r.metrics.is_defined[i] ? format_cell(r.metrics.values[i]) : "NA");
        out << '\t' << (r.error.empty() ? "-" : r.error) << "\n";
    }
}

void write_html(const std::string& path, const std::vector<VolumeReport>& rows, std::size_t corpus_lines,
                int failures) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot open " + path);
    out << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>mriq report</title>\n"
        << "<style>body{font:14px sans-serif;margin:24px}table{border-collapse:collapse}"
        << "td,th{border:1px solid #aaa;padding:4px 8px;font-size:13px;text-align:right}"
        << "td.t,th.t{text-align:left}img{image-rendering:pixelated;display:block}</style></head><body>\n"
        << "<h1>mriq run report</h1>\n<p>" << rows.size() << " volumes, " << corpus_lines << " corpus lines, "
        << failures << " failures.</p>\n<table>\n<tr><th class=\"t\">volume</th><th>slice</th>"
        << "<th>status</th><th>label</th><th class=\"t\">artifacts</th><th>pairs</th>";
    for (const char* name : kMetricNames) out << "<th>" << name << "</th>";
    out << "</tr>\n";
    for (const auto& r : rows) {
        out << "<tr><td class=\"t\">" << html_escape(r.id) << "</td><td>";
        if (r.ok)
            out << "<img src=\"images/" << html_escape(r.id) << ".png\" width=\"96\" alt=\"\">";
        out << "</td><td>" << (r.ok ? "ok" : html_escape(r.error)) << "</td><td>"
            << (r.label ? label_name(*r.label) : "-") << "</td><td class=\"t\">"
            << artifacts_cell(r.artifacts) << "</td><td>" << r.n_pairs << "</td>";
        for (int i = 0; i < kMetricCount; ++i)
            out << "<td>" << (r.ok && r.metrics.is_defined[i] ? format_cell(r.metrics.values[i]) : "NA") << "</td>";
        out << "</tr>\n";
    }
    out << "</table>\n</body></html>\n";
}

void write_summary_json(const std::string& path, const std::vector<VolumeReport>& rows, std::size_t corpus_lines,
                        int failures, const std::vector<std::string>& warnings) {
    nlohmann::json volumes = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row = {{"id", r.id},
                              {"status", r.ok ? "ok" : "error"},
                              {"label", r.label ? label_name(*r.label) : nullptr},
                              {"artifacts", nlohmann::json::array()},
                              {"n_pairs", r.n_pairs}};
        for (ArtifactKind k : r.artifacts) row["artifacts"].push_back(artifact_kind_name(k));
        if (!r.ok) row["error"] = r.error;
        if (r.ok) row["metrics"] = metrics_to_json(r.metrics);
        volumes.push_back(std::move(row));
    }
    nlohmann::json metric_summary = nlohmann::json::object();
    for (int i = 0; i < kMetricCount; ++i) {
        double sum = 0.0, lo = 0.0, hi = 0.0;
        std::size_t n = 0;
        for (const auto& r : rows) {
            if (!r.ok || !r.metrics.is_defined[i]) continue;
            const double v = r.metrics.values[i];
            if (n == 0) {
                lo = hi = v;
            } else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            sum += v;
            ++n;
        }
        nlohmann::json entry = {{"n_defined", n}};
        if (n) {
            entry["mean"] = sum / static_cast<double>(n);
            entry["min"] = lo;
            entry["max"] = hi;
        }
        metric_summary[kMetricNames[i]] = std::move(entry);
    }
    const nlohmann::json summary = {{"volumes", std::move(volumes)},
                                    {"corpus_lines", corpus_lines},
                                    {"failures", failures},
                                    {"warnings", warnings},
                                    {"metric_summary", std::move(metric_summary)}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot open " + path);
    out << summary.dump(2) << "\n";
}

}  // namespace

void PipelineConfig::validate() const {
    if (output_dir.empty()) throw Error(Errc::config_error, "output_dir is required");
    if (!(qa_fraction > 0.0 && qa_fraction <= 1.0))
        throw Error(Errc::config_error, "qa_fraction must be in (0, 1]");
    if (jobs < 1) throw Error(Errc::config_error, "jobs must be >= 1");
    if (inputs.empty() && !phantoms) throw Error(Errc::config_error, "no inputs and no phantom batch");
    thresholds.validate();
    if (phantoms) phantoms->base.validate();
    for (const auto& e : artifact_plan) {
        if (!(e.severity_lo >= 0.0 && e.severity_hi <= 1.0 && e.severity_lo <= e.severity_hi))
            throw Error(Errc::config_error, "artifact severity range must be within [0, 1]");
        if (!(e.probability >= 0.0 && e.probability <= 1.0))
            throw Error(Errc::config_error, "artifact probability must be in [0, 1]");
        ArtifactSpec probe;
        probe.kind = e.kind;
        probe.severity = e.severity_hi;
        probe.params = e.params;
        probe.validate();
        if (e.volumes)
            for (int v : *e.volumes)
                if (v < 0) throw Error(Errc::config_error, "artifact volume indices must be >= 0");
    }
    if (llm) llm->validate();
    if (judge) judge->validate();
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
    PipelineConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "seed")
            cfg.seed = value.get<std::uint64_t>();
        else if (key == "inputs")
            cfg.inputs = value.get<std::vector<std::string>>();
        else if (key == "phantoms")
            cfg.phantoms = phantoms_from_json(value);
        else if (key == "artifacts")
            for (const auto& entry : value) cfg.artifact_plan.push_back(plan_entry_from_json(entry));
        else if (key == "labels") {
            for (const auto& [lk, lv] : value.items()) {
                if (lk == "snr_hi")
                    cfg.thresholds.snr_hi = lv.get<double>();
                else if (lk == "snr_lo")
                    cfg.thresholds.snr_lo = lv.get<double>();
                else if (lk == "efc_lo")
                    cfg.thresholds.efc_lo = lv.get<double>();
                else if (lk == "efc_hi")
                    cfg.thresholds.efc_hi = lv.get<double>();
                else
                    throw Error(Errc::config_error, "unknown labels key: " + lk);
            }
        } else if (key == "qa") {
            for (const auto& [qk, qv] : value.items()) {
                if (qk == "fraction")
                    cfg.qa_fraction = qv.get<double>();
                else if (qk == "use_metrics")
                    cfg.use_metrics = qv.get<bool>();
                else
                    throw Error(Errc::config_error, "unknown qa key: " + qk);
            }
        } else if (key == "llm")
            cfg.llm = llm_config_from_json(value);
        else if (key == "judge")
            cfg.judge = llm_config_from_json(value);
        else if (key == "output_dir")
            cfg.output_dir = value.get<std::string>();
        else if (key == "jobs")
            cfg.jobs = value.get<int>();
        else if (key == "save_volumes")
            cfg.save_volumes = value.get<bool>();
        else
            throw Error(Errc::config_error, "unknown config key: " + key);
    }
    return cfg;
}

RunReport run(const PipelineConfig& cfg) {
    cfg.validate();

    std::error_code ec;
    fs::create_directories(fs::path(cfg.output_dir) / "images", ec);
    if (ec) throw Error(Errc::config_error, "cannot create output directory: " + ec.message());
    if (cfg.save_volumes) {
        fs::create_directories(fs::path(cfg.output_dir) / "volumes", ec);
        if (ec) throw Error(Errc::config_error, "cannot create output directory: " + ec.message());
    }

    std::vector<Source> sources;
    std::map<std::string, int> stems;
    for (const auto& path : cfg.inputs) {
        std::string id = stem_of(path);
        if (stems[id]++ > 0) id += "_" + std::to_string(sources.size());
        sources.push_back({id, path, std::nullopt});
    }
    if (cfg.phantoms) {
        for (int i = 0; i < cfg.phantoms->count; ++i) {
            PhantomSpec spec = cfg.phantoms->base;
            spec.seed = mix_seed(cfg.seed, 0x700 + static_cast<std::uint64_t>(sources.size()));
            char buf[32];
            std::snprintf(buf, sizeof(buf), "phantom_%03zu", sources.size());
            sources.push_back({buf, "", spec});
        }
    }

    std::vector<Outcome> outcomes(sources.size());
    {
        std::atomic<std::size_t> next{0};
        const int workers = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(sources.size())));
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= sources.size()) return;
                outcomes[i] = process_volume(cfg, sources[i], i);
            }
        };
        if (workers == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }
    }

    RunReport report;
    std::vector<QAPair> all_pairs;
    for (auto& o : outcomes) {
        report.volumes.push_back(o.row);
        if (!o.row.ok) ++report.failures;
        for (auto& p : o.pairs) all_pairs.push_back(std::move(p));
    }

    std::vector<QAPair> sampled = sample_qa(all_pairs, cfg.qa_fraction, cfg.seed);
    for (auto& row : report.volumes) {
        row.n_pairs = 0;
        for (const auto& p : sampled)
            if (p.volume_id == row.id) ++row.n_pairs;
    }

    if (cfg.llm) sampled = llm_paraphrase(sampled, *cfg.llm, &report.warnings);

    std::map<std::string, std::string> image_paths;
    for (const auto& row : report.volumes)
        if (row.ok) image_paths[row.id] = "images/" + row.id + ".png";

    const fs::path out_dir(cfg.output_dir);
    report.corpus_path = (out_dir / "corpus.jsonl").string();
    report.review_tsv_path = (out_dir / "review.tsv").string();
    report.report_tsv_path = (out_dir / "report.tsv").string();
    report.summary_json_path = (out_dir / "summary.json").string();
    report.html_path = (out_dir / "report.html").string();
    report.errors_jsonl_path = (out_dir / "errors.jsonl").string();

    export_jsonl(sampled, image_paths, report.corpus_path);
    report.corpus_lines = sampled.size();
    export_review_tsv(sampled, report.review_tsv_path);
    write_report_tsv(report.report_tsv_path, report.volumes);
    write_summary_json(report.summary_json_path, report.volumes, report.corpus_lines, report.failures,
                       report.warnings);
    write_html(report.html_path, report.volumes, report.corpus_lines, report.failures);

    {
        std::ofstream err_out(report.errors_jsonl_path, std::ios::binary | std::ios::trunc);
        if (!err_out) throw Error(Errc::io_error, "cannot open " + report.errors_jsonl_path);
        for (const auto& row : report.volumes)
            if (!row.ok) err_out << nlohmann::json{{"id", row.id}, {"error", row.error}}.dump() << "\n";
    }

    return report;
}

}  // namespace mriq
