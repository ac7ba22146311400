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

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mriq/evaluation.hpp"
#include "mriq/lora.hpp"
#include "mriq/metrics.hpp"
#include "mriq/nifti.hpp"
#include "mriq/phantom.hpp"
#include "mriq/pipeline.hpp"
#include "mriq/png.hpp"
#include "mriq/qa.hpp"
#include "mriq/rng.hpp"
#include "mriq/segmentation.hpp"

namespace {

using nlohmann::json;

std::string format_metric(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

mriq::Mask mask_from_nifti(const std::string& path, const mriq::Volume& parent) {
    const mriq::Volume mv = mriq::read_nifti(path);
    if (!parent.same_dims(mv)) throw mriq::Error(mriq::Errc::dim_mismatch, "mask dims do not match volume");
    mriq::Mask m = mriq::make_mask(mv.nx, mv.ny, mv.nz);
    for (std::size_t i = 0; i < mv.size(); ++i) m.on[i] = mv.data[i] != 0.0f ? 1 : 0;
    m.recount();
    return m;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mriq::Error(mriq::Errc::io_error, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw mriq::Error(mriq::Errc::config_error, path + " is not valid JSON: " + e.what());
    }
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw mriq::Error(mriq::Errc::io_error, "cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

std::vector<mriq::QAPair> read_pairs(const std::string& path) {
    const json j = read_json_file(path);
    if (!j.is_array()) throw mriq::Error(mriq::Errc::invalid_params, path + " must hold a JSON array of pairs");
    std::vector<mriq::QAPair> pairs;
    for (const auto& item : j) pairs.push_back(mriq::QAPair::from_json(item));
    return pairs;
}

void write_pairs(const std::vector<mriq::QAPair>& pairs, const std::string& path) {
    json arr = json::array();
    for (const auto& p : pairs) arr.push_back(p.to_json());
    write_json_file(arr, path);
}

std::vector<mriq::QualityLabel> read_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mriq::Error(mriq::Errc::io_error, "cannot open " + path);
    std::vector<mriq::QualityLabel> labels;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        const auto l = mriq::label_from_name(line);
        if (!l) throw mriq::Error(mriq::Errc::invalid_params, "unknown label '" + line + "' in " + path);
        labels.push_back(*l);
    }
    return labels;
}

std::map<std::string, double> parse_kv_params(const std::vector<std::string>& kvs) {
    std::map<std::string, double> params;
    for (const auto& kv : kvs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw mriq::Error(mriq::Errc::invalid_params, "--param expects key=value, got '" + kv + "'");
        try {
            params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw mriq::Error(mriq::Errc::invalid_params, "--param value is not a number in '" + kv + "'");
        }
    }
    return params;
}

std::string metrics_tsv(const mriq::QualityMetrics& m) {
    std::string header, row;
    for (int i = 0; i < mriq::kMetricCount; ++i) {
        if (i) {
            header += '\t';
            row += '\t';
        }
        header += mriq::kMetricNames[i];
        row += m.is_defined[i] ? format_metric(m.values[i]) : "NA";
    }
    return header + "\n" + row + "\n";
}

std::string stem_of(const std::string& path) {
    std::string name = std::filesystem::path(path).filename().string();
    for (const char* suffix : {".gz", ".nii"}) {
        const std::size_t len = std::string(suffix).size();
        if (name.size() > len && name.compare(name.size() - len, len, suffix) == 0)
            name.resize(name.size() - len);
    }
    return name;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mriq - MRI volume quality metrics, k-space artifact simulation and QA corpus generation"};
    app.require_subcommand(1);
    std::function<int()> action;

    // ---- phantom ----
    {
        auto* cmd = app.add_subcommand("phantom", "Generate a synthetic ellipsoid phantom volume");
        auto out = std::make_shared<std::string>();
        auto mask_out = std::make_shared<std::string>();
        auto truth_out = std::make_shared<std::string>();
        auto dims = std::make_shared<std::vector<int>>(std::vector<int>{64, 64, 64});
        auto spacing = std::make_shared<std::vector<double>>(std::vector<double>{1.0, 1.0, 1.0});
        auto semi = std::make_shared<std::vector<double>>(std::vector<double>{20.0, 24.0, 18.0});
        auto inner = std::make_shared<std::vector<double>>();
        auto tissue = std::make_shared<double>(100.0);
        auto inner_intensity = std::make_shared<double>(150.0);
        auto sigma = std::make_shared<double>(5.0);
        auto seed = std::make_shared<std::uint64_t>(0);
        cmd->add_option("--out", *out, "Output NIfTI path (.nii or .nii.gz)")->required();
        cmd->add_option("--dims", *dims, "Grid size nx,ny,nz")->delimiter(',')->expected(3);
        cmd->add_option("--spacing", *spacing, "Voxel spacing in mm")->delimiter(',')->expected(3);
        cmd->add_option("--tissue", *tissue, "Tissue intensity");
        cmd->add_option("--semi-axes", *semi, "Ellipsoid semi-axes in voxels")->delimiter(',')->expected(3);
        cmd->add_option("--sigma", *sigma, "Background noise standard deviation");
        cmd->add_option("--seed", *seed, "RNG seed");
        cmd->add_option("--inner-semi-axes", *inner, "Inner ellipsoid semi-axes")->delimiter(',')->expected(3);
        cmd->add_option("--inner-intensity", *inner_intensity, "Inner ellipsoid intensity");
        cmd->add_option("--mask-out", *mask_out, "Also write the ground-truth foreground mask");
        cmd->add_option("--truth-out", *truth_out, "Also write ground-truth statistics as JSON");
        cmd->callback([=, &action] {
            action = [=]() {
                mriq::PhantomSpec spec;
                spec.nx = (*dims)[0];
                spec.ny = (*dims)[1];
                spec.nz = (*dims)[2];
                spec.spacing = {(*spacing)[0], (*spacing)[1], (*spacing)[2]};
                spec.tissue_intensity = *tissue;
                spec.semi_axes = {(*semi)[0], (*semi)[1], (*semi)[2]};
                spec.background_noise_sigma = *sigma;
                spec.seed = *seed;
                if (!inner->empty()) {
                    spec.inner_semi_axes = {{(*inner)[0], (*inner)[1], (*inner)[2]}};
                    spec.inner_intensity = *inner_intensity;
                }
                auto [vol, truth] = mriq::generate_phantom(spec);
                mriq::write_nifti(vol, *out);
                if (!mask_out->empty()) mriq::write_mask_nifti(truth.foreground, vol.spacing, *mask_out);
                if (!truth_out->empty())
                    write_json_file(json{{"mu_foreground", truth.mu_foreground},
                                         {"sigma_background", truth.sigma_background},
                                         {"mu_background", truth.mu_background},
                                         {"n_foreground", truth.n_foreground},
                                         {"n_background", truth.n_background}},
                                    *truth_out);
                std::cout << *out << "\n";
                return 0;
            };
        });
    }

    // ---- segment ----
    {
        auto* cmd = app.add_subcommand("segment", "Compute foreground/background masks");
        auto in = std::make_shared<std::string>();
        auto fg_out = std::make_shared<std::string>();
        auto bg_out = std::make_shared<std::string>();
        cmd->add_option("--in", *in, "Input NIfTI volume")->required();
        cmd->add_option("--fg-out", *fg_out, "Foreground mask output")->required();
        cmd->add_option("--bg-out", *bg_out, "Background mask output");
        cmd->callback([=, &action] {
            action = [=]() {
                const mriq::Volume vol = mriq::read_nifti(*in);
                const mriq::Mask fg = mriq::foreground_mask(vol);
                mriq::write_mask_nifti(fg, vol.spacing, *fg_out);
                if (!bg_out->empty())
                    mriq::write_mask_nifti(mriq::background_mask(vol, fg), vol.spacing, *bg_out);
                std::cout << "foreground_voxels\t" << fg.foreground_count << "\n";
                return 0;
            };
        });
    }

    // ---- metrics ----
    {
        auto* cmd = app.add_subcommand("metrics", "Compute the 15 quality indicators as a TSV row");
        auto in = std::make_shared<std::string>();
        auto fg_path = std::make_shared<std::string>();
        auto bg_path = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        cmd->add_option("--in", *in, "Input NIfTI volume")->required();
        cmd->add_option("--fg", *fg_path, "Foreground mask (default: segment internally)");
        cmd->add_option("--bg", *bg_path, "Background mask (default: complement of dilated foreground)");
        cmd->add_option("--out", *out, "Write the TSV here instead of stdout");
        cmd->callback([=, &action] {
            action = [=]() {
                const mriq::Volume vol = mriq::read_nifti(*in);
                const mriq::Mask fg = fg_path->empty() ? mriq::foreground_mask(vol) : mask_from_nifti(*fg_path, vol);
                const mriq::Mask bg = bg_path->empty() ? mriq::background_mask(vol, fg) : mask_from_nifti(*bg_path, vol);
                const std::string tsv = metrics_tsv(mriq::compute_metrics(vol, fg, bg));
                if (out->empty()) {
                    std::cout << tsv;
                } else {
                    std::ofstream f(*out, std::ios::binary | std::ios::trunc);
                    if (!f) throw mriq::Error(mriq::Errc::io_error, "cannot open " + *out);
                    f << tsv;
                }
                return 0;
            };
        });
    }

    // ---- corrupt ----
    {
        auto* cmd = app.add_subcommand("corrupt", "Apply a seeded k-space or image-space degradation");
        auto in = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto kind = std::make_shared<std::string>();
        auto severity = std::make_shared<double>(0.5);
        auto seed = std::make_shared<std::uint64_t>(0);
        auto kvs = std::make_shared<std::vector<std::string>>();
        auto prov_out = std::make_shared<std::string>();
        cmd->add_option("--in", *in, "Input NIfTI volume")->required();
        cmd->add_option("--out", *out, "Output NIfTI volume")->required();
        cmd->add_option("--kind", *kind, "motion|ghosting|aliasing|noise|bias_field")
            ->required()
            ->check(CLI::IsMember({"motion", "ghosting", "aliasing", "noise", "bias_field"}));
        cmd->add_option("--severity", *severity, "Severity in [0, 1]")->required();
        cmd->add_option("--seed", *seed, "RNG seed");
        cmd->add_option("--param", *kvs, "Kind-specific override, key=value (repeatable)");
        cmd->add_option("--provenance-out", *prov_out, "Write the provenance record as JSON");
        cmd->callback([=, &action] {
            action = [=]() {
                mriq::ArtifactSpec spec;
                spec.kind = *mriq::artifact_kind_from_name(*kind);
                spec.severity = *severity;
                spec.seed = *seed;
                spec.params = parse_kv_params(*kvs);
                const mriq::Volume vol = mriq::read_nifti(*in);
                auto [corrupted, rec] = mriq::apply_artifact(vol, spec);
                mriq::write_nifti(corrupted, *out);
                if (!prov_out->empty()) write_json_file(rec.to_json(), *prov_out);
                std::cout << *out << "\n";
                return 0;
            };
        });
    }

    // ---- qa ----
    {
        auto* cmd = app.add_subcommand("qa", "Generate Classification/Artifact/Analysis QA pairs for a volume");
        auto in = std::make_shared<std::string>();
        auto id = std::make_shared<std::string>();
        auto prov_path = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto no_metrics = std::make_shared<bool>(false);
        auto thresholds = std::make_shared<mriq::LabelThresholds>();
        cmd->add_option("--in", *in, "Input NIfTI volume")->required();
        cmd->add_option("--out", *out, "Output pairs JSON")->required();
        cmd->add_option("--id", *id, "Volume identifier (default: file stem)");
        cmd->add_option("--provenance", *prov_path, "Provenance record JSON from 'corrupt'");
        cmd->add_flag("--no-metrics", *no_metrics, "Omit numeric metric values from the text");
        cmd->add_option("--snr-hi", thresholds->snr_hi, "Good requires snr1 >= this");
        cmd->add_option("--snr-lo", thresholds->snr_lo, "Bad when snr1 < this");
        cmd->add_option("--efc-lo", thresholds->efc_lo, "Good requires efc <= this");
        cmd->add_option("--efc-hi", thresholds->efc_hi, "Bad when efc > this");
        cmd->callback([=, &action] {
            action = [=]() {
                const mriq::Volume vol = mriq::read_nifti(*in);
                const mriq::Mask fg = mriq::foreground_mask(vol);
                const mriq::Mask bg = mriq::background_mask(vol, fg);
                const mriq::QualityMetrics m = mriq::compute_metrics(vol, fg, bg);
                std::optional<mriq::ProvenanceRecord> prov;
                if (!prov_path->empty()) prov = mriq::ProvenanceRecord::from_json(read_json_file(*prov_path));
                mriq::QaGenConfig cfg;
                cfg.thresholds = *thresholds;
                cfg.include_metrics = !*no_metrics;
                const auto pairs = mriq::generate_qa(m, prov, cfg, id->empty() ? stem_of(*in) : *id);
                write_pairs(pairs, *out);
                std::cout << pairs.size() << " pairs\n";
                return 0;
            };
        });
    }

    // ---- sample ----
    {
        auto* cmd = app.add_subcommand("sample", "Stratified subsample of a QA pair file");
        auto pairs_path = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto fraction = std::make_shared<double>(1.0);
        auto seed = std::make_shared<std::uint64_t>(0);
        cmd->add_option("--pairs", *pairs_path, "Input pairs JSON")->required();
        cmd->add_option("--fraction", *fraction, "Fraction in (0, 1]")->required();
        cmd->add_option("--seed", *seed, "RNG seed");
        cmd->add_option("--out", *out, "Output pairs JSON")->required();
        cmd->callback([=, &action] {
            action = [=]() {
                const auto sampled = mriq::sample_qa(read_pairs(*pairs_path), *fraction, *seed);
                write_pairs(sampled, *out);
                std::cout << sampled.size() << " pairs\n";
                return 0;
            };
        });
    }

    // ---- export ----
    {
        auto* cmd = app.add_subcommand("export", "Convert QA pairs to an instruction-tuning JSONL corpus");
        auto pairs_path = std::make_shared<std::string>();
        auto images_path = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto review = std::make_shared<std::string>();
        cmd->add_option("--pairs", *pairs_path, "Input pairs JSON")->required();
        cmd->add_option("--images", *images_path, "JSON object mapping volume_id to image path")->required();
        cmd->add_option("--out", *out, "Output corpus JSONL")->required();
        cmd->add_option("--review-tsv", *review, "Also write a review TSV");
        cmd->callback([=, &action] {
            action = [=]() {
                const auto pairs = read_pairs(*pairs_path);
                const json imap = read_json_file(*images_path);
                std::map<std::string, std::string> image_paths;
                for (const auto& [k, v] : imap.items()) image_paths[k] = v.get<std::string>();
                mriq::export_jsonl(pairs, image_paths, *out);
                if (!review->empty()) mriq::export_review_tsv(pairs, *review);
                std::cout << pairs.size() << " lines\n";
                return 0;
            };
        });
    }

    // ---- eval ----
    {
        auto* cmd = app.add_subcommand("eval", "Score three-tier predictions: accuracy, macro-F1, confusion");
        auto pred = std::make_shared<std::string>();
        auto truth = std::make_shared<std::string>();
        auto json_out = std::make_shared<std::string>();
        cmd->add_option("--pred", *pred, "Predicted labels, one of Good/Medium/Bad per line")->required();
        cmd->add_option("--truth", *truth, "True labels, same format and length")->required();
        cmd->add_option("--json", *json_out, "Also write a JSON summary");
        cmd->callback([=, &action] {
            action = [=]() {
                const auto cm = mriq::confusion(read_labels(*pred), read_labels(*truth));
                const double acc = mriq::accuracy(cm);
                const double f1 = mriq::macro_f1(cm);
                std::printf("accuracy\t%.6f\nmacro_f1\t%.6f\n", acc, f1);
                std::printf("confusion\ttruth\\pred\tBad\tMedium\tGood\n");
                for (int t = 0; t < 3; ++t)
                    std::printf("confusion\t%s\t%lld\t%lld\t%lld\n",
                                mriq::label_name(static_cast<mriq::QualityLabel>(t)),
                                static_cast<long long>(cm.counts[t][0]), static_cast<long long>(cm.counts[t][1]),
                                static_cast<long long>(cm.counts[t][2]));
                if (!json_out->empty()) {
                    json rows = json::array();
                    for (int t = 0; t < 3; ++t) rows.push_back(cm.counts[t]);
                    write_json_file(json{{"accuracy", acc}, {"macro_f1", f1}, {"confusion", rows}}, *json_out);
                }
                return 0;
            };
        });
    }

    // ---- judge ----
    {
        auto* cmd = app.add_subcommand("judge", "Score a quality description with an external judge endpoint");
        auto text = std::make_shared<std::string>();
        auto file = std::make_shared<std::string>();
        auto item_id = std::make_shared<std::string>(std::string("item"));
        auto runs = std::make_shared<int>(3);
        auto cfg = std::make_shared<mriq::LlmClientConfig>();
        cfg->token_env = "JUDGE_API_KEY";
        cmd->add_option("--text", *text, "Description to score");
        cmd->add_option("--file", *file, "Read the description from a file");
        cmd->add_option("--endpoint", cfg->endpoint, "Judge chat-completions endpoint")->required();
        cmd->add_option("--runs", *runs, "Scoring runs to aggregate");
        cmd->add_option("--item-id", *item_id, "Item identifier in the output");
        cmd->add_option("--token-env", cfg->token_env, "Env var holding the bearer token");
        cmd->add_option("--timeout", cfg->timeout_seconds, "Request timeout in seconds");
        cmd->add_option("--retries", cfg->max_retries, "Transport retries per request");
        cmd->add_option("--temperature", cfg->temperature, "Sampling temperature");
        cmd->add_option("--model", cfg->model, "Model name to request");
        cmd->add_flag("--strict-json", cfg->strict_json, "Require a {\"score\": n} JSON reply");
        cmd->callback([=, &action] {
            action = [=]() {
                std::string description = *text;
                if (description.empty() && !file->empty()) {
                    std::ifstream in(*file);
                    if (!in) throw mriq::Error(mriq::Errc::io_error, "cannot open " + *file);
                    description.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
                }
                if (description.empty())
                    throw mriq::Error(mriq::Errc::invalid_params, "provide --text or --file");
                if (*runs < 1) throw mriq::Error(mriq::Errc::invalid_params, "--runs must be >= 1");
                std::vector<mriq::JudgeScore> scores;
                for (int r = 0; r < *runs; ++r) {
                    scores.push_back(mriq::judge_request(description, *cfg, *item_id, r));
                    std::printf("run\t%d\tscore\t%.2f\n", r, scores.back().score);
                }
                const auto agg = mriq::aggregate_scores(scores);
                std::printf("mean\t%.4f\tstddev\t%.4f\n", agg.per_item.front().mean, agg.per_item.front().stddev);
                return 0;
            };
        });
    }

    // ---- lora-check ----
    {
        auto* cmd = app.add_subcommand("lora-check", "Verify low-rank adapter arithmetic at desk scale");
        auto d_in = std::make_shared<int>(32);
        auto d_out = std::make_shared<int>(32);
        auto rank = std::make_shared<int>(16);
        auto alpha = std::make_shared<double>(16.0);
        auto seed = std::make_shared<std::uint64_t>(0);
        auto epsilon = std::make_shared<double>(1e-5);
        auto tolerance = std::make_shared<double>(1e-4);
        cmd->add_option("--d-in", *d_in, "Input dimension (<= 32)");
        cmd->add_option("--d-out", *d_out, "Output dimension (<= 32)");
        cmd->add_option("--rank", *rank, "Adapter rank");
        cmd->add_option("--alpha", *alpha, "Adapter scaling factor");
        cmd->add_option("--seed", *seed, "RNG seed");
        cmd->add_option("--epsilon", *epsilon, "Finite-difference step");
        cmd->add_option("--tolerance", *tolerance, "Relative gradient tolerance");
        cmd->callback([=, &action] {
            action = [=]() {
                mriq::Rng rng(mriq::mix_seed(*seed, 0x10aa));
                auto fill = [&rng](Eigen::MatrixXd& m, double scale) {
                    for (Eigen::Index i = 0; i < m.rows(); ++i)
                        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = scale * rng.gaussian();
                };
                mriq::LoraAdapter ad;
                ad.rank = *rank;
                ad.alpha = *alpha;
                ad.w0 = Eigen::MatrixXd(*d_out, *d_in);
                ad.a = Eigen::MatrixXd(*rank, *d_in);
                ad.b = Eigen::MatrixXd(*d_out, *rank);
                fill(ad.w0, 1.0);
                fill(ad.a, 0.1);
                fill(ad.b, 0.1);
                Eigen::VectorXd x(*d_in), target(*d_out);
                for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.gaussian();
                for (Eigen::Index i = 0; i < target.size(); ++i) target(i) = rng.gaussian();

                std::printf("adapter\td_in=%d\td_out=%d\trank=%d\talpha=%g\tscaling=%g\n", *d_in, *d_out, *rank,
                            *alpha, ad.scaling());
                std::printf("trainable_fraction\t%.10g\n", mriq::trainable_fraction(*d_in, *d_out, *rank));

                const Eigen::MatrixXd merged = mriq::merge(ad);
                const double agree = (merged * x - mriq::forward(ad, x)).cwiseAbs().maxCoeff();
                std::printf("merge_forward_max_abs_diff\t%.3e\n", agree);

                const auto report = mriq::grad_check(ad, x, target, *epsilon, *tolerance);
                std::printf("grad_check\trel_err_A=%.3e\trel_err_B=%.3e\tgrad_norm=%.6g\t%s\n",
                            report.max_rel_err_a, report.max_rel_err_b, report.grad_norm,
                            report.passed ? "PASS" : "FAIL");
                return report.passed && agree < 1e-9 ? 0 : 1;
            };
        });
    }

    // ---- run ----
    {
        auto* cmd = app.add_subcommand("run", "Run the batch pipeline from a JSON config");
        auto config_path = std::make_shared<std::string>();
        auto out_override = std::make_shared<std::string>();
        auto jobs_override = std::make_shared<int>(0);
        auto seed_override = std::make_shared<std::int64_t>(-1);
        auto fraction_override = std::make_shared<double>(0.0);
        cmd->add_option("--config", *config_path, "Pipeline config JSON")->required();
        cmd->add_option("--out", *out_override, "Override output_dir");
        cmd->add_option("--jobs", *jobs_override, "Override worker count");
        cmd->add_option("--seed", *seed_override, "Override run seed");
        cmd->add_option("--fraction", *fraction_override, "Override qa fraction");
        cmd->callback([=, &action] {
            action = [=]() {
                mriq::PipelineConfig cfg = mriq::PipelineConfig::from_json(read_json_file(*config_path));
                if (!out_override->empty()) cfg.output_dir = *out_override;
                if (*jobs_override > 0) cfg.jobs = *jobs_override;
                if (*seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(*seed_override);
                if (*fraction_override > 0.0) cfg.qa_fraction = *fraction_override;
                const mriq::RunReport report = mriq::run(cfg);
                for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
                std::printf("volumes\t%zu\nfailures\t%d\ncorpus_lines\t%zu\ncorpus\t%s\nsummary\t%s\n",
                            report.volumes.size(), report.failures, report.corpus_lines,
                            report.corpus_path.c_str(), report.summary_json_path.c_str());
                return 0;
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        std::cerr << "Run 'mriq --help' or 'mriq <subcommand> --help' for usage.\n";
        return 2;
    }

    try {
        return action ? action() : 2;
    } catch (const mriq::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
