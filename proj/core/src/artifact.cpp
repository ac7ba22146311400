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

#include "mriq/artifact.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "mriq/kspace.hpp"
#include "mriq/rng.hpp"

namespace mriq {

namespace {

constexpr std::uint64_t kStreamSalt = 0xa11fa7c5;

const char* const kKindNames[kArtifactKindCount] = {"motion", "ghosting", "aliasing", "noise", "bias_field"};

// documented parameter keys per kind; anything else is a typo
const std::map<std::string, std::vector<std::string>> kAllowedParams = {
    {"motion", {"shots"}},
    {"ghosting", {"period", "offset", "attenuation"}},
    {"aliasing", {"factor"}},
    {"noise", {"sigma_ref"}},
    {"bias_field", {}},
};

std::uint64_t stream_seed(const ArtifactSpec& spec, std::uint64_t slice) {
    return mix_seed(mix_seed(spec.seed, kStreamSalt + static_cast<std::uint64_t>(spec.kind)), slice);
}

Image2D extract_slice(const Volume& v, int z) {
    Image2D s;
    s.nx = v.nx;
    s.ny = v.ny;
    s.v.resize(static_cast<std::size_t>(v.nx) * v.ny);
    const std::size_t base = static_cast<std::size_t>(z) * s.v.size();
    for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] = v.data[base + i];
    return s;
}

void store_magnitude(Volume& v, int z, const std::vector<std::complex<double>>& img) {
    const std::size_t n = static_cast<std::size_t>(v.nx) * v.ny;
    const std::size_t base = static_cast<std::size_t>(z) * n;
    for (std::size_t i = 0; i < n; ++i) v.data[base + i] = static_cast<float>(std::abs(img[i]));
}

int modulo(int a, int m) { return (a % m + m) % m; }

double percentile99_abs(const Volume& v) {
    std::vector<float> mag(v.data.size());
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(v.data[i]);
    std::sort(mag.begin(), mag.end());
    const std::size_t n = mag.size();
    const std::size_t idx = std::min(n - 1, static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(n))) - 1);
    return mag[std::max<std::size_t>(idx, 0)];
}

void require_kspace_dims(const Volume& v) {
    if (v.nx < 2 || v.ny < 2)
        throw Error(Errc::invalid_params, "k-space artifacts need in-plane dims >= 2x2");
}

Volume apply_motion(const Volume& in, const ArtifactSpec& spec, nlohmann::json& realized) {
    require_kspace_dims(in);
    const int shots = static_cast<int>(spec.param_or("shots", 4));
    const double max_ramp = spec.severity * M_PI / 4.0;
    Volume out = in;
    nlohmann::json per_slice = nlohmann::json::array();
    for (int z = 0; z < in.nz; ++z) {
        Rng rng(stream_seed(spec, static_cast<std::uint64_t>(z)));
        std::vector<std::array<double, 3>> shot_phase(shots, {0.0, 0.0, 0.0});
        for (int s = 1; s < shots; ++s)  // shot 0 is the reference position
            shot_phase[s] = {rng.uniform(-max_ramp, max_ramp), rng.uniform(-max_ramp, max_ramp),
                             rng.uniform(-max_ramp, max_ramp)};

        Kspace2D k = to_kspace(extract_slice(in, z));
        const int cx = in.nx / 2, cy = in.ny / 2;
        for (int ky = 0; ky < in.ny; ++ky) {
            const int s = std::min(shots - 1, ky * shots / in.ny);
            const auto& [c, ax, ay] = shot_phase[s];
            const double w = 2.0 * (ky - cy) / in.ny;
            for (int kx = 0; kx < in.nx; ++kx) {
                const double u = 2.0 * (kx - cx) / in.nx;
                const double phase = c + ax * u + ay * w;
                k.v[static_cast<std::size_t>(kx) + static_cast<std::size_t>(in.nx) * ky] *=
                    std::complex<double>(std::cos(phase), std::sin(phase));
            }
        }
        store_magnitude(out, z, from_kspace_complex(k));

        nlohmann::json shots_json = nlohmann::json::array();
        for (const auto& p : shot_phase) shots_json.push_back({p[0], p[1], p[2]});
        per_slice.push_back(std::move(shots_json));
    }
    realized = {{"shots", shots}, {"max_ramp", max_ramp}, {"phase_per_slice", std::move(per_slice)}};
    return out;
}

Volume apply_ghosting(const Volume& in, const ArtifactSpec& spec, nlohmann::json& realized) {
    require_kspace_dims(in);
    const int period = static_cast<int>(spec.param_or("period", 2));
    const int offset = static_cast<int>(spec.param_or("offset", 1));
    const double g = spec.param_or("attenuation", 0.8);
    const double factor = 1.0 - spec.severity * g;
    const int cy = in.ny / 2;

    std::vector<int> lines;
    for (int ky = 0; ky < in.ny; ++ky)
        if (modulo(ky - cy, period) == offset) lines.push_back(ky);

    Volume out = in;
    for (int z = 0; z < in.nz; ++z) {
        Kspace2D k = to_kspace(extract_slice(in, z));
        for (int ky : lines)
            for (int kx = 0; kx < in.nx; ++kx)
                k.v[static_cast<std::size_t>(kx) + static_cast<std::size_t>(in.nx) * ky] *= factor;
        store_magnitude(out, z, from_kspace_complex(k));
    }
    realized = {{"period", period}, {"offset", offset}, {"factor", factor}, {"attenuated_lines", lines}};
    return out;
}

Volume apply_aliasing(const Volume& in, const ArtifactSpec& spec, nlohmann::json& realized) {
    require_kspace_dims(in);
    const int undersampling =
        static_cast<int>(spec.param_or("factor", 1.0 + std::round(3.0 * spec.severity)));
    const int cy = in.ny / 2;

    std::vector<int> dropped;
    for (int ky = 0; ky < in.ny; ++ky)
        if (modulo(ky - cy, undersampling) != 0) dropped.push_back(ky);

    Volume out = in;
    for (int z = 0; z < in.nz; ++z) {
        Kspace2D k = to_kspace(extract_slice(in, z));
        for (int ky : dropped)
            for (int kx = 0; kx < in.nx; ++kx)
                k.v[static_cast<std::size_t>(kx) + static_cast<std::size_t>(in.nx) * ky] = 0.0;
        store_magnitude(out, z, from_kspace_complex(k));
    }
    realized = {{"factor", undersampling}, {"dropped_lines", dropped}};
    return out;
}

Volume apply_noise(const Volume& in, const ArtifactSpec& spec, nlohmann::json& realized) {
    require_kspace_dims(in);
    const double sigma_ref = spec.params.count("sigma_ref") ? spec.params.at("sigma_ref")
                                                            : 0.4 * percentile99_abs(in);
    const double sigma_image = spec.severity * sigma_ref;
    const std::size_t n = static_cast<std::size_t>(in.nx) * in.ny;
    // complex noise added per k-space sample; the sqrt(N) factor makes
    // sigma_image the per-component noise level in image space
    const double sigma_k = sigma_image * std::sqrt(static_cast<double>(n));

    Volume out = in;
    for (int z = 0; z < in.nz; ++z) {
        Rng rng(stream_seed(spec, static_cast<std::uint64_t>(z)));
        Kspace2D k = to_kspace(extract_slice(in, z));
        for (std::size_t i = 0; i < n; ++i)
            k.v[i] += std::complex<double>(sigma_k * rng.gaussian(), sigma_k * rng.gaussian());
        store_magnitude(out, z, from_kspace_complex(k));
    }
    realized = {{"sigma_ref", sigma_ref}, {"sigma_image", sigma_image}, {"sigma_kspace", sigma_k}};
    return out;
}

Volume apply_bias_field(const Volume& in, const ArtifactSpec& spec, nlohmann::json& realized) {
    static const char* const kBasis[9] = {"x", "y", "z", "xx", "yy", "zz", "xy", "xz", "yz"};
    Rng rng(stream_seed(spec, 0));
    std::array<double, 9> coef;
    for (auto& c : coef) c = rng.uniform(-1.0, 1.0);

    auto field_at = [&](int x, int y, int z) {
        const double u = in.nx > 1 ? 2.0 * x / (in.nx - 1) - 1.0 : 0.0;
        const double v = in.ny > 1 ? 2.0 * y / (in.ny - 1) - 1.0 : 0.0;
        const double w = in.nz > 1 ? 2.0 * z / (in.nz - 1) - 1.0 : 0.0;
        return coef[0] * u + coef[1] * v + coef[2] * w + coef[3] * u * u + coef[4] * v * v +
               coef[5] * w * w + coef[6] * u * v + coef[7] * u * w + coef[8] * v * w;
    };

    double max_abs = 0.0;
    for (int z = 0; z < in.nz; ++z)
        for (int y = 0; y < in.ny; ++y)
            for (int x = 0; x < in.nx; ++x) max_abs = std::max(max_abs, std::abs(field_at(x, y, z)));
    if (max_abs > 0.0)
        for (auto& c : coef) c /= max_abs;

    Volume out = in;
    std::size_t i = 0;
    for (int z = 0; z < in.nz; ++z)
        for (int y = 0; y < in.ny; ++y)
            for (int x = 0; x < in.nx; ++x, ++i)
                out.data[i] = static_cast<float>(in.data[i] * (1.0 + spec.severity * field_at(x, y, z)));

    nlohmann::json coef_json = nlohmann::json::object();
    for (int c = 0; c < 9; ++c) coef_json[kBasis[c]] = coef[c];
    realized = {{"coefficients", std::move(coef_json)}};
    return out;
}

}  // namespace

const char* artifact_kind_name(ArtifactKind k) { return kKindNames[static_cast<int>(k)]; }

std::optional<ArtifactKind> artifact_kind_from_name(const std::string& name) {
    for (int i = 0; i < kArtifactKindCount; ++i)
        if (name == kKindNames[i]) return static_cast<ArtifactKind>(i);
    return std::nullopt;
}

double ArtifactSpec::param_or(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void ArtifactSpec::validate() const {
    if (!(severity >= 0.0 && severity <= 1.0))
        throw Error(Errc::invalid_params, "severity must be in [0, 1]");
    const auto& allowed = kAllowedParams.at(artifact_kind_name(kind));
    for (const auto& [key, value] : params) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw Error(Errc::invalid_params, std::string("unknown parameter '") + key + "' for kind " +
                                                  artifact_kind_name(kind));
        (void)value;
    }
    switch (kind) {
        case ArtifactKind::motion:
            if (param_or("shots", 4) < 1) throw Error(Errc::invalid_params, "shots must be >= 1");
            break;
        case ArtifactKind::ghosting: {
            const double p = param_or("period", 2);
            const double off = param_or("offset", 1);
            const double g = param_or("attenuation", 0.8);
            if (p < 2) throw Error(Errc::invalid_params, "ghost period must be >= 2");
            if (off < 0 || off >= p) throw Error(Errc::invalid_params, "ghost offset must be in [0, period)");
            if (!(g > 0.0 && g <= 1.0)) throw Error(Errc::invalid_params, "attenuation must be in (0, 1]");
            break;
        }
        case ArtifactKind::aliasing:
            if (param_or("factor", 1) < 1) throw Error(Errc::invalid_params, "undersampling factor must be >= 1");
            break;
        case ArtifactKind::noise:
            if (params.count("sigma_ref") && !(params.at("sigma_ref") > 0.0))
                throw Error(Errc::invalid_params, "sigma_ref must be > 0");
            break;
        case ArtifactKind::bias_field:
            break;
    }
}

std::vector<ArtifactKind> ProvenanceRecord::kinds() const {
    std::vector<ArtifactKind> out;
    for (const auto& a : applied)
        if (!(a.realized.contains("noop") && a.realized["noop"].get<bool>())) out.push_back(a.spec.kind);
    return out;
}

double ProvenanceRecord::max_severity() const {
    double s = 0.0;
    for (const auto& a : applied) s = std::max(s, a.spec.severity);
    return s;
}

bool ProvenanceRecord::is_noop() const { return kinds().empty(); }

nlohmann::json ProvenanceRecord::to_json() const {
    nlohmann::json applied_json = nlohmann::json::array();
    for (const auto& a : applied) {
        nlohmann::json params = nlohmann::json::object();
        for (const auto& [k, v] : a.spec.params) params[k] = v;
        applied_json.push_back({{"kind", artifact_kind_name(a.spec.kind)},
                                {"severity", a.spec.severity},
                                {"seed", a.spec.seed},
                                {"params", std::move(params)},
                                {"realized", a.realized}});
    }
    return {{"dims", {nx, ny, nz}}, {"applied", std::move(applied_json)}};
}

ProvenanceRecord ProvenanceRecord::from_json(const nlohmann::json& j) {
    ProvenanceRecord rec;
    try {
        rec.nx = j.at("dims").at(0).get<int>();
        rec.ny = j.at("dims").at(1).get<int>();
        rec.nz = j.at("dims").at(2).get<int>();
        for (const auto& a : j.at("applied")) {
            AppliedArtifact entry;
            const auto kind = artifact_kind_from_name(a.at("kind").get<std::string>());
            if (!kind) throw Error(Errc::invalid_params, "unknown artifact kind in record");
            entry.spec.kind = *kind;
            entry.spec.severity = a.at("severity").get<double>();
            entry.spec.seed = a.at("seed").get<std::uint64_t>();
            for (const auto& [k, v] : a.at("params").items()) entry.spec.params[k] = v.get<double>();
            if (a.contains("realized")) entry.realized = a.at("realized");
            rec.applied.push_back(std::move(entry));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::invalid_params, std::string("malformed provenance record: ") + e.what());
    }
    return rec;
}

std::pair<Volume, ProvenanceRecord> apply_artifact(const Volume& v, const ArtifactSpec& spec) {
    v.validate();
    spec.validate();
    ProvenanceRecord rec;
    rec.nx = v.nx;
    rec.ny = v.ny;
    rec.nz = v.nz;

    AppliedArtifact entry;
    entry.spec = spec;

    if (spec.severity == 0.0) {
        entry.realized = {{"noop", true}};
        rec.applied.push_back(std::move(entry));
        return {v, std::move(rec)};
    }

    Volume out;
    switch (spec.kind) {
        case ArtifactKind::motion: out = apply_motion(v, spec, entry.realized); break;
        case ArtifactKind::ghosting: out = apply_ghosting(v, spec, entry.realized); break;
        case ArtifactKind::aliasing: out = apply_aliasing(v, spec, entry.realized); break;
        case ArtifactKind::noise: out = apply_noise(v, spec, entry.realized); break;
        case ArtifactKind::bias_field: out = apply_bias_field(v, spec, entry.realized); break;
        default: throw Error(Errc::invalid_params, "unknown artifact kind");
    }
    rec.applied.push_back(std::move(entry));
    return {std::move(out), std::move(rec)};
}

std::pair<Volume, ProvenanceRecord> apply_artifacts(const Volume& v, const std::vector<ArtifactSpec>& specs) {
    Volume current = v;
    ProvenanceRecord rec;
    rec.nx = v.nx;
    rec.ny = v.ny;
    rec.nz = v.nz;
    for (const auto& spec : specs) {
        auto [next, one] = apply_artifact(current, spec);
        current = std::move(next);
        rec.applied.push_back(std::move(one.applied.front()));
    }
    return {std::move(current), std::move(rec)};
}

Volume replay(const Volume& clean, const ProvenanceRecord& rec) {
    if (clean.nx != rec.nx || clean.ny != rec.ny || clean.nz != rec.nz)
        throw Error(Errc::dim_mismatch, "record was produced from a volume with different dims");
    Volume current = clean;
    for (const auto& entry : rec.applied) {
        auto [next, one] = apply_artifact(current, entry.spec);
        current = std::move(next);
        (void)one;
    }
    return current;
}

}  // namespace mriq
