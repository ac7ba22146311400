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

#include "mriq/lora.hpp"

#include <algorithm>
#include <cmath>

#include "mriq/rng.hpp"

namespace mriq {

namespace {

constexpr int kGradCheckMaxDim = 32;

double loss_at(const LoraAdapter& ad, const Eigen::VectorXd& x, const Eigen::VectorXd& target) {
    const Eigen::VectorXd e = forward(ad, x) - target;
    return e.squaredNorm();
}

}  // namespace

void LoraAdapter::validate() const {
    if (rank < 1) throw Error(Errc::invalid_params, "rank must be positive");
    if (!(alpha > 0.0)) throw Error(Errc::invalid_params, "alpha must be positive");
    if (w0.rows() < 1 || w0.cols() < 1) throw Error(Errc::shape_mismatch, "W0 must be non-empty");
    if (a.rows() != rank || a.cols() != w0.cols())
        throw Error(Errc::shape_mismatch, "A must be rank x d_in");
    if (b.rows() != w0.rows() || b.cols() != rank)
        throw Error(Errc::shape_mismatch, "B must be d_out x rank");
    if (rank > std::min(w0.rows(), w0.cols()))
        throw Error(Errc::invalid_params, "rank must not exceed min(d_in, d_out)");
}

LoraAdapter init_adapter(Eigen::MatrixXd w0, int rank, double alpha, std::uint64_t seed) {
    LoraAdapter ad;
    ad.rank = rank;
    ad.alpha = alpha;
    ad.a = Eigen::MatrixXd(rank, w0.cols());
    ad.b = Eigen::MatrixXd::Zero(w0.rows(), rank);
    Rng rng(mix_seed(seed));
    const double scale = 1.0 / std::sqrt(static_cast<double>(w0.cols()));
    for (Eigen::Index i = 0; i < ad.a.rows(); ++i)
        for (Eigen::Index j = 0; j < ad.a.cols(); ++j) ad.a(i, j) = rng.uniform(-0.5, 0.5) * scale;
    ad.w0 = std::move(w0);
    ad.validate();
    return ad;
}

Eigen::MatrixXd merge(const LoraAdapter& ad) {
    ad.validate();
    return ad.w0 + ad.scaling() * (ad.b * ad.a);
}

Eigen::VectorXd forward(const LoraAdapter& ad, const Eigen::VectorXd& x) {
    ad.validate();
    if (x.size() != ad.w0.cols()) throw Error(Errc::shape_mismatch, "x must have d_in entries");
    return ad.w0 * x + ad.scaling() * (ad.b * (ad.a * x));
}

double trainable_fraction(int d_in, int d_out, int rank) {
    if (d_in < 1 || d_out < 1) throw Error(Errc::invalid_params, "dims must be positive");
    if (rank < 1 || rank > std::min(d_in, d_out))
        throw Error(Errc::invalid_params, "rank must be in [1, min(d_in, d_out)]");
    return static_cast<double>(rank) * (static_cast<double>(d_in) + static_cast<double>(d_out)) /
           (static_cast<double>(d_in) * static_cast<double>(d_out));
}

void loss_gradients(const LoraAdapter& ad, const Eigen::VectorXd& x, const Eigen::VectorXd& target,
                    Eigen::MatrixXd& grad_a, Eigen::MatrixXd& grad_b) {
    ad.validate();
    if (target.size() != ad.w0.rows()) throw Error(Errc::shape_mismatch, "target must have d_out entries");
    const Eigen::VectorXd residual = 2.0 * (forward(ad, x) - target);
    const double s = ad.scaling();
    grad_b = s * residual * (ad.a * x).transpose();
    grad_a = s * (ad.b.transpose() * residual) * x.transpose();
}

GradCheckReport grad_check(const LoraAdapter& ad, const Eigen::VectorXd& x, const Eigen::VectorXd& target,
                           double epsilon, double tolerance) {
    ad.validate();
    if (ad.d_in() > kGradCheckMaxDim || ad.d_out() > kGradCheckMaxDim)
        throw Error(Errc::invalid_params, "grad_check is a desk-scale tool: dims must be <= 32");
    if (!(epsilon > 0.0)) throw Error(Errc::invalid_params, "epsilon must be > 0");

    Eigen::MatrixXd grad_a, grad_b;
    loss_gradients(ad, x, target, grad_a, grad_b);

    const double scale = std::max({1.0, grad_a.cwiseAbs().maxCoeff(), grad_b.cwiseAbs().maxCoeff()});

    auto fd_check = [&](Eigen::MatrixXd LoraAdapter::* field, const Eigen::MatrixXd& analytic) {
        LoraAdapter probe = ad;
        double worst = 0.0;
        Eigen::MatrixXd& theta = probe.*field;
        for (Eigen::Index i = 0; i < theta.rows(); ++i) {
            for (Eigen::Index j = 0; j < theta.cols(); ++j) {
                const double saved = theta(i, j);
                theta(i, j) = saved + epsilon;
                const double up = loss_at(probe, x, target);
                theta(i, j) = saved - epsilon;
                const double down = loss_at(probe, x, target);
                theta(i, j) = saved;
                const double fd = (up - down) / (2.0 * epsilon);
                const double an = analytic(i, j);
                const double denom = std::max({std::abs(fd), std::abs(an), 1e-8 * scale});
                worst = std::max(worst, std::abs(fd - an) / denom);
            }
        }
        return worst;
    };

    GradCheckReport report;
    report.epsilon = epsilon;
    report.tolerance = tolerance;
    report.max_rel_err_a = fd_check(&LoraAdapter::a, grad_a);
    report.max_rel_err_b = fd_check(&LoraAdapter::b, grad_b);
    report.grad_norm = std::sqrt(grad_a.squaredNorm() + grad_b.squaredNorm());
    report.passed = report.max_rel_err_a <= tolerance && report.max_rel_err_b <= tolerance;
    return report;
}

}  // namespace mriq
