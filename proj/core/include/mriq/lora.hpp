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

#include <Eigen/Dense>
#include <cstdint>

#include "mriq/error.hpp"

namespace mriq {

/// Low-rank adapter around a frozen weight matrix: the effective weight is
/// W0 + (alpha/rank) * B * A. B starts at zero in the standard
/// initialization, so the update begins as the identity.
struct LoraAdapter {
    Eigen::MatrixXd w0;  // d_out x d_in, frozen
    Eigen::MatrixXd a;   // rank x d_in
    Eigen::MatrixXd b;   // d_out x rank
    int rank = 0;
    double alpha = 0.0;

    int d_in() const { return static_cast<int>(w0.cols()); }
    int d_out() const { return static_cast<int>(w0.rows()); }
    double scaling() const { return alpha / static_cast<double>(rank); }

    /// Throws shape_mismatch / invalid_params on inconsistent shapes,
    /// rank > min(d_in, d_out), or non-positive rank/alpha.
    void validate() const;
};

/// W0 with A small uniform in [-0.5, 0.5]/sqrt(d_in) and B = 0.
LoraAdapter init_adapter(Eigen::MatrixXd w0, int rank, double alpha, std::uint64_t seed);

/// Dense effective weight W0 + (alpha/rank) * B * A.
Eigen::MatrixXd merge(const LoraAdapter& ad);

/// Factored application W0*x + (alpha/rank) * B * (A*x); never forms B*A.
Eigen::VectorXd forward(const LoraAdapter& ad, const Eigen::VectorXd& x);

/// r*(d_in + d_out) / (d_in * d_out): adapter parameters over dense ones.
double trainable_fraction(int d_in, int d_out, int rank);

/// Finite-difference check of the analytic gradients of
/// L = || forward(ad, x) - target ||^2 with respect to A and B (W0 is
/// frozen and gets no gradient). Central differences with step epsilon.
struct GradCheckReport {
    double max_rel_err_a = 0.0;
    double max_rel_err_b = 0.0;
    double grad_norm = 0.0;  // Frobenius norm over both analytic gradients
    double epsilon = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

GradCheckReport grad_check(const LoraAdapter& ad, const Eigen::VectorXd& x, const Eigen::VectorXd& target,
                           double epsilon = 1e-5, double tolerance = 1e-4);

/// Analytic gradients used by grad_check; exposed so tests can probe them
/// directly.
void loss_gradients(const LoraAdapter& ad, const Eigen::VectorXd& x, const Eigen::VectorXd& target,
                    Eigen::MatrixXd& grad_a, Eigen::MatrixXd& grad_b);

}  // namespace mriq
