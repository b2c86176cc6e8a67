// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef OAMMA_ESTIMATION_HPP
#define OAMMA_ESTIMATION_HPP

#include "oamma/channel.hpp"

#include <string_view>

namespace oamma
{
    enum class EstimatorMethod
    {
        closed_form,
        nls
    };

    std::string_view to_string(EstimatorMethod method);

    struct AngleEstimate
    {
        double theta_hat = 0.0; // [0, 2*pi)
        double phi_hat = 0.0;   // [0, pi/2)
        double residual = 0.0;  // ||H_hat - H_model||_F / ||H_hat||_F
        bool ambiguous = false; // theta unobservable, or the fit left its unambiguous range
        EstimatorMethod method = EstimatorMethod::closed_form;
    };

    // Everything the receiver is assumed to know. Only (theta, phi) of the pose are unknown;
    // pose.distance is used, pose angles are never read by the estimators.
    struct EstimationScenario
    {
        UcaPairConfig cfg;
        Pose pose;
        LinkBudget link;
        double pilot_power = 1.0;          // per element and slot [W]
        double pilot_noise_variance = 0.0; // sigma^2 seen during the pilot phase [W]
        double reference_rotation = 0.0;   // a = a_r = a_t [rad]
        double prior_power = 0.0;          // LMMSE prior per entry; <= 0 selects the far-field entry power
        double nls_phi_max = 0.0;          // upper end of the NLS tilt grid; <= 0 selects 4x the ambiguity bound
    };

    // |beta|^2 lambda^2 / (4 pi d)^2
    double farfield_entry_power(const LinkBudget &link, double distance);

    // H_hat = Y X^H (X X^H + (sigma2 / prior_power) I)^-1
    ChannelMatrix lmmse_estimate(const CMatrix &received, const CMatrix &pilots, double sigma2, double prior_power);

    // Two-probe closed form; requires K and V divisible by 4 and a_t == a_r == reference_rotation.
    AngleEstimate closed_form_angles(const ChannelMatrix &h_hat, const EstimationScenario &scenario);

    // Grid search (720 x 200) plus golden-section refinement of the far-field model fit.
    AngleEstimate nls_angles(const ChannelMatrix &h_hat, const EstimationScenario &scenario);

    // Largest tilt for which both closed-form probes stay on the principal log branch:
    // asin(lambda S / (2 d (R_t + R_r))), clamped to pi/2.
    double ambiguity_bound(const UcaPairConfig &cfg, const LinkBudget &link, double distance);

    // Relative Frobenius misfit of the far-field model at (theta, phi).
    double model_residual(const ChannelMatrix &h_hat, const EstimationScenario &scenario, double theta, double phi);

    // Residual above which a closed-form fit is treated as off-branch, given the pilot noise level.
    double residual_tolerance(const EstimationScenario &scenario);

} // namespace oamma

#endif
