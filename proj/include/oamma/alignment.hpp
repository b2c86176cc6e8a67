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

#ifndef OAMMA_ALIGNMENT_HPP
#define OAMMA_ALIGNMENT_HPP

#include "oamma/estimation.hpp"
#include "oamma/metrics.hpp"
#include "oamma/oam_signal.hpp"

#include <string_view>
#include <vector>

namespace oamma
{
    enum class EstimatorChoice
    {
        automatic,   // closed form when K, V divisible by 4; NLS when it is ambiguous
        closed_form, // closed form only, ambiguous results are fed back as-is
        nls
    };

    std::string_view to_string(EstimatorChoice choice);
    EstimatorChoice parse_estimator_choice(std::string_view name); // "auto" | "closed_form" | "nls"

    struct LoopOptions
    {
        EstimatorChoice estimator = EstimatorChoice::automatic;
        SeVariant se_variant = SeVariant::sinr;
        double total_power = 1.0;          // data-phase transmit power, split equally across modes [W]
        double data_noise_variance = 0.0;  // sigma^2 for the SE evaluation; <= 0 selects scenario.link.noise_variance
        int max_iterations = 1;            // 1..5
        double tolerance = 1e-4;           // stop once the residual tilt drops below this [rad]
        int quantizer_bits = 0;            // 0 = ideal feedback
    };

    struct LoopReport
    {
        AngleEstimate estimate;              // first-round estimate, against the true pose
        std::vector<AngleEstimate> history;  // one per iteration
        Pose corrected_pose;                 // residual pose after the last correction
        double residual_angle = 0.0;         // [rad]
        double se_before = 0.0;              // bit/s/Hz
        double se_after = 0.0;
        SeBreakdown before;
        SeBreakdown after;
        int iterations = 0;
    };

    // Uniform feedback quantizer: 2^bits levels on [0, 2*pi) for theta and on [0, pi/2) for phi.
    AngleEstimate quantize_feedback(const AngleEstimate &est, int bits);

    // Rotates the transmit boresight onto the estimated direction and returns the pose of the
    // receive array in the corrected frame. d is unchanged.
    Pose apply_ma_correction(const Pose &pose, const AngleEstimate &est);

    // Runs the chosen estimator(s) on a channel estimate.
    AngleEstimate estimate_angles(const ChannelMatrix &h_hat, const EstimationScenario &scenario,
                                  EstimatorChoice choice);

    // Build channel -> pilots -> LMMSE -> angles -> correction -> rebuild -> SE before/after.
    // noise.variance is the pilot-phase noise; its seed keys every pilot sample.
    LoopReport run_closed_loop(const EstimationScenario &scenario, const NoiseSpec &noise, ChannelModel model,
                               const LoopOptions &options = {});

} // namespace oamma

#endif
