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

#include "oamma/alignment.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>
#include <string>

namespace oamma
{
    std::string_view to_string(EstimatorChoice choice)
    {
        switch (choice)
        {
        case EstimatorChoice::automatic:
            return "auto";
        case EstimatorChoice::closed_form:
            return "closed_form";
        case EstimatorChoice::nls:
            return "nls";
        }
        return "unknown";
    }

    EstimatorChoice parse_estimator_choice(std::string_view name)
    {
        if (name == "auto")
            return EstimatorChoice::automatic;
        if (name == "closed_form")
            return EstimatorChoice::closed_form;
        if (name == "nls")
            return EstimatorChoice::nls;
        throw std::invalid_argument("unknown estimator '" + std::string(name) + "' (expected auto|closed_form|nls)");
    }

    AngleEstimate quantize_feedback(const AngleEstimate &est, int bits)
    {
        if (bits < 0 || bits > 52)
            throw std::invalid_argument("quantizer bit width must lie in [0, 52]");
        if (bits == 0)
            return est;
        const double levels = std::ldexp(1.0, bits);
        AngleEstimate q = est;
        const double theta_step = two_pi / levels;
        q.theta_hat = wrap_two_pi(std::round(est.theta_hat / theta_step) * theta_step);
        const double phi_step = 0.5 * pi / levels;
        q.phi_hat = std::min(std::round(est.phi_hat / phi_step), levels - 1.0) * phi_step;
        return q;
    }

    Pose apply_ma_correction(const Pose &pose, const AngleEstimate &est)
    {
        if (!(est.phi_hat >= 0.0 && est.phi_hat < 0.5 * pi))
            throw std::invalid_argument("apply_ma_correction: estimated tilt outside [0, pi/2)");
        if (est.phi_hat == 0.0)
            return pose;

        const Vec3 target = boresight(est.theta_hat, est.phi_hat);
        const Eigen::Quaterniond rot = Eigen::Quaterniond::FromTwoVectors(target, Vec3::UnitZ());
        const Vec3 u = rot * boresight(pose.theta, pose.phi);

        const double phi = std::atan2(std::hypot(u.x(), u.y()), u.z());
        if (!(phi < 0.5 * pi))
            throw std::domain_error("apply_ma_correction: corrected link points away from the receive array");
        const double theta = phi > 0.0 ? std::atan2(u.y(), u.x()) : 0.0;
        return make_pose(pose.distance, theta, phi);
    }

    AngleEstimate estimate_angles(const ChannelMatrix &h_hat, const EstimationScenario &scenario,
                                  EstimatorChoice choice)
    {
        const bool closed_ok = scenario.cfg.tx_elements % 4 == 0 && scenario.cfg.rx_elements % 4 == 0 &&
                               std::abs(wrap_pi(scenario.cfg.tx_rotation - scenario.reference_rotation)) <= 1e-12 &&
                               std::abs(wrap_pi(scenario.cfg.rx_rotation - scenario.reference_rotation)) <= 1e-12;
        switch (choice)
        {
        case EstimatorChoice::closed_form:
            return closed_form_angles(h_hat, scenario);
        case EstimatorChoice::nls:
            return nls_angles(h_hat, scenario);
        case EstimatorChoice::automatic:
            break;
        }
        if (!closed_ok)
            return nls_angles(h_hat, scenario);
        AngleEstimate est = closed_form_angles(h_hat, scenario);
        // A degenerate (aligned) fit is trusted as long as the model matches
        if (est.ambiguous && !(est.phi_hat == 0.0 && est.residual <= residual_tolerance(scenario)))
            est = nls_angles(h_hat, scenario);
        return est;
    }

    LoopReport run_closed_loop(const EstimationScenario &scenario, const NoiseSpec &noise, ChannelModel model,
                               const LoopOptions &options)
    {
        if (options.max_iterations < 1 || options.max_iterations > 5)
            throw std::invalid_argument("run_closed_loop: max_iterations must lie in [1, 5]");
        if (!(options.total_power > 0.0))
            throw std::invalid_argument("run_closed_loop: total power must be positive");

        EstimationScenario sc = scenario;
        sc.pilot_noise_variance = noise.variance;
        if (!(sc.prior_power > 0.0))
            sc.prior_power = farfield_entry_power(sc.link, sc.pose.distance);

        const double sigma2 = options.data_noise_variance > 0.0 ? options.data_noise_variance : sc.link.noise_variance;
        const std::vector<double> powers = equal_power(sc.cfg.tx_elements, options.total_power);
        const CMatrix pilots = pilot_matrix(sc.cfg, sc.pilot_power);

        LoopReport rep;
        rep.before = spectrum_efficiency(build_matrix(sc.cfg, sc.pose, sc.link, model), options.se_variant, powers, sigma2);
        rep.se_before = rep.before.total;

        Pose current = sc.pose;
        for (int it = 0; it < options.max_iterations; ++it)
        {
            const ChannelMatrix h = build_matrix(sc.cfg, current, sc.link, model);
            const std::uint64_t first_slot = std::uint64_t(it) * std::uint64_t(sc.cfg.tx_elements);
            const CMatrix y = transmit_pilots(h, pilots, noise, first_slot);
            ChannelMatrix h_hat = lmmse_estimate(y, pilots, noise.variance, sc.prior_power);
            h_hat.cfg = sc.cfg;
            h_hat.link = sc.link;

            AngleEstimate est = quantize_feedback(estimate_angles(h_hat, sc, options.estimator), options.quantizer_bits);
            rep.history.push_back(est);
            current = apply_ma_correction(current, est);
            ++rep.iterations;
            if (current.phi < options.tolerance)
                break;
        }

        rep.estimate = rep.history.front();
        rep.corrected_pose = current;
        rep.residual_angle = current.phi;
        rep.after = spectrum_efficiency(build_matrix(sc.cfg, current, sc.link, model), options.se_variant, powers, sigma2);
        rep.se_after = rep.after.total;
        return rep;
    }

} // namespace oamma
