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

#ifndef OAMMA_METRICS_HPP
#define OAMMA_METRICS_HPP

#include "oamma/channel.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace oamma
{
    enum class SeVariant
    {
        paper, // sum_l log2(1 + P_l sum_v |h_vl|^2 / sigma_l^2), no inter-mode interference
        sinr   // per-mode SINR after receive DFT, leakage counted as interference
    };

    std::string_view to_string(SeVariant variant);
    SeVariant parse_se_variant(std::string_view name); // "paper" | "sinr"

    struct SeBreakdown
    {
        std::vector<double> per_mode; // bit/s/Hz
        double total = 0.0;
        SeVariant variant = SeVariant::sinr;
    };

    // P_l = total / K
    std::vector<double> equal_power(int modes, double total);

    SeBreakdown se_paper(const CMatrix &mode_gains, std::span<const double> powers, std::span<const double> sigma_l2);

    // Requires K == V.
    SeBreakdown se_sinr(const ChannelMatrix &h, std::span<const double> powers, double sigma2);

    // Dispatches on the variant; the paper variant uses sigma_l^2 = sigma2 for every mode.
    SeBreakdown spectrum_efficiency(const ChannelMatrix &h, SeVariant variant, std::span<const double> powers,
                                    double sigma2);

    struct ApproximationReport
    {
        double max_rel_distance_error = 0.0;
        double max_rel_gain_error = 0.0;
        double mean_phase_error = 0.0; // rad, mean of |wrapped phase difference|
    };

    // Exact versus far-field comparison over every (v, k) pair.
    ApproximationReport approximation_report(const UcaPairConfig &cfg, const Pose &pose, const LinkBudget &link);

} // namespace oamma

#endif
