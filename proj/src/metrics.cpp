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

#include "oamma/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace oamma
{
    std::string_view to_string(SeVariant variant)
    {
        return variant == SeVariant::paper ? "paper" : "sinr";
    }

    SeVariant parse_se_variant(std::string_view name)
    {
        if (name == "paper")
            return SeVariant::paper;
        if (name == "sinr")
            return SeVariant::sinr;
        throw std::invalid_argument("unknown SE variant '" + std::string(name) + "' (expected paper|sinr)");
    }

    std::vector<double> equal_power(int modes, double total)
    {
        if (modes < 1)
            throw std::invalid_argument("equal_power: need at least one mode");
        return std::vector<double>(std::size_t(modes), total / double(modes));
    }

    SeBreakdown se_paper(const CMatrix &mode_gains, std::span<const double> powers, std::span<const double> sigma_l2)
    {
        const auto modes = std::size_t(mode_gains.cols());
        if (powers.size() != modes || sigma_l2.size() != modes)
            throw std::invalid_argument("se_paper: power and noise vectors must have one entry per mode");

        SeBreakdown se;
        se.variant = SeVariant::paper;
        se.per_mode.resize(modes);
        for (std::size_t l = 0; l < modes; ++l)
        {
            if (!(sigma_l2[l] > 0.0))
                throw std::invalid_argument("se_paper: per-mode noise variance must be positive");
            const double gain = mode_gains.col(Eigen::Index(l)).squaredNorm();
            se.per_mode[l] = std::log2(1.0 + powers[l] * gain / sigma_l2[l]);
            se.total += se.per_mode[l];
        }
        return se;
    }

    SeBreakdown se_sinr(const ChannelMatrix &h, std::span<const double> powers, double sigma2)
    {
        if (h.cfg.tx_elements != h.cfg.rx_elements)
            throw std::invalid_argument("se_sinr: mode-by-mode detection needs K == V");
        if (!(sigma2 > 0.0))
            throw std::invalid_argument("se_sinr: noise variance must be positive");
        const auto modes = std::size_t(h.cfg.tx_elements);
        if (powers.size() != modes)
            throw std::invalid_argument("se_sinr: power vector must have one entry per mode");

        const CMatrix g = mode_coupling(h);
        SeBreakdown se;
        se.variant = SeVariant::sinr;
        se.per_mode.resize(modes);
        for (std::size_t l = 0; l < modes; ++l)
        {
            double signal = 0.0;
            double interference = 0.0;
            for (std::size_t m = 0; m < modes; ++m)
            {
                const double p = powers[m] * std::norm(g(Eigen::Index(l), Eigen::Index(m)));
                (m == l ? signal : interference) += p;
            }
            se.per_mode[l] = std::log2(1.0 + signal / (interference + sigma2));
            se.total += se.per_mode[l];
        }
        return se;
    }

    SeBreakdown spectrum_efficiency(const ChannelMatrix &h, SeVariant variant, std::span<const double> powers,
                                    double sigma2)
    {
        if (variant == SeVariant::sinr)
            return se_sinr(h, powers, sigma2);
        const std::vector<double> noise(powers.size(), sigma2);
        return se_paper(mode_effective_gains(h), powers, noise);
    }

    ApproximationReport approximation_report(const UcaPairConfig &cfg, const Pose &pose, const LinkBudget &link)
    {
        ApproximationReport rep;
        double phase_sum = 0.0;
        for (int v = 0; v < cfg.rx_elements; ++v)
            for (int k = 0; k < cfg.tx_elements; ++k)
            {
                const double exact = exact_distance(cfg, pose, v, k);
                const double approx = approx_distance(cfg, pose, v, k);
                rep.max_rel_distance_error = std::max(rep.max_rel_distance_error, std::abs(approx - exact) / exact);

                const cdouble g_exact = gain_exact(cfg, pose, link, v, k);
                const cdouble g_far = gain_farfield(cfg, pose, link, v, k);
                rep.max_rel_gain_error = std::max(rep.max_rel_gain_error, std::abs(g_far - g_exact) / std::abs(g_exact));
                phase_sum += std::abs(wrap_pi(std::arg(g_far) - std::arg(g_exact)));
            }
        rep.mean_phase_error = phase_sum / double(cfg.rx_elements * cfg.tx_elements);
        return rep;
    }

} // namespace oamma
