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

#include "oamma/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace oamma
{
    LinkBudget make_link(double frequency, cdouble beta, double noise_variance)
    {
        if (!(frequency > 0.0) || !std::isfinite(frequency))
            throw std::invalid_argument("carrier frequency must be positive and finite");
        if (std::abs(beta) == 0.0 || !std::isfinite(beta.real()) || !std::isfinite(beta.imag()))
            throw std::invalid_argument("beta must be a finite nonzero complex constant");
        if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
            throw std::invalid_argument("noise variance must be finite and >= 0");
        return LinkBudget{frequency, speed_of_light / frequency, beta, noise_variance};
    }

    std::string_view to_string(ChannelModel model)
    {
        switch (model)
        {
        case ChannelModel::exact:
            return "exact";
        case ChannelModel::farfield:
            return "farfield";
        case ChannelModel::estimated:
            return "estimated";
        }
        return "unknown";
    }

    ChannelModel parse_channel_model(std::string_view name)
    {
        if (name == "exact")
            return ChannelModel::exact;
        if (name == "farfield")
            return ChannelModel::farfield;
        throw std::invalid_argument("unknown channel model '" + std::string(name) + "' (expected exact|farfield)");
    }

    ChannelConstants channel_constants(const UcaPairConfig &cfg, const Pose &pose, const LinkBudget &link)
    {
        const double s = reference_distance(cfg, pose.distance);
        const double lambda = link.wavelength;
        const cdouble d_const = link.beta * lambda / (4.0 * pi * pose.distance) * std::polar(1.0, -two_pi * s / lambda);
        const cdouble f_const{0.0, -two_pi / (lambda * s)};
        return {d_const, f_const};
    }

    cdouble gain_exact(const UcaPairConfig &cfg, const Pose &pose, const LinkBudget &link, int v, int k)
    {
        const double dist = exact_distance(cfg, pose, v, k);
        const double lambda = link.wavelength;
        return link.beta * lambda / (4.0 * pi * dist) * std::polar(1.0, -two_pi * dist / lambda);
    }

    cdouble gain_farfield(const UcaPairConfig &cfg, const Pose &pose, const LinkBudget &link, int v, int k)
    {
        const ChannelConstants cc = channel_constants(cfg, pose, link);
        return cc.d_const * std::exp(cc.f_const * term_triple(cfg, pose, v, k).sum());
    }

    ChannelMatrix build_matrix(const UcaPairConfig &cfg, const Pose &pose, const LinkBudget &link, ChannelModel model)
    {
        ChannelMatrix h;
        h.model = model;
        h.cfg = cfg;
        h.pose = pose;
        h.link = link;
        h.entries.resize(cfg.rx_elements, cfg.tx_elements);

        switch (model)
        {
        case ChannelModel::exact:
            for (int v = 0; v < cfg.rx_elements; ++v)
                for (int k = 0; k < cfg.tx_elements; ++k)
                    h.entries(v, k) = gain_exact(cfg, pose, link, v, k);
            break;
        case ChannelModel::farfield:
        {
            const ChannelConstants cc = channel_constants(cfg, pose, link);
            for (int v = 0; v < cfg.rx_elements; ++v)
                for (int k = 0; k < cfg.tx_elements; ++k)
                    h.entries(v, k) = cc.d_const * std::exp(cc.f_const * term_triple(cfg, pose, v, k).sum());
            break;
        }
        case ChannelModel::estimated:
            throw std::invalid_argument("build_matrix: an estimated channel cannot be synthesized");
        }
        return h;
    }

    static CMatrix steering(int n, double rotation)
    {
        CMatrix w(n, n);
        const double scale = 1.0 / std::sqrt(double(n));
        for (int e = 0; e < n; ++e)
        {
            const double az = two_pi * double(e) / double(n) + rotation;
            for (int l = 0; l < n; ++l)
                w(e, l) = std::polar(scale, az * double(l));
        }
        return w;
    }

    CMatrix tx_steering(const UcaPairConfig &cfg)
    {
        return steering(cfg.tx_elements, cfg.tx_rotation);
    }

    CMatrix rx_steering(const UcaPairConfig &cfg)
    {
        return steering(cfg.rx_elements, cfg.rx_rotation);
    }

    CMatrix mode_effective_gains(const ChannelMatrix &h)
    {
        if (h.entries.cols() != h.cfg.tx_elements)
            throw std::invalid_argument("mode_effective_gains: channel column count does not match K");
        return h.entries * tx_steering(h.cfg);
    }

    CMatrix mode_coupling(const ChannelMatrix &h)
    {
        return rx_steering(h.cfg).adjoint() * mode_effective_gains(h);
    }

    double offdiagonal_leakage(const CMatrix &m)
    {
        double diag = 0.0;
        double off = 0.0;
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
            {
                const double a = std::abs(m(i, j));
                if (i == j)
                    diag = std::max(diag, a);
                else
                    off = std::max(off, a);
            }
        return diag > 0.0 ? off / diag : (off > 0.0 ? INFINITY : 0.0);
    }

} // namespace oamma
