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

#include "oamma/commands.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace oamma
{
    namespace
    {
        constexpr double deg = pi / 180.0;

        SelftestCheck geometry_identity(const SelftestOptions &options)
        {
            std::mt19937_64 rng(20240501);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            double worst = 0.0;
            for (int trial = 0; trial < 1000; ++trial)
            {
                const int k_count = 1 + int(unit(rng) * 32);
                const int v_count = 1 + int(unit(rng) * 32);
                const UcaPairConfig cfg = make_uca_pair(k_count, v_count, 0.05 + 2.0 * unit(rng), 0.05 + 2.0 * unit(rng),
                                                        two_pi * unit(rng), two_pi * unit(rng));
                const Pose pose = make_pose(0.1 + 20.0 * unit(rng), two_pi * unit(rng), 0.49 * pi * unit(rng));
                const int v = std::min(v_count - 1, int(unit(rng) * v_count));
                const int k = std::min(k_count - 1, int(unit(rng) * k_count));

                TermTriple t = term_triple(cfg, pose, v, k);
                if (options.flip_cross_term_sign)
                    t.b = -t.b;
                const double exact = exact_distance(cfg, pose, v, k);
                const double decomposed = pose.distance * pose.distance + cfg.tx_radius * cfg.tx_radius +
                                          cfg.rx_radius * cfg.rx_radius + 2.0 * t.sum();
                worst = std::max(worst, std::abs(exact * exact - decomposed) / (exact * exact));
            }
            return {"geometry_identity", worst <= 1e-12, "max relative error " + format_double(worst)};
        }

        SelftestCheck circulant()
        {
            const LinkBudget link = make_link(5.8e9);
            double worst = 0.0;
            for (int n : {4, 8, 16})
            {
                const UcaPairConfig cfg = make_uca_pair(n, n, 0.5, 0.5);
                const Pose pose = make_pose(20.0 * link.wavelength, 0.0, 0.0);
                worst = std::max(worst, offdiagonal_leakage(mode_coupling(build_matrix(cfg, pose, link, ChannelModel::farfield))));
            }
            return {"circulant_diagonalization", worst <= 1e-10, "max off-diagonal leakage " + format_double(worst)};
        }

        SelftestCheck estimator_round_trip()
        {
            const LinkBudget link = make_link(5.8e9);
            EstimationScenario sc;
            sc.cfg = make_uca_pair(8, 8, 0.5, 0.5);
            sc.link = link;
            double worst = 0.0;
            for (const auto &[theta, phi] : {std::pair{40.0, 1.0}, std::pair{200.0, 0.5}, std::pair{300.0, 1.4}})
            {
                sc.pose = make_pose(20.0 * link.wavelength, theta * deg, phi * deg);
                const ChannelMatrix h = build_matrix(sc.cfg, sc.pose, link, ChannelModel::farfield);
                for (const AngleEstimate &est : {closed_form_angles(h, sc), nls_angles(h, sc)})
                {
                    worst = std::max(worst, std::abs(wrap_pi(est.theta_hat - sc.pose.theta)));
                    worst = std::max(worst, std::abs(est.phi_hat - sc.pose.phi));
                }
            }
            return {"estimator_round_trip", worst <= 1e-8, "max angle error " + format_double(worst) + " rad"};
        }

        SelftestCheck parseval()
        {
            std::mt19937_64 rng(7);
            std::normal_distribution<double> n01;
            double worst = 0.0;
            for (int k : {1, 4, 8, 16})
            {
                const UcaPairConfig cfg = make_uca_pair(k, k, 0.5, 0.5, 0.3, 0.3);
                CVector s(k);
                for (int l = 0; l < k; ++l)
                    s(l) = {n01(rng), n01(rng)};
                const CVector x = modulate(s, cfg);
                worst = std::max(worst, std::abs(x.squaredNorm() - s.squaredNorm()) / s.squaredNorm());
            }
            return {"parseval", worst <= 1e-12, "max relative energy mismatch " + format_double(worst)};
        }

        SelftestCheck lmmse_noiseless()
        {
            const LinkBudget link = make_link(5.8e9);
            const UcaPairConfig cfg = make_uca_pair(8, 8, 0.5, 0.5);
            const Pose pose = make_pose(20.0 * link.wavelength, 1.0, 2.0 * deg);
            const ChannelMatrix h = build_matrix(cfg, pose, link, ChannelModel::exact);
            const CMatrix x = pilot_matrix(cfg, 0.125);
            const CMatrix y = transmit_pilots(h, x, NoiseSpec{0.0, 1});
            const ChannelMatrix h_hat = lmmse_estimate(y, x, 0.0, farfield_entry_power(link, pose.distance));
            const double err = (h_hat.entries - h.entries).cwiseAbs().maxCoeff() / h.entries.cwiseAbs().maxCoeff();
            return {"lmmse_noiseless", err <= 1e-12, "max relative entry error " + format_double(err)};
        }
    } // namespace

    std::vector<SelftestCheck> cmd_selftest(const SelftestOptions &options)
    {
        return {geometry_identity(options), circulant(), estimator_round_trip(), parseval(), lmmse_noiseless()};
    }

} // namespace oamma
