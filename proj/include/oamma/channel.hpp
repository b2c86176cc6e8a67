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

#ifndef OAMMA_CHANNEL_HPP
#define OAMMA_CHANNEL_HPP

#include "oamma/geometry.hpp"

#include <complex>
#include <string_view>

namespace oamma
{
    using cdouble = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    using CVector = Eigen::VectorXcd;

    inline constexpr double speed_of_light = 299792458.0; // m/s

    struct LinkBudget
    {
        double frequency = 5.8e9;           // Hz
        double wavelength = speed_of_light / 5.8e9; // m, always c / frequency
        cdouble beta{1.0, 0.0};             // antenna constant
        double noise_variance = 0.0;        // per receive element [W]
    };

    // Throws std::invalid_argument on f <= 0, beta == 0 or negative noise variance.
    LinkBudget make_link(double frequency, cdouble beta = {1.0, 0.0}, double noise_variance = 0.0);

    // Far-field constants: D = beta*lambda/(4*pi*d) * exp(-j*2*pi*S/lambda), F = -j*2*pi/(lambda*S).
    struct ChannelConstants
    {
        cdouble d_const;
        cdouble f_const;
    };

    enum class ChannelModel
    {
        exact,
        farfield,
        estimated
    };

    std::string_view to_string(ChannelModel model);
    ChannelModel parse_channel_model(std::string_view name); // "exact" | "farfield"

    struct ChannelMatrix
    {
        CMatrix entries; // V x K, row = receive element, column = transmit element
        ChannelModel model = ChannelModel::exact;
        UcaPairConfig cfg;
        Pose pose;
        LinkBudget link;
    };

    ChannelConstants channel_constants(const UcaPairConfig &cfg, const Pose &pose, const LinkBudget &link);

    // Free-space gain over the exact element-to-element distance.
    cdouble gain_exact(const UcaPairConfig &cfg, const Pose &pose, const LinkBudget &link, int v, int k);

    // D * exp(F * (a + b + c)); unit-modulus up to |D|.
    cdouble gain_farfield(const UcaPairConfig &cfg, const Pose &pose, const LinkBudget &link, int v, int k);

    ChannelMatrix build_matrix(const UcaPairConfig &cfg, const Pose &pose, const LinkBudget &link, ChannelModel model);

    // Transmit OAM steering matrix, K x K unitary: W[k, l] = exp(j (phi_k + a_t) l) / sqrt(K).
    CMatrix tx_steering(const UcaPairConfig &cfg);

    // Receive OAM steering matrix, V x V unitary: W[v, m] = exp(j (psi_v + a_r) m) / sqrt(V).
    CMatrix rx_steering(const UcaPairConfig &cfg);

    // Per-mode gains: column l is sum_k H[v, k] exp(j (phi_k + a_t) l) / sqrt(K), i.e. H * tx_steering.
    CMatrix mode_effective_gains(const ChannelMatrix &h);

    // Mode-to-mode coupling after receive DFT: rx_steering^H * H * tx_steering.
    CMatrix mode_coupling(const ChannelMatrix &h);

    // Largest |off-diagonal| / largest |diagonal| of a square matrix.
    double offdiagonal_leakage(const CMatrix &m);

} // namespace oamma

#endif
