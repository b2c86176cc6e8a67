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

#ifndef OAMMA_OAM_SIGNAL_HPP
#define OAMMA_OAM_SIGNAL_HPP

#include "oamma/channel.hpp"

#include <cstdint>

namespace oamma
{
    struct NoiseSpec
    {
        double variance = 0.0;  // sigma^2 per receive element [W]
        std::uint64_t seed = 1;
    };

    // Counter-based complex Gaussian source. Sample (element, slot) depends only on
    // (seed, element, slot), so generation order never changes the values.
    class NoiseSource
    {
    public:
        explicit NoiseSource(NoiseSpec spec);

        // Circularly-symmetric CN(0, variance) sample.
        cdouble sample(std::uint64_t element, std::uint64_t slot) const;

        const NoiseSpec &spec() const { return spec_; }

    private:
        NoiseSpec spec_;
    };

    // x_k = sum_l s_l exp(j (phi_k + a_t) l) / sqrt(K)
    CVector modulate(const CVector &symbols, const UcaPairConfig &cfg);

    // r = H x + z, with z drawn for the given time slot.
    CVector transmit(const ChannelMatrix &h, const CVector &x, const NoiseSpec &noise, std::uint64_t slot = 0);

    // s_m = sum_v r_v exp(-j (psi_v + a_r) m) / sqrt(V), m = 0..V-1
    CVector demodulate(const CVector &received, const UcaPairConfig &cfg);

    // K x K pilot block, column t is the transmit vector of slot t:
    // X[k, t] = sqrt(power) exp(j 2 pi k t / K), so X X^H = power K I.
    CMatrix pilot_matrix(const UcaPairConfig &cfg, double power);

    // Sends every pilot column through h, slot index = first_slot + column.
    CMatrix transmit_pilots(const ChannelMatrix &h, const CMatrix &pilots, const NoiseSpec &noise,
                            std::uint64_t first_slot = 0);

} // namespace oamma

#endif
