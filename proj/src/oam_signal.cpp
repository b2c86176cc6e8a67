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

#include "oamma/oam_signal.hpp"

#include <cmath>
#include <stdexcept>

namespace oamma
{
    namespace
    {
        std::uint64_t splitmix64(std::uint64_t x)
        {
            x += 0x9E3779B97F4A7C15ull;
            x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
            x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
            return x ^ (x >> 31);
        }

        // Uniform in (0, 1]; never returns 0 so log() is safe.
        double unit_open(std::uint64_t bits)
        {
            return (double(bits >> 11) + 1.0) * 0x1.0p-53;
        }
    } // namespace

    NoiseSource::NoiseSource(NoiseSpec spec) : spec_(spec)
    {
        if (!(spec.variance >= 0.0) || !std::isfinite(spec.variance))
            throw std::invalid_argument("noise variance must be finite and >= 0");
    }

    cdouble NoiseSource::sample(std::uint64_t element, std::uint64_t slot) const
    {
        if (spec_.variance == 0.0)
            return {0.0, 0.0};
        const std::uint64_t key = splitmix64(splitmix64(spec_.seed) ^ splitmix64(element * 0xD1B54A32D192ED03ull + slot));
        const double u1 = unit_open(splitmix64(key));
        const double u2 = unit_open(splitmix64(key ^ 0xA0761D6478BD642Full));
        // Box-Muller; each quadrature carries variance / 2
        const double radius = std::sqrt(-spec_.variance * std::log(u1));
        return std::polar(radius, two_pi * u2);
    }

    CVector modulate(const CVector &symbols, const UcaPairConfig &cfg)
    {
        if (symbols.size() != cfg.tx_elements)
            throw std::invalid_argument("modulate: symbol vector length must equal K");
        return tx_steering(cfg) * symbols;
    }

    CVector transmit(const ChannelMatrix &h, const CVector &x, const NoiseSpec &noise, std::uint64_t slot)
    {
        if (x.size() != h.entries.cols())
            throw std::invalid_argument("transmit: signal length must equal the channel column count");
        const NoiseSource source(noise);
        CVector r = h.entries * x;
        for (Eigen::Index v = 0; v < r.size(); ++v)
            r(v) += source.sample(std::uint64_t(v), slot);
        return r;
    }

    CVector demodulate(const CVector &received, const UcaPairConfig &cfg)
    {
        if (received.size() != cfg.rx_elements)
            throw std::invalid_argument("demodulate: received vector length must equal V");
        return rx_steering(cfg).adjoint() * received;
    }

    CMatrix pilot_matrix(const UcaPairConfig &cfg, double power)
    {
        if (!(power > 0.0) || !std::isfinite(power))
            throw std::invalid_argument("pilot power must be positive and finite");
        const int n = cfg.tx_elements;
        CMatrix x(n, n);
        const double amp = std::sqrt(power);
        for (int k = 0; k < n; ++k)
            for (int t = 0; t < n; ++t)
                // reduce k*t mod n first so the phase argument stays small
                x(k, t) = std::polar(amp, two_pi * double((k * t) % n) / double(n));
        return x;
    }

    CMatrix transmit_pilots(const ChannelMatrix &h, const CMatrix &pilots, const NoiseSpec &noise,
                            std::uint64_t first_slot)
    {
        if (pilots.rows() != h.entries.cols())
            throw std::invalid_argument("transmit_pilots: pilot rows must equal the channel column count");
        CMatrix y(h.entries.rows(), pilots.cols());
        for (Eigen::Index t = 0; t < pilots.cols(); ++t)
            y.col(t) = transmit(h, pilots.col(t), noise, first_slot + std::uint64_t(t));
        return y;
    }

} // namespace oamma
