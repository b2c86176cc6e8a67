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

#include "oamma/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace oamma
{
    double wrap_two_pi(double angle)
    {
        double r = std::fmod(angle, two_pi);
        if (r < 0.0)
            r += two_pi;
        if (r >= two_pi) // fmod of a tiny negative value can round up to 2*pi
            r = 0.0;
        return r;
    }

    double wrap_pi(double angle)
    {
        double r = wrap_two_pi(angle);
        return r > pi ? r - two_pi : r;
    }

    double UcaPairConfig::tx_azimuth(int k) const
    {
        return two_pi * double(k) / double(tx_elements);
    }

    double UcaPairConfig::rx_azimuth(int v) const
    {
        return two_pi * double(v) / double(rx_elements);
    }

    UcaPairConfig make_uca_pair(int tx_elements, int rx_elements, double tx_radius, double rx_radius,
                                double tx_rotation, double rx_rotation)
    {
        if (tx_elements < 1 || rx_elements < 1)
            throw std::invalid_argument("UCA element counts must be >= 1");
        if (!(tx_radius > 0.0) || !(rx_radius > 0.0) || !std::isfinite(tx_radius) || !std::isfinite(rx_radius))
            throw std::invalid_argument("UCA radii must be positive and finite");
        if (!std::isfinite(tx_rotation) || !std::isfinite(rx_rotation))
            throw std::invalid_argument("UCA reference rotations must be finite");
        return UcaPairConfig{tx_elements, rx_elements, tx_radius, rx_radius,
                             wrap_two_pi(tx_rotation), wrap_two_pi(rx_rotation)};
    }

    Pose make_pose(double distance, double theta, double phi)
    {
        if (!(distance > 0.0) || !std::isfinite(distance))
            throw std::invalid_argument("pose distance must be positive and finite");
        if (!(phi >= 0.0 && phi < 0.5 * pi))
            throw std::invalid_argument("pose tilt must lie in [0, pi/2), got " + std::to_string(phi));
        if (!std::isfinite(theta))
            throw std::invalid_argument("pose azimuth must be finite");
        return Pose{distance, wrap_two_pi(theta), phi};
    }

    static void check_tx_index(const UcaPairConfig &cfg, int k)
    {
        if (k < 0 || k >= cfg.tx_elements)
            throw std::out_of_range("transmit element index " + std::to_string(k) + " outside [0, " +
                                    std::to_string(cfg.tx_elements) + ")");
    }

    static void check_rx_index(const UcaPairConfig &cfg, int v)
    {
        if (v < 0 || v >= cfg.rx_elements)
            throw std::out_of_range("receive element index " + std::to_string(v) + " outside [0, " +
                                    std::to_string(cfg.rx_elements) + ")");
    }

    Vec3 tx_element_position(const UcaPairConfig &cfg, int k)
    {
        check_tx_index(cfg, k);
        const double az = cfg.tx_azimuth(k) + cfg.tx_rotation;
        return {cfg.tx_radius * std::cos(az), cfg.tx_radius * std::sin(az), 0.0};
    }

    Vec3 rx_element_position(const UcaPairConfig &cfg, const Pose &pose, int v)
    {
        check_rx_index(cfg, v);
        const double az = cfg.rx_azimuth(v) + cfg.rx_rotation;
        const double sp = std::sin(pose.phi);
        return {pose.distance * sp * std::cos(pose.theta) + cfg.rx_radius * std::cos(az),
                pose.distance * sp * std::sin(pose.theta) + cfg.rx_radius * std::sin(az),
                pose.distance * std::cos(pose.phi)};
    }

    double exact_distance(const UcaPairConfig &cfg, const Pose &pose, int v, int k)
    {
        return (rx_element_position(cfg, pose, v) - tx_element_position(cfg, k)).norm();
    }

    TermTriple term_triple(const UcaPairConfig &cfg, const Pose &pose, int v, int k)
    {
        check_tx_index(cfg, k);
        check_rx_index(cfg, v);
        const double psi = cfg.rx_azimuth(v) + cfg.rx_rotation;
        const double phk = cfg.tx_azimuth(k) + cfg.tx_rotation;
        const double dsp = pose.distance * std::sin(pose.phi);

        TermTriple t;
        t.a = dsp * cfg.rx_radius * std::cos(psi - pose.theta);
        t.b = -cfg.tx_radius * cfg.rx_radius * std::cos(psi - phk);
        t.c = -dsp * cfg.tx_radius * std::cos(phk - pose.theta);
        return t;
    }

    double reference_distance(const UcaPairConfig &cfg, double distance)
    {
        return std::sqrt(distance * distance + cfg.tx_radius * cfg.tx_radius + cfg.rx_radius * cfg.rx_radius);
    }

    double approx_distance(const UcaPairConfig &cfg, const Pose &pose, int v, int k)
    {
        const double s = reference_distance(cfg, pose.distance);
        return s + term_triple(cfg, pose, v, k).sum() / s;
    }

    Vec3 boresight(double theta, double phi)
    {
        const double sp = std::sin(phi);
        return {sp * std::cos(theta), sp * std::sin(theta), std::cos(phi)};
    }

    double angular_separation(double theta1, double phi1, double theta2, double phi2)
    {
        const Vec3 u = boresight(theta1, phi1);
        const Vec3 w = boresight(theta2, phi2);
        // atan2 form stays accurate for nearly parallel vectors, where acos(dot) loses digits
        return std::atan2(u.cross(w).norm(), u.dot(w));
    }

} // namespace oamma
