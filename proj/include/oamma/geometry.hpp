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

#ifndef OAMMA_GEOMETRY_HPP
#define OAMMA_GEOMETRY_HPP

#include <Eigen/Dense>

namespace oamma
{
    inline constexpr double pi = 3.14159265358979323846;
    inline constexpr double two_pi = 2.0 * pi;

    using Vec3 = Eigen::Vector3d;

    // Reduce an angle to [0, 2*pi)
    double wrap_two_pi(double angle);

    // Reduce an angle to (-pi, pi]
    double wrap_pi(double angle);

    // Transmit/receive uniform circular array pair. The transmit array lies in the
    // z = 0 plane centred at the origin; element k sits at azimuth 2*pi*k/K + tx_rotation.
    struct UcaPairConfig
    {
        int tx_elements = 8;      // K
        int rx_elements = 8;      // V
        double tx_radius = 0.5;   // R_t [m]
        double rx_radius = 0.5;   // R_r [m]
        double tx_rotation = 0.0; // a_t [rad], in [0, 2*pi)
        double rx_rotation = 0.0; // a_r [rad], in [0, 2*pi)

        double tx_azimuth(int k) const; // 2*pi*k/K, without the reference rotation
        double rx_azimuth(int v) const; // 2*pi*v/V, without the reference rotation

        bool operator==(const UcaPairConfig &) const = default;
    };

    // Validates and normalizes the rotations. Throws std::invalid_argument.
    UcaPairConfig make_uca_pair(int tx_elements, int rx_elements, double tx_radius, double rx_radius,
                                double tx_rotation = 0.0, double rx_rotation = 0.0);

    // Position of the receive-array centre: distance and spherical angles measured from the
    // transmit array's boresight (z axis).
    struct Pose
    {
        double distance = 1.0; // d [m]
        double theta = 0.0;    // azimuth of the centre's projection [rad], in [0, 2*pi)
        double phi = 0.0;      // tilt from the z axis [rad], in [0, pi/2)

        bool operator==(const Pose &) const = default;
    };

    // Throws std::invalid_argument for d <= 0 or phi outside [0, pi/2). theta is wrapped.
    Pose make_pose(double distance, double theta, double phi);

    struct TermTriple
    {
        double a = 0.0; // receive-only term, m^2
        double b = 0.0; // cross term, m^2
        double c = 0.0; // transmit-only term, m^2

        double sum() const { return a + b + c; }
    };

    Vec3 tx_element_position(const UcaPairConfig &cfg, int k);
    Vec3 rx_element_position(const UcaPairConfig &cfg, const Pose &pose, int v);

    double exact_distance(const UcaPairConfig &cfg, const Pose &pose, int v, int k);

    // Decomposition d_vk^2 = d^2 + R_t^2 + R_r^2 + 2 (a + b + c):
    //   a = d R_r sin(phi) cos(psi_v + a_r - theta)
    //   b = -R_t R_r cos(psi_v - phi_k + a_r - a_t)
    //   c = -d R_t sin(phi) cos(phi_k + a_t - theta)
    TermTriple term_triple(const UcaPairConfig &cfg, const Pose &pose, int v, int k);

    // sqrt(d^2 + R_t^2 + R_r^2)
    double reference_distance(const UcaPairConfig &cfg, double distance);

    // First-order expansion S + (a + b + c) / S.
    double approx_distance(const UcaPairConfig &cfg, const Pose &pose, int v, int k);

    // Unit vector of a boresight direction given as (theta, phi).
    Vec3 boresight(double theta, double phi);

    // Great-circle angle between two boresight directions, in [0, pi].
    double angular_separation(double theta1, double phi1, double theta2, double phi2);

} // namespace oamma

#endif
