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

#include <catch_amalgamated.hpp>

#include "oamma/channel.hpp"
#include "oamma/geometry.hpp"

#include <cmath>
#include <random>

using namespace oamma;
using Catch::Approx;

namespace
{
    constexpr double deg = pi / 180.0;
    const double lambda = speed_of_light / 5.8e9;
    const double d20 = 20.0 * lambda;
}

TEST_CASE("tx_element_position")
{
    const auto cfg = make_uca_pair(8, 8, 0.5, 0.5);
    const Vec3 p0 = tx_element_position(cfg, 0);
    CHECK(p0.x() == 0.5);
    CHECK(p0.y() == 0.0);
    CHECK(p0.z() == 0.0);

    const Vec3 quarter = tx_element_position(cfg, 2); // K/4
    CHECK(std::abs(quarter.x()) < 1e-16);
    CHECK(quarter.y() == Approx(0.5).epsilon(1e-15));

    // k=1, K=8, a_t=pi/8 -> azimuth 3pi/8 (values from a 40-digit evaluation)
    const auto rotated = make_uca_pair(8, 8, 0.5, 0.5, pi / 8.0, 0.0);
    const Vec3 p1 = tx_element_position(rotated, 1);
    CHECK(p1.x() == Approx(0.19134171618254488586).epsilon(1e-14));
    CHECK(p1.y() == Approx(0.46193976625564337806).epsilon(1e-14));
    CHECK(p1.z() == 0.0);

    CHECK_THROWS_AS(tx_element_position(cfg, 8), std::out_of_range);
    CHECK_THROWS_AS(tx_element_position(cfg, -1), std::out_of_range);
}

TEST_CASE("rx_element_position")
{
    const auto cfg = make_uca_pair(4, 4, 0.5, 0.5);
    const Vec3 aligned = rx_element_position(cfg, make_pose(1.0, 0.0, 0.0), 0);
    CHECK(aligned.isApprox(Vec3(0.5, 0.0, 1.0), 1e-15));

    // centre on the x axis: phi = pi/2 is outside the pose domain, so check the limit just below it
    const Vec3 side = rx_element_position(cfg, make_pose(1.0, 0.0, 0.5 * pi - 1e-12), 0);
    CHECK(side.x() == Approx(1.5).epsilon(1e-12));
    CHECK(std::abs(side.y()) < 1e-12);
    CHECK(std::abs(side.z()) < 1e-11);

    // v=1, V=4 at the 5.8 GHz / 20 lambda setup, theta=40 deg, phi=1 deg (40-digit oracle)
    const Vec3 p = rx_element_position(cfg, make_pose(d20, 40.0 * deg, 1.0 * deg), 1);
    CHECK(p.x() == Approx(0.013820762054837012284).epsilon(1e-12));
    CHECK(p.y() == Approx(0.51159699634280268363).epsilon(1e-14));
    CHECK(p.z() == Approx(1.0336096488157559448).epsilon(1e-14));

    CHECK_THROWS_AS(rx_element_position(cfg, make_pose(1.0, 0.0, 0.0), 4), std::out_of_range);
}

TEST_CASE("exact_distance")
{
    const auto cfg = make_uca_pair(8, 8, 0.5, 0.5);
    for (int v = 0; v < 8; ++v)
        CHECK(exact_distance(cfg, make_pose(d20, 0.3, 0.0), v, v) == Approx(d20).epsilon(1e-15));

    // receive azimuth 0 against transmit azimuth pi: sqrt(d^2 + 4R^2)
    CHECK(exact_distance(cfg, make_pose(d20, 0.0, 0.0), 0, 4) == Approx(1.4382887088178721206).epsilon(1e-14));

    // misaligned pair checked against the 40-digit oracle
    const auto mixed = make_uca_pair(8, 4, 0.5, 0.5);
    CHECK(exact_distance(mixed, make_pose(d20, 40.0 * deg, 1.0 * deg), 1, 3) ==
          Approx(1.1082826604604351846).epsilon(1e-14));
}

TEST_CASE("term_triple decomposition")
{
    SECTION("aligned pose zeroes the tilt terms")
    {
        const auto cfg = make_uca_pair(6, 5, 0.4, 0.7, 0.2, 1.1);
        const Pose pose = make_pose(3.0, 1.2, 0.0);
        for (int v = 0; v < 5; ++v)
            for (int k = 0; k < 6; ++k)
            {
                const TermTriple t = term_triple(cfg, pose, v, k);
                CHECK(t.a == 0.0);
                CHECK(t.c == 0.0);
            }
    }

    SECTION("co-located azimuths give b = -R_t R_r")
    {
        const auto cfg = make_uca_pair(8, 8, 0.4, 0.7, 0.5, 0.5);
        CHECK(term_triple(cfg, make_pose(2.0, 0.0, 0.1), 3, 3).b == Approx(-0.28).epsilon(1e-15));
    }

    SECTION("identity and bounds on random geometry")
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 2000; ++trial)
        {
            const int kc = 1 + int(u(rng) * 24), vc = 1 + int(u(rng) * 24);
            const auto cfg = make_uca_pair(kc, vc, 0.05 + u(rng), 0.05 + u(rng), two_pi * u(rng), two_pi * u(rng));
            const Pose pose = make_pose(0.2 + 10.0 * u(rng), two_pi * u(rng), 0.49 * pi * u(rng));
            const int v = std::min(vc - 1, int(u(rng) * vc)), k = std::min(kc - 1, int(u(rng) * kc));
            const TermTriple t = term_triple(cfg, pose, v, k);
            const double exact = exact_distance(cfg, pose, v, k);
            const double rhs = pose.distance * pose.distance + cfg.tx_radius * cfg.tx_radius +
                               cfg.rx_radius * cfg.rx_radius + 2.0 * t.sum();
            REQUIRE(std::abs(exact * exact - rhs) / (exact * exact) <= 1e-12);
            CHECK(std::abs(t.a) <= pose.distance * cfg.rx_radius * (1 + 1e-15));
            CHECK(std::abs(t.b) <= cfg.tx_radius * cfg.rx_radius * (1 + 1e-15));
            CHECK(std::abs(t.c) <= pose.distance * cfg.tx_radius * (1 + 1e-15));

            const Vec3 rx = rx_element_position(cfg, pose, v);
            CHECK(rx.allFinite());
            CHECK(rx.z() == Approx(pose.distance * std::cos(pose.phi)).epsilon(1e-15));
        }
    }
}

TEST_CASE("approx_distance")
{
    const auto cfg = make_uca_pair(8, 8, 0.5, 0.5);
    CHECK(reference_distance(cfg, d20) == Approx(1.2524673288804709320).epsilon(1e-15));

    // k = v, aligned, equal radii: a + b + c = -R^2, nonzero; use a pair with b = 0 instead
    // (receive azimuth pi/2 from transmit azimuth 0) so the expansion returns S exactly.
    const Pose aligned = make_pose(d20, 0.0, 0.0);
    CHECK(std::abs(term_triple(cfg, aligned, 2, 0).sum()) < 1e-16);
    CHECK(approx_distance(cfg, aligned, 2, 0) == Approx(reference_distance(cfg, d20)).epsilon(1e-15));

    SECTION("error shrinks as the link lengthens")
    {
        const Pose base = make_pose(d20, 40.0 * deg, 1.0 * deg);
        double previous = INFINITY;
        for (double scale : {1.0, 10.0, 100.0})
        {
            const Pose p = make_pose(base.distance * scale, base.theta, base.phi);
            double worst = 0.0;
            for (int v = 0; v < 8; ++v)
                for (int k = 0; k < 8; ++k)
                {
                    const double exact = exact_distance(cfg, p, v, k);
                    worst = std::max(worst, std::abs(approx_distance(cfg, p, v, k) - exact) / exact);
                }
            CHECK(worst < previous);
            previous = worst;
        }
    }

    SECTION("second-order remainder bound")
    {
        // |approx - exact| <= x^2 / (2 S^3) * c with x = a + b + c; c = 10 as margin
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 500; ++trial)
        {
            const auto g = make_uca_pair(8, 8, 0.1 + 0.5 * u(rng), 0.1 + 0.5 * u(rng));
            const Pose p = make_pose(2.0 + 20.0 * u(rng), two_pi * u(rng), 0.3 * u(rng));
            const int v = int(u(rng) * 8) % 8, k = int(u(rng) * 8) % 8;
            const double x = term_triple(g, p, v, k).sum();
            const double s = reference_distance(g, p.distance);
            const double gap = std::abs(approx_distance(g, p, v, k) - exact_distance(g, p, v, k));
            CHECK(gap <= 10.0 * x * x / (2.0 * s * s * s) + 1e-15);
        }
    }
}

TEST_CASE("aligned ring symmetry")
{
    const auto cfg = make_uca_pair(8, 8, 0.5, 0.5, 0.3, 0.3);
    const Pose pose = make_pose(d20, 0.0, 0.0);
    for (int v = 0; v < 8; ++v)
        for (int k = 0; k < 8; ++k)
            CHECK(exact_distance(cfg, pose, v, k) ==
                  Approx(exact_distance(cfg, pose, (v - k + 8) % 8, 0)).epsilon(1e-14));
}

TEST_CASE("angular_separation")
{
    CHECK(angular_separation(1.0, 0.3, 1.0, 0.3) == 0.0);
    CHECK(angular_separation(0.0, 0.25, 0.0, 0.0) == Approx(0.25).epsilon(1e-15));
    CHECK(angular_separation(0.0, pi / 4, pi, pi / 4) == Approx(pi / 2).epsilon(1e-15));
    CHECK(angular_separation(0.3, 1e-9, 0.3 + pi, 1e-9) == Approx(2e-9).epsilon(1e-9));
}

TEST_CASE("construction validates and normalizes")
{
    CHECK_THROWS_AS(make_uca_pair(0, 4, 0.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(make_uca_pair(4, 4, -0.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(make_pose(0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_pose(1.0, 0.0, 0.5 * pi), std::invalid_argument);
    CHECK_THROWS_AS(make_pose(1.0, 0.0, -0.1), std::invalid_argument);
    CHECK(make_uca_pair(4, 4, 0.5, 0.5, -0.5 * pi, 5.0 * pi).tx_rotation == Approx(1.5 * pi));
    CHECK(make_pose(1.0, -pi / 2, 0.1).theta == Approx(1.5 * pi));
    CHECK(wrap_pi(1.5 * pi) == Approx(-0.5 * pi));
    CHECK(wrap_two_pi(-1e-300) < two_pi);
}
