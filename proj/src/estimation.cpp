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

#include "oamma/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oamma
{
    namespace
    {
        constexpr int theta_grid_steps = 720;
        constexpr int phi_grid_steps = 200;
        constexpr double refine_tolerance = 1e-10;
        constexpr int max_refine_rounds = 60;

        // sin(phi_hat) below this is indistinguishable from an aligned link
        constexpr double degenerate_sin_phi = 1e-12;

        // Largest tilt the estimators may report, keeps phi_hat inside [0, pi/2)
        constexpr double max_reportable_phi = 0.5 * pi - 1e-9;

        // Sum over entries of |H_hat - H_model(theta, phi)|^2, evaluated directly so that
        // small misfits are not lost to cancellation.
        double direct_cost(const CMatrix &h_hat, const UcaPairConfig &cfg, double distance, const ChannelConstants &cc,
                           double theta, double phi)
        {
            const double dsp = distance * std::sin(phi);
            double cost = 0.0;
            for (int v = 0; v < cfg.rx_elements; ++v)
            {
                const double psi = cfg.rx_azimuth(v) + cfg.rx_rotation;
                const double a = dsp * cfg.rx_radius * std::cos(psi - theta);
                for (int k = 0; k < cfg.tx_elements; ++k)
                {
                    const double phk = cfg.tx_azimuth(k) + cfg.tx_rotation;
                    const double b = -cfg.tx_radius * cfg.rx_radius * std::cos(psi - phk);
                    const double c = -dsp * cfg.tx_radius * std::cos(phk - theta);
                    cost += std::norm(h_hat(v, k) - cc.d_const * std::exp(cc.f_const * (a + b + c)));
                }
            }
            return cost;
        }

        // Golden-section minimum of f on [lo, hi]. Endpoints are checked as well so that a
        // minimum sitting on the boundary (phi = 0) is reported exactly.
        template <typename F>
        double golden_section(F &&f, double lo, double hi, double tol)
        {
            const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
            double a = lo, b = hi;
            double x1 = b - inv_phi * (b - a);
            double x2 = a + inv_phi * (b - a);
            double f1 = f(x1), f2 = f(x2);
            while (b - a > tol)
            {
                if (f1 <= f2)
                {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - inv_phi * (b - a);
                    f1 = f(x1);
                }
                else
                {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + inv_phi * (b - a);
                    f2 = f(x2);
                }
            }
            double best_x = 0.5 * (a + b);
            double best_f = f(best_x);
            for (double x : {lo, hi})
            {
                const double fx = f(x);
                if (fx < best_f)
                {
                    best_f = fx;
                    best_x = x;
                }
            }
            return best_x;
        }

        double effective_nls_phi_max(const EstimationScenario &sc)
        {
            double limit = sc.nls_phi_max;
            if (!(limit > 0.0))
                limit = 4.0 * ambiguity_bound(sc.cfg, sc.link, sc.pose.distance);
            return std::min(limit, max_reportable_phi);
        }

        void check_shape(const ChannelMatrix &h_hat, const UcaPairConfig &cfg)
        {
            if (h_hat.entries.rows() != cfg.rx_elements || h_hat.entries.cols() != cfg.tx_elements)
                throw std::invalid_argument("channel estimate shape does not match the scenario's V x K");
        }
    } // namespace

    std::string_view to_string(EstimatorMethod method)
    {
        return method == EstimatorMethod::closed_form ? "closed_form" : "nls";
    }

    double farfield_entry_power(const LinkBudget &link, double distance)
    {
        const double amp = std::abs(link.beta) * link.wavelength / (4.0 * pi * distance);
        return amp * amp;
    }

    ChannelMatrix lmmse_estimate(const CMatrix &received, const CMatrix &pilots, double sigma2, double prior_power)
    {
        if (received.cols() != pilots.cols())
            throw std::invalid_argument("lmmse_estimate: received column count must equal the pilot slot count");
        if (!(prior_power > 0.0))
            throw std::invalid_argument("lmmse_estimate: prior power must be positive");
        if (!(sigma2 >= 0.0))
            throw std::invalid_argument("lmmse_estimate: noise variance must be >= 0");

        CMatrix gram = pilots * pilots.adjoint();
        gram.diagonal().array() += sigma2 / prior_power;

        Eigen::FullPivLU<CMatrix> lu(gram);
        if (!lu.isInvertible())
            throw std::domain_error("lmmse_estimate: regularized pilot Gram matrix is singular");

        // H_hat = Y X^H G^-1  <=>  G^H H_hat^H = X Y^H, and G is Hermitian
        ChannelMatrix h;
        h.model = ChannelModel::estimated;
        h.entries = lu.solve(pilots * received.adjoint()).adjoint();
        return h;
    }

    double ambiguity_bound(const UcaPairConfig &cfg, const LinkBudget &link, double distance)
    {
        const double s = reference_distance(cfg, distance);
        const double arg = link.wavelength * s / (2.0 * distance * (cfg.tx_radius + cfg.rx_radius));
        if (!(arg < 1.0))
            return 0.5 * pi;
        return std::asin(arg);
    }

    double model_residual(const ChannelMatrix &h_hat, const EstimationScenario &scenario, double theta, double phi)
    {
        check_shape(h_hat, scenario.cfg);
        const double norm2 = h_hat.entries.squaredNorm();
        if (norm2 == 0.0)
            return std::numeric_limits<double>::infinity();
        const ChannelConstants cc = channel_constants(scenario.cfg, scenario.pose, scenario.link);
        return std::sqrt(direct_cost(h_hat.entries, scenario.cfg, scenario.pose.distance, cc, theta, phi) / norm2);
    }

    double residual_tolerance(const EstimationScenario &scenario)
    {
        // Relative RMS of the per-entry LMMSE noise, sigma^2 / (P K), against the far-field entry magnitude
        const double entry = std::sqrt(farfield_entry_power(scenario.link, scenario.pose.distance));
        const double noise_rel =
            std::sqrt(scenario.pilot_noise_variance / (scenario.pilot_power * double(scenario.cfg.tx_elements))) / entry;
        return 1e-6 + 4.0 * noise_rel;
    }

    AngleEstimate closed_form_angles(const ChannelMatrix &h_hat, const EstimationScenario &scenario)
    {
        const UcaPairConfig &cfg = scenario.cfg;
        check_shape(h_hat, cfg);
        if (cfg.tx_elements % 4 != 0 || cfg.rx_elements % 4 != 0)
            throw std::invalid_argument("closed_form_angles: K and V must be divisible by 4");
        const double a = wrap_two_pi(scenario.reference_rotation);
        if (std::abs(wrap_pi(cfg.tx_rotation - a)) > 1e-12 || std::abs(wrap_pi(cfg.rx_rotation - a)) > 1e-12)
            throw std::invalid_argument("closed_form_angles: requires a_t == a_r == reference rotation");

        const ChannelConstants cc = channel_constants(cfg, scenario.pose, scenario.link);
        const double rt_rr = cfg.tx_radius * cfg.rx_radius;
        const cdouble known = cc.d_const * std::exp(cc.f_const * rt_rr);
        const double lever = scenario.pose.distance * (cfg.tx_radius + cfg.rx_radius);

        // Probe P: receive azimuth 0, transmit azimuth pi -> s = lever sin(phi) cos(theta - a)
        // Probe Q: receive azimuth pi/2, transmit azimuth 3pi/2 -> s = lever sin(phi) sin(theta - a)
        auto probe = [&](int v, int k) {
            const cdouble h = h_hat.entries(v, k);
            if (std::abs(h) == 0.0)
                throw std::domain_error("closed_form_angles: probe entry has zero magnitude");
            return (std::log(h / known) / cc.f_const).real();
        };
        const double s_p = probe(0, cfg.tx_elements / 2);
        const double s_q = probe(cfg.rx_elements / 4, 3 * cfg.tx_elements / 4);

        AngleEstimate est;
        est.method = EstimatorMethod::closed_form;
        const double sin_phi = std::hypot(s_p, s_q) / lever;
        if (sin_phi < degenerate_sin_phi)
        {
            est.theta_hat = a;
            est.phi_hat = 0.0;
            est.ambiguous = true;
            est.residual = model_residual(h_hat, scenario, est.theta_hat, est.phi_hat);
            return est;
        }

        est.theta_hat = wrap_two_pi(a + std::atan2(s_q, s_p));
        est.phi_hat = sin_phi < 1.0 ? std::min(std::asin(sin_phi), max_reportable_phi) : max_reportable_phi;
        est.residual = model_residual(h_hat, scenario, est.theta_hat, est.phi_hat);

        const double bound = ambiguity_bound(cfg, scenario.link, scenario.pose.distance);
        est.ambiguous = sin_phi >= 1.0 || est.phi_hat >= bound || est.residual > residual_tolerance(scenario);
        return est;
    }

    AngleEstimate nls_angles(const ChannelMatrix &h_hat, const EstimationScenario &scenario)
    {
        const UcaPairConfig &cfg = scenario.cfg;
        check_shape(h_hat, cfg);
        const int n_rx = cfg.rx_elements;
        const int n_tx = cfg.tx_elements;
        const double distance = scenario.pose.distance;
        const ChannelConstants cc = channel_constants(cfg, scenario.pose, scenario.link);
        const double f_mag = -cc.f_const.imag(); // F = -j f_mag

        // M[v, k] = conj(H_hat[v, k]) D exp(F b_vk); model fit maximizes Re sum_vk M[v, k] e^{F a_v} e^{F c_k}
        CMatrix m(n_rx, n_tx);
        std::vector<double> rx_az(n_rx), tx_az(n_tx);
        for (int v = 0; v < n_rx; ++v)
            rx_az[v] = cfg.rx_azimuth(v) + cfg.rx_rotation;
        for (int k = 0; k < n_tx; ++k)
            tx_az[k] = cfg.tx_azimuth(k) + cfg.tx_rotation;
        for (int v = 0; v < n_rx; ++v)
            for (int k = 0; k < n_tx; ++k)
            {
                const double b = -cfg.tx_radius * cfg.rx_radius * std::cos(rx_az[v] - tx_az[k]);
                m(v, k) = std::conj(h_hat.entries(v, k)) * cc.d_const * std::exp(cc.f_const * b);
            }

        const double phi_max = effective_nls_phi_max(scenario);
        const double theta_step = two_pi / theta_grid_steps;
        const double phi_step = phi_max / (phi_grid_steps - 1);

        std::vector<double> sin_phi(phi_grid_steps);
        for (int j = 0; j < phi_grid_steps; ++j)
            sin_phi[j] = std::sin(phi_step * j);

        // When every element azimuth sits on the theta grid, (azimuth - theta) only takes
        // theta_grid_steps distinct values and the phase factors can be tabulated per phi row.
        auto lattice_index = [&](double az, int &index) {
            const double steps = az / theta_step;
            index = int(std::lround(steps));
            return std::abs(steps - index) < 1e-9;
        };
        std::vector<int> rx_idx(n_rx), tx_idx(n_tx);
        bool on_lattice = true;
        for (int v = 0; v < n_rx; ++v)
            on_lattice = lattice_index(rx_az[v], rx_idx[v]) && on_lattice;
        for (int k = 0; k < n_tx; ++k)
            on_lattice = lattice_index(tx_az[k], tx_idx[k]) && on_lattice;
        std::vector<double> lattice_cos(theta_grid_steps);
        for (int n = 0; n < theta_grid_steps; ++n)
            lattice_cos[n] = std::cos(theta_step * n);
        auto wrap_index = [](int n) { return ((n % theta_grid_steps) + theta_grid_steps) % theta_grid_steps; };

        int best_i = 0, best_j = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        // ties go to the smallest theta, then the smallest phi
        auto offer = [&](double score, int i, int j) {
            if (score > best_score || (score == best_score && (i < best_i || (i == best_i && j < best_j))))
            {
                best_score = score;
                best_i = i;
                best_j = j;
            }
        };

        CVector c_vec(n_tx), t_vec(n_rx);
        if (on_lattice)
        {
            std::vector<cdouble> tx_phase(theta_grid_steps), rx_phase(theta_grid_steps);
            for (int j = 0; j < phi_grid_steps; ++j)
            {
                const double g = f_mag * distance * sin_phi[j];
                for (int n = 0; n < theta_grid_steps; ++n)
                {
                    tx_phase[n] = std::polar(1.0, g * cfg.tx_radius * lattice_cos[n]);
                    rx_phase[n] = std::polar(1.0, -g * cfg.rx_radius * lattice_cos[n]);
                }
                for (int i = 0; i < theta_grid_steps; ++i)
                {
                    for (int k = 0; k < n_tx; ++k)
                        c_vec(k) = tx_phase[wrap_index(tx_idx[k] - i)];
                    t_vec.noalias() = m * c_vec;
                    double score = 0.0;
                    for (int v = 0; v < n_rx; ++v)
                        score += (rx_phase[wrap_index(rx_idx[v] - i)] * t_vec(v)).real();
                    offer(score, i, j);
                }
            }
        }
        else
        {
            std::vector<double> cos_a(n_rx), cos_c(n_tx);
            for (int i = 0; i < theta_grid_steps; ++i)
            {
                const double theta = theta_step * i;
                for (int v = 0; v < n_rx; ++v)
                    cos_a[v] = std::cos(rx_az[v] - theta);
                for (int k = 0; k < n_tx; ++k)
                    cos_c[k] = std::cos(tx_az[k] - theta);

                for (int j = 0; j < phi_grid_steps; ++j)
                {
                    const double g = f_mag * distance * sin_phi[j];
                    // e^{F c_k} with c_k = -d R_t sin(phi) cos(.), e^{F a_v} with a_v = d R_r sin(phi) cos(.)
                    for (int k = 0; k < n_tx; ++k)
                        c_vec(k) = std::polar(1.0, g * cfg.tx_radius * cos_c[k]);
                    t_vec.noalias() = m * c_vec;
                    double score = 0.0;
                    for (int v = 0; v < n_rx; ++v)
                        score += (std::polar(1.0, -g * cfg.rx_radius * cos_a[v]) * t_vec(v)).real();
                    offer(score, i, j);
                }
            }
        }

        double theta = theta_step * best_i;
        double phi = phi_step * best_j;
        double cost = direct_cost(h_hat.entries, cfg, distance, cc, theta, phi);

        for (int round = 0; round < max_refine_rounds; ++round)
        {
            const double prev_theta = theta, prev_phi = phi;

            const double t_new = golden_section(
                [&](double t) { return direct_cost(h_hat.entries, cfg, distance, cc, t, phi); }, theta - theta_step,
                theta + theta_step, refine_tolerance);
            const double t_cost = direct_cost(h_hat.entries, cfg, distance, cc, t_new, phi);
            if (t_cost < cost)
            {
                theta = t_new;
                cost = t_cost;
            }

            const double p_lo = std::max(0.0, phi - phi_step);
            const double p_hi = std::min(max_reportable_phi, phi + phi_step);
            const double p_new = golden_section(
                [&](double p) { return direct_cost(h_hat.entries, cfg, distance, cc, theta, p); }, p_lo, p_hi,
                refine_tolerance);
            const double p_cost = direct_cost(h_hat.entries, cfg, distance, cc, theta, p_new);
            if (p_cost < cost)
            {
                phi = p_new;
                cost = p_cost;
            }

            if (std::abs(theta - prev_theta) < refine_tolerance && std::abs(phi - prev_phi) < refine_tolerance)
                break;
        }

        AngleEstimate est;
        est.method = EstimatorMethod::nls;
        est.theta_hat = wrap_two_pi(theta);
        est.phi_hat = phi;
        const double norm2 = h_hat.entries.squaredNorm();
        est.residual = norm2 > 0.0 ? std::sqrt(cost / norm2) : std::numeric_limits<double>::infinity();
        est.ambiguous = std::sin(phi) < degenerate_sin_phi;
        return est;
    }

} // namespace oamma
