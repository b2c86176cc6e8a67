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
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace oamma
{
    namespace
    {
        constexpr double deg = pi / 180.0;

        // Runs body(i) for i in [0, n) on a small worker pool. Results must be written to
        // slot i so that output order never depends on scheduling.
        template <typename Body>
        void parallel_for(std::size_t n, Body &&body)
        {
            const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
            if (workers <= 1)
            {
                for (std::size_t i = 0; i < n; ++i)
                    body(i);
                return;
            }
            std::atomic<std::size_t> next{0};
            std::exception_ptr error;
            std::mutex error_mutex;
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < workers; ++w)
                pool.emplace_back([&] {
                    for (std::size_t i = next++; i < n; i = next++)
                    {
                        try
                        {
                            body(i);
                        }
                        catch (...)
                        {
                            std::lock_guard lock(error_mutex);
                            if (!error)
                                error = std::current_exception();
                        }
                    }
                });
            for (auto &t : pool)
                t.join();
            if (error)
                std::rethrow_exception(error);
        }

        std::string fmt(double x) { return format_double(x); }
        std::string fmt_bool(bool b) { return b ? "1" : "0"; }

        std::string utc_timestamp()
        {
            const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
            std::tm tm{};
            gmtime_r(&now, &tm);
            char buf[32];
            std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
            return buf;
        }

        std::vector<std::string> sweep_header(int max_modes)
        {
            std::vector<std::string> h{"scheme", "model", "se_variant", "K", "V", "snr_db", "theta_deg", "phi_deg",
                                       "seed", "se_total"};
            for (int l = 0; l < max_modes; ++l)
                h.push_back("se_mode_" + std::to_string(l));
            for (const char *c : {"theta_hat_deg", "phi_hat_deg", "ambiguous", "residual", "se_paper_total",
                                  "se_sinr_total", "residual_angle_deg"})
                h.emplace_back(c);
            return h;
        }

        struct SweepPoint
        {
            int elements = 0;
            double snr_db = 0.0;
            double theta_deg = 0.0;
            double phi_deg = 0.0;
            std::uint64_t seed = 0;
        };

        // One no-MA row and one MA-assisted row for a single operating point.
        std::array<std::vector<std::string>, 2> evaluate_point(const RunConfig &run, const SweepPoint &pt, int max_modes)
        {
            RunConfig local = run;
            local.theta_deg = pt.theta_deg;
            local.phi_deg = pt.phi_deg;
            Scenario sc = make_scenario(local, pt.elements);
            sc.link.noise_variance = noise_for_snr(sc, pt.snr_db);

            const ChannelModel model = parse_channel_model(run.model);
            const SeVariant variant = parse_se_variant(run.se_variant);

            LoopOptions opt;
            opt.estimator = parse_estimator_choice(run.estimator);
            opt.se_variant = variant;
            opt.total_power = sc.total_power;
            opt.max_iterations = run.max_iterations;
            opt.tolerance = run.loop_tolerance_rad;
            opt.quantizer_bits = run.quantizer_bits;

            const LoopReport rep = run_closed_loop(estimation_scenario(sc, run),
                                                   NoiseSpec{sc.pilot_noise_variance, pt.seed}, model, opt);

            const std::vector<double> powers = equal_power(sc.cfg.tx_elements, sc.total_power);
            const double sigma2 = sc.link.noise_variance;
            const ChannelMatrix before = build_matrix(sc.cfg, sc.pose, sc.link, model);
            const ChannelMatrix after = build_matrix(sc.cfg, rep.corrected_pose, sc.link, model);

            auto make_row = [&](const char *scheme, const ChannelMatrix &h, const AngleEstimate *est, double residual_angle) {
                const SeBreakdown primary = spectrum_efficiency(h, variant, powers, sigma2);
                const SeBreakdown paper = spectrum_efficiency(h, SeVariant::paper, powers, sigma2);
                const SeBreakdown sinr = spectrum_efficiency(h, SeVariant::sinr, powers, sigma2);
                std::vector<std::string> row{scheme,
                                             run.model,
                                             run.se_variant,
                                             std::to_string(sc.cfg.tx_elements),
                                             std::to_string(sc.cfg.rx_elements),
                                             fmt(pt.snr_db),
                                             fmt(pt.theta_deg),
                                             fmt(pt.phi_deg),
                                             std::to_string(pt.seed),
                                             fmt(primary.total)};
                for (int l = 0; l < max_modes; ++l)
                    row.push_back(l < int(primary.per_mode.size()) ? fmt(primary.per_mode[std::size_t(l)]) : "");
                if (est)
                {
                    row.push_back(fmt(est->theta_hat / deg));
                    row.push_back(fmt(est->phi_hat / deg));
                    row.push_back(fmt_bool(est->ambiguous));
                    row.push_back(fmt(est->residual));
                }
                else
                    row.insert(row.end(), 4, "");
                row.push_back(fmt(paper.total));
                row.push_back(fmt(sinr.total));
                row.push_back(fmt(residual_angle / deg));
                return row;
            };

            return {make_row("no_ma", before, nullptr, sc.pose.phi),
                    make_row("ma", after, &rep.estimate, rep.residual_angle)};
        }

        CsvTable run_sweep(const RunConfig &run, const std::vector<SweepPoint> &points, int max_modes)
        {
            std::vector<std::array<std::vector<std::string>, 2>> results(points.size());
            parallel_for(points.size(), [&](std::size_t i) { results[i] = evaluate_point(run, points[i], max_modes); });

            CsvTable t;
            t.header = sweep_header(max_modes);
            for (auto &pair : results)
                for (auto &row : pair)
                    t.rows.push_back(std::move(row));
            return t;
        }

        std::string snr_comment()
        {
            return "snr_db is the per-element receive SNR P_total*|D|^2/sigma^2, |D| = |beta|*lambda/(4*pi*d)";
        }
    } // namespace

    std::size_t CsvTable::column(std::string_view name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return i;
        throw std::out_of_range("CSV has no column '" + std::string(name) + "'");
    }

    std::string render_csv(const CsvTable &table, const RunConfig &cfg, std::string_view command, bool timestamp)
    {
        std::string out = "# oamma " + std::string(command) + "\n";
        if (timestamp)
            out += "# generated " + utc_timestamp() + "\n";
        for (const auto &c : table.comments)
            out += "# " + c + "\n";
        // The destination path is not part of the result, so two runs differing only in --out match
        RunConfig echoed = cfg;
        echoed.out.clear();
        std::istringstream echo(emit_config(echoed));
        for (std::string line; std::getline(echo, line);)
            if (!line.empty())
                out += "# config " + line + "\n";

        auto append_row = [&out](const std::vector<std::string> &row) {
            for (std::size_t i = 0; i < row.size(); ++i)
                out += (i ? "," : "") + row[i];
            out += "\n";
        };
        append_row(table.header);
        for (const auto &row : table.rows)
            append_row(row);
        return out;
    }

    CsvTable parse_csv(std::string_view text)
    {
        CsvTable t;
        std::istringstream in{std::string(text)};
        bool have_header = false;
        for (std::string line; std::getline(in, line);)
        {
            if (line.empty())
                continue;
            if (line.front() == '#')
            {
                t.comments.push_back(line.size() > 2 ? line.substr(2) : "");
                continue;
            }
            std::vector<std::string> cells;
            std::size_t start = 0;
            while (true)
            {
                const auto comma = line.find(',', start);
                cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
                if (comma == std::string::npos)
                    break;
                start = comma + 1;
            }
            if (!have_header)
            {
                t.header = std::move(cells);
                have_header = true;
            }
            else
                t.rows.push_back(std::move(cells));
        }
        return t;
    }

    Scenario make_scenario(const RunConfig &run, int elements)
    {
        validate(run);
        Scenario sc;
        const int k = elements > 0 ? elements : run.tx_elements;
        const int v = elements > 0 ? elements : run.rx_elements;
        sc.cfg = make_uca_pair(k, v, run.tx_radius_m, run.rx_radius_m, run.tx_rotation_deg * deg, run.rx_rotation_deg * deg);
        sc.link = make_link(run.frequency_hz, cdouble{run.beta_re, run.beta_im});
        sc.pose = make_pose(run.distance_wavelengths * sc.link.wavelength, run.theta_deg * deg, run.phi_deg * deg);
        sc.total_power = run.total_power_w;
        sc.link.noise_variance = noise_for_snr(sc, run.snr_db);
        sc.pilot_noise_variance = noise_for_snr(sc, run.pilot_snr_db);
        return sc;
    }

    double noise_for_snr(const Scenario &sc, double snr_db)
    {
        if (std::isinf(snr_db) && snr_db > 0)
            return 0.0;
        return sc.total_power * farfield_entry_power(sc.link, sc.pose.distance) / std::pow(10.0, snr_db / 10.0);
    }

    EstimationScenario estimation_scenario(const Scenario &sc, const RunConfig &run)
    {
        EstimationScenario es;
        es.cfg = sc.cfg;
        es.pose = sc.pose;
        es.link = sc.link;
        es.pilot_power = sc.total_power / double(sc.cfg.tx_elements);
        es.pilot_noise_variance = sc.pilot_noise_variance;
        es.reference_rotation = sc.cfg.tx_rotation;
        es.prior_power = farfield_entry_power(sc.link, sc.pose.distance);
        es.nls_phi_max = run.nls_phi_max_deg * deg;
        return es;
    }

    CsvTable cmd_channel(const RunConfig &run)
    {
        const Scenario sc = make_scenario(run);
        const ChannelMatrix h = build_matrix(sc.cfg, sc.pose, sc.link, parse_channel_model(run.model));
        CsvTable t;
        t.header = {"v", "k", "model", "re", "im", "magnitude", "phase_rad"};
        for (int v = 0; v < sc.cfg.rx_elements; ++v)
            for (int k = 0; k < sc.cfg.tx_elements; ++k)
            {
                const cdouble g = h.entries(v, k);
                t.rows.push_back({std::to_string(v), std::to_string(k), run.model, fmt(g.real()), fmt(g.imag()),
                                  fmt(std::abs(g)), fmt(std::arg(g))});
            }
        const ApproximationReport rep = approximation_report(sc.cfg, sc.pose, sc.link);
        t.comments.push_back("max_rel_distance_error " + fmt(rep.max_rel_distance_error));
        t.comments.push_back("max_rel_gain_error " + fmt(rep.max_rel_gain_error));
        t.comments.push_back("mean_phase_error_rad " + fmt(rep.mean_phase_error));
        return t;
    }

    CsvTable cmd_estimate(const RunConfig &run)
    {
        const Scenario sc = make_scenario(run);
        const EstimationScenario es = estimation_scenario(sc, run);
        const ChannelModel model = parse_channel_model(run.model);
        const ChannelMatrix h = build_matrix(sc.cfg, sc.pose, sc.link, model);
        const CMatrix pilots = pilot_matrix(sc.cfg, es.pilot_power);
        const double bound = ambiguity_bound(sc.cfg, sc.link, sc.pose.distance);
        const bool closed_ok = sc.cfg.tx_elements % 4 == 0 && sc.cfg.rx_elements % 4 == 0 &&
                               sc.cfg.tx_rotation == sc.cfg.rx_rotation;

        CsvTable t;
        t.comments.push_back(snr_comment());
        t.header = {"method",        "model",       "K",
                    "V",             "pilot_snr_db", "theta_deg",
                    "phi_deg",       "seed",        "theta_hat_deg",
                    "phi_hat_deg",   "theta_error_rad", "phi_error_rad",
                    "ambiguous",     "residual",    "ambiguity_bound_deg"};

        std::vector<std::vector<std::string>> rows(run.seeds.size() * 2);
        parallel_for(run.seeds.size(), [&](std::size_t i) {
            const std::uint64_t seed = run.seeds[i];
            const CMatrix y = transmit_pilots(h, pilots, NoiseSpec{es.pilot_noise_variance, seed});
            ChannelMatrix h_hat = lmmse_estimate(y, pilots, es.pilot_noise_variance, es.prior_power);
            h_hat.cfg = sc.cfg;
            h_hat.link = sc.link;
            auto row = [&](const AngleEstimate &est) {
                return std::vector<std::string>{std::string(to_string(est.method)),
                                                run.model,
                                                std::to_string(sc.cfg.tx_elements),
                                                std::to_string(sc.cfg.rx_elements),
                                                fmt(run.pilot_snr_db),
                                                fmt(run.theta_deg),
                                                fmt(run.phi_deg),
                                                std::to_string(seed),
                                                fmt(est.theta_hat / deg),
                                                fmt(est.phi_hat / deg),
                                                fmt(std::abs(wrap_pi(est.theta_hat - sc.pose.theta))),
                                                fmt(std::abs(est.phi_hat - sc.pose.phi)),
                                                fmt_bool(est.ambiguous),
                                                fmt(est.residual),
                                                fmt(bound / deg)};
            };
            if (closed_ok)
                rows[2 * i] = row(closed_form_angles(h_hat, es));
            rows[2 * i + 1] = row(nls_angles(h_hat, es));
        });
        for (auto &r : rows)
            if (!r.empty())
                t.rows.push_back(std::move(r));
        return t;
    }

    CsvTable cmd_align(const RunConfig &run)
    {
        const Scenario sc = make_scenario(run);
        const EstimationScenario es = estimation_scenario(sc, run);
        const ChannelModel model = parse_channel_model(run.model);

        LoopOptions opt;
        opt.estimator = parse_estimator_choice(run.estimator);
        opt.se_variant = parse_se_variant(run.se_variant);
        opt.total_power = sc.total_power;
        opt.max_iterations = run.max_iterations;
        opt.tolerance = run.loop_tolerance_rad;
        opt.quantizer_bits = run.quantizer_bits;

        CsvTable t;
        t.comments.push_back(snr_comment());
        t.header = {"model",         "se_variant",  "K",          "V",        "snr_db",
                    "pilot_snr_db",  "theta_deg",   "phi_deg",    "seed",     "method",
                    "theta_hat_deg", "phi_hat_deg", "ambiguous",  "residual", "residual_angle_deg",
                    "iterations",    "se_before",   "se_after"};
        t.rows.resize(run.seeds.size());
        parallel_for(run.seeds.size(), [&](std::size_t i) {
            const LoopReport rep = run_closed_loop(es, NoiseSpec{sc.pilot_noise_variance, run.seeds[i]}, model, opt);
            t.rows[i] = {run.model,
                         run.se_variant,
                         std::to_string(sc.cfg.tx_elements),
                         std::to_string(sc.cfg.rx_elements),
                         fmt(run.snr_db),
                         fmt(run.pilot_snr_db),
                         fmt(run.theta_deg),
                         fmt(run.phi_deg),
                         std::to_string(run.seeds[i]),
                         std::string(to_string(rep.estimate.method)),
                         fmt(rep.estimate.theta_hat / deg),
                         fmt(rep.estimate.phi_hat / deg),
                         fmt_bool(rep.estimate.ambiguous),
                         fmt(rep.estimate.residual),
                         fmt(rep.residual_angle / deg),
                         std::to_string(rep.iterations),
                         fmt(rep.se_before),
                         fmt(rep.se_after)};
        });
        return t;
    }

    CsvTable cmd_sweep_snr(const RunConfig &run)
    {
        validate(run);
        std::vector<SweepPoint> points;
        const std::vector<double> snrs = inclusive_range(run.snr_db_min, run.snr_db_max, run.snr_db_step);
        for (int k : run.element_counts)
            for (double snr : snrs)
                for (std::uint64_t seed : run.seeds)
                    points.push_back({k, snr, run.theta_deg, run.phi_deg, seed});
        const int max_modes = *std::max_element(run.element_counts.begin(), run.element_counts.end());
        CsvTable t = run_sweep(run, points, max_modes);
        t.comments.insert(t.comments.begin(), snr_comment());
        return t;
    }

    CsvTable cmd_sweep_angle(const RunConfig &run)
    {
        validate(run);
        std::vector<SweepPoint> points;
        for (double theta : inclusive_range(run.theta_deg_min, run.theta_deg_max, run.theta_deg_step))
            for (double phi : inclusive_range(run.phi_deg_min, run.phi_deg_max, run.phi_deg_step))
                for (std::uint64_t seed : run.seeds)
                    points.push_back({run.tx_elements, run.snr_db, theta, phi, seed});
        CsvTable t = run_sweep(run, points, run.tx_elements);
        t.comments.insert(t.comments.begin(), snr_comment());
        return t;
    }

} // namespace oamma
