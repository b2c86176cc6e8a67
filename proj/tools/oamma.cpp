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

// oamma: misaligned UCA-OAM link simulator with movable-antenna alignment.

#include "oamma/commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace
{
    struct GlobalFlags
    {
        std::string config_path;
        std::string out_path;
        std::uint64_t seed = 0;
        std::string model;
        std::string se;
        bool no_timestamp = false;
        std::string inject_fault;
    };

    oamma::RunConfig load(const GlobalFlags &flags, CLI::App &app)
    {
        oamma::RunConfig cfg = flags.config_path.empty() ? oamma::RunConfig{} : oamma::parse_config(flags.config_path);
        if (app.count("--seed"))
            cfg.seeds = {flags.seed};
        if (!flags.model.empty())
            cfg.model = flags.model;
        if (!flags.se.empty())
            cfg.se_variant = flags.se == "paper" ? "paper" : "sinr";
        if (!flags.out_path.empty())
            cfg.out = flags.out_path;
        oamma::validate(cfg);
        return cfg;
    }

    int write_output(const std::string &text, const std::string &path)
    {
        if (path.empty() || path == "-")
        {
            std::cout << text;
            return 0;
        }
        std::ofstream file(path, std::ios::binary);
        if (!file)
        {
            std::cerr << "error: cannot write '" << path << "'\n";
            return 2;
        }
        file << text;
        return file ? 0 : 2;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Misaligned UCA-OAM link simulator with movable-antenna alignment"};
    app.require_subcommand(1);

    GlobalFlags flags;
    app.add_option("--config", flags.config_path, "Sectioned key=value configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", flags.out_path, "Output CSV path (default: stdout)");
    app.add_option("--seed", flags.seed, "Single noise seed, replaces the configured seed list");
    app.add_option("--model", flags.model, "Channel model")->check(CLI::IsMember({"exact", "farfield"}));
    app.add_option("--se", flags.se, "Spectrum-efficiency variant")->check(CLI::IsMember({"paper", "sinr"}));
    app.add_flag("--no-timestamp", flags.no_timestamp, "Omit the timestamp comment line");

    // options given after the subcommand name fall through to the global flags
    app.fallthrough();
    auto *selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");
    selftest->add_option("--inject-fault", flags.inject_fault, "Test hook: deliberately break a check")
        ->check(CLI::IsMember({"b-sign"}))
        ->group("");
    auto *channel = app.add_subcommand("channel", "Emit the V x K channel matrix");
    auto *estimate = app.add_subcommand("estimate", "Pilot-based angle estimation (closed form and NLS)");
    auto *align = app.add_subcommand("align", "Closed-loop estimation and movable-antenna correction");
    auto *sweep_snr = app.add_subcommand("sweep-snr", "SE versus SNR for each element count, with and without MA");
    auto *sweep_angle = app.add_subcommand("sweep-angle", "SE over the (theta, phi) misalignment grid");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (selftest->parsed())
        {
            oamma::SelftestOptions opt;
            opt.flip_cross_term_sign = flags.inject_fault == "b-sign";
            int failures = 0;
            for (const auto &check : oamma::cmd_selftest(opt))
            {
                std::printf("%s %-26s %s\n", check.passed ? "PASS" : "FAIL", check.name.c_str(), check.detail.c_str());
                failures += check.passed ? 0 : 1;
            }
            std::printf("%s: %d failure(s)\n", failures ? "selftest FAILED" : "selftest passed", failures);
            return failures ? 1 : 0;
        }

        const oamma::RunConfig cfg = load(flags, app);
        oamma::CsvTable table;
        std::string name;
        if (channel->parsed())
            table = oamma::cmd_channel(cfg), name = "channel";
        else if (estimate->parsed())
            table = oamma::cmd_estimate(cfg), name = "estimate";
        else if (align->parsed())
            table = oamma::cmd_align(cfg), name = "align";
        else if (sweep_snr->parsed())
            table = oamma::cmd_sweep_snr(cfg), name = "sweep-snr";
        else if (sweep_angle->parsed())
            table = oamma::cmd_sweep_angle(cfg), name = "sweep-angle";

        return write_output(oamma::render_csv(table, cfg, name, !flags.no_timestamp), cfg.out);
    }
    catch (const oamma::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
