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

#ifndef OAMMA_COMMANDS_HPP
#define OAMMA_COMMANDS_HPP

#include "oamma/alignment.hpp"
#include "oamma/config.hpp"

#include <string>
#include <vector>

namespace oamma
{
    struct CsvTable
    {
        std::vector<std::string> comments; // written as "# ..." lines before the header
        std::vector<std::string> header;
        std::vector<std::vector<std::string>> rows;

        // Index of a header column; throws std::out_of_range if absent.
        std::size_t column(std::string_view name) const;
    };

    // Comment lines (command, optional timestamp, echoed config), then the header row, then rows.
    std::string render_csv(const CsvTable &table, const RunConfig &cfg, std::string_view command, bool timestamp);

    // Parses text produced by render_csv back into a table (comments kept, no quoting support).
    CsvTable parse_csv(std::string_view text);

    // Physical objects derived from a run configuration.
    struct Scenario
    {
        UcaPairConfig cfg;
        Pose pose;
        LinkBudget link;          // link.noise_variance is the data-phase sigma^2
        double total_power = 1.0;
        double pilot_noise_variance = 0.0;
    };

    // Builds the scenario for the given element count (K = V = elements; 0 keeps the config's counts).
    Scenario make_scenario(const RunConfig &run, int elements = 0);

    // sigma^2 giving a per-element receive SNR of snr_db: P_total |D|^2 / 10^(snr_db / 10); inf -> 0.
    double noise_for_snr(const Scenario &sc, double snr_db);

    EstimationScenario estimation_scenario(const Scenario &sc, const RunConfig &run);

    CsvTable cmd_channel(const RunConfig &run);
    CsvTable cmd_estimate(const RunConfig &run);
    CsvTable cmd_align(const RunConfig &run);
    CsvTable cmd_sweep_snr(const RunConfig &run);
    CsvTable cmd_sweep_angle(const RunConfig &run);

    struct SelftestOptions
    {
        bool flip_cross_term_sign = false; // mutation hook: negates b_vk inside the identity check
    };

    struct SelftestCheck
    {
        std::string name;
        bool passed = false;
        std::string detail;
    };

    std::vector<SelftestCheck> cmd_selftest(const SelftestOptions &options = {});

} // namespace oamma

#endif
