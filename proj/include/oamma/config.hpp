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

#ifndef OAMMA_CONFIG_HPP
#define OAMMA_CONFIG_HPP

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oamma
{
    // Thrown for malformed lines, unknown keys and out-of-range values. line() is 0 when the
    // problem is not tied to a particular line.
    class ConfigError : public std::runtime_error
    {
    public:
        ConfigError(const std::string &what, int line = 0) : std::runtime_error(what), line_(line) {}
        int line() const { return line_; }

    private:
        int line_;
    };

    // Run configuration. Defaults: 5.8 GHz carrier, d = 20 wavelengths, R_t = R_r = 0.5 m,
    // beta = 1, a_t = a_r = 0.
    struct RunConfig
    {
        // [array]
        int tx_elements = 8;
        int rx_elements = 8;
        double tx_radius_m = 0.5;
        double rx_radius_m = 0.5;
        double tx_rotation_deg = 0.0;
        double rx_rotation_deg = 0.0;

        // [pose]
        double distance_wavelengths = 20.0;
        double theta_deg = 30.0;
        double phi_deg = 1.0;

        // [link]
        double frequency_hz = 5.8e9;
        double beta_re = 1.0;
        double beta_im = 0.0;
        double total_power_w = 1.0;
        double snr_db = 20.0; // per-element receive SNR, P_total |D|^2 / sigma^2

        // [estimation]
        double pilot_snr_db = std::numeric_limits<double>::infinity(); // inf = noiseless pilots
        std::string estimator = "auto";
        int quantizer_bits = 0;
        int max_iterations = 1;
        double loop_tolerance_rad = 1e-4;
        double nls_phi_max_deg = 0.0; // 0 = automatic

        // [sweep]
        double snr_db_min = 0.0;
        double snr_db_max = 30.0;
        double snr_db_step = 5.0;
        double theta_deg_min = 0.0;
        double theta_deg_max = 350.0;
        double theta_deg_step = 10.0;
        double phi_deg_min = 0.0;
        double phi_deg_max = 1.6;
        double phi_deg_step = 0.1;
        std::vector<int> element_counts{4, 8, 16};
        std::vector<std::uint64_t> seeds{1};

        // [output]
        std::string model = "farfield";
        std::string se_variant = "sinr";
        std::string out;

        bool operator==(const RunConfig &) const = default;
    };

    RunConfig parse_config_text(std::string_view text);
    RunConfig parse_config(const std::string &path);

    // Range checks shared by the parser and command-line overrides. Throws ConfigError.
    void validate(const RunConfig &cfg);

    // Sectioned key = value text, every key present, numbers at 17 significant digits.
    std::string emit_config(const RunConfig &cfg);

    // Inclusive arithmetic grid min, min + step, ..., <= max (with a small tolerance on max).
    std::vector<double> inclusive_range(double min, double max, double step);

    // "%.17g", with inf/nan spelled the way the parser accepts them.
    std::string format_double(double value);

} // namespace oamma

#endif
