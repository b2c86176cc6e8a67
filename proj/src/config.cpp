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

#include "oamma/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

namespace oamma
{
    namespace
    {
        using Check = std::function<std::optional<std::string>(const RunConfig &)>;

        struct Field
        {
            std::string_view section;
            std::string_view key;
            std::function<void(RunConfig &, std::string_view)> parse; // throws std::invalid_argument
            std::function<std::string(const RunConfig &)> emit;
            Check check;
        };

        std::string_view trim(std::string_view s)
        {
            const auto first = s.find_first_not_of(" \t\r\n");
            if (first == std::string_view::npos)
                return {};
            const auto last = s.find_last_not_of(" \t\r\n");
            return s.substr(first, last - first + 1);
        }

        double to_double(std::string_view s)
        {
            const std::string text(trim(s));
            if (text.empty())
                throw std::invalid_argument("expected a number");
            char *end = nullptr;
            const double value = std::strtod(text.c_str(), &end);
            if (end != text.c_str() + text.size() || std::isnan(value))
                throw std::invalid_argument("'" + text + "' is not a number");
            return value;
        }

        template <typename Int>
        Int to_int(std::string_view s)
        {
            s = trim(s);
            Int value{};
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
            if (ec != std::errc() || ptr != s.data() + s.size())
                throw std::invalid_argument("'" + std::string(s) + "' is not an integer");
            return value;
        }

        template <typename Int>
        std::vector<Int> to_int_list(std::string_view s)
        {
            std::vector<Int> out;
            while (true)
            {
                const auto comma = s.find(',');
                out.push_back(to_int<Int>(s.substr(0, comma)));
                if (comma == std::string_view::npos)
                    break;
                s.remove_prefix(comma + 1);
            }
            return out;
        }

        template <typename T>
        std::string join(const std::vector<T> &values)
        {
            std::string out;
            for (std::size_t i = 0; i < values.size(); ++i)
                out += (i ? "," : "") + std::to_string(values[i]);
            return out;
        }

        Field real(std::string_view section, std::string_view key, double RunConfig::*member,
                   std::function<bool(double)> ok, std::string_view requirement)
        {
            return {section, key, [member](RunConfig &c, std::string_view v) { c.*member = to_double(v); },
                    [member](const RunConfig &c) { return format_double(c.*member); },
                    [member, ok, key, requirement](const RunConfig &c) -> std::optional<std::string> {
                        if (ok(c.*member))
                            return std::nullopt;
                        return std::string(key) + " = " + format_double(c.*member) + " out of range (" +
                               std::string(requirement) + ")";
                    }};
        }

        Field integer(std::string_view section, std::string_view key, int RunConfig::*member, int lo, int hi)
        {
            return {section, key, [member](RunConfig &c, std::string_view v) { c.*member = to_int<int>(v); },
                    [member](const RunConfig &c) { return std::to_string(c.*member); },
                    [member, lo, hi, key](const RunConfig &c) -> std::optional<std::string> {
                        if (c.*member >= lo && c.*member <= hi)
                            return std::nullopt;
                        return std::string(key) + " = " + std::to_string(c.*member) + " out of range [" +
                               std::to_string(lo) + ", " + std::to_string(hi) + "]";
                    }};
        }

        Field choice(std::string_view section, std::string_view key, std::string RunConfig::*member,
                     std::vector<std::string> allowed)
        {
            return {section, key, [member](RunConfig &c, std::string_view v) { c.*member = std::string(trim(v)); },
                    [member](const RunConfig &c) { return c.*member; },
                    [member, allowed, key](const RunConfig &c) -> std::optional<std::string> {
                        for (const auto &a : allowed)
                            if (c.*member == a)
                                return std::nullopt;
                        std::string msg = std::string(key) + " = '" + c.*member + "' not one of";
                        for (const auto &a : allowed)
                            msg += " " + a;
                        return msg;
                    }};
        }

        bool finite(double x) { return std::isfinite(x); }
        bool positive(double x) { return x > 0.0 && std::isfinite(x); }

        const std::vector<Field> &fields()
        {
            static const std::vector<Field> table = [] {
                std::vector<Field> f;
                f.push_back(integer("array", "tx_elements", &RunConfig::tx_elements, 1, 4096));
                f.push_back(integer("array", "rx_elements", &RunConfig::rx_elements, 1, 4096));
                f.push_back(real("array", "tx_radius_m", &RunConfig::tx_radius_m, positive, "> 0"));
                f.push_back(real("array", "rx_radius_m", &RunConfig::rx_radius_m, positive, "> 0"));
                f.push_back(real("array", "tx_rotation_deg", &RunConfig::tx_rotation_deg, finite, "finite"));
                f.push_back(real("array", "rx_rotation_deg", &RunConfig::rx_rotation_deg, finite, "finite"));

                f.push_back(real("pose", "distance_wavelengths", &RunConfig::distance_wavelengths, positive, "> 0"));
                f.push_back(real("pose", "theta_deg", &RunConfig::theta_deg, finite, "finite"));
                f.push_back(real("pose", "phi_deg", &RunConfig::phi_deg, [](double x) { return x >= 0.0 && x < 90.0; },
                                 "[0, 90)"));

                f.push_back(real("link", "frequency_hz", &RunConfig::frequency_hz, positive, "> 0"));
                f.push_back(real("link", "beta_re", &RunConfig::beta_re, finite, "finite"));
                f.push_back(real("link", "beta_im", &RunConfig::beta_im, finite, "finite"));
                f.push_back(real("link", "total_power_w", &RunConfig::total_power_w, positive, "> 0"));
                f.push_back(real("link", "snr_db", &RunConfig::snr_db, finite, "finite"));

                f.push_back(real("estimation", "pilot_snr_db", &RunConfig::pilot_snr_db,
                                 [](double x) { return !std::isnan(x) && x > -std::numeric_limits<double>::infinity(); },
                                 "finite or inf"));
                f.push_back(choice("estimation", "estimator", &RunConfig::estimator, {"auto", "closed_form", "nls"}));
                f.push_back(integer("estimation", "quantizer_bits", &RunConfig::quantizer_bits, 0, 52));
                f.push_back(integer("estimation", "max_iterations", &RunConfig::max_iterations, 1, 5));
                f.push_back(real("estimation", "loop_tolerance_rad", &RunConfig::loop_tolerance_rad, positive, "> 0"));
                f.push_back(real("estimation", "nls_phi_max_deg", &RunConfig::nls_phi_max_deg,
                                 [](double x) { return x >= 0.0 && x < 90.0; }, "[0, 90), 0 = automatic"));

                f.push_back(real("sweep", "snr_db_min", &RunConfig::snr_db_min, finite, "finite"));
                f.push_back(real("sweep", "snr_db_max", &RunConfig::snr_db_max, finite, "finite"));
                f.push_back(real("sweep", "snr_db_step", &RunConfig::snr_db_step, positive, "> 0"));
                f.push_back(real("sweep", "theta_deg_min", &RunConfig::theta_deg_min, finite, "finite"));
                f.push_back(real("sweep", "theta_deg_max", &RunConfig::theta_deg_max, finite, "finite"));
                f.push_back(real("sweep", "theta_deg_step", &RunConfig::theta_deg_step, positive, "> 0"));
                f.push_back(real("sweep", "phi_deg_min", &RunConfig::phi_deg_min,
                                 [](double x) { return x >= 0.0 && x < 90.0; }, "[0, 90)"));
                f.push_back(real("sweep", "phi_deg_max", &RunConfig::phi_deg_max,
                                 [](double x) { return x >= 0.0 && x < 90.0; }, "[0, 90)"));
                f.push_back(real("sweep", "phi_deg_step", &RunConfig::phi_deg_step, positive, "> 0"));
                f.push_back({"sweep", "element_counts",
                             [](RunConfig &c, std::string_view v) { c.element_counts = to_int_list<int>(v); },
                             [](const RunConfig &c) { return join(c.element_counts); },
                             [](const RunConfig &c) -> std::optional<std::string> {
                                 if (c.element_counts.empty())
                                     return "element_counts must not be empty";
                                 for (int k : c.element_counts)
                                     if (k < 1 || k > 4096)
                                         return "element_counts entry " + std::to_string(k) + " out of range [1, 4096]";
                                 return std::nullopt;
                             }});
                f.push_back({"sweep", "seeds",
                             [](RunConfig &c, std::string_view v) { c.seeds = to_int_list<std::uint64_t>(v); },
                             [](const RunConfig &c) { return join(c.seeds); },
                             [](const RunConfig &c) -> std::optional<std::string> {
                                 if (c.seeds.empty())
                                     return "seeds must not be empty";
                                 return std::nullopt;
                             }});

                f.push_back(choice("output", "model", &RunConfig::model, {"exact", "farfield"}));
                f.push_back(choice("output", "se_variant", &RunConfig::se_variant, {"paper", "sinr"}));
                f.push_back({"output", "out", [](RunConfig &c, std::string_view v) { c.out = std::string(trim(v)); },
                             [](const RunConfig &c) { return c.out; },
                             [](const RunConfig &) -> std::optional<std::string> { return std::nullopt; }});
                return f;
            }();
            return table;
        }

        std::optional<std::string> cross_check(const RunConfig &c)
        {
            if (c.snr_db_max < c.snr_db_min)
                return "snr_db_max must be >= snr_db_min";
            if (c.theta_deg_max < c.theta_deg_min)
                return "theta_deg_max must be >= theta_deg_min";
            if (c.phi_deg_max < c.phi_deg_min)
                return "phi_deg_max must be >= phi_deg_min";
            if (c.beta_re == 0.0 && c.beta_im == 0.0)
                return "beta must be nonzero";
            return std::nullopt;
        }
    } // namespace

    std::string format_double(double value)
    {
        if (std::isinf(value))
            return value > 0 ? "inf" : "-inf";
        if (std::isnan(value))
            return "nan";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", value);
        return buf;
    }

    std::vector<double> inclusive_range(double min, double max, double step)
    {
        if (!(step > 0.0) || max < min)
            throw std::invalid_argument("inclusive_range: need step > 0 and max >= min");
        const auto count = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
        std::vector<double> out(count);
        for (std::size_t i = 0; i < count; ++i)
            out[i] = min + double(i) * step;
        return out;
    }

    void validate(const RunConfig &cfg)
    {
        for (const Field &f : fields())
            if (auto err = f.check(cfg))
                throw ConfigError(*err);
        if (auto err = cross_check(cfg))
            throw ConfigError(*err);
    }

    RunConfig parse_config_text(std::string_view text)
    {
        RunConfig cfg;
        std::string section;
        int line_no = 0;
        std::istringstream in{std::string(text)};
        std::string raw;
        while (std::getline(in, raw))
        {
            ++line_no;
            std::string_view line = raw;
            if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos)
                line = line.substr(0, hash);
            line = trim(line);
            if (line.empty())
                continue;

            if (line.front() == '[')
            {
                if (line.back() != ']' || line.size() < 3)
                    throw ConfigError("line " + std::to_string(line_no) + ": malformed section header", line_no);
                section = std::string(trim(line.substr(1, line.size() - 2)));
                bool known = false;
                for (const Field &f : fields())
                    known = known || f.section == section;
                if (!known)
                    throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + section + "]", line_no);
                continue;
            }

            const auto eq = line.find('=');
            if (eq == std::string_view::npos)
                throw ConfigError("line " + std::to_string(line_no) + ": expected key = value", line_no);
            const std::string_view key = trim(line.substr(0, eq));
            const std::string_view value = trim(line.substr(eq + 1));
            if (key.empty())
                throw ConfigError("line " + std::to_string(line_no) + ": missing key", line_no);

            const Field *match = nullptr;
            for (const Field &f : fields())
                if (f.key == key && (section.empty() || f.section == section))
                    match = &f;
            if (!match)
                throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'" +
                                      (section.empty() ? "" : " in [" + section + "]"),
                                  line_no);
            try
            {
                match->parse(cfg, value);
            }
            catch (const std::invalid_argument &e)
            {
                throw ConfigError("line " + std::to_string(line_no) + ": " + std::string(key) + ": " + e.what(), line_no);
            }
            if (auto err = match->check(cfg))
                throw ConfigError("line " + std::to_string(line_no) + ": " + *err, line_no);
        }
        if (auto err = cross_check(cfg))
            throw ConfigError(*err);
        return cfg;
    }

    RunConfig parse_config(const std::string &path)
    {
        std::ifstream file(path);
        if (!file)
            throw ConfigError("cannot open config file '" + path + "'");
        std::ostringstream text;
        text << file.rdbuf();
        return parse_config_text(text.str());
    }

    std::string emit_config(const RunConfig &cfg)
    {
        std::string out;
        std::string_view section;
        for (const Field &f : fields())
        {
            if (f.section != section)
            {
                section = f.section;
                out += (out.empty() ? "[" : "\n[") + std::string(section) + "]\n";
            }
            out += std::string(f.key) + " = " + f.emit(cfg) + "\n";
        }
        return out;
    }

} // namespace oamma
