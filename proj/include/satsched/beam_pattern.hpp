// SPDX-License-Identifier: Apache-2.0
//
// satsched - user scheduling and power allocation for precoded multi-beam
// satellite downlinks
// Copyright (C) 2026 the satsched contributors
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

#ifndef SATSCHED_BEAM_PATTERN_HPP
#define SATSCHED_BEAM_PATTERN_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "satsched/config.hpp"

namespace satsched {

// u value at which the tapered-aperture pattern is 3 dB below boresight
inline constexpr double kHalfPowerArg = 2.07123;

// Normalized tapered-aperture radiation pattern
//   [ J1(u)/(2u) + 36 J3(u)/u^3 ]^2,  -> 1 as u -> 0.
inline double tapered_aperture_fraction(double u) {
    u = std::abs(u);
    if (u < 1e-6)
        return 1.0;
    const double b = std::cyl_bessel_j(1.0, u) / (2.0 * u) +
                     36.0 * std::cyl_bessel_j(3.0, u) / (u * u * u);
    return b * b;
}

// Parametric spot-beam gain: peak gain at boresight, tapered-aperture
// roll-off parameterized by the 3 dB half-angle, clamped 40 dB below peak.
class ParametricBeamPattern {
  public:
    ParametricBeamPattern(double peak_gain_dbi, double theta_3db_rad)
        : peak_linear_(std::pow(10.0, peak_gain_dbi / 10.0)), theta_3db_(theta_3db_rad) {
        if (theta_3db_rad <= 0)
            throw ConfigError("beam_radius_3db_km", "3 dB half-angle must be positive");
    }

    double peak_linear() const { return peak_linear_; }
    double theta_3db() const { return theta_3db_; }

    double gain_linear(double theta_rad) const {
        const double u = kHalfPowerArg * std::sin(std::abs(theta_rad)) / std::sin(theta_3db_);
        const double frac = std::max(tapered_aperture_fraction(u), kFloorFraction);
        return peak_linear_ * frac;
    }

  private:
    static constexpr double kFloorFraction = 1e-4; // -40 dB sidelobe floor
    double peak_linear_;
    double theta_3db_;
};

class BeamGridRangeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Gain map imported from CSV (header: x_km,y_km,beam_id,gain_dbi), one
// row-major rectangular grid per beam. Queries are interpolated bilinearly
// in dBi; positions outside a beam's grid are an error.
class CsvBeamPattern {
  public:
    static CsvBeamPattern load(const std::string &path) {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("beam_pattern_source", "cannot open '" + path + "'");
        return parse(in, path);
    }

    static CsvBeamPattern parse(std::istream &in, const std::string &origin = "<stream>") {
        std::string line;
        if (!std::getline(in, line))
            throw ConfigError("beam_pattern_source", origin + ": empty file");
        if (detail::trim(line) != "x_km,y_km,beam_id,gain_dbi")
            throw ConfigError("beam_pattern_source",
                              origin + ": expected header 'x_km,y_km,beam_id,gain_dbi'");
        struct Sample {
            double x, y, g;
        };
        std::map<int, std::vector<Sample>> rows;
        int lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            line = detail::trim(line);
            if (line.empty())
                continue;
            std::istringstream ls(line);
            std::string fx, fy, fb, fg;
            if (!std::getline(ls, fx, ',') || !std::getline(ls, fy, ',') ||
                !std::getline(ls, fb, ',') || !std::getline(ls, fg))
                throw ConfigError("beam_pattern_source",
                                  origin + ": line " + std::to_string(lineno) + ": need 4 fields");
            const std::string at = origin + ": line " + std::to_string(lineno);
            Sample s{detail::parse_double(at, detail::trim(fx)),
                     detail::parse_double(at, detail::trim(fy)),
                     detail::parse_double(at, detail::trim(fg))};
            rows[static_cast<int>(detail::parse_int(at, detail::trim(fb)))].push_back(s);
        }
        CsvBeamPattern pat;
        for (auto &[beam, samples] : rows) {
            BeamGrid grid;
            for (const auto &s : samples) {
                grid.xs.push_back(s.x);
                grid.ys.push_back(s.y);
            }
            auto uniq = [](std::vector<double> &v) {
                std::sort(v.begin(), v.end());
                v.erase(std::unique(v.begin(), v.end()), v.end());
            };
            uniq(grid.xs);
            uniq(grid.ys);
            const std::size_t nx = grid.xs.size(), ny = grid.ys.size();
            if (nx < 2 || ny < 2 || nx * ny != samples.size())
                throw ConfigError("beam_pattern_source",
                                  origin + ": beam " + std::to_string(beam) +
                                      " does not form a complete rectangular grid");
            grid.gain_dbi.assign(nx * ny, std::nan(""));
            for (const auto &s : samples) {
                const std::size_t ix = index_of(grid.xs, s.x);
                const std::size_t iy = index_of(grid.ys, s.y);
                grid.gain_dbi[iy * nx + ix] = s.g;
            }
            for (double g : grid.gain_dbi)
                if (std::isnan(g))
                    throw ConfigError("beam_pattern_source",
                                      origin + ": beam " + std::to_string(beam) +
                                          " has duplicate or missing grid cells");
            pat.grids_.emplace(beam, std::move(grid));
        }
        if (pat.grids_.empty())
            throw ConfigError("beam_pattern_source", origin + ": no samples");
        return pat;
    }

    bool has_beam(int beam_id) const { return grids_.count(beam_id) != 0; }

    double gain_dbi(double x_km, double y_km, int beam_id) const {
        auto it = grids_.find(beam_id);
        if (it == grids_.end())
            throw BeamGridRangeError("no gain grid for beam " + std::to_string(beam_id));
        const BeamGrid &g = it->second;
        if (x_km < g.xs.front() || x_km > g.xs.back() || y_km < g.ys.front() ||
            y_km > g.ys.back())
            throw BeamGridRangeError("position (" + std::to_string(x_km) + ", " +
                                     std::to_string(y_km) + ") km outside grid of beam " +
                                     std::to_string(beam_id));
        const std::size_t ix = cell_of(g.xs, x_km);
        const std::size_t iy = cell_of(g.ys, y_km);
        const double tx = (x_km - g.xs[ix]) / (g.xs[ix + 1] - g.xs[ix]);
        const double ty = (y_km - g.ys[iy]) / (g.ys[iy + 1] - g.ys[iy]);
        const std::size_t nx = g.xs.size();
        const double g00 = g.gain_dbi[iy * nx + ix];
        const double g10 = g.gain_dbi[iy * nx + ix + 1];
        const double g01 = g.gain_dbi[(iy + 1) * nx + ix];
        const double g11 = g.gain_dbi[(iy + 1) * nx + ix + 1];
        return (1 - ty) * ((1 - tx) * g00 + tx * g10) + ty * ((1 - tx) * g01 + tx * g11);
    }

    double gain_linear(double x_km, double y_km, int beam_id) const {
        return std::pow(10.0, gain_dbi(x_km, y_km, beam_id) / 10.0);
    }

  private:
    struct BeamGrid {
        std::vector<double> xs, ys;
        std::vector<double> gain_dbi; // ys-major
    };

    static std::size_t index_of(const std::vector<double> &axis, double v) {
        auto it = std::lower_bound(axis.begin(), axis.end(), v);
        return static_cast<std::size_t>(it - axis.begin());
    }

    // index of the cell whose [axis[i], axis[i+1]] interval contains v
    static std::size_t cell_of(const std::vector<double> &axis, double v) {
        auto it = std::upper_bound(axis.begin(), axis.end(), v);
        std::size_t i = static_cast<std::size_t>(it - axis.begin());
        if (i > 0)
            --i;
        if (i + 1 >= axis.size())
            i = axis.size() - 2;
        return i;
    }

    std::map<int, BeamGrid> grids_;
};

} // namespace satsched

#endif
