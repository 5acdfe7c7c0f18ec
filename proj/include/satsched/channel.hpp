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

#ifndef SATSCHED_CHANNEL_HPP
#define SATSCHED_CHANNEL_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "satsched/beam_pattern.hpp"
#include "satsched/config.hpp"
#include "satsched/rng.hpp"

namespace satsched {

// One fixed terminal on the ground. Positions are planar offsets (km) from
// the sub-satellite point; the slant distance is taken equal for all feeds.
struct UserTerminal {
    int id = 0;
    int beam_id = 0;
    double pos_x_km = 0;
    double pos_y_km = 0;
    double rx_gain = 1.0;            // linear
    std::vector<double> beam_gains;  // linear, one per satellite beam
    double distance_m = 0;
    double phase_rad = 0;            // psi_k in [0, 2pi)
};

// Downlink channel for an ordered user subset, kept in its amplitude/phase
// factorization: h(m,k) = amplitude(m,k) * phase(k), |phase(k)| = 1.
struct ChannelMatrix {
    Eigen::MatrixXd amplitude;                // M x K, non-negative
    std::vector<std::complex<double>> phases; // unit modulus, per column
    Eigen::MatrixXcd h;                       // M x K
    std::vector<int> column_user_ids;

    Eigen::Index beams() const { return h.rows(); }
    Eigen::Index users() const { return h.cols(); }
};

// Receive aperture gain eta * (pi D / lambda)^2.
inline double rx_antenna_gain(double diameter_m, double efficiency, double carrier_freq_ghz) {
    if (diameter_m <= 0 || efficiency <= 0 || carrier_freq_ghz <= 0)
        throw std::domain_error("rx_antenna_gain: all arguments must be positive");
    const double lambda = 299792458.0 / (carrier_freq_ghz * 1e9);
    const double x = std::numbers::pi * diameter_m / lambda;
    return efficiency * x * x;
}

// Hexagonal beam layout: center beam at the sub-satellite point, then rings
// of beams spaced two 3 dB radii apart. Returns the first `count` centers in
// spiral order.
inline std::vector<Eigen::Vector2d> beam_centers(int count, double radius_3db_km) {
    if (count < 1)
        throw ConfigError("num_beams", "must be >= 1");
    const double pitch = 2.0 * radius_3db_km;
    std::vector<Eigen::Vector2d> centers;
    centers.emplace_back(0.0, 0.0);
    // axial hex coordinates, walked ring by ring
    const int dq[6] = {1, 0, -1, -1, 0, 1};
    const int dr[6] = {-1, -1, 0, 1, 1, 0};
    for (int ring = 1; static_cast<int>(centers.size()) < count; ++ring) {
        int q = 0, r = ring; // start at the "south" corner of the ring
        for (int side = 0; side < 6 && static_cast<int>(centers.size()) < count; ++side) {
            for (int step = 0; step < ring && static_cast<int>(centers.size()) < count; ++step) {
                const double x = pitch * (q + 0.5 * r);
                const double y = pitch * (std::sqrt(3.0) / 2.0) * r;
                centers.emplace_back(x, y);
                q += dq[side];
                r += dr[side];
            }
        }
    }
    centers.resize(count);
    return centers;
}

// Angle at the satellite between the boresight towards `boresight_km` and the
// direction towards `point_km`, under the flat-earth approximation.
inline double off_axis_angle(const Eigen::Vector2d &point_km, const Eigen::Vector2d &boresight_km,
                             double orbit_distance_m) {
    const double h_km = orbit_distance_m / 1000.0;
    Eigen::Vector3d vu(point_km.x(), point_km.y(), -h_km);
    Eigen::Vector3d vb(boresight_km.x(), boresight_km.y(), -h_km);
    double c = vu.dot(vb) / (vu.norm() * vb.norm());
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
}

// Resolves the configured gain model; csv:<path> imports a measured map.
class BeamGainModel {
  public:
    static BeamGainModel from_config(const ScenarioConfig &cfg) {
        BeamGainModel m;
        m.orbit_m_ = cfg.orbit_distance_m;
        m.centers_ = beam_centers(cfg.num_beams, cfg.beam_radius_3db_km);
        if (cfg.beam_pattern_source == "parametric") {
            const double theta3 = std::atan(cfg.beam_radius_3db_km * 1000.0 / cfg.orbit_distance_m);
            m.parametric_.emplace(cfg.peak_beam_gain_dbi, theta3);
        } else {
            m.csv_.emplace(CsvBeamPattern::load(cfg.beam_pattern_source.substr(4)));
        }
        return m;
    }

    const std::vector<Eigen::Vector2d> &centers() const { return centers_; }

    double gain_linear(const Eigen::Vector2d &user_km, int beam_id) const {
        if (csv_)
            return csv_->gain_linear(user_km.x(), user_km.y(), beam_id);
        const double theta = off_axis_angle(user_km, centers_.at(beam_id), orbit_m_);
        return parametric_->gain_linear(theta);
    }

  private:
    double orbit_m_ = 0;
    std::vector<Eigen::Vector2d> centers_;
    std::optional<ParametricBeamPattern> parametric_;
    std::optional<CsvBeamPattern> csv_;
};

// Drop users uniformly over every beam's 3 dB disc and populate gains and
// phases. Deterministic given (config, rng state).
inline std::vector<UserTerminal> generate_users(const ScenarioConfig &cfg, Rng &rng) {
    validate(cfg);
    const BeamGainModel model = BeamGainModel::from_config(cfg);
    const double grk =
        rx_antenna_gain(cfg.rx_antenna_diameter_m, cfg.rx_antenna_efficiency, cfg.carrier_freq_ghz);
    std::vector<UserTerminal> users;
    users.reserve(static_cast<std::size_t>(cfg.num_beams) * cfg.users_per_beam);
    int id = 0;
    for (int b = 0; b < cfg.num_beams; ++b) {
        const Eigen::Vector2d c = model.centers()[b];
        for (int u = 0; u < cfg.users_per_beam; ++u) {
            const double radius = cfg.beam_radius_3db_km * std::sqrt(rng.uniform());
            const double angle = 2.0 * std::numbers::pi * rng.uniform();
            const double phase = 2.0 * std::numbers::pi * rng.uniform();
            UserTerminal t;
            t.id = id++;
            t.beam_id = b;
            t.pos_x_km = c.x() + radius * std::cos(angle);
            t.pos_y_km = c.y() + radius * std::sin(angle);
            t.rx_gain = grk;
            t.distance_m = cfg.orbit_distance_m;
            t.phase_rad = phase;
            t.beam_gains.resize(cfg.num_beams);
            for (int m = 0; m < cfg.num_beams; ++m)
                t.beam_gains[m] =
                    model.gain_linear(Eigen::Vector2d(t.pos_x_km, t.pos_y_km), m);
            users.push_back(std::move(t));
        }
    }
    return users;
}

// Amplitude entry b_mk = lambda sqrt(G_Rk G_mk) / (4 pi d).
inline Eigen::VectorXd amplitude_vector(const UserTerminal &user, const ScenarioConfig &cfg) {
    if (user.rx_gain <= 0 || user.distance_m <= 0)
        throw std::domain_error("amplitude_vector: user gains not populated");
    const double lambda = cfg.wavelength_m();
    Eigen::VectorXd b(static_cast<Eigen::Index>(user.beam_gains.size()));
    for (Eigen::Index m = 0; m < b.size(); ++m) {
        const double g = user.beam_gains[static_cast<std::size_t>(m)];
        if (g < 0)
            throw std::domain_error("amplitude_vector: negative beam gain");
        b[m] = lambda * std::sqrt(user.rx_gain * g) / (4.0 * std::numbers::pi * user.distance_m);
    }
    return b;
}

inline Eigen::VectorXcd channel_vector(const UserTerminal &user, const ScenarioConfig &cfg) {
    const Eigen::VectorXd b = amplitude_vector(user, cfg);
    const std::complex<double> phi = std::polar(1.0, user.phase_rad);
    Eigen::VectorXcd h(b.size());
    for (Eigen::Index m = 0; m < b.size(); ++m)
        h[m] = b[m] * phi;
    return h;
}

inline ChannelMatrix channel_matrix(std::span<const UserTerminal> users_in_order,
                                    const ScenarioConfig &cfg) {
    if (users_in_order.empty())
        throw std::invalid_argument("channel_matrix: empty user subset");
    const Eigen::Index m = static_cast<Eigen::Index>(users_in_order[0].beam_gains.size());
    const Eigen::Index k = static_cast<Eigen::Index>(users_in_order.size());
    ChannelMatrix out;
    out.amplitude.resize(m, k);
    out.h.resize(m, k);
    out.phases.resize(static_cast<std::size_t>(k));
    out.column_user_ids.resize(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) {
        const UserTerminal &u = users_in_order[static_cast<std::size_t>(j)];
        out.amplitude.col(j) = amplitude_vector(u, cfg);
        out.phases[static_cast<std::size_t>(j)] = std::polar(1.0, u.phase_rad);
        out.column_user_ids[static_cast<std::size_t>(j)] = u.id;
        for (Eigen::Index i = 0; i < m; ++i)
            out.h(i, j) = out.amplitude(i, j) * out.phases[static_cast<std::size_t>(j)];
    }
    return out;
}

} // namespace satsched

#endif
