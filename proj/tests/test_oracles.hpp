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
//
// Shared test-side generators and brute-force oracles. Everything in here
// evaluates through its own arithmetic so results stay independent of the
// library code paths they are checking.

#ifndef SATSCHED_TESTS_TEST_ORACLES_HPP
#define SATSCHED_TESTS_TEST_ORACLES_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "satsched/gp.hpp"
#include "satsched/poweralloc.hpp"
#include "satsched/rng.hpp"

namespace oracles {

// plain power-product evaluation (independent of gp::eval's log path)
inline double naive_term(double c, const std::vector<double> &b, const std::vector<double> &x) {
    double v = c;
    for (std::size_t j = 0; j < b.size(); ++j)
        v *= std::pow(x[j], b[j]);
    return v;
}

inline double naive_posynomial(const satsched::gp::Posynomial &p, const std::vector<double> &x) {
    double s = 0;
    for (const auto &t : p.terms)
        s += naive_term(t.coefficient, t.exponents, x);
    return s;
}

// A random GP over a log-space box. Optima land either strictly inside the
// box or on box faces, both of which the log grid samples exactly, so a
// brute-force grid search resolves the optimum to second order in the grid
// step. Extra posynomial constraints are scaled to stay strictly inactive
// over the whole box so they never move the optimum off the grid.
struct BoxGP {
    satsched::gp::GPProblem problem;
    std::vector<double> log_lo, log_hi;
};

inline BoxGP make_box_gp(satsched::Rng &rng, int nvars) {
    using namespace satsched::gp;
    BoxGP out;
    out.problem.num_vars = nvars;
    const double width = nvars <= 2 ? rng.uniform(0.9, 1.5) : rng.uniform(0.6, 1.0);
    for (int j = 0; j < nvars; ++j) {
        const double lo = rng.uniform(-1.2, -0.2);
        out.log_lo.push_back(lo);
        out.log_hi.push_back(lo + width);
    }

    auto random_posynomial = [&](int min_terms, int max_terms, double expo_range) {
        Posynomial p;
        const int terms = rng.integer_range(min_terms, max_terms);
        for (int t = 0; t < terms; ++t) {
            Monomial m;
            m.coefficient = std::exp(rng.uniform(-0.5, 1.2));
            m.exponents.resize(static_cast<std::size_t>(nvars));
            for (int j = 0; j < nvars; ++j)
                m.exponents[static_cast<std::size_t>(j)] = rng.uniform(-expo_range, expo_range);
            p.terms.push_back(std::move(m));
        }
        return p;
    };

    out.problem.objective = random_posynomial(2, 4, 1.5);

    // box constraints: x_j <= hi_j and lo_j <= x_j
    for (int j = 0; j < nvars; ++j) {
        Monomial up;
        up.coefficient = std::exp(-out.log_hi[static_cast<std::size_t>(j)]);
        up.exponents.assign(static_cast<std::size_t>(nvars), 0.0);
        up.exponents[static_cast<std::size_t>(j)] = 1.0;
        out.problem.constraints_le1.push_back(Posynomial{{up}});
        Monomial dn;
        dn.coefficient = std::exp(out.log_lo[static_cast<std::size_t>(j)]);
        dn.exponents.assign(static_cast<std::size_t>(nvars), 0.0);
        dn.exponents[static_cast<std::size_t>(j)] = -1.0;
        out.problem.constraints_le1.push_back(Posynomial{{dn}});
    }

    // inactive extras: divide by twice an upper bound over the box
    const int extras = rng.integer_range(1, 2);
    for (int e = 0; e < extras; ++e) {
        Posynomial g = random_posynomial(2, 3, 1.0);
        double upper = 0;
        for (const auto &t : g.terms) {
            double term_max = t.coefficient;
            for (int j = 0; j < nvars; ++j) {
                const double b = t.exponents[static_cast<std::size_t>(j)];
                term_max *= std::exp(std::max(b * out.log_lo[static_cast<std::size_t>(j)],
                                              b * out.log_hi[static_cast<std::size_t>(j)]));
            }
            upper += term_max;
        }
        for (auto &t : g.terms)
            t.coefficient /= 2.0 * upper;
        out.problem.constraints_le1.push_back(std::move(g));
    }
    return out;
}

// exhaustive log-space grid minimization; total points ~ per_axis^nvars
inline double grid_minimum(const BoxGP &gp, int per_axis) {
    const int n = gp.problem.num_vars;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    std::vector<double> x(static_cast<std::size_t>(n));
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        for (int j = 0; j < n; ++j) {
            const double f = static_cast<double>(idx[static_cast<std::size_t>(j)]) /
                             static_cast<double>(per_axis - 1);
            x[static_cast<std::size_t>(j)] =
                std::exp(gp.log_lo[static_cast<std::size_t>(j)] +
                         f * (gp.log_hi[static_cast<std::size_t>(j)] -
                              gp.log_lo[static_cast<std::size_t>(j)]));
        }
        bool feasible = true;
        for (const auto &c : gp.problem.constraints_le1) {
            if (naive_posynomial(c, x) > 1.0 + 1e-12) {
                feasible = false;
                break;
            }
        }
        if (feasible)
            best = std::min(best, naive_posynomial(gp.problem.objective, x));
        int j = 0;
        for (; j < n; ++j) {
            if (++idx[static_cast<std::size_t>(j)] < per_axis)
                break;
            idx[static_cast<std::size_t>(j)] = 0;
        }
        if (j == n)
            break;
    }
    return best;
}

// Random per-slot power problem with link-budget-like scales: direct gains
// around 3e-13, cross gains 10-25 dB below, GEO noise floor, and SINR floors
// set well inside what equal split achieves so the floors stay slack at the
// optimum.
inline satsched::EpigraphProblem random_power_instance(satsched::Rng &rng, int k,
                                                       double target_margin = 0.5) {
    satsched::EpigraphProblem ep;
    ep.noise_w = 1.4791083881682073e-12;
    ep.p_max = 69.98419960022734;
    ep.z.resize(k, k);
    for (int a = 0; a < k; ++a) {
        const double direct = 3e-13 * std::exp(rng.uniform(-0.7, 0.7));
        for (int b = 0; b < k; ++b)
            ep.z(a, b) = b == a
                             ? direct
                             : direct * std::pow(10.0, -rng.uniform(1.0, 2.5));
        ep.user_ids.push_back(a);
    }
    Eigen::VectorXd p0 = Eigen::VectorXd::Constant(k, ep.p_max / k);
    for (int a = 0; a < k; ++a) {
        const double s = satsched::sinr_of(ep, a, p0);
        ep.sinr_targets.push_back(s * rng.uniform(0.2, target_margin));
    }
    return ep;
}

// independent throughput evaluation for the power oracle
inline double power_sum_rate(const satsched::EpigraphProblem &ep, const std::vector<double> &p,
                             double bandwidth_mhz) {
    const int k = static_cast<int>(ep.size());
    double sum = 0;
    for (int a = 0; a < k; ++a) {
        double denom = ep.noise_w;
        for (int b = 0; b < k; ++b)
            if (b != a)
                denom += p[static_cast<std::size_t>(b)] * ep.z(a, b);
        sum += bandwidth_mhz *
               std::log2(1.0 + p[static_cast<std::size_t>(a)] * ep.z(a, a) / denom);
    }
    return sum;
}

// brute force over the two-user simplex {p1 + p2 <= P}, honoring the SINR
// floors; per_axis^2 points, the budget boundary sampled exactly
inline double two_user_grid_best(const satsched::EpigraphProblem &ep, double bandwidth_mhz,
                                 int per_axis) {
    double best = -1;
    for (int i = 0; i < per_axis; ++i) {
        const double p1 = ep.p_max * static_cast<double>(i) / (per_axis - 1);
        const double rest = ep.p_max - p1;
        for (int j = 0; j < per_axis; ++j) {
            const double p2 = rest * static_cast<double>(j) / (per_axis - 1);
            const std::vector<double> p{p1, p2};
            bool ok = true;
            for (int a = 0; a < 2 && ok; ++a) {
                double denom = ep.noise_w;
                for (int b = 0; b < 2; ++b)
                    if (b != a)
                        denom += p[static_cast<std::size_t>(b)] * ep.z(a, b);
                const double s = p[static_cast<std::size_t>(a)] * ep.z(a, a) / denom;
                if (s < ep.sinr_targets[static_cast<std::size_t>(a)])
                    ok = false;
            }
            if (ok)
                best = std::max(best, power_sum_rate(ep, p, bandwidth_mhz));
        }
    }
    return best;
}

} // namespace oracles

#endif
