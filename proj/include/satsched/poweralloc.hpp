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
// Per-slot power allocation. The slot problem maximizes the product of
// (1 + SINR_k) over the scheduled set under per-user SINR floors and the sum
// power budget. In epigraph form the linking constraints are signomial; each
// round replaces the total received power g_k (own signal + interference +
// noise) by its weighted geometric-mean lower bound, which turns the problem
// into a geometric program that a barrier solver handles exactly. Iterating
// the condensation about the latest solution drives the powers to a point
// whose optimality conditions match the original problem's.

#ifndef SATSCHED_POWERALLOC_HPP
#define SATSCHED_POWERALLOC_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "satsched/gp.hpp"
#include "satsched/precoding.hpp"

namespace satsched {

// Per-slot power program data. Variable layout within the derived GPs is
// [p_0 .. p_{K-1}, gamma_0 .. gamma_{K-1}].
struct EpigraphProblem {
    std::vector<int> user_ids;
    Eigen::MatrixXd z;                 // link gains, K x K
    double noise_w = 0;
    std::vector<double> sinr_targets;  // nu_k, aligned with user_ids
    double p_max = 0;

    Eigen::Index size() const { return z.rows(); }
    int num_gp_vars() const { return 2 * static_cast<int>(z.rows()); }

    int qos_constraint_count() const {
        int c = 0;
        for (double nu : sinr_targets)
            if (nu > 0)
                ++c;
        return c;
    }

    // K signomial linking constraints + QoS posynomials + the power budget
    int constraint_count() const {
        return static_cast<int>(size()) + qos_constraint_count() + 1;
    }
};

inline EpigraphProblem build_epigraph(std::span<const int> user_ids, const LinkGains &gains,
                                      std::span<const double> sinr_targets, double p_max) {
    const std::size_t k = user_ids.size();
    if (k == 0)
        throw std::invalid_argument("build_epigraph: empty scheduled set");
    if (sinr_targets.size() != k)
        throw std::invalid_argument("build_epigraph: one SINR target per user required");
    EpigraphProblem ep;
    ep.user_ids.assign(user_ids.begin(), user_ids.end());
    ep.z.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t a = 0; a < k; ++a) {
        const Eigen::Index ia = gains.index_of(user_ids[a]);
        for (std::size_t b = 0; b < k; ++b)
            ep.z(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                gains.z(ia, gains.index_of(user_ids[b]));
    }
    ep.noise_w = gains.noise_w;
    ep.sinr_targets.assign(sinr_targets.begin(), sinr_targets.end());
    ep.p_max = p_max;
    for (double nu : ep.sinr_targets)
        if (!(nu >= 0) || !std::isfinite(nu))
            throw std::domain_error("build_epigraph: SINR targets must be finite and >= 0");
    return ep;
}

// The gamma-linking constraint of user k in raised (signed) form:
//   gamma_k * D_k + (gamma_k - 1) sigma^2 - sum_k' p_k' z_kk' <= 0.
// One negative coefficient per p term plus the noise offset makes it
// signomial.
inline gp::SignedExpression linking_signed_expression(const EpigraphProblem &ep, Eigen::Index k) {
    const Eigen::Index n = ep.size();
    gp::SignedExpression expr;
    auto term = [&](double coeff) {
        gp::SignedTerm t;
        t.coefficient = coeff;
        t.exponents.assign(static_cast<std::size_t>(2 * n), 0.0);
        return t;
    };
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j == k)
            continue;
        gp::SignedTerm t = term(ep.z(k, j));
        t.exponents[static_cast<std::size_t>(j)] = 1.0;
        t.exponents[static_cast<std::size_t>(n + k)] = 1.0;
        expr.push_back(std::move(t));
    }
    {
        gp::SignedTerm t = term(ep.noise_w);
        t.exponents[static_cast<std::size_t>(n + k)] = 1.0;
        expr.push_back(std::move(t));
    }
    expr.push_back(term(-ep.noise_w));
    for (Eigen::Index j = 0; j < n; ++j) {
        gp::SignedTerm t = term(-ep.z(k, j));
        t.exponents[static_cast<std::size_t>(j)] = 1.0;
        expr.push_back(std::move(t));
    }
    return expr;
}

// total received power at user k: own signal + interference + noise
inline double total_rx_power(const EpigraphProblem &ep, Eigen::Index k,
                             const Eigen::VectorXd &p) {
    double g = ep.noise_w;
    for (Eigen::Index j = 0; j < ep.size(); ++j)
        g += p(j) * ep.z(k, j);
    return g;
}

inline double interference_power(const EpigraphProblem &ep, Eigen::Index k,
                                 const Eigen::VectorXd &p) {
    double d = ep.noise_w;
    for (Eigen::Index j = 0; j < ep.size(); ++j)
        if (j != k)
            d += p(j) * ep.z(k, j);
    return d;
}

inline double sinr_of(const EpigraphProblem &ep, Eigen::Index k, const Eigen::VectorXd &p) {
    return p(k) * ep.z(k, k) / interference_power(ep, k, p);
}

inline double sum_rate_mbps(const EpigraphProblem &ep, const Eigen::VectorXd &p,
                            double bandwidth_mhz) {
    double s = 0;
    for (Eigen::Index k = 0; k < ep.size(); ++k)
        s += bandwidth_mhz * std::log2(1.0 + sinr_of(ep, k, p));
    return s;
}

// Condensation weights: mu0 is the noise share of the total received power,
// mu(k, k') the share of user k's received power coming from stream k'.
// Rows sum to one with mu0 by construction.
struct SCAWeights {
    Eigen::VectorXd mu0;
    Eigen::MatrixXd mu;
};

inline SCAWeights update_weights(const EpigraphProblem &ep, const Eigen::VectorXd &p) {
    const Eigen::Index n = ep.size();
    SCAWeights w;
    w.mu0.resize(n);
    w.mu.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double g = total_rx_power(ep, k, p);
        w.mu0(k) = ep.noise_w / g;
        for (Eigen::Index j = 0; j < n; ++j)
            w.mu(k, j) = p(j) * ep.z(k, j) / g;
    }
    return w;
}

// Condensed GP with the constraint-index bookkeeping needed to map solver
// multipliers back onto the slot problem.
struct CondensedGP {
    gp::GPProblem problem;
    std::vector<int> linking_index; // per user
    std::vector<int> qos_index;     // per user, -1 when no target
    int budget_index = -1;
};

inline CondensedGP condense_to_gp(const EpigraphProblem &ep, const SCAWeights &w) {
    const Eigen::Index n = ep.size();
    const int nv = ep.num_gp_vars();
    CondensedGP out;
    out.problem.num_vars = nv;
    out.problem.maximize = true;
    {
        gp::Monomial obj;
        obj.coefficient = 1.0;
        obj.exponents.assign(static_cast<std::size_t>(nv), 0.0);
        for (Eigen::Index k = 0; k < n; ++k)
            obj.exponents[static_cast<std::size_t>(n + k)] = 1.0;
        out.problem.objective.terms.push_back(std::move(obj));
    }
    out.problem.var_names.resize(static_cast<std::size_t>(nv));
    for (Eigen::Index k = 0; k < n; ++k) {
        out.problem.var_names[static_cast<std::size_t>(k)] = "p" + std::to_string(k);
        out.problem.var_names[static_cast<std::size_t>(n + k)] = "g" + std::to_string(k);
    }

    // linking constraints gamma_k D_k / g~_k <= 1
    for (Eigen::Index k = 0; k < n; ++k) {
        // g~_k via the weighted condensation of g_k's K + 1 monomial terms
        gp::Posynomial gk;
        std::vector<double> weights;
        for (Eigen::Index j = 0; j < n; ++j) {
            gp::Monomial t;
            t.coefficient = ep.z(k, j);
            t.exponents.assign(static_cast<std::size_t>(nv), 0.0);
            t.exponents[static_cast<std::size_t>(j)] = 1.0;
            if (t.coefficient > 0) {
                gk.terms.push_back(std::move(t));
                weights.push_back(w.mu(k, j));
            }
        }
        {
            gp::Monomial t;
            t.coefficient = ep.noise_w;
            t.exponents.assign(static_cast<std::size_t>(nv), 0.0);
            gk.terms.push_back(std::move(t));
            weights.push_back(w.mu0(k));
        }
        // weights of dropped zero-gain terms are zero; renormalize exactly
        double ws = 0;
        for (double v : weights)
            ws += v;
        for (double &v : weights)
            v /= ws;
        const gp::Monomial gtilde = gp::condense_with_weights(gk, weights);

        gp::Posynomial linking;
        auto push_term = [&](double coeff, Eigen::Index p_var) {
            gp::Monomial t;
            t.coefficient = coeff / gtilde.coefficient;
            t.exponents.assign(gtilde.exponents.begin(), gtilde.exponents.end());
            for (double &e : t.exponents)
                e = -e;
            if (p_var >= 0)
                t.exponents[static_cast<std::size_t>(p_var)] += 1.0;
            t.exponents[static_cast<std::size_t>(n + k)] += 1.0; // gamma_k
            linking.terms.push_back(std::move(t));
        };
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != k && ep.z(k, j) > 0)
                push_term(ep.z(k, j), j);
        push_term(ep.noise_w, -1);
        out.linking_index.push_back(static_cast<int>(out.problem.constraints_le1.size()));
        out.problem.constraints_le1.push_back(std::move(linking));
    }

    // QoS floors nu_k D_k / (p_k z_kk) <= 1
    for (Eigen::Index k = 0; k < n; ++k) {
        const double nu = ep.sinr_targets[static_cast<std::size_t>(k)];
        if (nu <= 0) {
            out.qos_index.push_back(-1);
            continue;
        }
        if (!(ep.z(k, k) > 0))
            throw std::domain_error("condense_to_gp: zero direct gain with a positive target");
        gp::Posynomial qos;
        auto push_term = [&](double coeff, Eigen::Index p_var) {
            gp::Monomial t;
            t.coefficient = coeff;
            t.exponents.assign(static_cast<std::size_t>(nv), 0.0);
            if (p_var >= 0)
                t.exponents[static_cast<std::size_t>(p_var)] = 1.0;
            t.exponents[static_cast<std::size_t>(k)] -= 1.0; // divide by p_k
            qos.terms.push_back(std::move(t));
        };
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != k && ep.z(k, j) > 0)
                push_term(nu * ep.z(k, j) / ep.z(k, k), j);
        push_term(nu * ep.noise_w / ep.z(k, k), -1);
        out.qos_index.push_back(static_cast<int>(out.problem.constraints_le1.size()));
        out.problem.constraints_le1.push_back(std::move(qos));
    }

    // sum power budget
    {
        gp::Posynomial budget;
        for (Eigen::Index j = 0; j < n; ++j) {
            gp::Monomial t;
            t.coefficient = 1.0 / ep.p_max;
            t.exponents.assign(static_cast<std::size_t>(nv), 0.0);
            t.exponents[static_cast<std::size_t>(j)] = 1.0;
            budget.terms.push_back(std::move(t));
        }
        out.budget_index = static_cast<int>(out.problem.constraints_le1.size());
        out.problem.constraints_le1.push_back(std::move(budget));
    }
    return out;
}

// Stationarity + complementarity residual of the original (uncondensed)
// epigraph problem at (p, gamma), using the multipliers reported by the GP
// solve. Gradients are taken in log space, where the condensation is tangent
// to the exact constraint.
inline double epigraph_kkt_residual(const EpigraphProblem &ep, const Eigen::VectorXd &p,
                                    const Eigen::VectorXd &gammas, const CondensedGP &gp_used,
                                    const gp::GPSolution &sol) {
    const Eigen::Index n = ep.size();
    Eigen::VectorXd r = Eigen::VectorXd::Zero(2 * n);
    for (Eigen::Index k = 0; k < n; ++k)
        r(n + k) = -1.0; // objective: minimize -sum log gamma_k
    double comp = 0;

    for (Eigen::Index k = 0; k < n; ++k) {
        const double dk = interference_power(ep, k, p);
        const double gk = total_rx_power(ep, k, p);
        // linking: log gamma_k + log D_k - log g_k <= 0
        {
            const double lam = sol.ineq_multipliers[static_cast<std::size_t>(
                gp_used.linking_index[static_cast<std::size_t>(k)])];
            r(n + k) += lam;
            for (Eigen::Index j = 0; j < n; ++j) {
                const double zij = ep.z(k, j);
                if (j != k)
                    r(j) += lam * p(j) * zij / dk;
                r(j) -= lam * p(j) * zij / gk;
            }
            comp = std::max(comp, std::abs(lam * std::log(gammas(k) * dk / gk)));
        }
        // QoS: log nu_k + log D_k - log p_k - log z_kk <= 0
        const int qidx = gp_used.qos_index[static_cast<std::size_t>(k)];
        if (qidx >= 0) {
            const double lam = sol.ineq_multipliers[static_cast<std::size_t>(qidx)];
            for (Eigen::Index j = 0; j < n; ++j)
                if (j != k)
                    r(j) += lam * p(j) * ep.z(k, j) / dk;
            r(k) -= lam;
            const double nu = ep.sinr_targets[static_cast<std::size_t>(k)];
            comp = std::max(comp, std::abs(lam * std::log(nu * dk / (p(k) * ep.z(k, k)))));
        }
    }
    {
        const double lam =
            sol.ineq_multipliers[static_cast<std::size_t>(gp_used.budget_index)];
        const double total = p.sum();
        for (Eigen::Index j = 0; j < n; ++j)
            r(j) += lam * p(j) / total;
        comp = std::max(comp, std::abs(lam * std::log(total / ep.p_max)));
    }
    return std::max(r.cwiseAbs().maxCoeff(), comp);
}

struct SCAState {
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;       // prod gamma_k per iteration
    std::vector<double> sum_rate_trace;        // Mbps per iteration
    std::vector<Eigen::VectorXd> power_trace;  // iterates, including the start
    Eigen::VectorXd final_powers;
    Eigen::VectorXd final_gammas;
    double kkt_residual = std::numeric_limits<double>::infinity();
};

struct PowerAllocResult {
    bool feasible = false;
    SlotAllocation allocation;
    SCAState state;
    // set when infeasible: users ranked by how far equal split leaves them
    // below their per-slot rate target
    std::vector<int> violating_user_ids;
    std::vector<double> deficit_mbps;
};

struct PowerAllocOptions {
    double epsilon_rel = 1e-3;     // stop when the sum-rate change falls below this
    int max_iterations = 50;
    double fixed_point_tol = 1e-6; // also require the powers themselves to settle
    double bandwidth_mhz = 500.0;
};

// Successive condensation from the equal-power start. The loop ends when the
// sum rate has settled to epsilon_rel and the powers to fixed_point_tol (the
// latter keeps one extra round from moving the solution, which the KKT
// residual check relies on), or at the iteration cap.
inline PowerAllocResult allocate_power(const EpigraphProblem &ep,
                                       std::span<const double> per_slot_target_mbps,
                                       const PowerAllocOptions &opt = {}) {
    const Eigen::Index n = ep.size();
    PowerAllocResult out;
    Eigen::VectorXd p = Eigen::VectorXd::Constant(n, ep.p_max / static_cast<double>(n));
    out.state.power_trace.push_back(p);

    double prev_rate = sum_rate_mbps(ep, p, opt.bandwidth_mhz);
    CondensedGP last_gp;
    gp::GPSolution last_sol;
    for (int i = 1; i <= opt.max_iterations; ++i) {
        const SCAWeights w = update_weights(ep, p);
        CondensedGP cgp = condense_to_gp(ep, w);
        gp::GPSolution sol = gp::solve_gp(cgp.problem);
        if (sol.status == gp::SolveStatus::Infeasible) {
            // targets jointly unreachable; report per-user deficits at equal split
            Eigen::VectorXd p0 = Eigen::VectorXd::Constant(n, ep.p_max / static_cast<double>(n));
            for (Eigen::Index k = 0; k < n; ++k) {
                const double rate =
                    opt.bandwidth_mhz * std::log2(1.0 + sinr_of(ep, k, p0));
                const double deficit = per_slot_target_mbps[static_cast<std::size_t>(k)] - rate;
                if (deficit > 0) {
                    out.violating_user_ids.push_back(ep.user_ids[static_cast<std::size_t>(k)]);
                    out.deficit_mbps.push_back(deficit);
                }
            }
            return out;
        }
        Eigen::VectorXd pn(n), gn(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            pn(k) = sol.x[static_cast<std::size_t>(k)];
            gn(k) = sol.x[static_cast<std::size_t>(n + k)];
        }
        const double rate = sum_rate_mbps(ep, pn, opt.bandwidth_mhz);
        out.state.iterations = i;
        out.state.objective_trace.push_back(sol.objective_value);
        out.state.sum_rate_trace.push_back(rate);
        out.state.power_trace.push_back(pn);
        out.state.final_gammas = gn;
        last_gp = std::move(cgp);
        last_sol = std::move(sol);

        const double dp = ((pn - p).cwiseAbs().array() / pn.array().max(1e-300)).maxCoeff();
        const bool rate_settled = std::abs(rate - prev_rate) <= opt.epsilon_rel * std::max(rate, 1e-12);
        p = pn;
        prev_rate = rate;
        if (rate_settled && dp <= opt.fixed_point_tol) {
            out.state.converged = true;
            break;
        }
    }

    out.feasible = true;
    out.state.final_powers = p;
    out.state.kkt_residual =
        epigraph_kkt_residual(ep, p, out.state.final_gammas, last_gp, last_sol);
    out.allocation.scheduled_ids = ep.user_ids;
    out.allocation.powers_w.assign(p.data(), p.data() + p.size());
    return out;
}

} // namespace satsched

#endif
