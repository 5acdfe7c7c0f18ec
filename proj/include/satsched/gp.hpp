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
// Posynomial algebra and a self-contained geometric-program solver.
//
// A GP in standard form (minimize a posynomial subject to posynomial <= 1
// and monomial == 1 constraints over positive variables) becomes convex
// under x = exp(y): monomials turn affine and posynomial constraints turn
// into log-sum-exp functions. solve_gp() runs a primal barrier method on
// that transformed problem: phase-I finds a strictly feasible point by
// minimizing a feasibility slack, phase-II follows the central path with
// Newton centering steps, multiplying the barrier parameter by a fixed
// factor per outer iteration. Equality constraints are kept as affine
// equalities and handled inside the Newton KKT system.

#ifndef SATSCHED_GP_HPP
#define SATSCHED_GP_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace satsched::gp {

// c * prod_j x_j^b_j with c > 0
struct Monomial {
    double coefficient = 1.0;
    std::vector<double> exponents;
};

// sum of monomials, all coefficients positive, never empty
struct Posynomial {
    std::vector<Monomial> terms;
};

// one term of a general signed expression (coefficient of either sign)
struct SignedTerm {
    double coefficient = 0.0;
    std::vector<double> exponents;
};
using SignedExpression = std::vector<SignedTerm>;

enum class ExprClass { Monomial, Posynomial, Signomial };

inline ExprClass classify(const SignedExpression &expr) {
    for (const auto &t : expr)
        if (t.coefficient < 0)
            return ExprClass::Signomial;
    if (expr.size() == 1 && expr[0].coefficient > 0)
        return ExprClass::Monomial;
    return ExprClass::Posynomial;
}

inline void check_positive_point(std::span<const double> x) {
    for (double v : x)
        if (!(v > 0))
            throw std::domain_error("gp::eval: point must be strictly positive");
}

inline double eval(const Monomial &m, std::span<const double> x) {
    check_positive_point(x);
    double log_v = std::log(m.coefficient);
    for (std::size_t j = 0; j < m.exponents.size(); ++j)
        if (m.exponents[j] != 0.0)
            log_v += m.exponents[j] * std::log(x[j]);
    return std::exp(log_v);
}

inline double eval(const Posynomial &p, std::span<const double> x) {
    check_positive_point(x);
    double s = 0;
    for (const auto &t : p.terms) {
        double log_v = std::log(t.coefficient);
        for (std::size_t j = 0; j < t.exponents.size(); ++j)
            if (t.exponents[j] != 0.0)
                log_v += t.exponents[j] * std::log(x[j]);
        s += std::exp(log_v);
    }
    return s;
}

// Weighted geometric-mean condensation: with weights mu_k summing to one,
//   f(x) >= prod_k (f_k(x) / mu_k)^{mu_k},
// with equality at the point where the weights were taken. Terms carrying a
// weight of exactly zero drop out (the w -> 0 limit of (t/w)^w is 1).
inline Monomial condense_with_weights(const Posynomial &f, std::span<const double> weights) {
    if (f.terms.empty())
        throw std::invalid_argument("amgm_condense: empty posynomial");
    if (weights.size() != f.terms.size())
        throw std::invalid_argument("amgm_condense: one weight per term required");
    double wsum = 0;
    for (double w : weights) {
        if (w < 0)
            throw std::domain_error("amgm_condense: negative weight");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw std::domain_error("amgm_condense: weights must sum to 1");
    const std::size_t n = f.terms[0].exponents.size();
    Monomial out;
    out.exponents.assign(n, 0.0);
    double log_c = 0;
    for (std::size_t k = 0; k < f.terms.size(); ++k) {
        const double mu = weights[k];
        if (mu == 0.0)
            continue;
        log_c += mu * (std::log(f.terms[k].coefficient) - std::log(mu));
        for (std::size_t j = 0; j < n; ++j)
            out.exponents[j] += mu * f.terms[k].exponents[j];
    }
    out.coefficient = std::exp(log_c);
    return out;
}

// Condensation about an expansion point: mu_k = f_k(x0) / f(x0).
inline Monomial amgm_condense(const Posynomial &f, std::span<const double> x0) {
    if (f.terms.empty())
        throw std::invalid_argument("amgm_condense: empty posynomial");
    check_positive_point(x0);
    std::vector<double> vals(f.terms.size());
    double total = 0;
    for (std::size_t k = 0; k < f.terms.size(); ++k) {
        Posynomial one;
        one.terms.push_back(f.terms[k]);
        vals[k] = eval(one, x0);
        if (vals[k] < 0)
            throw std::domain_error("amgm_condense: negative term value");
        total += vals[k];
    }
    if (!(total > 0))
        throw std::domain_error("amgm_condense: posynomial vanishes at expansion point");
    std::vector<double> mu(vals.size());
    for (std::size_t k = 0; k < vals.size(); ++k)
        mu[k] = vals[k] / total;
    // renormalize exactly so downstream checks see sum == 1
    double s = 0;
    for (double &m : mu)
        s += m;
    for (double &m : mu)
        m /= s;
    return condense_with_weights(f, mu);
}

// ---------------------------------------------------------------------------
// problem statement

struct GPProblem {
    int num_vars = 0;
    std::vector<std::string> var_names; // optional; defaults to x0, x1, ...
    bool maximize = false;              // maximize requires a monomial objective
    Posynomial objective;
    std::vector<Posynomial> constraints_le1; // each <= 1
    std::vector<Monomial> equalities_eq1;    // each == 1
};

inline void validate_standard_form(const GPProblem &p) {
    auto fail = [](const std::string &m) { throw std::invalid_argument("GPProblem: " + m); };
    if (p.num_vars < 1)
        fail("num_vars must be >= 1");
    auto check_mono = [&](const Monomial &m, const char *where) {
        if (!(m.coefficient > 0))
            fail(std::string(where) + ": coefficient must be > 0");
        if (static_cast<int>(m.exponents.size()) != p.num_vars)
            fail(std::string(where) + ": exponent vector size mismatch");
    };
    if (p.objective.terms.empty())
        fail("objective must not be empty");
    for (const auto &t : p.objective.terms)
        check_mono(t, "objective");
    if (p.maximize && p.objective.terms.size() != 1)
        fail("a maximized objective must be a monomial");
    for (const auto &c : p.constraints_le1) {
        if (c.terms.empty())
            fail("constraint must not be empty");
        for (const auto &t : c.terms)
            check_mono(t, "constraint");
    }
    for (const auto &e : p.equalities_eq1)
        check_mono(e, "equality");
}

inline std::string var_name(const GPProblem &p, std::size_t j) {
    if (j < p.var_names.size() && !p.var_names[j].empty())
        return p.var_names[j];
    return "x" + std::to_string(j);
}

// debug rendering, one constraint per line; not a stability contract
inline std::string dump(const GPProblem &p) {
    std::ostringstream os;
    auto put_terms = [&](const std::vector<Monomial> &terms) {
        for (std::size_t t = 0; t < terms.size(); ++t) {
            if (t)
                os << " + ";
            os << terms[t].coefficient;
            for (std::size_t j = 0; j < terms[t].exponents.size(); ++j)
                if (terms[t].exponents[j] != 0.0)
                    os << " " << var_name(p, j) << "^" << terms[t].exponents[j];
        }
    };
    os << (p.maximize ? "maximize: " : "minimize: ");
    put_terms(p.objective.terms);
    os << "\n";
    for (const auto &c : p.constraints_le1) {
        put_terms(c.terms);
        os << " <= 1\n";
    }
    for (const auto &e : p.equalities_eq1) {
        put_terms({e});
        os << " == 1\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// solver

enum class SolveStatus { Optimal, Infeasible, MaxIter };

struct GPSolution {
    SolveStatus status = SolveStatus::MaxIter;
    std::vector<double> x;        // variable values (positive)
    double objective_value = 0;   // in the original (untransformed) sense
    double kkt_residual = std::numeric_limits<double>::infinity();
    double feasibility = std::numeric_limits<double>::infinity();
    // multipliers of the log-space constraints F_i(y) = log f_i(e^y) <= 0
    std::vector<double> ineq_multipliers;
    std::vector<double> eq_multipliers;
    int outer_iterations = 0;
    int newton_iterations = 0;
    // Newton decrement sequence per centering step when requested
    std::vector<std::vector<double>> centering_decrements;
};

struct SolverOptions {
    double t0 = 1.0;             // initial barrier parameter
    double mu = 10.0;            // barrier update factor
    double gap_tol = 1e-7;       // m / t duality-gap target
    double newton_tol = 1e-13;   // stop centering when lambda^2/2 below this
    int max_newton_per_center = 200;
    int max_outer = 64;
    double feas_tol = 1e-8;
    double kkt_tol = 1e-6;
    bool record_decrements = false;
};

namespace detail {

// log sum_m exp(a_m . y + d_m) with gradient and Hessian
struct LseFunction {
    Eigen::MatrixXd a; // terms x n
    Eigen::VectorXd d;

    double value(const Eigen::VectorXd &y) const {
        const Eigen::VectorXd e = a * y + d;
        const double m = e.maxCoeff();
        return m + std::log((e.array() - m).exp().sum());
    }

    void eval(const Eigen::VectorXd &y, double &v, Eigen::VectorXd &grad,
              Eigen::MatrixXd *hess) const {
        const Eigen::VectorXd e = a * y + d;
        const double m = e.maxCoeff();
        Eigen::VectorXd w = (e.array() - m).exp();
        const double s = w.sum();
        v = m + std::log(s);
        w /= s;
        grad = a.transpose() * w;
        if (hess) {
            hess->noalias() = a.transpose() * w.asDiagonal() * a;
            hess->noalias() -= grad * grad.transpose();
        }
    }
};

inline LseFunction lse_from_posynomial(const Posynomial &p, int n) {
    LseFunction f;
    f.a.resize(static_cast<Eigen::Index>(p.terms.size()), n);
    f.d.resize(static_cast<Eigen::Index>(p.terms.size()));
    for (std::size_t t = 0; t < p.terms.size(); ++t) {
        for (int j = 0; j < n; ++j)
            f.a(static_cast<Eigen::Index>(t), j) = p.terms[t].exponents[static_cast<std::size_t>(j)];
        f.d(static_cast<Eigen::Index>(t)) = std::log(p.terms[t].coefficient);
    }
    return f;
}

// Barrier solver over variables y for
//   minimize f0(y)  s.t.  F_i(y) <= 0,  A y = b
// where f0 and F_i are log-sum-exp (affine when single-term). The phase-I
// slack variable is modelled by widening y with one extra coordinate.
class BarrierSolver {
  public:
    LseFunction objective;
    std::vector<LseFunction> constraints;
    Eigen::MatrixXd eq_a; // may have zero rows
    Eigen::VectorXd eq_b;
    SolverOptions opt;

    // diagnostics
    int outer_iterations = 0;
    int newton_iterations = 0;
    std::vector<std::vector<double>> centering_decrements;
    std::vector<double> multipliers;    // per inequality, at final t
    Eigen::VectorXd eq_duals;           // per equality row

    bool domain_ok(const Eigen::VectorXd &y) const {
        for (const auto &c : constraints)
            if (!(c.value(y) < 0))
                return false;
        return y.array().abs().maxCoeff() < 600.0; // exp() must stay representable
    }

    double barrier_value(double t, const Eigen::VectorXd &y) const {
        double v = t * objective.value(y);
        for (const auto &c : constraints)
            v -= std::log(-c.value(y));
        return v;
    }

    // One centering step: damped Newton with equality-constrained KKT solve.
    // In the damped phase (decrement above 1/4) steps are backtracked on the
    // barrier merit; once inside the quadratic region the full step is taken
    // unconditionally, since at large t the merit differences drown in
    // floating-point noise long before the decrement stops being reliable.
    // Returns false when the iteration limit was hit before the decrement
    // target.
    bool center(double t, Eigen::VectorXd &y) {
        const int n = static_cast<int>(y.size());
        const int p = static_cast<int>(eq_a.rows());
        std::vector<double> decrements;
        double last_lambda2 = std::numeric_limits<double>::infinity();
        int stalls = 0;
        bool centered = false;
        for (int it = 0; it < opt.max_newton_per_center; ++it) {
            ++newton_iterations;
            double v0;
            Eigen::VectorXd g(n), gc(n);
            Eigen::MatrixXd h(n, n), hc(n, n);
            objective.eval(y, v0, g, &h);
            g *= t;
            h *= t;
            for (const auto &c : constraints) {
                double vc;
                c.eval(y, vc, gc, &hc);
                const double inv = 1.0 / (-vc);
                g.noalias() += inv * gc;
                h.noalias() += inv * hc + (inv * inv) * gc * gc.transpose();
            }
            Eigen::VectorXd dy(n);
            if (p == 0) {
                Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
                if (ldlt.info() != Eigen::Success) {
                    h.diagonal().array() += 1e-12 * (1.0 + h.diagonal().array().abs());
                    ldlt.compute(h);
                    if (ldlt.info() != Eigen::Success)
                        break;
                }
                dy = ldlt.solve(-g);
                eq_duals.resize(0);
            } else {
                Eigen::MatrixXd kkt(n + p, n + p);
                kkt.setZero();
                kkt.topLeftCorner(n, n) = h;
                kkt.topRightCorner(n, p) = eq_a.transpose();
                kkt.bottomLeftCorner(p, n) = eq_a;
                Eigen::VectorXd rhs(n + p);
                rhs.head(n) = -g;
                rhs.tail(p).setZero();
                Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
                if (!lu.isInvertible())
                    break;
                const Eigen::VectorXd sol = lu.solve(rhs);
                dy = sol.head(n);
                eq_duals = sol.tail(p) / t;
            }
            const double lambda2 = std::max(-g.dot(dy), 0.0);
            if (opt.record_decrements)
                decrements.push_back(std::sqrt(lambda2));
            if (lambda2 / 2.0 <= opt.newton_tol) {
                centered = true;
                break;
            }
            // double-precision floor: the decrement has stopped improving
            if (lambda2 >= 0.9 * last_lambda2 && lambda2 < 1e-6) {
                if (++stalls >= 2) {
                    centered = true;
                    break;
                }
            } else {
                stalls = 0;
            }
            last_lambda2 = lambda2;

            if (lambda2 <= 0.0625) { // quadratic region, take the pure step
                Eigen::VectorXd yn = y + dy;
                if (domain_ok(yn)) {
                    y = std::move(yn);
                    continue;
                }
            }
            const double phi0 = barrier_value(t, y);
            double step = 1.0;
            const double slope = g.dot(dy);
            bool moved = false;
            for (int bt = 0; bt < 64; ++bt) {
                Eigen::VectorXd yn = y + step * dy;
                if (domain_ok(yn) && barrier_value(t, yn) <= phi0 + 0.25 * step * slope) {
                    y = std::move(yn);
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) {
                centered = lambda2 / 2.0 <= 1e-9;
                break;
            }
        }
        if (opt.record_decrements)
            centering_decrements.push_back(std::move(decrements));
        return centered;
    }

    // Follow the central path from a strictly feasible y. Returns the final
    // barrier parameter; `ok` reports whether every centering converged.
    double run(Eigen::VectorXd &y, bool &ok) {
        double t = opt.t0;
        ok = true;
        const double m = static_cast<double>(constraints.size());
        for (int outer = 0; outer < opt.max_outer; ++outer) {
            ++outer_iterations;
            if (!center(t, y)) {
                ok = false;
                break;
            }
            if (m == 0 || m / t < opt.gap_tol)
                break;
            t *= opt.mu;
        }
        multipliers.clear();
        for (const auto &c : constraints)
            multipliers.push_back(1.0 / (t * (-c.value(y))));
        return t;
    }
};

} // namespace detail

// Solve a standard-form GP. The returned multipliers live in log space: for
// constraint f_i(x) <= 1 the multiplier matches F_i(y) = log f_i(e^y) <= 0.
inline GPSolution solve_gp(const GPProblem &p, const SolverOptions &opt = {}) {
    validate_standard_form(p);
    const int n = p.num_vars;
    GPSolution sol;

    detail::BarrierSolver phase2;
    phase2.opt = opt;
    if (p.maximize) {
        // maximize monomial c x^b  <=>  minimize its reciprocal
        Posynomial inv;
        Monomial m = p.objective.terms[0];
        m.coefficient = 1.0 / m.coefficient;
        for (auto &e : m.exponents)
            e = -e;
        inv.terms.push_back(m);
        phase2.objective = detail::lse_from_posynomial(inv, n);
    } else {
        phase2.objective = detail::lse_from_posynomial(p.objective, n);
    }
    for (const auto &c : p.constraints_le1)
        phase2.constraints.push_back(detail::lse_from_posynomial(c, n));
    const int ne = static_cast<int>(p.equalities_eq1.size());
    phase2.eq_a.resize(ne, n);
    phase2.eq_b.resize(ne);
    for (int e = 0; e < ne; ++e) {
        const Monomial &m = p.equalities_eq1[static_cast<std::size_t>(e)];
        for (int j = 0; j < n; ++j)
            phase2.eq_a(e, j) = m.exponents[static_cast<std::size_t>(j)];
        phase2.eq_b(e) = -std::log(m.coefficient);
    }

    // starting point satisfying the equalities
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    if (ne > 0)
        y = phase2.eq_a.completeOrthogonalDecomposition().solve(phase2.eq_b);

    // phase-I: minimize a feasibility slack s over (y, s)
    double worst = -1.0;
    for (const auto &c : phase2.constraints)
        worst = std::max(worst, c.value(y));
    if (!phase2.constraints.empty() && worst >= -1e-8) {
        detail::BarrierSolver ph1;
        ph1.opt = opt;
        ph1.opt.gap_tol = 1e-6;
        // objective: s (affine as a single-term lse in (y, s))
        ph1.objective.a.resize(1, n + 1);
        ph1.objective.a.setZero();
        ph1.objective.a(0, n) = 1.0;
        ph1.objective.d.resize(1);
        ph1.objective.d.setZero();
        for (const auto &c : phase2.constraints) {
            detail::LseFunction g = c; // F_i(y) - s <= 0
            g.a.conservativeResize(g.a.rows(), n + 1);
            g.a.col(n).setConstant(-1.0);
            ph1.constraints.push_back(std::move(g));
        }
        ph1.eq_a.resize(ne, n + 1);
        ph1.eq_a.setZero();
        if (ne > 0)
            ph1.eq_a.leftCols(n) = phase2.eq_a;
        ph1.eq_b = phase2.eq_b;

        Eigen::VectorXd ys(n + 1);
        ys.head(n) = y;
        ys(n) = worst + 1.0;
        // bound s from below so the phase-I problem cannot be unbounded when
        // the true problem is strictly feasible with lots of margin
        double t = ph1.opt.t0;
        bool found = false;
        for (int outer = 0; outer < ph1.opt.max_outer && !found; ++outer) {
            if (!ph1.center(t, ys))
                break;
            double w2 = -1.0;
            for (const auto &c : phase2.constraints)
                w2 = std::max(w2, c.value(ys.head(n)));
            if (w2 < -1e-6) {
                found = true;
                break;
            }
            if (static_cast<double>(ph1.constraints.size()) / t < ph1.opt.gap_tol)
                break;
            t *= ph1.opt.mu;
        }
        sol.newton_iterations += ph1.newton_iterations;
        double w2 = -1.0;
        for (const auto &c : phase2.constraints)
            w2 = std::max(w2, c.value(ys.head(n)));
        if (w2 >= -1e-12) {
            sol.status = SolveStatus::Infeasible;
            return sol;
        }
        y = ys.head(n);
    }

    bool centered_ok = true;
    phase2.run(y, centered_ok);
    sol.outer_iterations = phase2.outer_iterations;
    sol.newton_iterations += phase2.newton_iterations;
    sol.centering_decrements = std::move(phase2.centering_decrements);

    sol.x.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        sol.x[static_cast<std::size_t>(j)] = std::exp(y(j));
    sol.objective_value = eval(p.objective, sol.x);
    sol.ineq_multipliers = phase2.multipliers;
    sol.eq_multipliers.assign(phase2.eq_duals.data(),
                              phase2.eq_duals.data() + phase2.eq_duals.size());

    // feasibility in the original space
    double feas = 0;
    for (const auto &c : p.constraints_le1)
        feas = std::max(feas, eval(c, sol.x) - 1.0);
    for (const auto &e : p.equalities_eq1) {
        Posynomial one;
        one.terms.push_back(e);
        feas = std::max(feas, std::abs(eval(one, sol.x) - 1.0));
    }
    sol.feasibility = feas;

    // KKT stationarity of the log-space problem with the reported multipliers
    {
        double v;
        Eigen::VectorXd r(n), g(n);
        phase2.objective.eval(y, v, r, nullptr);
        for (std::size_t i = 0; i < phase2.constraints.size(); ++i) {
            phase2.constraints[i].eval(y, v, g, nullptr);
            r.noalias() += sol.ineq_multipliers[i] * g;
        }
        if (ne > 0 && phase2.eq_duals.size() == ne)
            r.noalias() += phase2.eq_a.transpose() * phase2.eq_duals;
        double comp = 0;
        for (std::size_t i = 0; i < phase2.constraints.size(); ++i)
            comp = std::max(comp, std::abs(sol.ineq_multipliers[i] *
                                           phase2.constraints[i].value(y)));
        sol.kkt_residual = std::max(r.cwiseAbs().maxCoeff(), comp);
    }

    sol.status = (centered_ok && sol.feasibility <= opt.feas_tol &&
                  sol.kkt_residual <= opt.kkt_tol)
                     ? SolveStatus::Optimal
                     : SolveStatus::MaxIter;
    return sol;
}

} // namespace satsched::gp

#endif
