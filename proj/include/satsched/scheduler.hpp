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
// Window scheduling. The greedy scheduler grows each slot's user set one
// candidate at a time: every inner iteration rebuilds the RZF precoder for
// each trial set, picks the candidate with the best sum throughput, and
// admits it only if the sum throughput does not decrease (strict mode also
// requires every user of the trial set to stay at or above its per-slot
// rate target). Users whose aggregate served volume reaches their demand
// leave service at the end of the slot. Semiorthogonal and random selection
// run as per-slot baselines over the same window mechanics.

#ifndef SATSCHED_SCHEDULER_HPP
#define SATSCHED_SCHEDULER_HPP

#include <algorithm>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "satsched/channel.hpp"
#include "satsched/precoding.hpp"
#include "satsched/qos.hpp"
#include "satsched/rng.hpp"

namespace satsched {

enum class Method { Alg1Strict, Alg1Relax, Sus, Random };
enum class AdmissionMode { Strict, Relax };

inline AdmissionMode admission_mode_of(Method m) {
    return m == Method::Alg1Strict ? AdmissionMode::Strict : AdmissionMode::Relax;
}

// Static per-user channels for one window; channels do not change across
// slots, so everything is precomputed once.
struct ChannelSet {
    int num_beams = 0;
    std::vector<Eigen::VectorXd> amplitude;      // per user
    std::vector<std::complex<double>> phase;     // unit modulus per user
    std::vector<Eigen::VectorXcd> h;             // per user
    std::vector<double> gain2;                   // ||h_k||^2

    std::size_t size() const { return h.size(); }

    ChannelMatrix matrix_for(std::span<const int> user_ids) const {
        if (user_ids.empty())
            throw std::invalid_argument("ChannelSet: empty user subset");
        ChannelMatrix out;
        const Eigen::Index m = num_beams;
        const Eigen::Index k = static_cast<Eigen::Index>(user_ids.size());
        out.amplitude.resize(m, k);
        out.h.resize(m, k);
        out.phases.resize(static_cast<std::size_t>(k));
        out.column_user_ids.assign(user_ids.begin(), user_ids.end());
        for (Eigen::Index j = 0; j < k; ++j) {
            const std::size_t id = static_cast<std::size_t>(user_ids[static_cast<std::size_t>(j)]);
            out.amplitude.col(j) = amplitude[id];
            out.phases[static_cast<std::size_t>(j)] = phase[id];
            out.h.col(j) = h[id];
        }
        return out;
    }
};

inline ChannelSet build_channel_set(std::span<const UserTerminal> users,
                                    const ScenarioConfig &cfg) {
    ChannelSet set;
    set.num_beams = cfg.num_beams;
    set.amplitude.reserve(users.size());
    set.phase.reserve(users.size());
    set.h.reserve(users.size());
    set.gain2.reserve(users.size());
    for (const auto &u : users) {
        Eigen::VectorXd b = amplitude_vector(u, cfg);
        set.phase.push_back(std::polar(1.0, u.phase_rad));
        Eigen::VectorXcd hv(b.size());
        for (Eigen::Index m = 0; m < b.size(); ++m)
            hv[m] = b[m] * set.phase.back();
        set.gain2.push_back(hv.squaredNorm());
        set.amplitude.push_back(std::move(b));
        set.h.push_back(std::move(hv));
    }
    return set;
}

// Permutation of user ids by descending channel gain; ties by lower id.
inline std::vector<int> sort_by_channel_gain(const ChannelSet &set) {
    std::vector<int> order(set.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const double ga = set.gain2[static_cast<std::size_t>(a)];
        const double gb = set.gain2[static_cast<std::size_t>(b)];
        if (ga != gb)
            return ga > gb;
        return a < b;
    });
    return order;
}

// sum_{k=1..M} C(N, k) in exact integer arithmetic
inline boost::multiprecision::cpp_int search_space_size(int n, int m) {
    if (m < 1 || m > n)
        throw std::invalid_argument("search_space_size: require 1 <= M <= N");
    boost::multiprecision::cpp_int total = 0, binom = 1;
    for (int k = 1; k <= m; ++k) {
        binom *= n - k + 1;
        binom /= k;
        total += binom;
    }
    return total;
}

inline std::vector<double> fixed_powers(PowerRule rule, std::size_t set_size,
                                        const ScenarioConfig &cfg) {
    const double p = rule == PowerRule::EqualSplit
                         ? cfg.max_power_w / static_cast<double>(set_size)
                         : cfg.max_power_w / static_cast<double>(cfg.num_beams);
    return std::vector<double>(set_size, p);
}

// One evaluated candidate set: RZF precoder, fixed powers, throughputs.
struct SetEvaluation {
    std::vector<int> ids;
    LinkGains gains;
    SlotAllocation allocation;
    std::vector<double> rates_mbps; // aligned with ids
    double sum_mbps = 0;
};

inline SetEvaluation evaluate_set_fixed(const ChannelSet &set, std::span<const int> ids,
                                        const ScenarioConfig &cfg) {
    SetEvaluation ev;
    ev.ids.assign(ids.begin(), ids.end());
    const ChannelMatrix h = set.matrix_for(ids);
    const PrecodingMatrix w = rzf_precoder(h, cfg.max_power_w, cfg.noise_variance_w);
    ev.gains = link_gains(h, w, cfg.noise_variance_w);
    ev.allocation.scheduled_ids = ev.ids;
    ev.allocation.powers_w = fixed_powers(cfg.power_rule, ev.ids.size(), cfg);
    ev.rates_mbps.resize(ev.ids.size());
    for (std::size_t i = 0; i < ev.ids.size(); ++i) {
        ev.rates_mbps[i] =
            instantaneous_throughput_mbps(ev.ids[i], ev.gains, ev.allocation, cfg.bandwidth_mhz);
        ev.sum_mbps += ev.rates_mbps[i];
    }
    return ev;
}

struct GreedyCandidate {
    int user_id = -1;
    SetEvaluation trial;
};

// argmax over the available users of the trial-set sum throughput; the trial
// set is the current working set with the candidate appended. Ties resolve
// to the lowest user id by iteration order.
inline std::optional<GreedyCandidate> greedy_candidate(const ChannelSet &set,
                                                       std::span<const int> available,
                                                       std::span<const int> current,
                                                       const ScenarioConfig &cfg) {
    if (available.empty())
        return std::nullopt;
    if (current.size() >= static_cast<std::size_t>(cfg.num_beams))
        throw std::invalid_argument("greedy_candidate: trial sets would exceed the beam count");
    std::optional<GreedyCandidate> best;
    std::vector<int> trial(current.begin(), current.end());
    trial.push_back(-1);
    for (int k : available) {
        trial.back() = k;
        SetEvaluation ev = evaluate_set_fixed(set, trial, cfg);
        if (!best || ev.sum_mbps > best->trial.sum_mbps) {
            best = GreedyCandidate{k, std::move(ev)};
        }
    }
    return best;
}

// Admission rules: the sum throughput must not decrease; strict mode also
// re-validates the per-slot rate target of every user in the trial set.
inline constexpr double kQosRateSlackMbps = 1e-6;

inline bool admission_test(const SetEvaluation &trial, double previous_sum_mbps,
                           const QoSProfile &qos, AdmissionMode mode) {
    if (trial.sum_mbps < previous_sum_mbps)
        return false;
    if (mode == AdmissionMode::Relax)
        return true;
    for (std::size_t i = 0; i < trial.ids.size(); ++i) {
        const auto id = static_cast<std::size_t>(trial.ids[i]);
        if (trial.rates_mbps[i] < qos.per_slot_target_mbps[id] - kQosRateSlackMbps)
            return false;
    }
    return true;
}

// Scheduling outcome of one slot.
struct SlotResult {
    int slot = 0;
    SlotAllocation allocation;
    std::vector<double> user_throughput_mbps; // aligned with allocation.scheduled_ids
    double sum_throughput_mbps = 0;
    std::vector<double> inner_sum_trace;      // greedy objective after each inner index
    std::vector<int> dropped_user_ids;        // removed by the power stage
    int power_iterations = 0;                 // SCA iterations when power-optimized
};

// Power-allocation stage hook: takes the slot's scheduled ids and produces
// the final ids (users may be dropped when their targets are jointly
// unreachable), per-user powers and rates.
struct PowerStageResult {
    std::vector<int> ids;
    std::vector<double> powers_w;
    std::vector<double> rates_mbps;
    std::vector<int> dropped;
    int iterations = 0;
};
using PowerStageHook = std::function<PowerStageResult(
    const std::vector<int> &ids, const ChannelSet &set, const QoSProfile &qos)>;

struct ScheduleState {
    int slot = 0;
    std::vector<int> available;  // N(t): unsatisfied, not currently carried
    std::vector<int> carried;    // K(t-1) minus the users satisfied so far
    std::vector<int> satisfied;  // removed from service
    std::vector<double> served_mb;
    std::vector<SlotResult> slot_log;
};

namespace detail {

inline void erase_value(std::vector<int> &v, int value) {
    v.erase(std::remove(v.begin(), v.end(), value), v.end());
}

} // namespace detail

// One greedy (Algorithm-style) slot: the inner loop runs from the carried
// set's size up to the beam count; a rejected trial consumes its inner index
// without a replacement attempt.
inline SlotResult schedule_slot(ScheduleState &state, int slot, const ChannelSet &set,
                                const QoSProfile &qos, const ScenarioConfig &cfg,
                                AdmissionMode mode) {
    SlotResult result;
    result.slot = slot;
    std::vector<int> working = state.carried;
    std::optional<SetEvaluation> current;
    if (!working.empty())
        current = evaluate_set_fixed(set, working, cfg);
    double current_sum = current ? current->sum_mbps : 0.0;

    const int m_start = static_cast<int>(working.size());
    for (int m = m_start; m <= cfg.num_beams; ++m) {
        if (static_cast<int>(working.size()) < cfg.num_beams && !state.available.empty()) {
            auto cand = greedy_candidate(set, state.available, working, cfg);
            if (cand && admission_test(cand->trial, current_sum, qos, mode)) {
                working.push_back(cand->user_id);
                detail::erase_value(state.available, cand->user_id);
                current = std::move(cand->trial);
                current_sum = current->sum_mbps;
            }
        }
        result.inner_sum_trace.push_back(current_sum);
    }

    if (current) {
        result.allocation = current->allocation;
        result.user_throughput_mbps = current->rates_mbps;
        result.sum_throughput_mbps = current->sum_mbps;
    }
    return result;
}

// Semiorthogonal user selection: greedily picks the user whose channel
// component orthogonal to the span of the already-picked users is largest,
// then filters the pool by the orthogonality threshold alpha.
inline std::vector<int> sus_schedule(const ChannelSet &set, std::span<const int> available,
                                     int max_users, double alpha) {
    std::vector<int> pool(available.begin(), available.end());
    std::vector<int> selected;
    std::vector<Eigen::VectorXcd> basis;
    while (static_cast<int>(selected.size()) < max_users && !pool.empty()) {
        int best = -1;
        double best_norm2 = -1;
        Eigen::VectorXcd best_g;
        for (int k : pool) {
            Eigen::VectorXcd g = set.h[static_cast<std::size_t>(k)];
            for (const auto &b : basis)
                g -= b.dot(g) * b;
            const double n2 = g.squaredNorm();
            if (n2 > best_norm2) {
                best_norm2 = n2;
                best = k;
                best_g = std::move(g);
            }
        }
        if (best < 0 || best_norm2 <= 0)
            break;
        selected.push_back(best);
        const Eigen::VectorXcd dir = best_g / best_g.norm();
        std::vector<int> next;
        for (int k : pool) {
            if (k == best)
                continue;
            const Eigen::VectorXcd &hk = set.h[static_cast<std::size_t>(k)];
            const double corr = std::abs(dir.dot(hk)) / hk.norm();
            if (corr < alpha)
                next.push_back(k);
        }
        pool = std::move(next);
        basis.push_back(dir);
    }
    return selected;
}

// Uniform sample of up to max_users distinct users.
inline std::vector<int> random_schedule(std::span<const int> available, int max_users, Rng &rng) {
    std::vector<int> pool(available.begin(), available.end());
    auto picked = rng.sample_without_replacement(std::move(pool),
                                                 static_cast<std::size_t>(max_users));
    std::sort(picked.begin(), picked.end());
    return picked;
}

// Mb accumulated over the slots in which the user was scheduled (1 s slots).
inline double aggregated_throughput_mb(int user_id, std::span<const SlotResult> slots) {
    double total = 0;
    for (const auto &s : slots)
        for (std::size_t i = 0; i < s.allocation.scheduled_ids.size(); ++i)
            if (s.allocation.scheduled_ids[i] == user_id)
                total += s.user_throughput_mbps[i];
    return total;
}

struct WindowRun {
    std::vector<SlotResult> slots;
    std::vector<double> served_mb;   // per user id
    std::vector<char> satisfied;     // per user id
    std::vector<char> scheduled_ever;
};

// Run a full window with the chosen method. `sched_rng` only feeds the
// random baseline; `hook`, when set, reallocates each slot's powers.
inline WindowRun run_window(const ScenarioConfig &cfg, const ChannelSet &set,
                            const QoSProfile &qos, Method method, Rng &sched_rng,
                            const PowerStageHook &hook = nullptr, int num_slots = -1) {
    const std::size_t n = set.size();
    if (qos.size() != n)
        throw std::invalid_argument("run_window: QoS profile size mismatch");
    const int slots = num_slots >= 0 ? num_slots : cfg.window_slots;

    ScheduleState state;
    state.served_mb.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        if (qos.slot_budget[k] > 0)
            state.available.push_back(static_cast<int>(k));

    WindowRun run;
    run.served_mb.assign(n, 0.0);
    run.satisfied.assign(n, 0);
    run.scheduled_ever.assign(n, 0);
    if (slots == 0)
        return run;

    const bool greedy = method == Method::Alg1Strict || method == Method::Alg1Relax;
    if (greedy && !state.available.empty()) {
        // seed the window with the best channel gain among users in service
        const auto order = sort_by_channel_gain(set);
        for (int id : order) {
            if (std::find(state.available.begin(), state.available.end(), id) !=
                state.available.end()) {
                state.carried.push_back(id);
                detail::erase_value(state.available, id);
                break;
            }
        }
    }

    for (int t = 1; t <= slots; ++t) {
        SlotResult result;
        if (greedy) {
            result = schedule_slot(state, t, set, qos, cfg, admission_mode_of(method));
        } else {
            result.slot = t;
            std::vector<int> picked =
                method == Method::Sus
                    ? sus_schedule(set, state.available, cfg.num_beams, cfg.sus_alpha)
                    : random_schedule(state.available, cfg.num_beams, sched_rng);
            if (!picked.empty()) {
                SetEvaluation ev = evaluate_set_fixed(set, picked, cfg);
                result.allocation = ev.allocation;
                result.user_throughput_mbps = ev.rates_mbps;
                result.sum_throughput_mbps = ev.sum_mbps;
            }
        }

        if (hook && !result.allocation.scheduled_ids.empty()) {
            PowerStageResult ps = hook(result.allocation.scheduled_ids, set, qos);
            result.allocation.scheduled_ids = ps.ids;
            result.allocation.powers_w = ps.powers_w;
            result.user_throughput_mbps = ps.rates_mbps;
            result.dropped_user_ids = ps.dropped;
            result.power_iterations = ps.iterations;
            result.sum_throughput_mbps = 0;
            for (double r : ps.rates_mbps)
                result.sum_throughput_mbps += r;
            // users the power stage could not serve return to the pool
            for (int id : ps.dropped) {
                if (greedy) {
                    state.available.push_back(id);
                    std::sort(state.available.begin(), state.available.end());
                }
            }
        }

        // accumulate service and retire satisfied users
        std::vector<int> next_carried;
        for (std::size_t i = 0; i < result.allocation.scheduled_ids.size(); ++i) {
            const int id = result.allocation.scheduled_ids[i];
            const auto k = static_cast<std::size_t>(id);
            run.scheduled_ever[k] = 1;
            run.served_mb[k] += result.user_throughput_mbps[i];
            state.served_mb[k] = run.served_mb[k];
            if (run.served_mb[k] >= qos.demand_mb[k] - 1e-9) {
                run.satisfied[k] = 1;
                state.satisfied.push_back(id);
                if (!greedy)
                    detail::erase_value(state.available, id);
            } else if (greedy) {
                next_carried.push_back(id);
            }
        }
        if (greedy)
            state.carried = std::move(next_carried);
        state.slot = t;
        run.slots.push_back(std::move(result));
    }
    return run;
}

} // namespace satsched

#endif
