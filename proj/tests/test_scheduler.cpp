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

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <complex>
#include <set>

#include "satsched/bench.hpp"
#include "satsched/scheduler.hpp"

using namespace satsched;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// synthetic channel set from explicit complex vectors
ChannelSet synthetic_set(const std::vector<Eigen::VectorXcd> &hs) {
    ChannelSet set;
    set.num_beams = static_cast<int>(hs[0].size());
    for (const auto &h : hs) {
        set.h.push_back(h);
        set.amplitude.push_back(h.cwiseAbs());
        set.phase.push_back({1.0, 0.0});
        set.gain2.push_back(h.squaredNorm());
    }
    return set;
}

QoSProfile uniform_qos(std::size_t n, double demand_mb, int slots, double bandwidth) {
    QoSProfile q;
    q.demand_mb.assign(n, demand_mb);
    q.slot_budget.assign(n, slots);
    q.per_slot_target_mbps.assign(n, slots > 0 ? demand_mb / slots : 0.0);
    q.sinr_target.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        q.sinr_target[k] = sinr_target_for(demand_mb, slots, bandwidth,
                                           NuFormula::BandwidthConsistent);
    return q;
}

ScenarioConfig small_config(int beams, int upb, int slots, std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.num_beams = beams;
    cfg.users_per_beam = upb;
    cfg.window_slots = slots;
    cfg.qos_slots_max = std::min(cfg.qos_slots_max, slots);
    cfg.rng_seed = seed;
    return cfg;
}

struct SmallWorld {
    std::vector<UserTerminal> users;
    ChannelSet set;
    QoSProfile qos;
};

SmallWorld make_world(const ScenarioConfig &cfg) {
    SmallWorld w;
    Rng user_rng(cfg.rng_seed, "users");
    Rng qos_rng(cfg.rng_seed, "qos");
    w.users = generate_users(cfg, user_rng);
    w.set = build_channel_set(w.users, cfg);
    w.qos = generate_qos(cfg, qos_rng, w.users.size());
    return w;
}

} // namespace

TEST_CASE("qos generation follows the slot-budget rule", "[scheduler]") {
    ScenarioConfig cfg;
    cfg.qos_slots_min = 13;
    cfg.qos_slots_max = 13;
    Rng rng(1, "qos");
    const QoSProfile q = generate_qos(cfg, rng, 4);
    for (std::size_t k = 0; k < 4; ++k) {
        REQUIRE(q.slot_budget[k] == 13);
        REQUIRE_THAT(q.demand_mb[k], WithinRel(6500.0, 1e-12));
        REQUIRE_THAT(q.per_slot_target_mbps[k], WithinRel(500.0, 1e-12));
        // bandwidth-consistent SINR floor: 2^(500/500) - 1 = 1
        REQUIRE_THAT(q.sinr_target[k], WithinRel(1.0, 1e-12));
    }
}

TEST_CASE("zero slot budget means zero demand and no service", "[scheduler]") {
    ScenarioConfig cfg = small_config(2, 2, 4, 3);
    cfg.qos_slots_min = 0;
    cfg.qos_slots_max = 0;
    SmallWorld w = make_world(cfg);
    for (std::size_t k = 0; k < w.qos.size(); ++k) {
        REQUIRE(w.qos.demand_mb[k] == 0.0);
        REQUIRE(w.qos.sinr_target[k] == 0.0);
    }
    Rng sched(3, "random-schedule");
    const WindowRun run = run_window(cfg, w.set, w.qos, Method::Alg1Relax, sched);
    for (const auto &s : run.slots)
        REQUIRE(s.allocation.scheduled_ids.empty());
}

TEST_CASE("slot-budget draws hit the uniform mean", "[scheduler]") {
    ScenarioConfig cfg; // [0, 13] -> mean 6.5
    Rng rng(99, "qos");
    const QoSProfile q = generate_qos(cfg, rng, 100000);
    double mean = 0;
    for (int t : q.slot_budget)
        mean += t;
    mean /= static_cast<double>(q.slot_budget.size());
    REQUIRE_THAT(mean, WithinAbs(6.5, 0.1));
}

TEST_CASE("paper-literal SINR floors are astronomically larger", "[scheduler]") {
    const double consistent = sinr_target_for(6500.0, 13, 500.0, NuFormula::BandwidthConsistent);
    const double literal = sinr_target_for(6500.0, 13, 500.0, NuFormula::PaperLiteral);
    REQUIRE_THAT(consistent, WithinRel(1.0, 1e-12));
    REQUIRE(literal > 1e100);
}

TEST_CASE("channel-gain ordering sorts descending with id tie-break", "[scheduler]") {
    std::vector<Eigen::VectorXcd> hs(3, Eigen::VectorXcd::Zero(2));
    hs[0](0) = 1.0; // gain 1
    hs[1](0) = std::complex<double>(0, std::sqrt(3.0)); // gain 3
    hs[2](1) = std::sqrt(2.0); // gain 2
    const auto pi = sort_by_channel_gain(synthetic_set(hs));
    REQUIRE(pi == std::vector<int>{1, 2, 0});

    std::vector<Eigen::VectorXcd> equal(4, Eigen::VectorXcd::Ones(2));
    REQUIRE(sort_by_channel_gain(synthetic_set(equal)) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("channel-gain ordering matches a reference sort on real channels", "[scheduler]") {
    const ScenarioConfig cfg = small_config(7, 110, 10, 17);
    SmallWorld w = make_world(cfg);
    const auto pi = sort_by_channel_gain(w.set);
    std::vector<int> ref(w.set.size());
    for (std::size_t i = 0; i < ref.size(); ++i)
        ref[i] = static_cast<int>(i);
    std::sort(ref.begin(), ref.end(), [&](int a, int b) {
        const double ga = w.set.h[static_cast<std::size_t>(a)].squaredNorm();
        const double gb = w.set.h[static_cast<std::size_t>(b)].squaredNorm();
        return ga != gb ? ga > gb : a < b;
    });
    REQUIRE(pi == ref);
}

TEST_CASE("exhaustive search count", "[scheduler]") {
    REQUIRE(search_space_size(100, 7) == boost::multiprecision::cpp_int("17278988695"));
    REQUIRE(search_space_size(1, 1) == 1);
    REQUIRE(search_space_size(5, 2) == 15);
    REQUIRE_THROWS_AS(search_space_size(3, 4), std::invalid_argument);
    // far beyond 64-bit without exact arithmetic
    REQUIRE(search_space_size(400, 60) >
            boost::multiprecision::cpp_int("18446744073709551615"));
}

TEST_CASE("greedy prefers the orthogonal candidate", "[scheduler]") {
    // current user along e0; candidate 1 orthogonal, candidate 2 parallel
    std::vector<Eigen::VectorXcd> hs(3, Eigen::VectorXcd::Zero(3));
    hs[0](0) = 1e-6;
    hs[1](1) = 1e-6;
    hs[2](0) = 0.95e-6;
    ScenarioConfig cfg = small_config(3, 1, 4, 1);
    const ChannelSet set = synthetic_set(hs);
    const std::vector<int> current{0};
    const std::vector<int> avail{1, 2};
    const auto cand = greedy_candidate(set, avail, current, cfg);
    REQUIRE(cand.has_value());
    REQUIRE(cand->user_id == 1);
    REQUIRE(cand->trial.ids == std::vector<int>{0, 1});
}

TEST_CASE("single available user forms the singleton trial", "[scheduler]") {
    std::vector<Eigen::VectorXcd> hs(1, Eigen::VectorXcd::Zero(2));
    hs[0](0) = 1e-6;
    ScenarioConfig cfg = small_config(2, 1, 4, 1);
    const ChannelSet set = synthetic_set(hs);
    const auto cand = greedy_candidate(set, std::vector<int>{0}, std::vector<int>{}, cfg);
    REQUIRE(cand.has_value());
    REQUIRE(cand->trial.ids == std::vector<int>{0});
    // singleton sum equals the single-user throughput
    const SetEvaluation ev = evaluate_set_fixed(set, std::vector<int>{0}, cfg);
    REQUIRE_THAT(cand->trial.sum_mbps, WithinRel(ev.sum_mbps, 1e-12));
    REQUIRE(greedy_candidate(set, std::vector<int>{}, std::vector<int>{}, cfg) == std::nullopt);
}

TEST_CASE("greedy argmax matches brute force on a small instance", "[scheduler]") {
    const ScenarioConfig cfg = small_config(3, 2, 4, 23);
    SmallWorld w = make_world(cfg);
    const std::vector<int> current{0};
    std::vector<int> avail{1, 2, 3, 4, 5};
    const auto cand = greedy_candidate(w.set, avail, current, cfg);
    REQUIRE(cand.has_value());
    // brute force: evaluate each candidate independently
    double best = -1;
    int best_id = -1;
    for (int k : avail) {
        const std::vector<int> trial{0, k};
        const ChannelMatrix h = w.set.matrix_for(trial);
        const PrecodingMatrix pm = rzf_precoder(h, cfg.max_power_w, cfg.noise_variance_w);
        const LinkGains g = link_gains(h, pm, cfg.noise_variance_w);
        double sum = 0;
        const double p = cfg.max_power_w / 2.0;
        for (int a = 0; a < 2; ++a) {
            double denom = cfg.noise_variance_w + p * g.z(a, 1 - a);
            sum += cfg.bandwidth_mhz * std::log2(1.0 + p * g.z(a, a) / denom);
        }
        if (sum > best) {
            best = sum;
            best_id = k;
        }
    }
    REQUIRE(cand->user_id == best_id);
    REQUIRE_THAT(cand->trial.sum_mbps, WithinRel(best, 1e-9));
}

TEST_CASE("admission rules by mode", "[scheduler]") {
    QoSProfile qos = uniform_qos(3, 1000.0, 2, 500.0); // 500 Mbps per-slot target
    SetEvaluation trial;
    trial.ids = {0, 1};
    trial.rates_mbps = {600.0, 450.0};
    trial.sum_mbps = 1050.0;

    // sum decreased: rejected in both modes
    REQUIRE_FALSE(admission_test(trial, 1100.0, qos, AdmissionMode::Strict));
    REQUIRE_FALSE(admission_test(trial, 1100.0, qos, AdmissionMode::Relax));
    // sum increased but an incumbent dropped below target: strict rejects
    REQUIRE_FALSE(admission_test(trial, 900.0, qos, AdmissionMode::Strict));
    REQUIRE(admission_test(trial, 900.0, qos, AdmissionMode::Relax));
    // everyone above target: both accept
    trial.rates_mbps = {600.0, 500.0};
    REQUIRE(admission_test(trial, 900.0, qos, AdmissionMode::Strict));
}

TEST_CASE("a full carried set admits no one", "[scheduler]") {
    const ScenarioConfig cfg = small_config(2, 2, 4, 31);
    SmallWorld w = make_world(cfg);
    ScheduleState state;
    state.carried = {0, 1}; // already at the beam count
    state.available = {2, 3};
    state.served_mb.assign(4, 0.0);
    const SlotResult r = schedule_slot(state, 1, w.set, w.qos, cfg, AdmissionMode::Relax);
    REQUIRE(r.allocation.scheduled_ids == std::vector<int>{0, 1});
    REQUIRE(state.available == std::vector<int>{2, 3});
    REQUIRE(r.inner_sum_trace.size() == 1); // single no-op inner index
}

TEST_CASE("one user, one beam, satisfied in a single slot", "[scheduler]") {
    ScenarioConfig cfg = small_config(1, 1, 3, 7);
    SmallWorld w = make_world(cfg);
    // demand one slot's worth of service at a reachable rate
    w.qos = uniform_qos(1, 100.0, 1, cfg.bandwidth_mhz);
    Rng sched(7, "random-schedule");
    const WindowRun run = run_window(cfg, w.set, w.qos, Method::Alg1Strict, sched);
    REQUIRE(run.slots.size() == 3);
    REQUIRE(run.slots[0].allocation.scheduled_ids == std::vector<int>{0});
    REQUIRE(run.satisfied[0] == 1);
    // once satisfied the user leaves service
    REQUIRE(run.slots[1].allocation.scheduled_ids.empty());
}

TEST_CASE("inner-loop sum throughput is non-decreasing on random scenarios", "[scheduler]") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        ScenarioConfig cfg = small_config(3, 3, 4, seed);
        cfg.qos_slots_max = 4;
        SmallWorld w = make_world(cfg);
        Rng sched(seed, "random-schedule");
        const Method method = seed % 2 ? Method::Alg1Strict : Method::Alg1Relax;
        const WindowRun run = run_window(cfg, w.set, w.qos, method, sched);
        for (const auto &s : run.slots)
            for (std::size_t i = 1; i < s.inner_sum_trace.size(); ++i)
                REQUIRE(s.inner_sum_trace[i] >=
                        s.inner_sum_trace[i - 1] * (1.0 - 1e-8) - 1e-12);
    }
}

TEST_CASE("an empty window yields an empty report", "[scheduler]") {
    const ScenarioConfig cfg = small_config(2, 2, 5, 3);
    SmallWorld w = make_world(cfg);
    Rng sched(3, "random-schedule");
    const WindowRun run = run_window(cfg, w.set, w.qos, Method::Alg1Strict, sched, nullptr, 0);
    REQUIRE(run.slots.empty());
    for (double s : run.served_mb)
        REQUIRE(s == 0.0);
}

TEST_CASE("strict windows never violate the per-slot target", "[scheduler]") {
    const ScenarioConfig cfg = small_config(4, 6, 12, 41);
    SmallWorld w = make_world(cfg);
    Rng sched(41, "random-schedule");
    const WindowRun run = run_window(cfg, w.set, w.qos, Method::Alg1Strict, sched);
    for (const auto &s : run.slots)
        for (std::size_t i = 0; i < s.allocation.scheduled_ids.size(); ++i) {
            const auto id = static_cast<std::size_t>(s.allocation.scheduled_ids[i]);
            REQUIRE(s.user_throughput_mbps[i] >=
                    w.qos.per_slot_target_mbps[id] - 1e-6);
        }
}

TEST_CASE("window totals equal an independent re-accumulation", "[scheduler]") {
    const ScenarioConfig cfg = small_config(3, 4, 10, 19);
    SmallWorld w = make_world(cfg);
    Rng sched(19, "random-schedule");
    const WindowRun run = run_window(cfg, w.set, w.qos, Method::Alg1Relax, sched);
    for (std::size_t k = 0; k < w.set.size(); ++k)
        REQUIRE_THAT(run.served_mb[k],
                     WithinAbs(aggregated_throughput_mb(static_cast<int>(k), run.slots), 1e-9));
    // removal soundness
    for (std::size_t k = 0; k < w.set.size(); ++k)
        if (run.satisfied[k])
            REQUIRE(run.served_mb[k] >= w.qos.demand_mb[k] - 1e-9);
}

TEST_CASE("semiorthogonal selection keeps orthogonal users and drops parallel ones",
          "[scheduler]") {
    std::vector<Eigen::VectorXcd> hs(4, Eigen::VectorXcd::Zero(3));
    hs[0](0) = 3e-6;
    hs[1](1) = 2e-6;
    hs[2](2) = 1e-6;
    hs[3](0) = 2.5e-6; // parallel to user 0
    const ChannelSet set = synthetic_set(hs);
    const std::vector<int> avail{0, 1, 2, 3};
    const auto sel = sus_schedule(set, avail, 3, 0.4);
    REQUIRE(sel == std::vector<int>{0, 1, 2});

    // one shared direction -> exactly one pick under a strict threshold
    std::vector<Eigen::VectorXcd> same(5, Eigen::VectorXcd::Zero(3));
    for (std::size_t i = 0; i < 5; ++i)
        same[i](0) = (1.0 + 0.1 * static_cast<double>(i)) * 1e-6;
    REQUIRE(sus_schedule(synthetic_set(same), std::vector<int>{0, 1, 2, 3, 4}, 3, 0.4) ==
            std::vector<int>{4});
}

namespace {

// direct reimplementation used as the SUS oracle
std::vector<int> sus_reference(const ChannelSet &set, std::vector<int> pool, int m,
                               double alpha) {
    std::vector<int> out;
    std::vector<Eigen::VectorXcd> gs;
    while (static_cast<int>(out.size()) < m && !pool.empty()) {
        int arg = -1;
        double best = -1;
        Eigen::VectorXcd best_g;
        for (int k : pool) {
            Eigen::VectorXcd g = set.h[static_cast<std::size_t>(k)];
            for (const auto &q : gs)
                g -= (q.adjoint() * g)(0, 0) * q / q.squaredNorm();
            if (g.squaredNorm() > best) {
                best = g.squaredNorm();
                arg = k;
                best_g = g;
            }
        }
        out.push_back(arg);
        std::vector<int> keep;
        for (int k : pool)
            if (k != arg) {
                const auto &hk = set.h[static_cast<std::size_t>(k)];
                if (std::abs((best_g.adjoint() * hk)(0, 0)) / (best_g.norm() * hk.norm()) < alpha)
                    keep.push_back(k);
            }
        pool = std::move(keep);
        gs.push_back(best_g);
    }
    return out;
}

} // namespace

TEST_CASE("semiorthogonal selection matches a direct reimplementation", "[scheduler]") {
    const ScenarioConfig cfg = small_config(3, 4, 4, 53); // 12 users, pick 3
    SmallWorld w = make_world(cfg);
    std::vector<int> pool;
    for (int i = 0; i < 10; ++i)
        pool.push_back(i);
    REQUIRE(sus_schedule(w.set, pool, 3, 0.4) == sus_reference(w.set, pool, 3, 0.4));
    REQUIRE(sus_schedule(w.set, pool, 3, 0.7) == sus_reference(w.set, pool, 3, 0.7));
}

TEST_CASE("random selection takes everyone when the pool is small", "[scheduler]") {
    Rng rng(5, "random-schedule");
    const std::vector<int> pool{3, 1, 4};
    auto sel = random_schedule(pool, 3, rng);
    REQUIRE(sel == std::vector<int>{1, 3, 4});
    auto sel2 = random_schedule(pool, 7, rng);
    REQUIRE(sel2.size() == 3);
}

TEST_CASE("random selection is uniform across the pool", "[scheduler]") {
    Rng rng(6, "random-schedule");
    std::vector<int> pool(20);
    for (int i = 0; i < 20; ++i)
        pool[i] = i;
    std::vector<int> counts(20, 0);
    const int draws = 10000, m = 5;
    for (int d = 0; d < draws; ++d)
        for (int k : random_schedule(pool, m, rng))
            ++counts[static_cast<std::size_t>(k)];
    // expected m/N per draw; 3 sigma of a binomial
    const double p = static_cast<double>(m) / 20.0;
    const double sigma = std::sqrt(draws * p * (1 - p));
    for (int c : counts)
        REQUIRE(std::abs(c - draws * p) <= 3.5 * sigma);
}

TEST_CASE("every method respects the beam capacity and replays deterministically",
          "[scheduler]") {
    const ScenarioConfig cfg = small_config(4, 5, 10, 77);
    SmallWorld w = make_world(cfg);
    for (Method m : {Method::Alg1Strict, Method::Alg1Relax, Method::Sus, Method::Random}) {
        Rng s1(77, "random-schedule"), s2(77, "random-schedule");
        const WindowRun a = run_window(cfg, w.set, w.qos, m, s1);
        const WindowRun b = run_window(cfg, w.set, w.qos, m, s2);
        REQUIRE(a.slots.size() == b.slots.size());
        for (std::size_t t = 0; t < a.slots.size(); ++t) {
            REQUIRE(a.slots[t].allocation.scheduled_ids.size() <= 4);
            REQUIRE(a.slots[t].allocation.scheduled_ids ==
                    b.slots[t].allocation.scheduled_ids);
            REQUIRE(a.slots[t].sum_throughput_mbps == b.slots[t].sum_throughput_mbps);
        }
        // a user whose running total reaches its demand never reappears
        std::vector<double> running(w.set.size(), 0.0);
        std::set<int> done;
        for (const auto &s : a.slots) {
            for (int id : s.allocation.scheduled_ids)
                REQUIRE(done.count(id) == 0);
            for (std::size_t i = 0; i < s.allocation.scheduled_ids.size(); ++i) {
                const auto k = static_cast<std::size_t>(s.allocation.scheduled_ids[i]);
                running[k] += s.user_throughput_mbps[i];
                if (running[k] >= w.qos.demand_mb[k] - 1e-9)
                    done.insert(s.allocation.scheduled_ids[i]);
            }
        }
    }
}

TEST_CASE("power budget holds in every slot", "[scheduler]") {
    const ScenarioConfig cfg = small_config(4, 4, 8, 13);
    SmallWorld w = make_world(cfg);
    for (Method m : {Method::Alg1Strict, Method::Alg1Relax, Method::Sus, Method::Random}) {
        Rng sched(13, "random-schedule");
        const WindowRun run = run_window(cfg, w.set, w.qos, m, sched);
        for (const auto &s : run.slots)
            REQUIRE(s.allocation.total_power() <= cfg.max_power_w * (1.0 + 1e-9));
    }
}
