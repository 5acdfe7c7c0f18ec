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

#ifndef SATSCHED_BENCH_HPP
#define SATSCHED_BENCH_HPP

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "satsched/poweralloc.hpp"
#include "satsched/scheduler.hpp"

namespace satsched {

enum class PowerMode { Fixed, Allocated };

inline const char *to_string(PowerMode m) { return m == PowerMode::Fixed ? "fixed" : "alloc"; }

struct MethodSpec {
    Method method;
    PowerMode power;
    std::string id;
};

// method ids: alg1-strict, alg1-relax, alg2-strict, alg2-relax, sus, random.
// alg2-* are the alg1 schedulers with per-slot power allocation; sus and
// random take the requested power mode.
inline MethodSpec parse_method(const std::string &id, PowerMode requested) {
    if (id == "alg1-strict")
        return {Method::Alg1Strict, requested, id};
    if (id == "alg1-relax")
        return {Method::Alg1Relax, requested, id};
    if (id == "alg2-strict") {
        if (requested == PowerMode::Fixed)
            throw ConfigError("method", "alg2-strict implies power allocation");
        return {Method::Alg1Strict, PowerMode::Allocated, id};
    }
    if (id == "alg2-relax") {
        if (requested == PowerMode::Fixed)
            throw ConfigError("method", "alg2-relax implies power allocation");
        return {Method::Alg1Relax, PowerMode::Allocated, id};
    }
    if (id == "sus")
        return {Method::Sus, requested, id};
    if (id == "random")
        return {Method::Random, requested, id};
    throw ConfigError("method", "unknown method '" + id + "'");
}

// signalled when the power stage fails where it must not (strict schedules
// guarantee a feasible point by construction)
class InfeasibleAbort : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct RunReport {
    std::string method;
    std::string power_mode;
    std::uint64_t seed = 0;
    int slots = 0;
    std::vector<double> slot_sum_mbps;
    struct UserRow {
        int user_id;
        int beam_id;
        double demand_mb;
        double served_mb;
    };
    std::vector<UserRow> users;
    // summary
    double mean_sum_throughput_mbps = 0;
    double mean_per_user_throughput_mb = 0; // over users scheduled at least once
    double mean_satisfaction_ratio = 0;     // over users with positive demand
    double qos_violation_fraction = 0;      // demand > 0 and served < demand
    long per_slot_target_misses = 0;        // scheduled user-slots below their target
    long scheduled_user_slots = 0;
    double wall_clock_s = 0;
    std::vector<std::pair<std::string, std::string>> config;
};

inline double satisfaction_ratio(double served_mb, double demand_mb) {
    if (demand_mb <= 0)
        throw std::domain_error("satisfaction_ratio: user without demand is excluded");
    return served_mb / demand_mb;
}

// Power stage wired to the scheduler: rebuilds the precoder for the slot
// set, allocates powers, and on infeasibility drops the user with the
// largest rate deficit and retries with the reduced set.
inline PowerStageHook make_power_hook(const ScenarioConfig &cfg, bool allow_drops) {
    return [cfg, allow_drops](const std::vector<int> &ids, const ChannelSet &set,
                              const QoSProfile &qos) -> PowerStageResult {
        PowerStageResult out;
        std::vector<int> current = ids;
        while (!current.empty()) {
            const ChannelMatrix h = set.matrix_for(current);
            const PrecodingMatrix w = rzf_precoder(h, cfg.max_power_w, cfg.noise_variance_w);
            const LinkGains gains = link_gains(h, w, cfg.noise_variance_w);
            std::vector<double> nu(current.size()), targets(current.size());
            for (std::size_t i = 0; i < current.size(); ++i) {
                nu[i] = qos.sinr_target[static_cast<std::size_t>(current[i])];
                targets[i] = qos.per_slot_target_mbps[static_cast<std::size_t>(current[i])];
            }
            const EpigraphProblem ep = build_epigraph(current, gains, nu, cfg.max_power_w);
            PowerAllocOptions opt;
            opt.epsilon_rel = cfg.sca_epsilon_rel;
            opt.max_iterations = cfg.sca_max_iter;
            opt.bandwidth_mhz = cfg.bandwidth_mhz;
            PowerAllocResult res = allocate_power(ep, targets, opt);
            if (res.feasible) {
                out.ids = current;
                out.powers_w = res.allocation.powers_w;
                out.iterations += res.state.iterations;
                out.rates_mbps.resize(current.size());
                for (std::size_t i = 0; i < current.size(); ++i)
                    out.rates_mbps[i] = instantaneous_throughput_mbps(
                        current[i], gains, res.allocation, cfg.bandwidth_mhz);
                return out;
            }
            if (!allow_drops)
                throw InfeasibleAbort("power allocation infeasible for a strict schedule");
            // drop the worst-deficit user and retry
            int worst = res.violating_user_ids.empty() ? current.front()
                                                       : res.violating_user_ids.front();
            double worst_deficit = -1;
            for (std::size_t i = 0; i < res.violating_user_ids.size(); ++i)
                if (res.deficit_mbps[i] > worst_deficit) {
                    worst_deficit = res.deficit_mbps[i];
                    worst = res.violating_user_ids[i];
                }
            out.dropped.push_back(worst);
            detail::erase_value(current, worst);
        }
        return out; // every user dropped: empty slot
    };
}

inline RunReport run_benchmark(const ScenarioConfig &cfg, const std::string &method_id,
                               PowerMode power_mode) {
    validate(cfg);
    const MethodSpec spec = parse_method(method_id, power_mode);
    const auto t0 = std::chrono::steady_clock::now();

    Rng user_rng(cfg.rng_seed, "users");
    Rng qos_rng(cfg.rng_seed, "qos");
    Rng sched_rng(cfg.rng_seed, "random-schedule");
    const std::vector<UserTerminal> users = generate_users(cfg, user_rng);
    const ChannelSet set = build_channel_set(users, cfg);
    const QoSProfile qos = generate_qos(cfg, qos_rng, users.size());

    PowerStageHook hook;
    if (spec.power == PowerMode::Allocated)
        hook = make_power_hook(cfg, spec.method != Method::Alg1Strict);
    const WindowRun run = run_window(cfg, set, qos, spec.method, sched_rng, hook);

    RunReport rep;
    rep.method = spec.id;
    rep.power_mode = to_string(spec.power);
    rep.seed = cfg.rng_seed;
    rep.slots = static_cast<int>(run.slots.size());
    rep.config = config_snapshot(cfg);

    double sum = 0;
    for (const auto &s : run.slots) {
        rep.slot_sum_mbps.push_back(s.sum_throughput_mbps);
        sum += s.sum_throughput_mbps;
        for (std::size_t i = 0; i < s.allocation.scheduled_ids.size(); ++i) {
            ++rep.scheduled_user_slots;
            const auto id = static_cast<std::size_t>(s.allocation.scheduled_ids[i]);
            if (s.user_throughput_mbps[i] <
                qos.per_slot_target_mbps[id] - kQosRateSlackMbps)
                ++rep.per_slot_target_misses;
        }
    }
    rep.mean_sum_throughput_mbps = rep.slots ? sum / rep.slots : 0.0;

    double served_scheduled = 0;
    long scheduled_users = 0;
    double ratio_sum = 0;
    long demand_users = 0, violations = 0;
    for (std::size_t k = 0; k < users.size(); ++k) {
        RunReport::UserRow row;
        row.user_id = users[k].id;
        row.beam_id = users[k].beam_id;
        row.demand_mb = qos.demand_mb[k];
        row.served_mb = run.served_mb[k];
        rep.users.push_back(row);
        if (run.scheduled_ever[k]) {
            served_scheduled += run.served_mb[k];
            ++scheduled_users;
        }
        if (qos.demand_mb[k] > 0) {
            ++demand_users;
            ratio_sum += run.served_mb[k] / qos.demand_mb[k];
            if (run.served_mb[k] < qos.demand_mb[k] - 1e-9)
                ++violations;
        }
    }
    rep.mean_per_user_throughput_mb = scheduled_users ? served_scheduled / scheduled_users : 0.0;
    rep.mean_satisfaction_ratio = demand_users ? ratio_sum / demand_users : 0.0;
    rep.qos_violation_fraction =
        demand_users ? static_cast<double>(violations) / static_cast<double>(demand_users) : 0.0;
    rep.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

namespace detail {

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
}

} // namespace detail

// slot_sum.csv: slot,sum_mbps / per_user.csv: user_id,beam_id,xi_mb,served_mb,ratio
// (the ratio column is empty for users without demand). Byte-stable for
// identical reports.
inline void export_report_csv(const RunReport &rep, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "slot_sum.csv", std::ios::binary);
        if (!out)
            throw std::runtime_error("export_report: cannot write " +
                                     (dir / "slot_sum.csv").string());
        out << "slot,sum_mbps\n";
        for (std::size_t t = 0; t < rep.slot_sum_mbps.size(); ++t)
            out << (t + 1) << "," << detail::format_number(rep.slot_sum_mbps[t]) << "\n";
    }
    {
        std::ofstream out(dir / "per_user.csv", std::ios::binary);
        if (!out)
            throw std::runtime_error("export_report: cannot write " +
                                     (dir / "per_user.csv").string());
        out << "user_id,beam_id,xi_mb,served_mb,ratio\n";
        for (const auto &u : rep.users) {
            out << u.user_id << "," << u.beam_id << "," << detail::format_number(u.demand_mb)
                << "," << detail::format_number(u.served_mb) << ",";
            if (u.demand_mb > 0)
                out << detail::format_number(u.served_mb / u.demand_mb);
            out << "\n";
        }
    }
}

inline nlohmann::ordered_json report_to_json(const RunReport &rep) {
    nlohmann::ordered_json j;
    j["method"] = rep.method;
    j["power_mode"] = rep.power_mode;
    j["seed"] = rep.seed;
    j["slots"] = rep.slots;
    j["mean_sum_throughput_mbps"] = rep.mean_sum_throughput_mbps;
    j["mean_per_user_throughput_mb"] = rep.mean_per_user_throughput_mb;
    j["mean_satisfaction_ratio"] = rep.mean_satisfaction_ratio;
    j["qos_violation_fraction"] = rep.qos_violation_fraction;
    j["per_slot_target_misses"] = rep.per_slot_target_misses;
    j["scheduled_user_slots"] = rep.scheduled_user_slots;
    j["wall_clock_s"] = rep.wall_clock_s;
    nlohmann::ordered_json cfg;
    for (const auto &[k, v] : rep.config)
        cfg[k] = v;
    j["config"] = cfg;
    return j;
}

inline void export_report_json(const RunReport &rep, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "summary.json", std::ios::binary);
    if (!out)
        throw std::runtime_error("export_report: cannot write " +
                                 (dir / "summary.json").string());
    out << report_to_json(rep).dump(2) << "\n";
}

inline void export_report(const RunReport &rep, const std::filesystem::path &dir,
                          const std::string &format) {
    if (format == "csv")
        export_report_csv(rep, dir);
    else if (format == "json")
        export_report_json(rep, dir);
    else if (format == "both") {
        export_report_csv(rep, dir);
        export_report_json(rep, dir);
    } else
        throw ConfigError("format", "expected csv|json|both, got '" + format + "'");
}

// fixed-power versus allocated-power gain ratios for one method
struct GainRow {
    double sum_throughput = 1.0;
    double per_user_throughput = 1.0;
    double satisfaction_ratio = 1.0;
};

inline GainRow gains_between(const RunReport &fixed, const RunReport &allocated) {
    auto ratio = [](double a, double b) { return b == 0.0 ? 1.0 : a / b; };
    GainRow g;
    g.sum_throughput = ratio(allocated.mean_sum_throughput_mbps, fixed.mean_sum_throughput_mbps);
    g.per_user_throughput =
        ratio(allocated.mean_per_user_throughput_mb, fixed.mean_per_user_throughput_mb);
    g.satisfaction_ratio = ratio(allocated.mean_satisfaction_ratio, fixed.mean_satisfaction_ratio);
    return g;
}

struct ComparisonTable {
    std::vector<std::string> methods;
    std::vector<GainRow> gains; // per method, averaged over seeds
    std::vector<std::uint64_t> seeds;
};

// Pairs every method's fixed and allocated runs seed by seed (identical user
// and QoS realizations within a pair) and averages the per-seed gain ratios.
inline ComparisonTable compare_methods(const ScenarioConfig &base,
                                       const std::vector<std::string> &methods,
                                       const std::vector<std::uint64_t> &seeds) {
    if (seeds.empty())
        throw ConfigError("seeds", "at least one seed required");
    ComparisonTable table;
    table.methods = methods;
    table.seeds = seeds;
    for (const auto &m : methods) {
        GainRow acc{0, 0, 0};
        for (std::uint64_t s : seeds) {
            ScenarioConfig cfg = base;
            cfg.rng_seed = s;
            const RunReport fixed = run_benchmark(cfg, m, PowerMode::Fixed);
            const RunReport alloc = run_benchmark(cfg, m, PowerMode::Allocated);
            const GainRow g = gains_between(fixed, alloc);
            acc.sum_throughput += g.sum_throughput;
            acc.per_user_throughput += g.per_user_throughput;
            acc.satisfaction_ratio += g.satisfaction_ratio;
        }
        const double n = static_cast<double>(seeds.size());
        table.gains.push_back(
            {acc.sum_throughput / n, acc.per_user_throughput / n, acc.satisfaction_ratio / n});
    }
    return table;
}

inline void export_comparison_csv(const ComparisonTable &table,
                                  const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "comparison.csv", std::ios::binary);
    if (!out)
        throw std::runtime_error("export_comparison: cannot write " +
                                 (dir / "comparison.csv").string());
    out << "metric";
    for (const auto &m : table.methods)
        out << "," << m;
    out << "\n";
    auto row = [&](const char *name, auto pick) {
        out << name;
        for (const auto &g : table.gains)
            out << "," << detail::format_number(pick(g));
        out << "\n";
    };
    row("sum_throughput_gain", [](const GainRow &g) { return g.sum_throughput; });
    row("per_user_throughput_gain", [](const GainRow &g) { return g.per_user_throughput; });
    row("satisfaction_ratio_gain", [](const GainRow &g) { return g.satisfaction_ratio; });
}

} // namespace satsched

#endif
