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

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "satsched/satsched.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitInfeasible = 3;

satsched::ScenarioConfig load_config(const std::string &path) {
    satsched::ScenarioConfig cfg =
        path.empty() ? satsched::ScenarioConfig::desk_default() : satsched::load_config_file(path);
    satsched::apply_env_overrides(cfg);
    return cfg;
}

std::vector<std::uint64_t> parse_seed_list(const std::vector<std::string> &items) {
    std::vector<std::uint64_t> seeds;
    for (const auto &s : items)
        seeds.push_back(std::stoull(s));
    return seeds;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Window scheduling and power allocation for a precoded multi-beam "
                 "satellite forward link"};
    app.require_subcommand(1);

    // run
    std::string run_config, run_method, run_power = "fixed", run_out;
    std::int64_t run_seed = -1;
    auto *run = app.add_subcommand("run", "run one method over a window and export reports");
    run->add_option("--config", run_config, "config file (flat key = value)");
    run->add_option("--method", run_method,
                    "alg1-strict|alg1-relax|alg2-strict|alg2-relax|sus|random")
        ->required();
    run->add_option("--power", run_power, "fixed|alloc (alg2-* force alloc)");
    run->add_option("--seed", run_seed, "override the config rng seed");
    run->add_option("--out", run_out, "output directory")->required();

    // compare
    std::string cmp_config, cmp_out;
    std::vector<std::string> cmp_methods{"alg1-strict", "alg1-relax", "sus", "random"};
    std::vector<std::string> cmp_seeds{"1"};
    auto *cmp = app.add_subcommand(
        "compare", "fixed versus allocated power gains per method, averaged over seeds");
    cmp->add_option("--config", cmp_config, "config file (flat key = value)");
    cmp->add_option("--methods", cmp_methods, "base method ids")->delimiter(',');
    cmp->add_option("--seeds", cmp_seeds, "seed list")->delimiter(',');
    cmp->add_option("--out", cmp_out, "output directory")->required();

    // validate-config
    std::string val_path;
    auto *val = app.add_subcommand("validate-config", "parse, validate and echo a config file");
    val->add_option("path", val_path, "config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            satsched::ScenarioConfig cfg = load_config(run_config);
            if (run_seed >= 0)
                cfg.rng_seed = static_cast<std::uint64_t>(run_seed);
            satsched::validate(cfg);
            satsched::PowerMode mode = satsched::PowerMode::Fixed;
            if (run_power == "alloc")
                mode = satsched::PowerMode::Allocated;
            else if (run_power != "fixed")
                throw satsched::ConfigError("power", "expected fixed|alloc");
            if (run_method.rfind("alg2-", 0) == 0)
                mode = satsched::PowerMode::Allocated;
            const satsched::RunReport rep = satsched::run_benchmark(cfg, run_method, mode);
            satsched::export_report(rep, run_out, "both");
            std::cout << "method " << rep.method << " power " << rep.power_mode << " seed "
                      << rep.seed << "\n"
                      << "  mean sum throughput   " << rep.mean_sum_throughput_mbps << " Mbps\n"
                      << "  mean per-user served  " << rep.mean_per_user_throughput_mb << " Mb\n"
                      << "  mean satisfaction     " << rep.mean_satisfaction_ratio << "\n"
                      << "  demand violations     " << rep.qos_violation_fraction << "\n"
                      << "  reports written to    " << run_out << "\n";
        } else if (cmp->parsed()) {
            satsched::ScenarioConfig cfg = load_config(cmp_config);
            satsched::validate(cfg);
            const satsched::ComparisonTable table =
                satsched::compare_methods(cfg, cmp_methods, parse_seed_list(cmp_seeds));
            satsched::export_comparison_csv(table, cmp_out);
            std::cout << "power-allocation gain (allocated / fixed), averaged over "
                      << table.seeds.size() << " seed(s)\n";
            for (std::size_t i = 0; i < table.methods.size(); ++i)
                std::cout << "  " << table.methods[i] << ": sum "
                          << table.gains[i].sum_throughput << "x, per-user "
                          << table.gains[i].per_user_throughput << "x, satisfaction "
                          << table.gains[i].satisfaction_ratio << "x\n";
            std::cout << "table written to " << cmp_out << "/comparison.csv\n";
        } else if (val->parsed()) {
            satsched::ScenarioConfig cfg = load_config(val_path);
            satsched::validate(cfg);
            for (const auto &[k, v] : satsched::config_snapshot(cfg))
                std::cout << k << " = " << v << "\n";
        }
    } catch (const satsched::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const satsched::InfeasibleAbort &e) {
        std::cerr << "infeasibility abort: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
