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

#ifndef SATSCHED_QOS_HPP
#define SATSCHED_QOS_HPP

#include <cmath>
#include <vector>

#include "satsched/config.hpp"
#include "satsched/rng.hpp"

namespace satsched {

// Per-user demand profile, indexed by user id. Users with a zero slot budget
// have zero demand and are kept out of service entirely.
struct QoSProfile {
    std::vector<double> demand_mb;             // xi_k
    std::vector<int> slot_budget;              // T_k
    std::vector<double> per_slot_target_mbps;  // xi_k / T_k (0 when T_k = 0)
    std::vector<double> sinr_target;           // nu_k

    std::size_t size() const { return demand_mb.size(); }
    bool has_demand(int user_id) const { return demand_mb[static_cast<std::size_t>(user_id)] > 0; }
};

// SINR floor equivalent to the per-slot rate target. The bandwidth-consistent
// conversion inverts R = B log2(1 + SINR); the literal variant drops the
// bandwidth division and is retained as a switch.
inline double sinr_target_for(double demand_mb, int slot_budget, double bandwidth_mhz,
                              NuFormula formula) {
    if (slot_budget <= 0 || demand_mb <= 0)
        return 0.0;
    const double per_slot = demand_mb / slot_budget;
    if (formula == NuFormula::BandwidthConsistent)
        return std::exp2(per_slot / bandwidth_mhz) - 1.0;
    return std::exp2(per_slot) - 1.0;
}

// T_k uniform on [qos_slots_min, qos_slots_max], xi_k = T_k * rate (1 s slots).
inline QoSProfile generate_qos(const ScenarioConfig &cfg, Rng &rng, std::size_t num_users) {
    QoSProfile q;
    q.demand_mb.resize(num_users);
    q.slot_budget.resize(num_users);
    q.per_slot_target_mbps.resize(num_users);
    q.sinr_target.resize(num_users);
    for (std::size_t k = 0; k < num_users; ++k) {
        const int tk = rng.integer_range(cfg.qos_slots_min, cfg.qos_slots_max);
        q.slot_budget[k] = tk;
        q.demand_mb[k] = tk * cfg.qos_rate_per_slot_mbps;
        q.per_slot_target_mbps[k] = tk > 0 ? cfg.qos_rate_per_slot_mbps : 0.0;
        q.sinr_target[k] =
            sinr_target_for(q.demand_mb[k], tk, cfg.bandwidth_mhz, cfg.nu_formula);
    }
    return q;
}

} // namespace satsched

#endif
