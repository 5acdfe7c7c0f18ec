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

#include <complex>

#include "satsched/precoding.hpp"
#include "satsched/scheduler.hpp"

using namespace satsched;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ChannelMatrix matrix_from(const Eigen::MatrixXcd &h) {
    ChannelMatrix cm;
    cm.h = h;
    cm.amplitude = h.cwiseAbs();
    cm.phases.assign(static_cast<std::size_t>(h.cols()), {1.0, 0.0});
    cm.column_user_ids.resize(static_cast<std::size_t>(h.cols()));
    for (int j = 0; j < h.cols(); ++j)
        cm.column_user_ids[static_cast<std::size_t>(j)] = j;
    return cm;
}

Eigen::MatrixXcd random_channel(int m, int k, unsigned seed) {
    Rng rng(seed, "test-channel");
    Eigen::MatrixXcd h(m, k);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j)
            h(i, j) = std::complex<double>(rng.uniform(-1, 1), rng.uniform(-1, 1));
    return h;
}

} // namespace

TEST_CASE("single-user RZF is the matched filter", "[precoding]") {
    const Eigen::MatrixXcd h = random_channel(7, 1, 1);
    const PrecodingMatrix w = rzf_precoder(matrix_from(h), 70.0, 1.5);
    const Eigen::VectorXcd expect = h.col(0) / h.col(0).norm();
    REQUIRE((w.w.col(0) - expect).norm() < 1e-12);
}

TEST_CASE("orthogonal channels decouple and MRT equals ZF", "[precoding]") {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(4, 3);
    h(0, 0) = {2.0, 0.0};
    h(1, 1) = {0.0, 1.5};
    h(2, 2) = {0.7, 0.7};
    const ChannelMatrix cm = matrix_from(h);
    const PrecodingMatrix rzf = rzf_precoder(cm, 10.0, 0.1);
    const PrecodingMatrix mrt = mrt_precoder(cm);
    const PrecodingMatrix zf = zf_precoder(cm);
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) {
            if (j == k)
                continue;
            REQUIRE(std::abs(h.col(k).adjoint().dot(rzf.w.col(j))) < 1e-12);
        }
    REQUIRE((mrt.w - zf.w).norm() < 1e-12);
}

TEST_CASE("RZF matches a direct dense inverse", "[precoding]") {
    const Eigen::MatrixXcd h = random_channel(7, 4, 2);
    const double p_max = 70.0, noise = 0.35;
    const PrecodingMatrix w = rzf_precoder(matrix_from(h), p_max, noise);

    Eigen::MatrixXcd gram = h.adjoint() * h;
    gram.diagonal().array() += noise * 4.0 / p_max;
    const Eigen::MatrixXcd inv = gram.inverse();
    REQUIRE((gram * inv - Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-9);

    Eigen::MatrixXcd raw = h * inv;
    REQUIRE_THAT(w.normalization, WithinRel(raw.squaredNorm(), 1e-9));
    for (int j = 0; j < 4; ++j) {
        raw.col(j) /= raw.col(j).norm();
        REQUIRE((raw.col(j) - w.w.col(j)).norm() < 1e-9);
    }
}

TEST_CASE("every precoder returns unit-norm columns", "[precoding]") {
    const Eigen::MatrixXcd h = random_channel(7, 5, 3);
    const ChannelMatrix cm = matrix_from(h);
    for (const auto &w : {rzf_precoder(cm, 70.0, 0.2), mrt_precoder(cm), zf_precoder(cm)})
        for (int j = 0; j < w.w.cols(); ++j)
            REQUIRE_THAT(w.w.col(j).norm(), WithinAbs(1.0, 1e-9));
}

TEST_CASE("more users than beams is a dimension error", "[precoding]") {
    const Eigen::MatrixXcd h = random_channel(3, 4, 4);
    REQUIRE_THROWS_AS(rzf_precoder(matrix_from(h), 10.0, 0.1), std::invalid_argument);
}

TEST_CASE("ZF flags or rejects near-singular channels", "[precoding]") {
    Eigen::MatrixXcd h = random_channel(5, 2, 5);
    h.col(1) = h.col(0); // exactly repeated user direction
    bool rejected = false, warned = false;
    try {
        warned = zf_precoder(matrix_from(h)).condition_warning;
    } catch (const SingularMatrixError &) {
        rejected = true;
    }
    REQUIRE((rejected || warned));

    h.col(1) = h.col(0) * (1.0 + 1e-9);
    try {
        REQUIRE(zf_precoder(matrix_from(h)).condition_warning);
    } catch (const SingularMatrixError &) {
        // acceptable as well
    }
}

TEST_CASE("ZF cancels interference on full-rank channels", "[precoding]") {
    const Eigen::MatrixXcd h = random_channel(6, 4, 6);
    const ChannelMatrix cm = matrix_from(h);
    const LinkGains g = link_gains(cm, zf_precoder(cm), 0.01);
    for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 4; ++j) {
            if (j == k)
                REQUIRE(g.z(k, j) > 0.0);
            else
                REQUIRE(g.z(k, j) < 1e-9);
        }
}

namespace {

LinkGains hand_gains(const Eigen::MatrixXd &z, double noise) {
    LinkGains g;
    g.z = z;
    g.noise_w = noise;
    g.user_ids.resize(static_cast<std::size_t>(z.rows()));
    for (int i = 0; i < z.rows(); ++i)
        g.user_ids[static_cast<std::size_t>(i)] = i;
    return g;
}

} // namespace

TEST_CASE("SINR arithmetic", "[precoding]") {
    // single user with p z = sigma^2
    LinkGains g1 = hand_gains(Eigen::MatrixXd::Constant(1, 1, 2.0), 1.0);
    REQUIRE_THAT(sinr(0, g1, {{0}, {0.5}}), WithinRel(1.0, 1e-14));
    REQUIRE(sinr(0, g1, {{0}, {0.0}}) == 0.0);

    // two users: p1 z11 = 4, p2 z12 = 1, sigma^2 = 1 -> SINR_1 = 2
    Eigen::MatrixXd z(2, 2);
    z << 4.0, 1.0, //
        0.5, 3.0;
    LinkGains g2 = hand_gains(z, 1.0);
    REQUIRE_THAT(sinr(0, g2, {{0, 1}, {1.0, 1.0}}), WithinRel(2.0, 1e-14));

    REQUIRE_THROWS_AS(sinr(5, g2, {{0, 1}, {1.0, 1.0}}), std::out_of_range);
}

TEST_CASE("SINR is invariant to a common power-and-noise scale", "[precoding]") {
    Eigen::MatrixXd z(2, 2);
    z << 4.0, 0.3, //
        0.8, 2.5;
    const double s0 = sinr(0, hand_gains(z, 0.7), {{0, 1}, {2.0, 3.0}});
    const double c = 37.5;
    const double s1 = sinr(0, hand_gains(z * c, 0.7 * c), {{0, 1}, {2.0, 3.0}});
    REQUIRE_THAT(s1, WithinRel(s0, 1e-12));
}

TEST_CASE("throughput follows the Shannon map", "[precoding]") {
    LinkGains g = hand_gains(Eigen::MatrixXd::Constant(1, 1, 1.0), 1.0);
    REQUIRE_THAT(instantaneous_throughput_mbps(0, g, {{0}, {1.0}}, 500.0),
                 WithinRel(500.0, 1e-12));
    REQUIRE_THAT(instantaneous_throughput_mbps(0, g, {{0}, {3.0}}, 500.0),
                 WithinRel(1000.0, 1e-12));
    REQUIRE(instantaneous_throughput_mbps(0, g, {{0}, {0.0}}, 500.0) == 0.0);
}

TEST_CASE("own power helps, interference hurts", "[precoding]") {
    Eigen::MatrixXd z(2, 2);
    z << 4.0, 0.3, //
        0.8, 2.5;
    const LinkGains g = hand_gains(z, 0.4);
    const double base = instantaneous_throughput_mbps(0, g, {{0, 1}, {1.0, 1.0}}, 500.0);
    REQUIRE(instantaneous_throughput_mbps(0, g, {{0, 1}, {1.5, 1.0}}, 500.0) > base);
    REQUIRE(instantaneous_throughput_mbps(0, g, {{0, 1}, {1.0, 1.5}}, 500.0) < base);
}

TEST_CASE("aggregated throughput sums the scheduled slots", "[precoding]") {
    std::vector<SlotResult> log(3);
    log[0].allocation.scheduled_ids = {1, 2};
    log[0].user_throughput_mbps = {500.0, 700.0};
    log[1].allocation.scheduled_ids = {2};
    log[1].user_throughput_mbps = {650.0};
    log[2].allocation.scheduled_ids = {1};
    log[2].user_throughput_mbps = {500.0};
    REQUIRE(aggregated_throughput_mb(3, log) == 0.0);
    REQUIRE_THAT(aggregated_throughput_mb(1, log), WithinRel(1000.0, 1e-12));
    REQUIRE_THAT(aggregated_throughput_mb(2, log), WithinRel(1350.0, 1e-12));

    // independent accumulation pass over a randomized log
    Rng rng(8);
    std::vector<SlotResult> big(20);
    std::vector<double> expect(6, 0.0);
    for (auto &s : big) {
        for (int id = 0; id < 6; ++id) {
            if (rng.uniform() < 0.4) {
                const double rate = rng.uniform(0, 900);
                s.allocation.scheduled_ids.push_back(id);
                s.user_throughput_mbps.push_back(rate);
                expect[static_cast<std::size_t>(id)] += rate;
            }
        }
    }
    for (int id = 0; id < 6; ++id)
        REQUIRE_THAT(aggregated_throughput_mb(id, big),
                     WithinAbs(expect[static_cast<std::size_t>(id)], 1e-9));
}
